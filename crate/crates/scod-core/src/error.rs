use thiserror::Error;

/// Errors surfaced by construction, verification and simulation operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("expected {expected} symbol values, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("x = {x} is not admissible for a = {a}: need 0 < x <= a and x not a power of two")]
    NotAdmissible { x: u32, a: u32 },

    #[error("a = {a} out of supported range {min}..={max}")]
    OrderOutOfRange { a: u32, min: u32, max: u32 },

    #[error("matrix dimensions {left} and {right} do not match")]
    DimensionMismatch { left: usize, right: usize },

    #[error("row combination writes a second term into cell ({row},{col}); rows are not non-intersecting")]
    OverlappingRows { row: usize, col: usize },

    #[error("cell ({row},{col}) does not reduce to an entry in {{-1,0,1}}")]
    NotSigned { row: usize, col: usize },

    #[error("minimum Hamming distance needs at least two elements")]
    SetTooSmall,

    #[error("rows have non-uniform support; no single scalar metric exists")]
    NonUniformRows,

    #[error("variable index {var} outside 1..={k}")]
    VariableOutOfRange { var: u32, k: usize },
}
