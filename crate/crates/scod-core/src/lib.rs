//! Exact construction, verification and simulation of square complex
//! orthogonal designs with reduced zero entries.
//!
//! The crate builds the classical rate-(a+1)/2^a designs for 2^a antennas,
//! derives signed premultipliers that condense their zero pattern without
//! raising signaling complexity, certifies every result symbolically over
//! exact rationals, quantifies peak-to-average power metrics, and measures
//! symbol error rates over quasi-static Rayleigh fading.

pub mod analysis;
pub mod coeff;
pub mod combinatorics;
pub mod construction;
pub mod design;
pub mod error;
pub mod format;
pub mod gram;
pub mod reference;
pub mod signed;
pub mod sim;

pub use design::{DesignMatrix, Entry, SymbolicTerm};
pub use error::Error;
