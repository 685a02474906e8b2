//! Builders for the base design family G, the signed premultipliers Q, and
//! the reduced-zero family H by three cross-validating routes: coset
//! partition with Hadamard blocks, premultiplication, and block recursion.

use crate::coeff::{is_pow2, Unit};
use crate::combinatorics::{
    compute_ma, dimension_exponent, lift_index, nonzero_columns, partition_classes,
    sylvester_hadamard,
};
use crate::design::{DesignMatrix, Entry, SymbolicTerm};
use crate::error::Error;
use crate::signed::SignedMatrix;

/// Which pipeline produces the reduced-zero design.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConstructionRoute {
    Partition,
    Premultiply,
    Recursive,
}

impl std::str::FromStr for ConstructionRoute {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "partition" => Ok(ConstructionRoute::Partition),
            "premultiply" => Ok(ConstructionRoute::Premultiply),
            "recursive" => Ok(ConstructionRoute::Recursive),
            other => Err(format!(
                "unknown route '{other}' (expected partition|premultiply|recursive)"
            )),
        }
    }
}

/// The 2x2 base design [[x1, -x2*], [x2, x1*]].
fn base_design() -> DesignMatrix {
    let mut d = DesignMatrix::zero(2, 2, 0);
    d.set_entry_unchecked(0, 0, Entry::unit(Unit::One, 1, false));
    d.set_entry_unchecked(0, 1, Entry::unit(Unit::MinusOne, 2, true));
    d.set_entry_unchecked(1, 0, Entry::unit(Unit::One, 2, false));
    d.set_entry_unchecked(1, 1, Entry::unit(Unit::One, 1, true));
    d
}

/// The classical rate-(a+1)/2^a design of order 2^a in a+1 variables, built
/// by block doubling: [[G, -x* I], [x I, G^H]].
pub fn build_g(a: u32) -> DesignMatrix {
    assert!(a >= 1, "order exponent must be at least 1");
    let mut g = base_design();
    for step in 2..=a {
        let prev = g;
        let h = prev.n();
        let var = step + 1;
        g = DesignMatrix::from_fn(2 * h, step as usize + 1, 0, |r, c| {
            match (r < h, c < h) {
                (true, true) => prev.entry(r, c).clone(),
                (true, false) => {
                    if c - h == r {
                        Entry::unit(Unit::MinusOne, var, true)
                    } else {
                        Entry::zero()
                    }
                }
                (false, true) => {
                    if r - h == c {
                        Entry::unit(Unit::One, var, false)
                    } else {
                        Entry::zero()
                    }
                }
                (false, false) => prev.entry(c - h, r - h).conjugated(),
            }
        });
    }
    g
}

/// Closed-form cell of `build_g(a)`, usable without materializing the
/// matrix. Cross-checked against the block recursion in tests.
pub fn g_cell(a: u32, row: u64, col: u64) -> Entry {
    let (mut a, mut r, mut c) = (a, row, col);
    let mut conjugate = false;
    let emit = |t: SymbolicTerm, conjugate: bool| {
        if conjugate {
            Entry::single(t.conjugated())
        } else {
            Entry::single(t)
        }
    };
    loop {
        if a == 1 {
            let t = match (r, c) {
                (0, 0) => SymbolicTerm::unit(Unit::One, 1, false),
                (0, 1) => SymbolicTerm::unit(Unit::MinusOne, 2, true),
                (1, 0) => SymbolicTerm::unit(Unit::One, 2, false),
                _ => SymbolicTerm::unit(Unit::One, 1, true),
            };
            return emit(t, conjugate);
        }
        let h = 1u64 << (a - 1);
        match (r < h, c < h) {
            (true, true) => a -= 1,
            (true, false) => {
                return if c - h == r {
                    emit(SymbolicTerm::unit(Unit::MinusOne, a + 1, true), conjugate)
                } else {
                    Entry::zero()
                };
            }
            (false, true) => {
                return if r - h == c {
                    emit(SymbolicTerm::unit(Unit::One, a + 1, false), conjugate)
                } else {
                    Entry::zero()
                };
            }
            (false, false) => {
                let (nr, nc) = (c - h, r - h);
                r = nr;
                c = nc;
                conjugate = !conjugate;
                a -= 1;
            }
        }
    }
}

/// The 2^x-by-2^x paired-sign block for an admissible index x: with
/// x' = lift_index(x), rows i < 2^(x-1) carry (i,i)=1, (i, i^x')=1,
/// (i^x', i)=1, (i^x', i^x')=-1.
pub fn build_qx(a: u32, x: u32) -> Result<SignedMatrix, Error> {
    if x == 0 || x > a || is_pow2(x as u64) {
        return Err(Error::NotAdmissible { x, a });
    }
    let n = 1usize << x;
    let xp = lift_index(x);
    let mut q = SignedMatrix::zero(n, 0);
    for i in 0..(n / 2) as u64 {
        let ip = i ^ xp;
        q.set(i as usize, i as usize, 1);
        q.set(i as usize, ip as usize, 1);
        q.set(ip as usize, i as usize, 1);
        q.set(ip as usize, ip as usize, -1);
    }
    Ok(q)
}

/// `I_{2^(a-x)} (x) Q_x`, the order-2^a lift of the block above.
pub fn build_q_tilde(a: u32, x: u32) -> Result<SignedMatrix, Error> {
    Ok(build_qx(a, x)?.tensor_identity_left(1usize << (a - x)))
}

/// The full premultiplier: the (order-independent) product of all lifted
/// blocks for admissible indices. Identity when no index is admissible.
pub fn build_q(a: u32) -> SignedMatrix {
    let ma = compute_ma(a);
    let mut q = SignedMatrix::identity(1usize << a);
    for &x in &ma.m_a {
        let qt = build_q_tilde(a, x).expect("members of the admissible set are valid");
        q = q
            .mul(&qt)
            .expect("premultiplier products stay within signed entries");
    }
    q
}

/// Signed row combination `m * d` with the structural safety check: every
/// output cell may be written at most once, otherwise the rows being
/// combined were not non-intersecting and the result would hold linear
/// combinations.
pub fn signed_premultiply(m: &SignedMatrix, d: &DesignMatrix) -> Result<DesignMatrix, Error> {
    if m.n() != d.n() {
        return Err(Error::DimensionMismatch {
            left: m.n(),
            right: d.n(),
        });
    }
    let n = d.n();
    let supports: Vec<Vec<usize>> = (0..n).map(|r| d.row_support(r)).collect();
    let mut out = DesignMatrix::zero(n, d.k(), d.scale_num() + m.scale_num());
    for r in 0..n {
        for (t, sign) in m.nonzeros_in_row(r) {
            for &c in &supports[t] {
                if !out.entry(r, c).is_zero() {
                    return Err(Error::OverlappingRows { row: r, col: c });
                }
                let e = d.entry(t, c);
                let e = if sign < 0 { e.negated() } else { e.clone() };
                out.set_entry_unchecked(r, c, e);
            }
        }
    }
    Ok(out)
}

/// Reduced-zero design via premultiplication: 2^(-(a-d)/2) * Q * G.
pub fn build_h_premultiply(a: u32) -> Result<DesignMatrix, Error> {
    let d = dimension_exponent(a);
    let g = build_g(a);
    let q = build_q(a).with_scale_num(-((a - d) as i32));
    signed_premultiply(&q, &g)
}

/// Row gather order of the partition route: classes by ascending minimum,
/// rows ascending within each class.
pub fn partition_permutation(a: u32) -> Vec<usize> {
    partition_classes(a)
        .iter()
        .flat_map(|c| c.elements().iter().map(|&e| e as usize))
        .collect()
}

/// Reduced-zero design via the coset partition: gather each class's rows
/// into a block, multiply every block by the Sylvester Hadamard matrix of
/// size 2^(a-d), and scale by 2^(-(a-d)/2).
pub fn build_h_partition(a: u32) -> Result<DesignMatrix, Error> {
    let d = dimension_exponent(a);
    let g = build_g(a);
    let perm = SignedMatrix::permutation(&partition_permutation(a));
    let blocks = sylvester_hadamard(a - d).tensor_identity_left(1usize << d);
    let m = blocks
        .mul(&perm)
        .expect("permuted Hadamard blocks stay signed")
        .with_scale_num(-((a - d) as i32));
    signed_premultiply(&m, &g)
}

/// Reduced-zero design via block recursion. Each step doubles the order:
/// the new block matrix reuses the previous design, its unit evaluation
/// (an exact signed matrix) and its adjoint relabeling; when the new
/// variable count is not a power of two one more paired-sign block is
/// applied with a 1/sqrt(2) factor.
pub fn build_h_recursive(a: u32) -> Result<DesignMatrix, Error> {
    assert!(a >= 1);
    let mut h = base_design();
    for prev in 1..a {
        let step = prev + 1; // building order 2^step in step+1 variables
        let n = h.n();
        let var = step + 1;
        let units = h.unit_evaluation()?;
        let relabeled = h.adjoint_relabeling();
        let scale = h.scale_num();
        let block = DesignMatrix::from_fn(2 * n, step as usize + 1, scale, |r, c| {
            match (r < n, c < n) {
                (true, true) => h.entry(r, c).clone(),
                (true, false) => match units.get(r, c - n) {
                    0 => Entry::zero(),
                    s => {
                        let e = Entry::unit(Unit::MinusOne, var, true);
                        if s < 0 {
                            e.negated()
                        } else {
                            e
                        }
                    }
                },
                (false, true) => match units.get(r - n, c) {
                    0 => Entry::zero(),
                    s => {
                        let e = Entry::unit(Unit::One, var, false);
                        if s < 0 {
                            e.negated()
                        } else {
                            e
                        }
                    }
                },
                (false, false) => relabeled.entry(r - n, c - n).clone(),
            }
        });
        h = if is_pow2(step as u64) {
            block
        } else {
            let q = build_qx(step, step)?.with_scale_num(-1);
            signed_premultiply(&q, &block)?
        };
    }
    Ok(h)
}

pub fn build_h(a: u32, route: ConstructionRoute) -> Result<DesignMatrix, Error> {
    match route {
        ConstructionRoute::Partition => build_h_partition(a),
        ConstructionRoute::Premultiply => build_h_premultiply(a),
        ConstructionRoute::Recursive => build_h_recursive(a),
    }
}

/// Row-streaming view of the reduced-zero design, computed cell-by-cell
/// from closed forms. Lets callers render very large orders without holding
/// the matrix; cross-checked against the materialized routes in tests.
pub struct HRowStream {
    a: u32,
    scale_num: i32,
    /// (span element, parity mask): the sign of the row combination for
    /// span element s on row i is (-1)^popcount(i & mask).
    span_signs: Vec<(u64, u64)>,
}

impl HRowStream {
    pub fn new(a: u32) -> HRowStream {
        let ma = compute_ma(a);
        let gens = &ma.m_a_prime;
        let full_mask: u64 = ma.m_a.iter().map(|&x| 1u64 << (x - 1)).sum();
        let mut span_signs = Vec::with_capacity(1 << gens.len());
        for subset in 0u64..(1 << gens.len()) {
            let mut s = 0u64;
            let mut used = 0u64;
            for (bit, (&g, &x)) in gens.iter().zip(ma.m_a.iter()).enumerate() {
                if subset & (1 << bit) != 0 {
                    s ^= g;
                    used |= 1u64 << (x - 1);
                }
            }
            span_signs.push((s, full_mask & !used));
        }
        span_signs.sort_unstable();
        HRowStream {
            a,
            scale_num: -((a - ma.d) as i32),
            span_signs,
        }
    }

    pub fn n(&self) -> u64 {
        1u64 << self.a
    }

    pub fn k(&self) -> usize {
        self.a as usize + 1
    }

    pub fn scale_num(&self) -> i32 {
        self.scale_num
    }

    /// Non-zero cells of one row, sorted by column.
    pub fn row(&self, i: u64) -> Vec<(u64, Entry)> {
        let mut out = Vec::with_capacity(self.span_signs.len() * (self.a as usize + 1));
        for &(s, mask) in &self.span_signs {
            let negate = (i & mask).count_ones() % 2 == 1;
            let src = i ^ s;
            for &c in nonzero_columns(self.a, src)
                .expect("row index in range")
                .elements()
            {
                let e = g_cell(self.a, src, c);
                out.push((c, if negate { e.negated() } else { e }));
            }
        }
        out.sort_by_key(|(c, _)| *c);
        out
    }
}

/// Per-row non-zero count shared by every row and column of the reduced
/// design: (a+1) * 2^(a-d).
pub fn h_row_nonzeros(a: u32) -> u64 {
    let d = dimension_exponent(a);
    (a as u64 + 1) << (a - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::span_s;
    use crate::gram::is_scod;

    #[test]
    fn base_cases_match_known_designs() {
        let g1 = build_g(1);
        assert_eq!(g1.n(), 2);
        assert_eq!(g1.k(), 2);
        let t = g1.entry(0, 1).terms()[0];
        assert_eq!((t.var, t.conj), (2, true));
        assert_eq!(t.coeff.unit(), Some(Unit::MinusOne));
    }

    #[test]
    fn g2_and_g3_spot_cells() {
        let g2 = build_g(2);
        assert!(g2.entry(3, 0).is_zero());
        assert_eq!(g2.entry(3, 1).unit_term(), Some((3, false, Unit::One)));
        let g3 = build_g(3);
        assert_eq!(g3.entry(0, 4).unit_term(), Some((4, true, Unit::MinusOne)));
    }

    #[test]
    fn g_cells_match_block_recursion() {
        for a in 1..=6 {
            let g = build_g(a);
            for r in 0..g.n() as u64 {
                for c in 0..g.n() as u64 {
                    assert_eq!(&g_cell(a, r, c), g.entry(r as usize, c as usize));
                }
            }
        }
    }

    #[test]
    fn base_family_is_orthogonal_and_restricted() {
        for a in 1..=5 {
            let g = build_g(a);
            assert!(is_scod(&g), "a = {a}");
            assert!(g.is_restricted());
        }
    }

    #[test]
    fn adjoint_relabeling_equals_conj_transpose_on_base_family() {
        for a in 1..=4 {
            let g = build_g(a);
            assert_eq!(g.conj_transpose(), g.adjoint_relabeling());
        }
    }

    #[test]
    fn paired_sign_blocks_are_symmetric_and_orthogonal() {
        for (a, x) in [(4, 3), (5, 3), (5, 5), (7, 6)] {
            let q = build_qx(a, x).unwrap();
            assert!(q.is_symmetric());
            assert!(q.is_scaled_orthogonal(1));
        }
        assert_eq!(
            build_qx(4, 4),
            Err(Error::NotAdmissible { x: 4, a: 4 })
        );
        assert_eq!(
            build_qx(3, 5),
            Err(Error::NotAdmissible { x: 5, a: 3 })
        );
    }

    #[test]
    fn paired_sign_block_row_zero_for_x5() {
        let q = build_qx(5, 5).unwrap();
        assert_eq!(q.row_support(0), vec![0, 25]);
        assert_eq!(q.get(0, 0), 1);
        assert_eq!(q.get(0, 25), 1);
    }

    #[test]
    fn premultiplier_degenerates_to_identity() {
        assert_eq!(build_q(2), SignedMatrix::identity(4));
        assert_eq!(build_q(1), SignedMatrix::identity(2));
    }

    #[test]
    fn premultiplier_row_supports_are_span_cosets() {
        for a in 3..=7 {
            let q = build_q(a);
            let span = span_s(a);
            for i in 0..q.n() as u64 {
                let mut expect: Vec<usize> =
                    span.elements().iter().map(|&s| (s ^ i) as usize).collect();
                expect.sort_unstable();
                assert_eq!(q.row_support(i as usize), expect);
            }
            let d = dimension_exponent(a);
            assert!(q.is_scaled_orthogonal(a - d));
        }
    }

    #[test]
    fn premultiply_route_reduces_zeros() {
        let h3 = build_h_premultiply(3).unwrap();
        assert_eq!(h3.scale_num(), -1);
        assert_eq!(h3.zero_count(), 0);
        assert!(is_scod(&h3));
        assert!(h3.is_restricted());
    }

    #[test]
    fn partition_order_for_a3() {
        assert_eq!(partition_permutation(3), vec![0, 7, 1, 6, 2, 5, 3, 4]);
    }

    #[test]
    fn routes_agree_small_orders() {
        for a in 1..=6 {
            let prem = build_h_premultiply(a).unwrap();
            let rec = build_h_recursive(a).unwrap();
            assert_eq!(prem, rec, "a = {a}");
            assert!(is_scod(&prem));
        }
    }

    #[test]
    fn row_stream_matches_premultiply() {
        for a in 1..=6 {
            let h = build_h_premultiply(a).unwrap();
            let stream = HRowStream::new(a);
            assert_eq!(stream.scale_num(), h.scale_num());
            for i in 0..h.n() {
                let cells = stream.row(i as u64);
                assert_eq!(cells.len() as u64, h_row_nonzeros(a));
                for (c, e) in cells {
                    assert_eq!(&e, h.entry(i, c as usize));
                }
                assert_eq!(h.row_support(i).len() as u64, h_row_nonzeros(a));
            }
        }
    }

    #[test]
    fn overlapping_rows_are_rejected() {
        // Combining two intersecting rows of the base design must abort.
        let g = build_g(2);
        let mut m = SignedMatrix::zero(4, 0);
        m.set(0, 0, 1);
        m.set(0, 1, 1); // rows 0 and 1 share support columns
        let err = signed_premultiply(&m, &g).unwrap_err();
        assert!(matches!(err, Error::OverlappingRows { .. }));
    }
}
