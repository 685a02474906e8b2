//! Index-set machinery behind the zero-reducing construction: row supports,
//! the admissible index sets and their lifted images, XOR spans, coset
//! partitions and Sylvester Hadamard blocks.

use crate::coeff::is_pow2;
use crate::error::Error;
use crate::signed::SignedMatrix;

/// Sorted subset of [0, 2^a).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexSet {
    a: u32,
    elements: Vec<u64>,
}

impl IndexSet {
    pub fn new(a: u32, mut elements: Vec<u64>) -> Result<IndexSet, Error> {
        elements.sort_unstable();
        elements.dedup();
        let bound = 1u64 << a;
        if let Some(&e) = elements.iter().find(|&&e| e >= bound) {
            return Err(Error::IndexOutOfRange {
                index: e as usize,
                bound: bound as usize,
            });
        }
        Ok(IndexSet { a, elements })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, v: u64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.elements.iter().all(|&v| !other.contains(v))
    }

    pub fn intersects(&self, other: &IndexSet) -> bool {
        !self.is_disjoint(other)
    }
}

/// d such that 2^(d-1) <= a < 2^d.
pub fn dimension_exponent(a: u32) -> u32 {
    assert!(a >= 1);
    u32::BITS - a.leading_zeros()
}

/// Column indices of the non-zero entries of row i of the base design:
/// {i} together with {i XOR 2^j | j = 0..a-1}; always a+1 indices.
pub fn nonzero_columns(a: u32, i: u64) -> Result<IndexSet, Error> {
    if i >= 1u64 << a {
        return Err(Error::IndexOutOfRange {
            index: i as usize,
            bound: 1usize << a,
        });
    }
    let mut v = Vec::with_capacity(a as usize + 1);
    v.push(i);
    for j in 0..a {
        v.push(i ^ (1u64 << j));
    }
    IndexSet::new(a, v)
}

/// The admissible indices for order a and their lifted images.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MaPair {
    pub a: u32,
    pub d: u32,
    pub m_a: Vec<u32>,
    pub m_a_prime: Vec<u64>,
}

/// Lift of an admissible index x: 2^(x-1) plus, for every set bit j of x,
/// the bit 2^(2^j - 1). Injective, and Hamming weight grows by exactly one,
/// which is what gives the span below its minimum distance of three.
pub fn lift_index(x: u32) -> u64 {
    debug_assert!(x >= 1 && !is_pow2(x as u64));
    let mut out = 1u64 << (x - 1);
    for j in 0..32 {
        if x & (1 << j) != 0 {
            out |= 1u64 << ((1u64 << j) - 1);
        }
    }
    out
}

/// Indices 0 < x <= a that are not powers of two, with their lifts.
/// The set always has a - d elements.
pub fn compute_ma(a: u32) -> MaPair {
    assert!(a >= 1);
    let d = dimension_exponent(a);
    let m_a: Vec<u32> = (1..=a).filter(|&x| !is_pow2(x as u64)).collect();
    let m_a_prime: Vec<u64> = m_a.iter().map(|&x| lift_index(x)).collect();
    debug_assert_eq!(m_a.len() as u32, a - d);
    MaPair {
        a,
        d,
        m_a,
        m_a_prime,
    }
}

/// XOR-span of the lifted index set inside [0, 2^a); cardinality 2^(a-d).
pub fn span_s(a: u32) -> IndexSet {
    let ma = compute_ma(a);
    let mut span = vec![0u64];
    for &g in &ma.m_a_prime {
        // Lifts are linearly independent (each owns a private high bit), so
        // the span doubles with every generator.
        let mut next = Vec::with_capacity(span.len() * 2);
        for &s in &span {
            next.push(s);
            next.push(s ^ g);
        }
        span = next;
    }
    let set = IndexSet::new(a, span).expect("span stays inside the ambient cube");
    debug_assert_eq!(set.len(), 1usize << (a - ma.d));
    set
}

/// Minimum pairwise Hamming distance; needs at least two elements.
pub fn min_hamming_distance(set: &IndexSet) -> Result<u32, Error> {
    let e = set.elements();
    if e.len() < 2 {
        return Err(Error::SetTooSmall);
    }
    let mut best = u32::MAX;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            best = best.min((e[i] ^ e[j]).count_ones());
        }
    }
    Ok(best)
}

/// Cosets of the span in [0, 2^a), ordered by minimal representative.
/// There are 2^d classes of 2^(a-d) elements each.
pub fn partition_classes(a: u32) -> Vec<IndexSet> {
    let span = span_s(a);
    let total = 1u64 << a;
    let mut seen = vec![false; total as usize];
    let mut classes = Vec::with_capacity(1 << dimension_exponent(a));
    for v in 0..total {
        if seen[v as usize] {
            continue;
        }
        let members: Vec<u64> = span.elements().iter().map(|&s| s ^ v).collect();
        for &m in &members {
            seen[m as usize] = true;
        }
        classes.push(IndexSet::new(a, members).expect("coset stays in range"));
    }
    classes
}

/// Sylvester Hadamard matrix of size 2^m with H^T H = 2^m I.
pub fn sylvester_hadamard(m: u32) -> SignedMatrix {
    let mut h = SignedMatrix::identity(1);
    for _ in 0..m {
        let n = h.n();
        let mut next = SignedMatrix::zero(2 * n, 0);
        for r in 0..n {
            for c in 0..n {
                let v = h.get(r, c);
                if v != 0 {
                    next.set(r, c, v);
                    next.set(r, c + n, v);
                    next.set(r + n, c, v);
                    next.set(r + n, c + n, -v);
                }
            }
        }
        h = next;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(a: u32, v: &[u64]) -> IndexSet {
        IndexSet::new(a, v.to_vec()).unwrap()
    }

    #[test]
    fn row_support_examples() {
        assert_eq!(nonzero_columns(2, 0).unwrap(), set(2, &[0, 1, 2]));
        assert_eq!(nonzero_columns(3, 5).unwrap(), set(3, &[1, 4, 5, 7]));
        let n0 = nonzero_columns(3, 0).unwrap();
        let n7 = nonzero_columns(3, 7).unwrap();
        assert!(n0.is_disjoint(&n7));
        assert!(nonzero_columns(3, 8).is_err());
    }

    #[test]
    fn admissible_sets_match_known_rows() {
        let m5 = compute_ma(5);
        assert_eq!(m5.m_a, vec![3, 5]);
        assert_eq!(m5.m_a_prime, vec![7, 25]);
        assert_eq!(m5.d, 3);

        let m9 = compute_ma(9);
        assert_eq!(m9.m_a, vec![3, 5, 6, 7, 9]);
        assert_eq!(m9.m_a_prime, vec![7, 25, 42, 75, 385]);
        assert_eq!(m9.d, 4);

        let m2 = compute_ma(2);
        assert!(m2.m_a.is_empty());
        assert!(m2.m_a_prime.is_empty());
    }

    #[test]
    fn lift_raises_weight_by_one() {
        for a in 1..=12 {
            for &x in &compute_ma(a).m_a {
                assert_eq!(
                    lift_index(x).count_ones(),
                    1 + x.count_ones(),
                    "x = {x}"
                );
            }
        }
    }

    #[test]
    fn spans_match_known_sets() {
        assert_eq!(span_s(3), set(3, &[0, 7]));
        assert_eq!(span_s(5), set(5, &[0, 7, 25, 30]));
        assert_eq!(span_s(6), set(6, &[0, 7, 25, 30, 42, 45, 51, 52]));
    }

    #[test]
    fn minimum_distance_examples() {
        assert_eq!(min_hamming_distance(&span_s(5)).unwrap(), 3);
        assert_eq!(min_hamming_distance(&set(3, &[0, 1])).unwrap(), 1);
        // Brute force over all pairs of the a = 6 span.
        assert_eq!(min_hamming_distance(&span_s(6)).unwrap(), 3);
        assert_eq!(
            min_hamming_distance(&set(3, &[5])),
            Err(Error::SetTooSmall)
        );
    }

    #[test]
    fn partitions_match_known_classes() {
        let c3 = partition_classes(3);
        assert_eq!(
            c3,
            vec![
                set(3, &[0, 7]),
                set(3, &[1, 6]),
                set(3, &[2, 5]),
                set(3, &[3, 4]),
            ]
        );
        let c4 = partition_classes(4);
        assert_eq!(c4.len(), 8);
        assert_eq!(c4[7], set(4, &[11, 12]));
        let c6 = partition_classes(6);
        assert_eq!(c6[3], set(6, &[3, 4, 26, 29, 41, 46, 48, 55]));
    }

    #[test]
    fn classes_are_ordered_by_ascending_minima() {
        for a in 1..=10 {
            let classes = partition_classes(a);
            let d = dimension_exponent(a);
            assert_eq!(classes.len(), 1 << d);
            let minima: Vec<u64> = classes.iter().map(|c| c.elements()[0]).collect();
            assert!(minima.windows(2).all(|w| w[0] < w[1]));
            let covered: usize = classes.iter().map(|c| c.len()).sum();
            assert_eq!(covered, 1 << a);
        }
    }

    #[test]
    fn sylvester_base_cases_and_orthogonality() {
        assert_eq!(sylvester_hadamard(0), SignedMatrix::identity(1));
        let h1 = sylvester_hadamard(1);
        assert_eq!(
            (h1.get(0, 0), h1.get(0, 1), h1.get(1, 0), h1.get(1, 1)),
            (1, 1, 1, -1)
        );
        assert!(sylvester_hadamard(3).is_scaled_orthogonal(3));
    }
}
