//! Exact conjugate-transpose products and the orthogonality check.
//!
//! `gram` produces the symbolic product D^H * D with the global scale folded
//! into every coefficient. A design is orthogonal in the sense used here iff
//! that product equals (|x1|^2 + ... + |xk|^2) * I exactly.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::coeff::Coeff;
use crate::design::DesignMatrix;

/// One factor of a degree-2 monomial: a variable or its conjugate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct VarRef {
    pub var: u32,
    pub conj: bool,
}

impl VarRef {
    pub fn plain(var: u32) -> VarRef {
        VarRef { var, conj: false }
    }

    pub fn conjugate(var: u32) -> VarRef {
        VarRef { var, conj: true }
    }
}

/// Exact quadratic form in {x1..xk, x1*..xk*}.
///
/// The variables commute, so each product is stored under its sorted factor
/// pair; zero coefficients are absent.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GramForm {
    coeffs: BTreeMap<(VarRef, VarRef), Coeff>,
}

impl GramForm {
    pub fn zero() -> GramForm {
        GramForm::default()
    }

    /// The target diagonal form |x1|^2 + ... + |xk|^2.
    pub fn unit_diagonal(k: usize) -> GramForm {
        let mut g = GramForm::zero();
        for v in 1..=k as u32 {
            g.accumulate(VarRef::conjugate(v), VarRef::plain(v), Coeff::one());
        }
        g
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn accumulate(&mut self, u: VarRef, v: VarRef, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let key = if u <= v { (u, v) } else { (v, u) };
        let slot = self.coeffs.entry(key).or_insert_with(Coeff::zero);
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(VarRef, VarRef), &Coeff)> {
        self.coeffs.iter()
    }

    /// Conjugate of the form: conjugate coefficients, conjugate both factors.
    pub fn conjugated(&self) -> GramForm {
        let mut g = GramForm::zero();
        for (&(u, v), c) in &self.coeffs {
            g.accumulate(
                VarRef {
                    var: u.var,
                    conj: !u.conj,
                },
                VarRef {
                    var: v.var,
                    conj: !v.conj,
                },
                c.conj(),
            );
        }
        g
    }

    pub fn scaled_pow2(&self, k: i32) -> GramForm {
        let mut g = GramForm::zero();
        for (&key, c) in &self.coeffs {
            g.coeffs.insert(key, c.mul_pow2(k));
        }
        g
    }
}

/// One exact cell of D^H * D, scale included.
pub fn gram_cell(design: &DesignMatrix, i: usize, j: usize) -> GramForm {
    let mut g = GramForm::zero();
    for r in 0..design.n() {
        for s in design.entry(r, i).terms() {
            for t in design.entry(r, j).terms() {
                g.accumulate(
                    VarRef {
                        var: s.var,
                        conj: !s.conj,
                    },
                    VarRef {
                        var: t.var,
                        conj: t.conj,
                    },
                    s.coeff.conj().mul(&t.coeff),
                );
            }
        }
    }
    g.scaled_pow2(design.scale_num())
}

/// The full n-by-n grid of exact Gram cells. Quadratic in n; intended for
/// moderate sizes. The orthogonality check below streams instead.
pub fn gram(design: &DesignMatrix) -> Vec<Vec<GramForm>> {
    (0..design.n())
        .map(|i| (0..design.n()).map(|j| gram_cell(design, i, j)).collect())
        .collect()
}

/// First cell (lexicographic, upper triangle) at which D^H * D differs from
/// (sum of |xv|^2) * I.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScodViolation {
    pub row: usize,
    pub col: usize,
    pub cell: GramForm,
}

/// Exact orthogonality check; `None` means the design is an orthogonal
/// design in all k variables.
///
/// The Gram matrix of any design is conjugate-symmetric and the target is
/// real-diagonal, so checking the upper triangle including the diagonal is
/// exhaustive.
pub fn scod_violation(design: &DesignMatrix) -> Option<ScodViolation> {
    let found = if let Some(packed) = PackedDesign::build(design) {
        packed.find_violation()
    } else {
        find_violation_general(design)
    };
    found.map(|(row, col)| ScodViolation {
        row,
        col,
        cell: gram_cell(design, row, col),
    })
}

pub fn is_scod(design: &DesignMatrix) -> bool {
    scod_violation(design).is_none()
}

fn find_violation_general(design: &DesignMatrix) -> Option<(usize, usize)> {
    let n = design.n();
    let unit = GramForm::unit_diagonal(design.k());
    (0..n)
        .into_par_iter()
        .filter_map(|i| {
            for j in i..n {
                let cell = gram_cell(design, i, j);
                let ok = if i == j { cell == unit } else { cell.is_zero() };
                if !ok {
                    return Some((i, j));
                }
            }
            None
        })
        .min()
}

/// Single-term unit cell packed for the integer fast path.
#[derive(Clone, Copy)]
struct PackedCell {
    row: u32,
    var: u16,
    /// bit 0: conjugated; bits 1-2: unit phase (power of j).
    tag: u8,
}

/// Column-major packed view of a design whose entries are all zero or a
/// single unit-coefficient term. Gram coefficients for such designs are
/// Gaussian-integer counts times 2^scale_num, so orthogonality reduces to
/// exact integer accounting.
struct PackedDesign {
    n: usize,
    k: usize,
    expected: i64,
    cols: Vec<Vec<PackedCell>>,
}

impl PackedDesign {
    fn build(design: &DesignMatrix) -> Option<PackedDesign> {
        if design.scale_num() > 0 || design.k() > 256 {
            return None;
        }
        let n = design.n();
        let mut cols: Vec<Vec<PackedCell>> = vec![Vec::new(); n];
        for r in 0..n {
            for c in 0..n {
                let e = design.entry(r, c);
                if e.is_zero() {
                    continue;
                }
                let (var, conj, unit) = e.unit_term()?;
                cols[c].push(PackedCell {
                    row: r as u32,
                    var: var as u16,
                    tag: (conj as u8) | (unit.phase() << 1),
                });
            }
        }
        Some(PackedDesign {
            n,
            k: design.k(),
            expected: 1i64 << (-design.scale_num()),
            cols,
        })
    }

    fn find_violation(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .into_par_iter()
            .filter_map(|i| {
                let mut scratch = PairScratch::new(self.k);
                for j in i..self.n {
                    if !self.pair_ok(i, j, &mut scratch) {
                        return Some((i, j));
                    }
                }
                None
            })
            .min()
    }

    /// Verify one Gram cell by merging the two sorted column lists and
    /// accumulating Gaussian-integer counts per monomial.
    fn pair_ok(&self, i: usize, j: usize, scratch: &mut PairScratch) -> bool {
        let (a, b) = (&self.cols[i], &self.cols[j]);
        scratch.begin();
        let (mut p, mut q) = (0usize, 0usize);
        while p < a.len() && q < b.len() {
            let (ra, rb) = (a[p].row, b[q].row);
            if ra < rb {
                p += 1;
            } else if ra > rb {
                q += 1;
            } else {
                let (s, t) = (a[p], b[q]);
                // conj(j^ts) * j^tt = j^(tt - ts mod 4)
                let phase = (4 + (t.tag >> 1) - (s.tag >> 1)) & 3;
                // Row factor arrives conjugated.
                let u = mono_index(s.var, s.tag & 1 == 0);
                let v = mono_index(t.var, t.tag & 1 == 1);
                let slot = if u <= v {
                    u as usize * 2 * self.k + v as usize
                } else {
                    v as usize * 2 * self.k + u as usize
                };
                scratch.add(slot, phase);
                p += 1;
                q += 1;
            }
        }
        if i == j {
            let mut diag_hits = 0usize;
            for &slot in &scratch.touched {
                let (re, im) = scratch.values[slot];
                // |xv|^2 slots are (v plain, v conj): lo = 2*(v-1), hi = lo+1.
                let lo = slot / (2 * self.k);
                let hi = slot % (2 * self.k);
                if hi == lo + 1 && lo % 2 == 0 {
                    if (re, im) != (self.expected, 0) {
                        return false;
                    }
                    diag_hits += 1;
                } else if (re, im) != (0, 0) {
                    return false;
                }
            }
            diag_hits == self.k
        } else {
            scratch
                .touched
                .iter()
                .all(|&slot| scratch.values[slot] == (0, 0))
        }
    }
}

#[inline]
fn mono_index(var: u16, conj: bool) -> u16 {
    (var - 1) * 2 + conj as u16
}

/// Stamped accumulator reused across cell checks.
struct PairScratch {
    values: Vec<(i64, i64)>,
    stamp: Vec<u32>,
    gen: u32,
    touched: Vec<usize>,
}

impl PairScratch {
    fn new(k: usize) -> PairScratch {
        let slots = 4 * k * k;
        PairScratch {
            values: vec![(0, 0); slots],
            stamp: vec![0; slots],
            gen: 0,
            touched: Vec::with_capacity(64),
        }
    }

    fn begin(&mut self) {
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.gen = 1;
        }
        self.touched.clear();
    }

    #[inline]
    fn add(&mut self, slot: usize, phase: u8) {
        if self.stamp[slot] != self.gen {
            self.stamp[slot] = self.gen;
            self.values[slot] = (0, 0);
            self.touched.push(slot);
        }
        let v = &mut self.values[slot];
        match phase {
            0 => v.0 += 1,
            1 => v.1 += 1,
            2 => v.0 -= 1,
            _ => v.1 -= 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Unit;
    use crate::design::Entry;

    /// The 2x2 base design [[x1, -x2*], [x2, x1*]].
    fn alamouti() -> DesignMatrix {
        let mut d = DesignMatrix::zero(2, 2, 0);
        d.set_entry(0, 0, Entry::unit(Unit::One, 1, false)).unwrap();
        d.set_entry(0, 1, Entry::unit(Unit::MinusOne, 2, true)).unwrap();
        d.set_entry(1, 0, Entry::unit(Unit::One, 2, false)).unwrap();
        d.set_entry(1, 1, Entry::unit(Unit::One, 1, true)).unwrap();
        d
    }

    #[test]
    fn alamouti_gram_is_unit_diagonal() {
        let d = alamouti();
        let g = gram(&d);
        assert_eq!(g[0][0], GramForm::unit_diagonal(2));
        assert_eq!(g[1][1], GramForm::unit_diagonal(2));
        assert!(g[0][1].is_zero());
        assert!(g[1][0].is_zero());
        assert!(is_scod(&d));
    }

    #[test]
    fn sign_flip_is_detected_with_cell() {
        let mut d = alamouti();
        d.set_entry(0, 0, Entry::unit(Unit::MinusOne, 1, false)).unwrap();
        let v = scod_violation(&d).expect("broken orthogonality must be caught");
        assert!((v.row, v.col) < (2, 2));
        assert!(!v.cell.is_zero() || v.cell != GramForm::unit_diagonal(2));
    }

    #[test]
    fn repeated_variable_in_column_fails() {
        // x1 occupying two cells of one column: diagonal becomes 2|x1|^2.
        let mut d = DesignMatrix::zero(2, 1, 0);
        d.set_entry(0, 0, Entry::unit(Unit::One, 1, false)).unwrap();
        d.set_entry(1, 0, Entry::unit(Unit::One, 1, false)).unwrap();
        assert!(!is_scod(&d));
    }

    #[test]
    fn rate_one_over_n_diagonal_design_is_orthogonal() {
        // x1 on the diagonal only, k = 1: Gram is |x1|^2 * I.
        let mut d = DesignMatrix::zero(3, 1, 0);
        for i in 0..3 {
            d.set_entry(i, i, Entry::unit(Unit::One, 1, false)).unwrap();
        }
        assert!(is_scod(&d));
    }

    #[test]
    fn fast_and_general_paths_agree() {
        let good = alamouti();
        let mut bad = alamouti();
        bad.set_entry(1, 1, Entry::unit(Unit::J, 1, true)).unwrap();
        for d in [&good, &bad] {
            let fast = PackedDesign::build(d).unwrap().find_violation();
            let general = find_violation_general(d);
            assert_eq!(fast, general);
        }
    }

    #[test]
    fn gram_is_conjugate_symmetric() {
        let mut d = alamouti();
        // Perturb into a non-orthogonal but still valid design.
        d.set_entry(0, 1, Entry::unit(Unit::J, 1, false)).unwrap();
        let g = gram(&d);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g[i][j], g[j][i].conjugated());
            }
        }
    }
}
