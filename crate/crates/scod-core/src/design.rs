//! Symbolic design matrices over complex variables and their conjugates.
//!
//! A [`DesignMatrix`] is an n-by-n grid of [`Entry`] values in k complex
//! variables x1..xk, together with a global scalar 2^(scale_num/2) tracked as
//! the integer exponent `scale_num`. Keeping the exponent symbolic means the
//! 1/sqrt(2) factors produced by the zero-reducing constructions never force
//! floating point: every verification stays exact.

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::coeff::{Coeff, Rat, Unit};
use crate::error::Error;
use crate::signed::SignedMatrix;

/// One formal term `coeff * xv` or `coeff * xv*`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SymbolicTerm {
    pub coeff: Coeff,
    /// 1-based variable index.
    pub var: u32,
    /// True for the conjugated variable `xv*`.
    pub conj: bool,
}

impl SymbolicTerm {
    pub fn new(coeff: Coeff, var: u32, conj: bool) -> SymbolicTerm {
        SymbolicTerm { coeff, var, conj }
    }

    pub fn unit(unit: Unit, var: u32, conj: bool) -> SymbolicTerm {
        SymbolicTerm::new(unit.coeff(), var, conj)
    }

    fn key(&self) -> (u32, bool) {
        (self.var, self.conj)
    }

    /// Complex conjugate of the whole term: conjugate coefficient, flip `conj`.
    pub fn conjugated(&self) -> SymbolicTerm {
        SymbolicTerm::new(self.coeff.conj(), self.var, !self.conj)
    }

    pub fn negated(&self) -> SymbolicTerm {
        SymbolicTerm::new(self.coeff.neg(), self.var, self.conj)
    }
}

/// A canonical formal linear combination of variables and conjugates.
///
/// Terms are kept sorted by (variable, plain-before-conjugate) with at most
/// one term per (variable, conjugated) pair and no zero coefficients. An
/// empty term list is the zero entry.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Entry {
    terms: SmallVec<[SymbolicTerm; 1]>,
}

impl Entry {
    pub fn zero() -> Entry {
        Entry::default()
    }

    pub fn single(term: SymbolicTerm) -> Entry {
        Entry::from_terms(std::iter::once(term))
    }

    pub fn unit(unit: Unit, var: u32, conj: bool) -> Entry {
        Entry::single(SymbolicTerm::unit(unit, var, conj))
    }

    /// Build an entry, merging duplicate (var, conj) slots and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = SymbolicTerm>) -> Entry {
        let mut v: SmallVec<[SymbolicTerm; 1]> = terms.into_iter().collect();
        v.sort_by_key(|t| t.key());
        let mut out: SmallVec<[SymbolicTerm; 1]> = SmallVec::new();
        for t in v {
            match out.last_mut() {
                Some(last) if last.key() == t.key() => {
                    last.coeff = last.coeff.add(&t.coeff);
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Entry { terms: out }
    }

    pub fn terms(&self) -> &[SymbolicTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single unit term, if this entry is exactly one `{1,-1,j,-j}` term.
    pub fn unit_term(&self) -> Option<(u32, bool, Unit)> {
        if self.terms.len() != 1 {
            return None;
        }
        let t = &self.terms[0];
        t.coeff.unit().map(|u| (t.var, t.conj, u))
    }

    pub fn conjugated(&self) -> Entry {
        Entry::from_terms(self.terms.iter().map(|t| t.conjugated()))
    }

    pub fn negated(&self) -> Entry {
        // Negation preserves canonical order; map in place.
        Entry {
            terms: self.terms.iter().map(|t| t.negated()).collect(),
        }
    }

    pub fn add(&self, other: &Entry) -> Entry {
        Entry::from_terms(self.terms.iter().chain(other.terms.iter()).copied())
    }

    /// Number of distinct variables this entry touches.
    pub fn distinct_vars(&self) -> usize {
        let mut vars: SmallVec<[u32; 4]> = self.terms.iter().map(|t| t.var).collect();
        vars.dedup();
        vars.len()
    }

    pub fn evaluate(&self, values: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let v = values[(t.var - 1) as usize];
            let v = if t.conj { v.conj() } else { v };
            let (re, im) = t.coeff.to_complex_f64();
            acc += Complex64::new(re, im) * v;
        }
        acc
    }
}

/// Square symbolic design: n-by-n grid in k complex variables with a global
/// scalar 2^(scale_num/2). Row index is the time slot, column index the
/// antenna.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DesignMatrix {
    n: usize,
    k: usize,
    scale_num: i32,
    entries: Vec<Entry>,
}

impl DesignMatrix {
    pub fn zero(n: usize, k: usize, scale_num: i32) -> DesignMatrix {
        DesignMatrix {
            n,
            k,
            scale_num,
            entries: vec![Entry::zero(); n * n],
        }
    }

    pub fn from_fn(
        n: usize,
        k: usize,
        scale_num: i32,
        mut f: impl FnMut(usize, usize) -> Entry,
    ) -> DesignMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        DesignMatrix {
            n,
            k,
            scale_num,
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scale_num(&self) -> i32 {
        self.scale_num
    }

    /// The global scalar 2^(scale_num/2) as a float.
    pub fn scale_f64(&self) -> f64 {
        (self.scale_num as f64 / 2.0).exp2()
    }

    /// Rate k/n in complex symbols per channel use.
    pub fn rate(&self) -> Rat {
        Rat::new(self.k as i64, self.n as i64)
    }

    pub fn entry(&self, row: usize, col: usize) -> &Entry {
        &self.entries[row * self.n + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, entry: Entry) -> Result<(), Error> {
        for t in entry.terms() {
            if t.var == 0 || t.var as usize > self.k {
                return Err(Error::VariableOutOfRange {
                    var: t.var,
                    k: self.k,
                });
            }
        }
        self.entries[row * self.n + col] = entry;
        Ok(())
    }

    pub(crate) fn set_entry_unchecked(&mut self, row: usize, col: usize, entry: Entry) {
        self.entries[row * self.n + col] = entry;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Entry]> {
        self.entries.chunks(self.n)
    }

    /// Column indices of the non-zero entries of one row.
    pub fn row_support(&self, row: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&c| !self.entry(row, c).is_zero())
            .collect()
    }

    pub fn zero_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_zero()).count()
    }

    /// Fraction of zero entries, exact.
    pub fn zero_fraction(&self) -> Rat {
        Rat::new(self.zero_count() as i64, (self.n * self.n) as i64)
    }

    /// True iff every non-zero entry is a single term with coefficient in
    /// `{1,-1,j,-j}` (the minimum-signaling-complexity shape).
    pub fn is_restricted(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.is_zero() || e.unit_term().is_some())
    }

    /// Conjugate transpose as a symbolic design (same variables and scale).
    pub fn conj_transpose(&self) -> DesignMatrix {
        DesignMatrix::from_fn(self.n, self.k, self.scale_num, |r, c| {
            self.entry(c, r).conjugated()
        })
    }

    /// Symbol substitution x1 -> x1*, xv -> -xv for v >= 2.
    ///
    /// For the base recursive family this relabeling coincides with the
    /// conjugate transpose, which is what makes the block recursion close.
    pub fn adjoint_relabeling(&self) -> DesignMatrix {
        DesignMatrix::from_fn(self.n, self.k, self.scale_num, |r, c| {
            Entry::from_terms(self.entry(r, c).terms().iter().map(|t| {
                if t.var == 1 {
                    SymbolicTerm::new(t.coeff, 1, !t.conj)
                } else {
                    t.negated()
                }
            }))
        })
    }

    /// Exact substitution x1 = 1, xv = 0 (v >= 2), keeping the global scale.
    ///
    /// Errors unless every resulting cell lies in {-1, 0, 1}.
    pub fn unit_evaluation(&self) -> Result<SignedMatrix, Error> {
        let mut m = SignedMatrix::zero(self.n, self.scale_num);
        for r in 0..self.n {
            for c in 0..self.n {
                let mut acc = Coeff::zero();
                for t in self.entry(r, c).terms() {
                    if t.var == 1 {
                        // x1 = 1 = conj(1), so the conj flag is irrelevant.
                        acc = acc.add(&t.coeff);
                    }
                }
                let v = if acc.is_zero() {
                    0i8
                } else {
                    match acc.unit() {
                        Some(Unit::One) => 1,
                        Some(Unit::MinusOne) => -1,
                        _ => return Err(Error::NotSigned { row: r, col: c }),
                    }
                };
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    /// Numeric codeword for one symbol vector, including the global scale.
    pub fn evaluate(&self, values: &[Complex64]) -> Result<Vec<Complex64>, Error> {
        if values.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                got: values.len(),
            });
        }
        let s = self.scale_f64();
        Ok(self
            .entries
            .iter()
            .map(|e| e.evaluate(values) * s)
            .collect())
    }

    /// Rescale by replacing scale_num (entries untouched).
    pub fn with_scale_num(mut self, scale_num: i32) -> DesignMatrix {
        self.scale_num = scale_num;
        self
    }
}
