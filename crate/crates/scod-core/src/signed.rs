//! Integer matrices with entries in {-1, 0, +1} and a tracked power-of-two
//! scale: permutations, Hadamard blocks and the premultiplier family.

use crate::error::Error;

/// Dense n-by-n matrix over {-1, 0, +1} with global scalar 2^(scale_num/2).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SignedMatrix {
    n: usize,
    scale_num: i32,
    data: Vec<i8>,
}

impl SignedMatrix {
    pub fn zero(n: usize, scale_num: i32) -> SignedMatrix {
        SignedMatrix {
            n,
            scale_num,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> SignedMatrix {
        let mut m = SignedMatrix::zero(n, 0);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Permutation matrix sending row i to source row perm[i] (P[i][perm[i]] = 1).
    pub fn permutation(perm: &[usize]) -> SignedMatrix {
        let mut m = SignedMatrix::zero(perm.len(), 0);
        for (i, &p) in perm.iter().enumerate() {
            m.set(i, p, 1);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale_num(&self) -> i32 {
        self.scale_num
    }

    pub fn with_scale_num(mut self, scale_num: i32) -> SignedMatrix {
        self.scale_num = scale_num;
        self
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: i8) {
        debug_assert!((-1..=1).contains(&v));
        self.data[row * self.n + col] = v;
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn row_support(&self, row: usize) -> Vec<usize> {
        self.row(row)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn nonzeros_in_row(&self, row: usize) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.row(row)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(c, &v)| (c, v))
    }

    pub fn transpose(&self) -> SignedMatrix {
        let mut out = SignedMatrix::zero(self.n, self.scale_num);
        for r in 0..self.n {
            for c in 0..self.n {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (r + 1..self.n).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Matrix product; errors if any resulting cell leaves {-1, 0, 1}.
    /// Scale exponents add.
    pub fn mul(&self, other: &SignedMatrix) -> Result<SignedMatrix, Error> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut out = SignedMatrix::zero(n, self.scale_num + other.scale_num);
        let mut acc = vec![0i32; n];
        for r in 0..n {
            acc.iter_mut().for_each(|v| *v = 0);
            for (t, v) in self.nonzeros_in_row(r) {
                let vv = v as i32;
                for (c, w) in other.nonzeros_in_row(t) {
                    acc[c] += vv * w as i32;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                if !(-1..=1).contains(&v) {
                    return Err(Error::NotSigned { row: r, col: c });
                }
                out.set(r, c, v as i8);
            }
        }
        Ok(out)
    }

    /// Kronecker product `I_blocks (x) self`.
    pub fn tensor_identity_left(&self, blocks: usize) -> SignedMatrix {
        let n = self.n * blocks;
        let mut out = SignedMatrix::zero(n, self.scale_num);
        for b in 0..blocks {
            let off = b * self.n;
            for r in 0..self.n {
                for c in 0..self.n {
                    let v = self.get(r, c);
                    if v != 0 {
                        out.set(off + r, off + c, v);
                    }
                }
            }
        }
        out
    }

    /// Exact check that `self^T * self == 2^pow * I` (ignoring the scale).
    pub fn is_scaled_orthogonal(&self, pow: u32) -> bool {
        let n = self.n;
        let target = 1i64 << pow;
        // Accumulate A^T A by walking rows; column supports are sparse for
        // every matrix this is used on.
        let mut gram = vec![0i64; n * n];
        for r in 0..n {
            let nz: Vec<(usize, i8)> = self.nonzeros_in_row(r).collect();
            for &(i, vi) in &nz {
                let row = &mut gram[i * n..(i + 1) * n];
                for &(j, vj) in &nz {
                    row[j] += vi as i64 * vj as i64;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { target } else { 0 };
                if gram[i * n + j] != expect {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_orthogonal() {
        assert!(SignedMatrix::identity(4).is_scaled_orthogonal(0));
    }

    #[test]
    fn permutation_round_trip() {
        let p = SignedMatrix::permutation(&[2, 0, 1]);
        assert_eq!(p.row_support(0), vec![2]);
        assert!(p.is_scaled_orthogonal(0));
    }

    #[test]
    fn mul_rejects_out_of_range_cells() {
        let mut m = SignedMatrix::zero(2, 0);
        m.set(0, 0, 1);
        m.set(0, 1, 1);
        m.set(1, 0, 1);
        m.set(1, 1, 1);
        // m*m has a 2 in every cell.
        assert_eq!(m.mul(&m), Err(Error::NotSigned { row: 0, col: 0 }));
    }

    #[test]
    fn tensor_blocks() {
        let mut m = SignedMatrix::zero(2, -1);
        m.set(0, 1, 1);
        m.set(1, 0, -1);
        let t = m.tensor_identity_left(2);
        assert_eq!(t.n(), 4);
        assert_eq!(t.get(2, 3), 1);
        assert_eq!(t.get(3, 2), -1);
        assert_eq!(t.get(0, 3), 0);
        assert_eq!(t.scale_num(), -1);
    }
}
