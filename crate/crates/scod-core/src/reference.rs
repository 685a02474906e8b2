//! Embedded reference designs used for comparison: the order-4 amicable
//! construction with coordinate-interleaved entries, and the order-8
//! zero-free quarter-phase construction.

use num_traits::Zero;

use crate::coeff::{Coeff, Rat};
use crate::design::{DesignMatrix, Entry, SymbolicTerm};
use crate::format::parse_entry;

fn design_from_rows(n: usize, k: usize, scale_num: i32, rows: &[&str]) -> DesignMatrix {
    assert_eq!(rows.len(), n);
    let mut d = DesignMatrix::zero(n, k, scale_num);
    for (r, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(cells.len(), n, "row {r} has {} cells", cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let e = parse_entry(cell).unwrap_or_else(|| panic!("bad cell '{cell}'"));
            d.set_entry(r, c, e).expect("reference cell in range");
        }
    }
    d
}

/// Order-4, rate-3/4 design from amicable pairs. Zero-free but not
/// restricted: the x3 entries carry a 1/sqrt(2) factor and the bottom-right
/// block holds coordinate-interleaved combinations of x1 and x2.
pub fn tjc_design() -> DesignMatrix {
    // x3 / sqrt(2), optionally negated, optionally conjugated.
    let x3_rt2 = |neg: bool, conj: bool| {
        let half = Rat::new(if neg { -1 } else { 1 }, 2);
        Entry::single(SymbolicTerm::new(
            Coeff::gaussian_rt2(half, Rat::zero()),
            3,
            conj,
        ))
    };
    // (s1*x1 + s2*x1* + s3*x2 + s4*x2*) / 2 with signs si in {-1, +1}.
    let interleaved = |signs: [i64; 4]| {
        Entry::from_terms([
            SymbolicTerm::new(Coeff::gaussian(Rat::new(signs[0], 2), Rat::zero()), 1, false),
            SymbolicTerm::new(Coeff::gaussian(Rat::new(signs[1], 2), Rat::zero()), 1, true),
            SymbolicTerm::new(Coeff::gaussian(Rat::new(signs[2], 2), Rat::zero()), 2, false),
            SymbolicTerm::new(Coeff::gaussian(Rat::new(signs[3], 2), Rat::zero()), 2, true),
        ])
    };
    let mut d = DesignMatrix::zero(4, 3, 0);
    let mut set = |r: usize, c: usize, e: Entry| d.set_entry(r, c, e).expect("in range");
    set(0, 0, parse_entry("x1").unwrap());
    set(0, 1, parse_entry("x2").unwrap());
    set(0, 2, x3_rt2(false, false));
    set(0, 3, x3_rt2(false, false));
    set(1, 0, parse_entry("-x2*").unwrap());
    set(1, 1, parse_entry("x1*").unwrap());
    set(1, 2, x3_rt2(false, false));
    set(1, 3, x3_rt2(true, false));
    set(2, 0, x3_rt2(false, true));
    set(2, 1, x3_rt2(false, true));
    set(2, 2, interleaved([-1, -1, 1, -1]));
    set(2, 3, interleaved([1, -1, -1, -1]));
    set(3, 0, x3_rt2(false, true));
    set(3, 1, x3_rt2(true, true));
    set(3, 2, interleaved([1, -1, 1, 1]));
    set(3, 3, interleaved([-1, -1, -1, 1]));
    d
}

/// Order-8, rate-1/2 zero-free design whose entries are unit multiples
/// (including j-rotations) of the variables; stored with its 1/sqrt(2)
/// scale so the whole matrix is orthogonal in the exact sense.
pub fn yuen_design() -> DesignMatrix {
    let rows = [
        "x1*   x1*   x2    -x2   x3    -x3   x4    -x4",
        "jx1   -jx1  jx2*  jx2*  jx3*  jx3*  jx4*  jx4*",
        "-x2   x2    x1*   x1*   x4*   -x4*  -x3*  x3*",
        "-jx2* -jx2* jx1   -jx1  jx4   jx4   -jx3  -jx3",
        "-x3   x3    -x4*  x4*   x1*   x1*   x2*   -x2*",
        "-jx3* -jx3* -jx4  -jx4  jx1   -jx1  jx2   jx2",
        "-x4   x4    x3*   -x3*  -x2*  x2*   x1*   x1*",
        "-jx4* -jx4* jx3   jx3   -jx2  -jx2  jx1   -jx1",
    ];
    design_from_rows(8, 4, -1, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::is_scod;

    #[test]
    fn tjc_is_orthogonal_but_not_restricted() {
        let d = tjc_design();
        assert!(is_scod(&d));
        assert!(!d.is_restricted());
        assert_eq!(d.zero_count(), 0);
    }

    #[test]
    fn yuen_is_orthogonal_restricted_and_zero_free() {
        let d = yuen_design();
        assert!(is_scod(&d));
        assert!(d.is_restricted());
        assert_eq!(d.zero_count(), 0);
        assert_eq!(d.scale_num(), -1);
    }
}
