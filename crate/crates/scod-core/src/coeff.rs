//! Exact coefficient arithmetic for design entries.
//!
//! A [`Coeff`] is an element of the ring Q(i)[sqrt(2)]: a Gaussian-rational
//! part plus a Gaussian-rational multiple of sqrt(2). Design families built
//! by this crate only ever use the Gaussian part (the sqrt(2) component stays
//! zero); the extension exists so that reference designs mixing 1/sqrt(2) and
//! 1/2 entries in a single matrix can be represented and verified exactly.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the symbolic core.
pub type Rat = Ratio<i64>;

/// `(re + im*j) + (re_rt2 + im_rt2*j) * sqrt(2)`, all components exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Coeff {
    pub re: Rat,
    pub im: Rat,
    pub re_rt2: Rat,
    pub im_rt2: Rat,
}

/// The four unit coefficients allowed in a restricted design entry.
///
/// Encoded as the power of j: `j^0 = 1`, `j^1 = j`, `j^2 = -1`, `j^3 = -j`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Unit {
    One,
    J,
    MinusOne,
    MinusJ,
}

impl Unit {
    /// Exponent t with this unit equal to j^t.
    pub fn phase(self) -> u8 {
        match self {
            Unit::One => 0,
            Unit::J => 1,
            Unit::MinusOne => 2,
            Unit::MinusJ => 3,
        }
    }

    pub fn from_phase(t: u8) -> Unit {
        match t % 4 {
            0 => Unit::One,
            1 => Unit::J,
            2 => Unit::MinusOne,
            _ => Unit::MinusJ,
        }
    }

    pub fn coeff(self) -> Coeff {
        match self {
            Unit::One => Coeff::one(),
            Unit::J => Coeff::j(),
            Unit::MinusOne => Coeff::one().neg(),
            Unit::MinusJ => Coeff::j().neg(),
        }
    }

    /// True for 1 and -1, false for the j-rotated units.
    pub fn is_real(self) -> bool {
        matches!(self, Unit::One | Unit::MinusOne)
    }
}

impl Coeff {
    pub fn zero() -> Coeff {
        Coeff {
            re: Rat::zero(),
            im: Rat::zero(),
            re_rt2: Rat::zero(),
            im_rt2: Rat::zero(),
        }
    }

    pub fn one() -> Coeff {
        Coeff {
            re: Rat::one(),
            ..Coeff::zero()
        }
    }

    pub fn j() -> Coeff {
        Coeff {
            im: Rat::one(),
            ..Coeff::zero()
        }
    }

    pub fn from_int(v: i64) -> Coeff {
        Coeff {
            re: Rat::from_integer(v),
            ..Coeff::zero()
        }
    }

    /// Gaussian rational `re + im*j`.
    pub fn gaussian(re: Rat, im: Rat) -> Coeff {
        Coeff {
            re,
            im,
            ..Coeff::zero()
        }
    }

    /// `(re + im*j) * sqrt(2)`.
    pub fn gaussian_rt2(re: Rat, im: Rat) -> Coeff {
        Coeff {
            re_rt2: re,
            im_rt2: im,
            ..Coeff::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.re_rt2.is_zero() && self.im_rt2.is_zero()
    }

    /// Classify as one of the four unit coefficients, if it is one.
    pub fn unit(&self) -> Option<Unit> {
        if !self.re_rt2.is_zero() || !self.im_rt2.is_zero() {
            return None;
        }
        if self.im.is_zero() && self.re == Rat::one() {
            Some(Unit::One)
        } else if self.im.is_zero() && self.re == -Rat::one() {
            Some(Unit::MinusOne)
        } else if self.re.is_zero() && self.im == Rat::one() {
            Some(Unit::J)
        } else if self.re.is_zero() && self.im == -Rat::one() {
            Some(Unit::MinusJ)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        Coeff {
            re: self.re + other.re,
            im: self.im + other.im,
            re_rt2: self.re_rt2 + other.re_rt2,
            im_rt2: self.im_rt2 + other.im_rt2,
        }
    }

    pub fn neg(&self) -> Coeff {
        Coeff {
            re: -self.re,
            im: -self.im,
            re_rt2: -self.re_rt2,
            im_rt2: -self.im_rt2,
        }
    }

    /// Complex conjugate (sqrt(2) is real, so both parts conjugate).
    pub fn conj(&self) -> Coeff {
        Coeff {
            re: self.re,
            im: -self.im,
            re_rt2: self.re_rt2,
            im_rt2: -self.im_rt2,
        }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        // (a + b*rt2)(c + d*rt2) = (ac + 2bd) + (ad + bc)*rt2 over Q(i).
        let (are, aim) = (self.re, self.im);
        let (bre, bim) = (self.re_rt2, self.im_rt2);
        let (cre, cim) = (other.re, other.im);
        let (dre, dim) = (other.re_rt2, other.im_rt2);
        let two = Rat::from_integer(2);
        let ac = (are * cre - aim * cim, are * cim + aim * cre);
        let bd = (bre * dre - bim * dim, bre * dim + bim * dre);
        let ad = (are * dre - aim * dim, are * dim + aim * dre);
        let bc = (bre * cre - bim * cim, bre * cim + bim * cre);
        Coeff {
            re: ac.0 + two * bd.0,
            im: ac.1 + two * bd.1,
            re_rt2: ad.0 + bc.0,
            im_rt2: ad.1 + bc.1,
        }
    }

    /// Multiply by the exact power 2^k (k may be negative).
    pub fn mul_pow2(&self, k: i32) -> Coeff {
        let f = pow2_rat(k);
        Coeff {
            re: self.re * f,
            im: self.im * f,
            re_rt2: self.re_rt2 * f,
            im_rt2: self.im_rt2 * f,
        }
    }

    /// Complex value as (re, im) floats, resolving the sqrt(2) part.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let rt2 = std::f64::consts::SQRT_2;
        (
            rat_f64(self.re) + rat_f64(self.re_rt2) * rt2,
            rat_f64(self.im) + rat_f64(self.im_rt2) * rt2,
        )
    }

    /// Absolute-value upper bound sum |re part| + |sqrt2 part| as f64,
    /// used for peak-amplitude bounds.
    pub fn magnitude_f64(&self) -> f64 {
        let (re, im) = self.to_complex_f64();
        (re * re + im * im).sqrt()
    }
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// 2^k as an exact rational.
pub fn pow2_rat(k: i32) -> Rat {
    if k >= 0 {
        Rat::from_integer(1i64 << k)
    } else {
        Rat::new(1, 1i64 << (-k))
    }
}

/// True when `v` is a positive power of two (1, 2, 4, ...).
pub fn is_pow2(v: u64) -> bool {
    v != 0 && v & (v - 1) == 0
}

/// Render a rational with an explicit denominator, e.g. `-1/2`, `3/1`.
pub fn rat_display(r: Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `p/q` or a bare integer `p`.
pub fn rat_parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().ok()?;
        let d: i64 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: i64 = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// Signum of the real-axis projection; used to pick a canonical sign for a row.
pub fn leading_sign(c: &Coeff) -> i8 {
    for r in [c.re, c.im, c.re_rt2, c.im_rt2] {
        if r.is_positive() {
            return 1;
        }
        if r.is_negative() {
            return -1;
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_classification() {
        assert_eq!(Coeff::one().unit(), Some(Unit::One));
        assert_eq!(Coeff::j().unit(), Some(Unit::J));
        assert_eq!(Coeff::one().neg().unit(), Some(Unit::MinusOne));
        assert_eq!(Coeff::j().neg().unit(), Some(Unit::MinusJ));
        assert_eq!(Coeff::from_int(2).unit(), None);
        assert_eq!(Coeff::gaussian_rt2(Rat::one(), Rat::zero()).unit(), None);
    }

    #[test]
    fn sqrt2_multiplication_closes() {
        // (1/sqrt(2))^2 = 1/2, represented as (1/2)*sqrt(2) squared.
        let inv_rt2 = Coeff::gaussian_rt2(Rat::new(1, 2), Rat::zero());
        let sq = inv_rt2.mul(&inv_rt2);
        assert_eq!(sq, Coeff::gaussian(Rat::new(1, 2), Rat::zero()));
    }

    #[test]
    fn conj_and_phase() {
        let c = Coeff::j();
        assert_eq!(c.conj(), Coeff::j().neg());
        // conj(j) * j = 1
        assert_eq!(c.conj().mul(&c), Coeff::one());
        for t in 0..4u8 {
            assert_eq!(Unit::from_phase(t).phase(), t);
        }
    }

    #[test]
    fn pow2_scaling() {
        assert_eq!(Coeff::one().mul_pow2(-3), Coeff::gaussian(Rat::new(1, 8), Rat::zero()));
        assert_eq!(pow2_rat(4), Rat::from_integer(16));
    }

    #[test]
    fn rational_round_trip() {
        for s in ["1/2", "-3/4", "5", "-7/1"] {
            let r = rat_parse(s).unwrap();
            assert_eq!(rat_parse(&rat_display(r)).unwrap(), r);
        }
        assert!(rat_parse("1/0").is_none());
    }
}
