//! Unit-energy constellations used by the simulator.

use num_complex::Complex64;

use crate::coeff::Rat;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConstellationKind {
    Qpsk,
    Qam16,
}

impl std::str::FromStr for ConstellationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(ConstellationKind::Qpsk),
            "qam16" | "16qam" => Ok(ConstellationKind::Qam16),
            other => Err(format!(
                "unknown constellation '{other}' (expected qpsk|qam16)"
            )),
        }
    }
}

/// A constellation normalized to unit average symbol energy.
///
/// Points are built from integer lattices and scaled, so the average energy
/// is exactly one by construction: the unscaled energies sum to
/// `points * scale_den`.
#[derive(Clone, Debug)]
pub struct Constellation {
    pub kind: ConstellationKind,
    pub points: Vec<Complex64>,
    /// Peak symbol power max |point|^2, exact.
    pub peak_power: Rat,
}

impl Constellation {
    pub fn new(kind: ConstellationKind) -> Constellation {
        let (lattice, scale_den): (Vec<(i64, i64)>, i64) = match kind {
            ConstellationKind::Qpsk => {
                let pts = vec![(1, 1), (1, -1), (-1, 1), (-1, -1)];
                (pts, 2)
            }
            ConstellationKind::Qam16 => {
                let axis = [-3i64, -1, 1, 3];
                let mut pts = Vec::with_capacity(16);
                for &re in &axis {
                    for &im in &axis {
                        pts.push((re, im));
                    }
                }
                (pts, 10)
            }
        };
        // Exact invariant: mean unscaled |p|^2 equals scale_den.
        let total: i64 = lattice.iter().map(|(re, im)| re * re + im * im).sum();
        debug_assert_eq!(total, scale_den * lattice.len() as i64);
        let peak_raw = lattice
            .iter()
            .map(|(re, im)| re * re + im * im)
            .max()
            .expect("non-empty constellation");
        let s = 1.0 / (scale_den as f64).sqrt();
        Constellation {
            kind,
            points: lattice
                .iter()
                .map(|&(re, im)| Complex64::new(re as f64 * s, im as f64 * s))
                .collect(),
            peak_power: Rat::new(peak_raw, scale_den),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the nearest constellation point.
    pub fn nearest(&self, v: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (v - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat_f64;

    #[test]
    fn unit_average_energy() {
        for kind in [ConstellationKind::Qpsk, ConstellationKind::Qam16] {
            let c = Constellation::new(kind);
            let mean: f64 =
                c.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / c.len() as f64;
            assert!((mean - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn peak_powers() {
        assert_eq!(
            Constellation::new(ConstellationKind::Qpsk).peak_power,
            Rat::new(1, 1)
        );
        let q16 = Constellation::new(ConstellationKind::Qam16).peak_power;
        assert_eq!(q16, Rat::new(9, 5));
        let c = Constellation::new(ConstellationKind::Qam16);
        let max = c.points.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max);
        assert!((max - rat_f64(q16)).abs() < 1e-12);
    }

    #[test]
    fn nearest_recovers_points() {
        let c = Constellation::new(ConstellationKind::Qam16);
        for (i, p) in c.points.iter().enumerate() {
            assert_eq!(c.nearest(*p + Complex64::new(0.01, -0.02)), i);
        }
    }
}
