//! Code metrics: zero fraction, peak-to-average power, zero-transmission
//! probability and signaling complexity, together with the reference tables
//! and their self-check.

use num_traits::{One, Zero};
use serde_json::json;

use crate::coeff::{pow2_rat, rat_display, Rat};
use crate::combinatorics::dimension_exponent;
use crate::construction::{build_g, build_h, ConstructionRoute};
use crate::design::DesignMatrix;
use crate::error::Error;

/// The two constructed families: the classical base design G and the
/// reduced-zero design H.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    G,
    H,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::G => "G",
            Family::H => "H",
        }
    }

    pub fn build(self, a: u32, route: ConstructionRoute) -> Result<DesignMatrix, Error> {
        match self {
            Family::G => Ok(build_g(a)),
            Family::H => build_h(a, route),
        }
    }

    /// Closed-form zero fraction: 1 - (a+1)/2^a for G, 1 - (a+1)/2^d for H.
    pub fn zero_fraction(self, a: u32) -> Rat {
        let d = dimension_exponent(a);
        match self {
            Family::G => Rat::one() - Rat::new(a as i64 + 1, 1i64 << a),
            Family::H => Rat::one() - Rat::new(a as i64 + 1, 1i64 << d),
        }
    }

    /// Flat-constellation peak-to-average ratio: 1 / (1 - zero fraction).
    pub fn papr(self, a: u32) -> Rat {
        (Rat::one() - self.zero_fraction(a)).recip()
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "g" | "G" => Ok(Family::G),
            "h" | "H" => Ok(Family::H),
            other => Err(format!("unknown family '{other}' (expected g|h)")),
        }
    }
}

/// Worst-entry transmit alphabet shape.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SignalingClass {
    /// Every non-zero entry is a single +-1 multiple of a variable.
    RestrictedUnit,
    /// Single-variable unit entries including j-rotations.
    QuarterPhase,
    /// At least one entry mixes variables or carries a non-unit coefficient.
    LinearCombination,
}

impl SignalingClass {
    pub fn label(self) -> &'static str {
        match self {
            SignalingClass::RestrictedUnit => "restricted-unit",
            SignalingClass::QuarterPhase => "quarter-phase",
            SignalingClass::LinearCombination => "linear-combination",
        }
    }
}

/// Exact fraction of zero cells.
pub fn zero_fraction(design: &DesignMatrix) -> Rat {
    design.zero_fraction()
}

/// Peak-to-average power per antenna under an equal-magnitude constellation:
/// with every row carrying the same number z of non-zero cells this is n/z,
/// equivalently 1/(1 - zero fraction). Errors when rows differ; use
/// [`row_papr`] for the per-row report then.
pub fn papr_flat_qam(design: &DesignMatrix) -> Result<Rat, Error> {
    let counts: Vec<usize> = (0..design.n())
        .map(|r| design.row_support(r).len())
        .collect();
    let first = counts[0];
    if counts.iter().any(|&c| c != first) {
        return Err(Error::NonUniformRows);
    }
    if first == 0 {
        return Err(Error::NonUniformRows);
    }
    Ok(Rat::new(design.n() as i64, first as i64))
}

/// Per-row peak-to-average ratios for designs with uneven support
/// (rows with no non-zero cell report zero).
pub fn row_papr(design: &DesignMatrix) -> Vec<Rat> {
    (0..design.n())
        .map(|r| {
            let z = design.row_support(r).len();
            if z == 0 {
                Rat::zero()
            } else {
                Rat::new(design.n() as i64, z as i64)
            }
        })
        .collect()
}

/// Quantization-level count per entry for an M-point constellation: 1 for a
/// zero, M for a single-variable entry, M^t when t distinct variables mix
/// (each variable contributes an independent coordinate choice). Saturates
/// instead of overflowing.
pub fn signaling_levels(design: &DesignMatrix, m: u32) -> Vec<Vec<u128>> {
    (0..design.n())
        .map(|r| {
            (0..design.n())
                .map(|c| {
                    let t = design.entry(r, c).distinct_vars() as u32;
                    if t == 0 {
                        1
                    } else {
                        (m as u128).checked_pow(t).unwrap_or(u128::MAX)
                    }
                })
                .collect()
        })
        .collect()
}

/// Classify the design by its worst entry.
pub fn signaling_class(design: &DesignMatrix) -> SignalingClass {
    let mut class = SignalingClass::RestrictedUnit;
    for r in 0..design.n() {
        for c in 0..design.n() {
            let e = design.entry(r, c);
            if e.is_zero() {
                continue;
            }
            match e.unit_term() {
                Some((_, _, u)) if u.is_real() => {}
                Some(_) => {
                    if class == SignalingClass::RestrictedUnit {
                        class = SignalingClass::QuarterPhase;
                    }
                }
                None => return SignalingClass::LinearCombination,
            }
        }
    }
    class
}

/// Highest per-entry level count together with the class.
pub fn signaling_complexity(design: &DesignMatrix, m: u32) -> (u128, SignalingClass) {
    let levels = signaling_levels(design, m);
    let max = levels
        .iter()
        .flat_map(|row| row.iter().copied())
        .max()
        .unwrap_or(1);
    (max, signaling_class(design))
}

/// One metrics record per (a, family).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CodeMetrics {
    pub family: Family,
    pub a: u32,
    pub n: u64,
    pub k: u64,
    pub rate: Rat,
    pub zero_fraction: Rat,
    pub papr_qam_ratio: Rat,
    pub p_zero: Rat,
    pub signaling_class: SignalingClass,
}

/// Closed-form metrics for a constructed family member. Valid for every a
/// the formulas cover, including orders too large to materialize.
pub fn metrics_for(a: u32, family: Family) -> CodeMetrics {
    let zf = family.zero_fraction(a);
    CodeMetrics {
        family,
        a,
        n: 1u64 << a,
        k: a as u64 + 1,
        rate: Rat::new(a as i64 + 1, 1i64 << a),
        zero_fraction: zf,
        papr_qam_ratio: family.papr(a),
        p_zero: zf,
        signaling_class: SignalingClass::RestrictedUnit,
    }
}

/// Metrics for both families across a range of orders.
pub fn metrics_table(a_range: impl IntoIterator<Item = u32>) -> Vec<CodeMetrics> {
    let mut out = Vec::new();
    for a in a_range {
        out.push(metrics_for(a, Family::G));
        out.push(metrics_for(a, Family::H));
    }
    out
}

/// Peak-symbol-power factors relative to the average for the supported
/// constellations: 1 for QPSK, 9/5 for 16-QAM.
pub fn constellation_peak_factor_qam16() -> Rat {
    Rat::new(9, 5)
}

/// Embedded expected values for the self-checking table emitter.
pub mod goldens {
    /// (a, admissible set, lifted set, d) for a = 3..=9.
    pub const ADMISSIBLE_SETS: &[(u32, &[u32], &[u64], u32)] = &[
        (3, &[3], &[7], 2),
        (4, &[3], &[7], 3),
        (5, &[3, 5], &[7, 25], 3),
        (6, &[3, 5, 6], &[7, 25, 42], 3),
        (7, &[3, 5, 6, 7], &[7, 25, 42, 75], 3),
        (8, &[3, 5, 6, 7], &[7, 25, 42, 75], 4),
        (9, &[3, 5, 6, 7, 9], &[7, 25, 42, 75, 385], 4),
    ];

    /// (a, zero fraction of H as printed, zero fraction of G as printed)
    /// for a = 3..=16, numerator/denominator pairs.
    pub const ZERO_FRACTIONS: &[(u32, (i64, i64), (i64, i64))] = &[
        (3, (0, 1), (1, 2)),
        (4, (3, 8), (11, 16)),
        (5, (2, 8), (13, 16)),
        (6, (1, 8), (57, 64)),
        (7, (0, 1), (120, 128)),
        (8, (7, 16), (247, 256)),
        (9, (6, 16), (502, 512)),
        (10, (5, 16), (1013, 1024)),
        (11, (4, 16), (2036, 2048)),
        (12, (3, 16), (4083, 4096)),
        (13, (2, 16), (8178, 8192)),
        (14, (1, 16), (16369, 16384)),
        (15, (0, 1), (32752, 32768)),
        (16, (15, 32), (65519, 65536)),
    ];

    /// (a, G papr, G p0, H papr, H p0) for the flat-constellation columns.
    pub const POWER_COMPARISON_QPSK: &[(u32, (i64, i64), (i64, i64), (i64, i64), (i64, i64))] = &[
        (4, (16, 5), (11, 16), (8, 5), (3, 8)),
        (5, (16, 3), (13, 16), (4, 3), (1, 4)),
    ];

    /// (a, expected PAPR(G)/PAPR(H)): the 16-QAM columns pin only this
    /// convention-independent ratio, 2^(a-d).
    pub const POWER_RATIO_QAM16: &[(u32, i64)] = &[(4, 2), (5, 4)];
}

/// Verify the emitted tables against the embedded expected values.
pub fn check_tables() -> Result<(), String> {
    use crate::combinatorics::compute_ma;
    for &(a, m, mp, d) in goldens::ADMISSIBLE_SETS {
        let ma = compute_ma(a);
        if ma.m_a != m || ma.m_a_prime != mp || ma.d != d {
            return Err(format!(
                "admissible sets for a={a}: got ({:?}, {:?}, d={}), expected ({:?}, {:?}, d={})",
                ma.m_a, ma.m_a_prime, ma.d, m, mp, d
            ));
        }
    }
    for &(a, (hn, hd), (gn, gd)) in goldens::ZERO_FRACTIONS {
        let h = Family::H.zero_fraction(a);
        let g = Family::G.zero_fraction(a);
        if h != Rat::new(hn, hd) {
            return Err(format!("zero fraction H at a={a}: got {}", rat_display(h)));
        }
        if g != Rat::new(gn, gd) {
            return Err(format!("zero fraction G at a={a}: got {}", rat_display(g)));
        }
    }
    for &(a, gp, g0, hp, h0) in goldens::POWER_COMPARISON_QPSK {
        let checks = [
            (Family::G.papr(a), gp, "G papr"),
            (Family::G.zero_fraction(a), g0, "G p0"),
            (Family::H.papr(a), hp, "H papr"),
            (Family::H.zero_fraction(a), h0, "H p0"),
        ];
        for (got, (n, d), what) in checks {
            if got != Rat::new(n, d) {
                return Err(format!("{what} at a={a}: got {}", rat_display(got)));
            }
        }
    }
    for &(a, ratio) in goldens::POWER_RATIO_QAM16 {
        let got = Family::G.papr(a) / Family::H.papr(a);
        if got != Rat::from_integer(ratio) {
            return Err(format!(
                "16-QAM papr ratio at a={a}: got {}",
                rat_display(got)
            ));
        }
        let d = dimension_exponent(a);
        if got != pow2_rat((a - d) as i32) {
            return Err(format!("papr ratio at a={a} is not 2^(a-d)"));
        }
    }
    Ok(())
}

fn rat_decimal(r: Rat) -> String {
    let v = *r.numer() as f64 / *r.denom() as f64;
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Aligned plain-text rendering of the three reference tables.
pub fn render_tables_text() -> String {
    let mut out = String::new();
    out.push_str("Admissible index sets and their lifts\n");
    out.push_str(&format!(
        "{:>3} {:>16} {:>24} {:>3}\n",
        "a", "M", "M'", "d"
    ));
    for &(a, m, mp, d) in goldens::ADMISSIBLE_SETS {
        let fmt_u32 = |v: &[u32]| {
            let body: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", body.join(","))
        };
        let fmt_u64 = |v: &[u64]| {
            let body: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", body.join(","))
        };
        out.push_str(&format!(
            "{:>3} {:>16} {:>24} {:>3}\n",
            a,
            fmt_u32(m),
            fmt_u64(mp),
            d
        ));
    }
    out.push('\n');

    out.push_str("Power distribution comparison (QPSK exact; 16-QAM uses the\n");
    out.push_str("peak-symbol convention 9/5 x flat value; the G/H ratio 2^(a-d)\n");
    out.push_str("holds under any convention)\n");
    out.push_str(&format!(
        "{:>3} {:>6} {:>10} {:>8} {:>12} {:>8}\n",
        "a", "code", "papr-qpsk", "p0", "papr-16qam", "ratio"
    ));
    let qam = constellation_peak_factor_qam16();
    for &(a, ..) in goldens::POWER_COMPARISON_QPSK {
        for fam in [Family::G, Family::H] {
            let papr = fam.papr(a);
            out.push_str(&format!(
                "{:>3} {:>6} {:>10} {:>8} {:>12} {:>8}\n",
                a,
                fam.label(),
                rat_decimal(papr),
                rat_decimal(fam.zero_fraction(a)),
                rat_decimal(papr * qam),
                rat_decimal(Family::G.papr(a) / Family::H.papr(a)),
            ));
        }
    }
    out.push('\n');

    out.push_str("Zero fraction by order\n");
    out.push_str(&format!("{:>3} {:>12} {:>16}\n", "a", "f_z(H)", "f_z(G)"));
    for &(a, ..) in goldens::ZERO_FRACTIONS {
        out.push_str(&format!(
            "{:>3} {:>12} {:>16}\n",
            a,
            rat_display(Family::H.zero_fraction(a)),
            rat_display(Family::G.zero_fraction(a)),
        ));
    }
    out
}

/// Machine-readable rendering: one record per (a, family) with exact
/// rationals as "p/q" strings.
pub fn render_tables_json() -> String {
    let records: Vec<serde_json::Value> = metrics_table(3..=16)
        .iter()
        .map(|m| {
            json!({
                "family": m.family.label(),
                "a": m.a,
                "n": m.n,
                "k": m.k,
                "rate": rat_display(m.rate),
                "zero_fraction": rat_display(m.zero_fraction),
                "papr_flat": rat_display(m.papr_qam_ratio),
                "p_zero": rat_display(m.p_zero),
                "signaling_class": m.signaling_class.label(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&json!({
        "admissible_sets": goldens::ADMISSIBLE_SETS.iter().map(|&(a, m, mp, d)| json!({
            "a": a, "m": m, "m_prime": mp, "d": d,
        })).collect::<Vec<_>>(),
        "metrics": records,
    }))
    .expect("table serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_h_premultiply;
    use crate::reference::{tjc_design, yuen_design};

    #[test]
    fn zero_fraction_formulas_match_counted_designs() {
        for a in 1..=8 {
            let g = build_g(a);
            assert_eq!(g.zero_fraction(), Family::G.zero_fraction(a), "G a={a}");
            let h = build_h_premultiply(a).unwrap();
            assert_eq!(h.zero_fraction(), Family::H.zero_fraction(a), "H a={a}");
        }
    }

    #[test]
    fn papr_examples() {
        assert_eq!(Family::G.papr(4), Rat::new(16, 5));
        assert_eq!(Family::H.papr(4), Rat::new(8, 5));
        assert_eq!(Family::G.papr(5), Rat::new(16, 3));
        assert_eq!(Family::H.papr(5), Rat::new(4, 3));
        // Alamouti-size base case has no zeros at all.
        assert_eq!(Family::G.zero_fraction(1), Rat::zero());
        assert_eq!(Family::G.papr(1), Rat::one());
    }

    #[test]
    fn papr_matches_counting() {
        for a in 1..=7 {
            let h = build_h_premultiply(a).unwrap();
            assert_eq!(
                papr_flat_qam(&h).unwrap(),
                (Rat::one() - h.zero_fraction()).recip()
            );
        }
    }

    #[test]
    fn papr_ratio_is_a_power_of_two() {
        for a in 3..=12 {
            let d = dimension_exponent(a);
            assert_eq!(
                Family::G.papr(a) / Family::H.papr(a),
                pow2_rat((a - d) as i32),
                "a = {a}"
            );
        }
    }

    #[test]
    fn non_uniform_rows_are_reported_per_row() {
        let mut d = DesignMatrix::zero(2, 1, 0);
        d.set_entry(0, 0, crate::design::Entry::unit(crate::coeff::Unit::One, 1, false))
            .unwrap();
        assert_eq!(papr_flat_qam(&d), Err(Error::NonUniformRows));
        assert_eq!(row_papr(&d), vec![Rat::new(2, 1), Rat::zero()]);
    }

    #[test]
    fn signaling_classes_of_references() {
        let tjc = tjc_design();
        let (levels, class) = signaling_complexity(&tjc, 16);
        assert_eq!(levels, 256);
        assert_eq!(class, SignalingClass::LinearCombination);

        let yuen = yuen_design();
        let (levels, class) = signaling_complexity(&yuen, 16);
        assert_eq!(levels, 16);
        assert_eq!(class, SignalingClass::QuarterPhase);

        let h4 = build_h_premultiply(4).unwrap();
        let (levels, class) = signaling_complexity(&h4, 16);
        assert_eq!(levels, 16);
        assert_eq!(class, SignalingClass::RestrictedUnit);
    }

    #[test]
    fn zero_fraction_decreases_within_each_dyadic_band() {
        for l in 1..=3u32 {
            let lo = 1u32 << l;
            let hi = (1u32 << (l + 1)) - 1;
            let mut prev = None;
            for a in lo..=hi {
                let f = Family::H.zero_fraction(a);
                if let Some(p) = prev {
                    assert!(f < p, "f_z(H) must strictly decrease at a = {a}");
                }
                prev = Some(f);
            }
        }
    }

    #[test]
    fn embedded_tables_self_check() {
        check_tables().unwrap();
    }

    #[test]
    fn table_renderings_are_nonempty() {
        let t = render_tables_text();
        assert!(t.contains("Zero fraction"));
        let j = render_tables_json();
        assert!(j.contains("\"65519/65536\""));
    }
}
