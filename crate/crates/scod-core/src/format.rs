//! Bit-exact text rendering and parsing of designs, plus a structured JSON
//! schema.
//!
//! Entry grammar: `0` for the zero entry; a unit term renders as an optional
//! sign, optional `j`, `x`, the decimal variable index and an optional `*`
//! (for example `-jx2*`). General coefficients render parenthesized with
//! explicit denominators, `(p/q+r/s j)`, extended with `rt2`-tagged parts
//! when a sqrt(2) component is present. Terms join with `+`, folded into a
//! bare `-` when the next term is a negative unit.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coeff::{rat_display, rat_parse, Coeff, Rat, Unit};
use crate::design::{DesignMatrix, Entry, SymbolicTerm};
use crate::gram::GramForm;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Header { line: usize, msg: String },
    #[error("cell ({row},{col}): {msg}")]
    Cell { row: usize, col: usize, msg: String },
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Output formats understood by the exporters.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FileFormat {
    Text,
    Json,
}

impl std::str::FromStr for FileFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(FileFormat::Text),
            "json" => Ok(FileFormat::Json),
            other => Err(format!("unknown format '{other}' (expected text|json)")),
        }
    }
}

fn coeff_body(c: &Coeff) -> String {
    let mut s = format!("{}+{} j", rat_display(c.re), rat_display(c.im));
    if !c.re_rt2.is_zero() || !c.im_rt2.is_zero() {
        s.push_str(&format!(
            "+{} rt2+{} jrt2",
            rat_display(c.re_rt2),
            rat_display(c.im_rt2)
        ));
    }
    s
}

/// Coefficient in the parenthesized general form.
pub fn coeff_display(c: &Coeff) -> String {
    format!("({})", coeff_body(c))
}

fn term_display(t: &SymbolicTerm) -> String {
    let var = if t.conj {
        format!("x{}*", t.var)
    } else {
        format!("x{}", t.var)
    };
    match t.coeff.unit() {
        Some(Unit::One) => var,
        Some(Unit::MinusOne) => format!("-{var}"),
        Some(Unit::J) => format!("j{var}"),
        Some(Unit::MinusJ) => format!("-j{var}"),
        None => format!("{}{var}", coeff_display(&t.coeff)),
    }
}

/// Canonical textual form of one entry.
pub fn entry_display(e: &Entry) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, t) in e.terms().iter().enumerate() {
        let s = term_display(t);
        if i > 0 && !s.starts_with('-') {
            out.push('+');
        }
        out.push_str(&s);
    }
    out
}

/// Human form of the global scalar 2^(scale_num/2), e.g. `1/sqrt(2)`, `2`.
pub fn scale_display(scale_num: i32) -> String {
    let half = scale_num.div_euclid(2);
    let odd = scale_num.rem_euclid(2) == 1;
    match (scale_num.signum(), odd) {
        (0, _) => "1".to_string(),
        (1, false) => format!("{}", 1u64 << half),
        (1, true) => {
            if half == 0 {
                "sqrt(2)".to_string()
            } else {
                format!("{}*sqrt(2)", 1u64 << half)
            }
        }
        (_, false) => format!("1/{}", 1u64 << (-half)),
        // scale_num negative odd: 2^(half) * sqrt(2) with half = -(m+1):
        // 1/(2^m * sqrt(2)) where m = -half - 1.
        (_, true) => {
            let m = (-half - 1) as u64;
            if m == 0 {
                "1/sqrt(2)".to_string()
            } else {
                format!("1/({}*sqrt(2))", 1u64 << m)
            }
        }
    }
}

fn split_top_level_terms(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '+' | '-' if depth == 0 && i > start => {
                parts.push(&s[start..i]);
                start = if ch == '+' { i + 1 } else { i };
            }
            '+' if depth == 0 && i == start => {
                // leading '+': skip it
                start = i + 1;
            }
            _ => {}
        }
    }
    if start < s.len() {
        parts.push(&s[start..]);
    }
    parts
}

fn parse_coeff_body(s: &str) -> Option<Coeff> {
    let mut c = Coeff::zero();
    for part in s.split('+') {
        let part = part.trim();
        if let Some(v) = part.strip_suffix("jrt2") {
            c.im_rt2 = c.im_rt2 + rat_parse(v)?;
        } else if let Some(v) = part.strip_suffix("rt2") {
            c.re_rt2 = c.re_rt2 + rat_parse(v)?;
        } else if let Some(v) = part.strip_suffix('j') {
            c.im = c.im + rat_parse(v)?;
        } else {
            c.re = c.re + rat_parse(part)?;
        }
    }
    Some(c)
}

fn parse_term(s: &str) -> Option<SymbolicTerm> {
    let mut rest = s.trim();
    let mut negate = false;
    if let Some(r) = rest.strip_prefix('-') {
        negate = true;
        rest = r.trim_start();
    }
    let mut coeff = if rest.starts_with('(') {
        let close = rest.find(')')?;
        let body = &rest[1..close];
        rest = rest[close + 1..].trim_start();
        parse_coeff_body(body)?
    } else if let Some(r) = rest.strip_prefix('j') {
        rest = r;
        Coeff::j()
    } else {
        Coeff::one()
    };
    if negate {
        coeff = coeff.neg();
    }
    let rest = rest.strip_prefix('x')?;
    let (digits, conj) = match rest.strip_suffix('*') {
        Some(d) => (d, true),
        None => (rest, false),
    };
    let var: u32 = digits.parse().ok()?;
    if var == 0 {
        return None;
    }
    Some(SymbolicTerm::new(coeff, var, conj))
}

/// Parse one entry in the canonical grammar.
pub fn parse_entry(s: &str) -> Option<Entry> {
    let s = s.trim();
    if s == "0" {
        return Some(Entry::zero());
    }
    if s.is_empty() {
        return None;
    }
    let mut terms = Vec::new();
    for part in split_top_level_terms(s) {
        terms.push(parse_term(part)?);
    }
    Some(Entry::from_terms(terms))
}

/// Render a design in the line-oriented text format with tab-separated
/// cells. The `scale` line is informative; `scale_num` is authoritative.
pub fn render_text(d: &DesignMatrix) -> String {
    let mut out = String::new();
    out.push_str("scod-design v1\n");
    out.push_str(&format!("n {}\n", d.n()));
    out.push_str(&format!("k {}\n", d.k()));
    out.push_str(&format!("scale_num {}\n", d.scale_num()));
    out.push_str(&format!("scale {}\n", scale_display(d.scale_num())));
    for r in 0..d.n() {
        let row: Vec<String> = (0..d.n()).map(|c| entry_display(d.entry(r, c))).collect();
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn parse_text(s: &str) -> Result<DesignMatrix, ParseError> {
    let lines: Vec<&str> = s.lines().collect();
    let (mut n, mut k, mut scale_num) = (None, None, None);
    let header_err = |line: usize, msg: &str| ParseError::Header {
        line: line + 1,
        msg: msg.to_string(),
    };
    match lines.first() {
        Some(l) if l.trim() == "scod-design v1" => {}
        Some(_) => return Err(header_err(0, "expected magic line 'scod-design v1'")),
        None => return Err(header_err(0, "empty input")),
    }
    let mut i = 1usize;
    while i < lines.len() {
        let line = lines[i].trim_end();
        if line.trim().is_empty() {
            i += 1;
            continue;
        }
        let mut it = line.splitn(2, ' ');
        let key = it.next().unwrap_or("");
        let val = it.next().unwrap_or("").trim();
        match key {
            "n" => n = Some(val.parse::<usize>().map_err(|_| header_err(i, "bad n"))?),
            "k" => k = Some(val.parse::<usize>().map_err(|_| header_err(i, "bad k"))?),
            "scale_num" => {
                scale_num =
                    Some(val.parse::<i32>().map_err(|_| header_err(i, "bad scale_num"))?)
            }
            "scale" => {}
            _ => break, // first non-header line starts the grid
        }
        i += 1;
    }
    let (n, k, scale_num) = match (n, k, scale_num) {
        (Some(n), Some(k), Some(s)) => (n, k, s),
        _ => return Err(header_err(i, "missing n, k or scale_num header")),
    };
    let grid: Vec<&str> = lines[i..].iter().filter(|l| !l.trim().is_empty()).copied().collect();
    let grid_start = i;
    if grid.len() != n {
        return Err(header_err(
            grid_start,
            &format!("expected {n} grid rows, found {}", grid.len()),
        ));
    }
    let mut d = DesignMatrix::zero(n, k, scale_num);
    for (r, line) in grid.iter().enumerate() {
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != n {
            return Err(ParseError::Cell {
                row: r,
                col: cells.len().min(n),
                msg: format!("expected {n} cells, found {}", cells.len()),
            });
        }
        for (c, cell) in cells.iter().enumerate() {
            let entry = parse_entry(cell).ok_or_else(|| ParseError::Cell {
                row: r,
                col: c,
                msg: format!("cannot parse entry '{}'", cell.trim()),
            })?;
            d.set_entry(r, c, entry).map_err(|e| ParseError::Cell {
                row: r,
                col: c,
                msg: e.to_string(),
            })?;
        }
    }
    Ok(d)
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    re: String,
    im: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re_rt2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im_rt2: Option<String>,
    var: u32,
    conj: bool,
}

#[derive(Serialize, Deserialize)]
struct DesignDto {
    format: String,
    version: u32,
    n: usize,
    k: usize,
    scale_num: i32,
    entries: Vec<Vec<Vec<TermDto>>>,
}

pub fn render_json(d: &DesignMatrix) -> String {
    let entries: Vec<Vec<Vec<TermDto>>> = (0..d.n())
        .map(|r| {
            (0..d.n())
                .map(|c| {
                    d.entry(r, c)
                        .terms()
                        .iter()
                        .map(|t| TermDto {
                            re: rat_display(t.coeff.re),
                            im: rat_display(t.coeff.im),
                            re_rt2: (!t.coeff.re_rt2.is_zero())
                                .then(|| rat_display(t.coeff.re_rt2)),
                            im_rt2: (!t.coeff.im_rt2.is_zero())
                                .then(|| rat_display(t.coeff.im_rt2)),
                            var: t.var,
                            conj: t.conj,
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let dto = DesignDto {
        format: "scod-design".to_string(),
        version: 1,
        n: d.n(),
        k: d.k(),
        scale_num: d.scale_num(),
        entries,
    };
    serde_json::to_string_pretty(&dto).expect("design serialization cannot fail")
}

pub fn parse_json(s: &str) -> Result<DesignMatrix, ParseError> {
    let dto: DesignDto = serde_json::from_str(s).map_err(|e| ParseError::Json(e.to_string()))?;
    if dto.format != "scod-design" {
        return Err(ParseError::Json(format!(
            "unexpected format tag '{}'",
            dto.format
        )));
    }
    if dto.entries.len() != dto.n {
        return Err(ParseError::Json(format!(
            "expected {} rows, found {}",
            dto.n,
            dto.entries.len()
        )));
    }
    let mut d = DesignMatrix::zero(dto.n, dto.k, dto.scale_num);
    for (r, row) in dto.entries.iter().enumerate() {
        if row.len() != dto.n {
            return Err(ParseError::Cell {
                row: r,
                col: row.len().min(dto.n),
                msg: format!("expected {} cells, found {}", dto.n, row.len()),
            });
        }
        for (c, terms) in row.iter().enumerate() {
            let cell_err = |msg: String| ParseError::Cell {
                row: r,
                col: c,
                msg,
            };
            let mut parsed = Vec::with_capacity(terms.len());
            for t in terms {
                let req = |s: &str| {
                    rat_parse(s).ok_or_else(|| cell_err(format!("bad rational '{s}'")))
                };
                let opt = |s: &Option<String>| -> Result<Rat, ParseError> {
                    match s {
                        Some(v) => req(v),
                        None => Ok(Rat::zero()),
                    }
                };
                let coeff = Coeff {
                    re: req(&t.re)?,
                    im: req(&t.im)?,
                    re_rt2: opt(&t.re_rt2)?,
                    im_rt2: opt(&t.im_rt2)?,
                };
                parsed.push(SymbolicTerm::new(coeff, t.var, t.conj));
            }
            d.set_entry(r, c, Entry::from_terms(parsed))
                .map_err(|e| cell_err(e.to_string()))?;
        }
    }
    Ok(d)
}

pub fn render(d: &DesignMatrix, format: FileFormat) -> String {
    match format {
        FileFormat::Text => render_text(d),
        FileFormat::Json => render_json(d),
    }
}

/// Parse either format, keyed off the leading byte.
pub fn parse(s: &str) -> Result<DesignMatrix, ParseError> {
    if s.trim_start().starts_with('{') {
        parse_json(s)
    } else {
        parse_text(s)
    }
}

impl fmt::Display for GramForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|((u, v), c)| {
                let fac = |r: &crate::gram::VarRef| {
                    if r.conj {
                        format!("x{}*", r.var)
                    } else {
                        format!("x{}", r.var)
                    }
                };
                format!("{}{}{}", coeff_display(c), fac(u), fac(v))
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Rat;
    use crate::construction::build_g;

    #[test]
    fn unit_entry_grammar() {
        let cases = [
            (Entry::unit(Unit::One, 1, false), "x1"),
            (Entry::unit(Unit::MinusOne, 2, true), "-x2*"),
            (Entry::unit(Unit::J, 12, false), "jx12"),
            (Entry::unit(Unit::MinusJ, 2, true), "-jx2*"),
            (Entry::zero(), "0"),
        ];
        for (e, expect) in cases {
            assert_eq!(entry_display(&e), expect);
            assert_eq!(parse_entry(expect).unwrap(), e);
        }
    }

    #[test]
    fn combination_entry_round_trip() {
        let e = Entry::from_terms([
            SymbolicTerm::new(Coeff::gaussian(Rat::new(-1, 2), Rat::zero()), 1, false),
            SymbolicTerm::new(Coeff::gaussian(Rat::new(1, 2), Rat::zero()), 2, false),
            SymbolicTerm::new(Coeff::gaussian(Rat::new(-1, 2), Rat::zero()), 2, true),
        ]);
        let s = entry_display(&e);
        assert_eq!(s, "(-1/2+0/1 j)x1+(1/2+0/1 j)x2+(-1/2+0/1 j)x2*");
        assert_eq!(parse_entry(&s).unwrap(), e);
    }

    #[test]
    fn sqrt2_coefficient_round_trip() {
        let e = Entry::single(SymbolicTerm::new(
            Coeff::gaussian_rt2(Rat::new(1, 2), Rat::zero()),
            3,
            false,
        ));
        let s = entry_display(&e);
        assert_eq!(s, "(0/1+0/1 j+1/2 rt2+0/1 jrt2)x3");
        assert_eq!(parse_entry(&s).unwrap(), e);
    }

    #[test]
    fn mixed_sign_join_parses() {
        let e = parse_entry("x1-x2*+jx3-jx4").unwrap();
        assert_eq!(e.terms().len(), 4);
        assert_eq!(entry_display(&e), "x1-x2*+jx3-jx4");
    }

    #[test]
    fn scale_display_cases() {
        assert_eq!(scale_display(0), "1");
        assert_eq!(scale_display(-1), "1/sqrt(2)");
        assert_eq!(scale_display(-2), "1/2");
        assert_eq!(scale_display(-3), "1/(2*sqrt(2))");
        assert_eq!(scale_display(2), "2");
        assert_eq!(scale_display(1), "sqrt(2)");
        assert_eq!(scale_display(3), "2*sqrt(2)");
    }

    #[test]
    fn text_round_trip_base_design() {
        let g = build_g(3);
        let s = render_text(&g);
        let parsed = parse_text(&s).unwrap();
        assert_eq!(parsed, g);
    }

    #[test]
    fn json_round_trip_base_design() {
        let g = build_g(2);
        let parsed = parse_json(&render_json(&g)).unwrap();
        assert_eq!(parsed, g);
    }

    #[test]
    fn parse_errors_carry_cell_coordinates() {
        let g = build_g(2);
        let mut s = render_text(&g);
        s = s.replace("x3", "x?");
        let err = parse_text(&s).unwrap_err();
        match err {
            ParseError::Cell { .. } => {}
            other => panic!("expected cell error, got {other:?}"),
        }
    }
}
