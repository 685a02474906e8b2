//! Python bindings: construct designs, verify them exactly, read their
//! metrics and run symbol-error-rate campaigns from Python.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use scod_core::analysis::{metrics_for, signaling_complexity, Family};
use scod_core::coeff::{rat_display, rat_f64};
use scod_core::combinatorics::{compute_ma, nonzero_columns, partition_classes, span_s};
use scod_core::construction::ConstructionRoute;
use scod_core::design::DesignMatrix;
use scod_core::format::{entry_display, parse, render_json, render_text};
use scod_core::gram::{is_scod, scod_violation};
use scod_core::reference::{tjc_design, yuen_design};
use scod_core::sim::{run_campaign, ConstellationKind, PowerMode, SimConfig};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A square complex orthogonal design with exact entries.
#[pyclass(frozen, name = "Design")]
struct PyDesign {
    inner: DesignMatrix,
}

#[pymethods]
impl PyDesign {
    /// Matrix order (antennas = time slots).
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Number of complex variables.
    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// Exponent s of the global scalar 2^(s/2).
    #[getter]
    fn scale_num(&self) -> i32 {
        self.inner.scale_num()
    }

    /// Rate k/n as an exact "p/q" string.
    #[getter]
    fn rate(&self) -> String {
        rat_display(self.inner.rate())
    }

    /// Zero fraction as an exact "p/q" string.
    #[getter]
    fn zero_fraction(&self) -> String {
        rat_display(self.inner.zero_fraction())
    }

    #[getter]
    fn zero_fraction_float(&self) -> f64 {
        rat_f64(self.inner.zero_fraction())
    }

    /// Exact orthogonality: the Gram product equals (sum |xv|^2) I.
    fn is_orthogonal_design(&self) -> bool {
        is_scod(&self.inner)
    }

    /// First Gram cell violating orthogonality, or None.
    fn orthogonality_violation(&self) -> Option<(usize, usize, String)> {
        scod_violation(&self.inner).map(|v| (v.row, v.col, v.cell.to_string()))
    }

    /// True when every non-zero entry is a unit multiple of one variable.
    fn is_restricted(&self) -> bool {
        self.inner.is_restricted()
    }

    /// Entry at (row, col) in the canonical text grammar.
    fn entry(&self, row: usize, col: usize) -> PyResult<String> {
        if row >= self.inner.n() || col >= self.inner.n() {
            return Err(PyValueError::new_err("cell out of range"));
        }
        Ok(entry_display(self.inner.entry(row, col)))
    }

    /// Worst-entry signaling report for an M-point constellation:
    /// (levels, class label).
    fn signaling(&self, m: u32) -> (u128, String) {
        let (levels, class) = signaling_complexity(&self.inner, m);
        (levels, class.label().to_string())
    }

    /// Numeric codeword for one symbol vector (row = time slot,
    /// column = antenna), global scale included.
    fn evaluate(&self, values: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        let flat = self.inner.evaluate(&values).map_err(value_err)?;
        let n = self.inner.n();
        Ok(flat.chunks(n).map(|row| row.to_vec()).collect())
    }

    fn render_text(&self) -> String {
        render_text(&self.inner)
    }

    fn to_json(&self) -> String {
        render_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Design(n={}, k={}, scale_num={}, zeros={})",
            self.inner.n(),
            self.inner.k(),
            self.inner.scale_num(),
            self.inner.zero_count()
        )
    }
}

/// Classical recursive design of order 2^a in a+1 variables.
#[pyfunction]
fn build_g(a: u32) -> PyResult<PyDesign> {
    check_order(a)?;
    Ok(PyDesign {
        inner: scod_core::construction::build_g(a),
    })
}

/// Reduced-zero design of order 2^a; route is "premultiply", "partition"
/// or "recursive".
#[pyfunction]
#[pyo3(signature = (a, route = "premultiply"))]
fn build_h(a: u32, route: &str) -> PyResult<PyDesign> {
    check_order(a)?;
    let route: ConstructionRoute = route.parse().map_err(value_err)?;
    let inner = scod_core::construction::build_h(a, route).map_err(value_err)?;
    Ok(PyDesign { inner })
}

fn check_order(a: u32) -> PyResult<()> {
    if !(1..=12).contains(&a) {
        return Err(PyValueError::new_err(
            "order exponent a must be between 1 and 12 to materialize",
        ));
    }
    Ok(())
}

/// Embedded order-8 zero-free quarter-phase reference design.
#[pyfunction]
fn reference_yuen() -> PyDesign {
    PyDesign {
        inner: yuen_design(),
    }
}

/// Embedded order-4 amicable-pair reference with coordinate-interleaved
/// entries.
#[pyfunction]
fn reference_tjc() -> PyDesign {
    PyDesign {
        inner: tjc_design(),
    }
}

/// Parse a design from its text or JSON form.
#[pyfunction]
fn parse_design(content: &str) -> PyResult<PyDesign> {
    let inner = parse(content).map_err(value_err)?;
    Ok(PyDesign { inner })
}

/// (M, M', d) for order exponent a.
#[pyfunction]
fn admissible_sets(a: u32) -> PyResult<(Vec<u32>, Vec<u64>, u32)> {
    if a == 0 {
        return Err(PyValueError::new_err("a must be positive"));
    }
    let ma = compute_ma(a);
    Ok((ma.m_a, ma.m_a_prime, ma.d))
}

/// XOR span of the lifted admissible set.
#[pyfunction]
fn span(a: u32) -> PyResult<Vec<u64>> {
    if a == 0 {
        return Err(PyValueError::new_err("a must be positive"));
    }
    Ok(span_s(a).elements().to_vec())
}

/// Coset partition of [0, 2^a), classes ordered by minimal element.
#[pyfunction]
fn partition(a: u32) -> PyResult<Vec<Vec<u64>>> {
    if a == 0 || a > 16 {
        return Err(PyValueError::new_err("a must be in 1..=16"));
    }
    Ok(partition_classes(a)
        .iter()
        .map(|c| c.elements().to_vec())
        .collect())
}

/// Column support of row i of the classical design.
#[pyfunction]
fn nonzero_cols(a: u32, i: u64) -> PyResult<Vec<u64>> {
    Ok(nonzero_columns(a, i)
        .map_err(value_err)?
        .elements()
        .to_vec())
}

/// Closed-form metrics record for one family member ("g" or "h").
#[pyfunction]
fn metrics(py: Python<'_>, a: u32, family: &str) -> PyResult<Py<PyDict>> {
    if a == 0 || a > 16 {
        return Err(PyValueError::new_err("a must be in 1..=16"));
    }
    let family: Family = family.parse().map_err(value_err)?;
    let m = metrics_for(a, family);
    let d = PyDict::new(py);
    d.set_item("family", m.family.label())?;
    d.set_item("a", m.a)?;
    d.set_item("n", m.n)?;
    d.set_item("k", m.k)?;
    d.set_item("rate", rat_display(m.rate))?;
    d.set_item("zero_fraction", rat_display(m.zero_fraction))?;
    d.set_item("papr_flat", rat_display(m.papr_qam_ratio))?;
    d.set_item("papr_flat_float", rat_f64(m.papr_qam_ratio))?;
    d.set_item("p_zero", rat_display(m.p_zero))?;
    d.set_item("signaling_class", m.signaling_class.label())?;
    Ok(d.into())
}

/// Monte Carlo SER campaign; returns one dict per SNR point.
/// Deterministic for a fixed seed.
#[pyfunction]
#[pyo3(signature = (
    design,
    snr_db,
    constellation = "qpsk",
    power_mode = "average",
    rx_antennas = 1,
    trials_per_point = 100_000,
    target_errors = 200,
    seed = 1,
))]
#[allow(clippy::too_many_arguments)]
fn run_ser_campaign(
    py: Python<'_>,
    design: &PyDesign,
    snr_db: Vec<f64>,
    constellation: &str,
    power_mode: &str,
    rx_antennas: usize,
    trials_per_point: u64,
    target_errors: u64,
    seed: u64,
) -> PyResult<Vec<Py<PyDict>>> {
    let config = SimConfig {
        design: design.inner.clone(),
        design_id: "py".to_string(),
        constellation: constellation
            .parse::<ConstellationKind>()
            .map_err(value_err)?,
        snr_db,
        power_mode: power_mode.parse::<PowerMode>().map_err(value_err)?,
        rx_antennas,
        trials_per_point,
        rng_seed: seed,
        target_errors,
    };
    config
        .validate()
        .map_err(|errors| PyValueError::new_err(errors.join("; ")))?;
    let out = py.detach(|| run_campaign(&config));
    out.into_iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("snr_db", p.snr_db)?;
            d.set_item("ser", p.ser)?;
            d.set_item("symbol_errors", p.symbol_errors)?;
            d.set_item("symbols_sent", p.symbols_sent)?;
            d.set_item("ci95_halfwidth", p.ci95_halfwidth)?;
            Ok(d.into())
        })
        .collect()
}

#[pymodule]
fn scodpy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDesign>()?;
    m.add_function(wrap_pyfunction!(build_g, m)?)?;
    m.add_function(wrap_pyfunction!(build_h, m)?)?;
    m.add_function(wrap_pyfunction!(reference_yuen, m)?)?;
    m.add_function(wrap_pyfunction!(reference_tjc, m)?)?;
    m.add_function(wrap_pyfunction!(parse_design, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_sets, m)?)?;
    m.add_function(wrap_pyfunction!(span, m)?)?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(nonzero_cols, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(run_ser_campaign, m)?)?;
    Ok(())
}
