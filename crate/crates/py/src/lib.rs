//! Python bindings. Structured results cross the boundary as JSON text and
//! are decoded with the interpreter's own `json` module, so the Python side
//! sees exactly the shapes the command-line tool prints.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use bregular::cli::{self, CliError, Scenario, ScenarioPatch};
use bregular::floorlog::{c_seq, u_seq};
use bregular::langreg::{decide_regularity, DigitSource};
use bregular::rkseq::{detect_period, r_direct_seq};

fn py_err(e: CliError) -> PyErr {
    match e {
        CliError::Usage(msg) => PyValueError::new_err(msg),
        CliError::Internal(msg) => PyRuntimeError::new_err(msg),
    }
}

fn usage(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn to_json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// `u_n = floor(log_b(alpha*n + beta))` for `start <= n <= stop`.
#[pyfunction]
#[pyo3(signature = (alpha, start, stop, beta = "0", base = 2))]
fn u(alpha: &str, start: BigInt, stop: BigInt, beta: &str, base: u32) -> PyResult<Vec<i64>> {
    let norm = cli::instance(alpha, beta, base).map_err(py_err)?;
    u_seq(&norm, &start, &stop).map_err(usage)
}

/// `r_1, ..., r_kmax` of the normalized instance.
#[pyfunction]
#[pyo3(signature = (alpha, kmax, beta = "0", base = 2))]
fn r(alpha: &str, kmax: u32, beta: &str, base: u32) -> PyResult<Vec<i64>> {
    let norm = cli::instance(alpha, beta, base).map_err(py_err)?;
    Ok(r_direct_seq(&norm, kmax))
}

/// Jump positions `c_1, ..., c_kmax` in normalized indices.
#[pyfunction]
#[pyo3(signature = (alpha, kmax, beta = "0", base = 2))]
fn c(alpha: &str, kmax: u32, beta: &str, base: u32) -> PyResult<Vec<BigInt>> {
    let norm = cli::instance(alpha, beta, base).map_err(py_err)?;
    Ok(c_seq(&norm, kmax).c)
}

/// Normalization record as a dict.
#[pyfunction]
#[pyo3(signature = (alpha, beta = "0", base = 2))]
fn normalize<'py>(py: Python<'py>, alpha: &str, beta: &str, base: u32) -> PyResult<Bound<'py, PyAny>> {
    let norm = cli::instance(alpha, beta, base).map_err(py_err)?;
    loads(py, &to_json(&norm.record())?)
}

/// Periodicity verdict for `r`.
#[pyfunction]
#[pyo3(signature = (alpha, beta = "0", base = 2, window = 1000))]
fn periodicity<'py>(py: Python<'py>, alpha: &str, beta: &str, base: u32, window: u64) -> PyResult<Bound<'py, PyAny>> {
    let norm = cli::instance(alpha, beta, base).map_err(py_err)?;
    loads(py, &to_json(&detect_period(&norm, window))?)
}

/// Regularity verdict for the language built from `r`.
#[pyfunction]
#[pyo3(signature = (alpha, beta = "0", base = 2, window = 1000, table = false))]
fn decide<'py>(
    py: Python<'py>,
    alpha: &str,
    beta: &str,
    base: u32,
    window: usize,
    table: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let norm = cli::instance(alpha, beta, base).map_err(py_err)?;
    let verdict = decide_regularity(&DigitSource::FromRk(norm), base, window).map_err(usage)?;
    loads(py, &to_json(&verdict.summary(table))?)
}

/// Full analysis report for one instance; keyword arguments mirror the
/// scenario file fields.
#[pyfunction]
#[pyo3(signature = (alpha, beta = "0", base = 2, kmax = None, nmax = None, window = None))]
fn analyze<'py>(
    py: Python<'py>,
    alpha: &str,
    beta: &str,
    base: u32,
    kmax: Option<u32>,
    nmax: Option<u64>,
    window: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let scenario = ScenarioPatch {
        alpha: Some(alpha.into()),
        beta: Some(beta.into()),
        base: Some(base),
        kmax,
        nmax,
        window,
        ..ScenarioPatch::default()
    }
    .resolve()
    .map_err(py_err)?;
    let report = py.detach(|| cli::run_analyze(&scenario)).map_err(py_err)?;
    loads(py, &report.to_json())
}

/// Runs a scenario given as JSON text and returns the report as JSON text.
#[pyfunction]
fn analyze_json(py: Python<'_>, scenario: &str) -> PyResult<String> {
    let scenario: Scenario = ScenarioPatch::from_json(scenario)
        .and_then(|p| p.resolve())
        .map_err(py_err)?;
    let report = py.detach(|| cli::run_analyze(&scenario)).map_err(py_err)?;
    Ok(report.to_json())
}

#[pymodule]
fn bregular_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA_VERSION", cli::SCHEMA_VERSION)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(u, m)?)?;
    m.add_function(wrap_pyfunction!(r, m)?)?;
    m.add_function(wrap_pyfunction!(c, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(periodicity, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_json, m)?)?;
    Ok(())
}
