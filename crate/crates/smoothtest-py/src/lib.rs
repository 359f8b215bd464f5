//! Python bindings for the two-sample testing toolkit.
//!
//! The module mirrors the Rust API at the level a notebook user wants:
//! statistics and tests take plain lists (or lists of lists for
//! multivariate data), reports come back as dicts, and the simulation
//! harness accepts the same generator-spec strings and experiment-file
//! grammar as the command-line tool.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use smoothtest::basis::{BasisKind, BasisSystem};
use smoothtest::empirical::{Direction, MultiSample, UniSample};
use smoothtest::error::Error;
use smoothtest::numerics::{OptimConfig, RngStream};
use smoothtest::simlab::{self, SampleData, SimConfig};
use smoothtest::unitest::TestReport;
use smoothtest::{multitest, unitest};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kind(basis: &str) -> PyResult<BasisKind> {
    basis.parse::<BasisKind>().map_err(py_err)
}

fn make_basis(basis: &str, d: usize) -> PyResult<BasisSystem> {
    BasisSystem::new(parse_kind(basis)?, d).map_err(py_err)
}

fn uni(values: Vec<f64>) -> PyResult<UniSample> {
    UniSample::new(values).map_err(py_err)
}

fn multi(rows: Vec<Vec<f64>>) -> PyResult<MultiSample> {
    MultiSample::new(rows).map_err(py_err)
}

fn report_to_dict(py: Python<'_>, report: &TestReport) -> PyResult<Py<PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("method", &report.method)?;
    dict.set_item("statistic", report.statistic)?;
    dict.set_item("critical_value", report.critical_value)?;
    dict.set_item("p_value", report.p_value)?;
    dict.set_item("reject", report.reject)?;
    dict.set_item("alpha", report.alpha)?;
    dict.set_item("d", report.d)?;
    dict.set_item("basis", report.basis.map(|k| k.to_string()))?;
    dict.set_item("n", report.n)?;
    dict.set_item("m", report.m)?;
    dict.set_item("seed", report.seed)?;
    dict.set_item("swapped", report.swapped)?;
    dict.set_item("warnings", report.warnings.clone())?;
    dict.set_item("best_direction", report.best_direction.clone())?;
    Ok(dict.into())
}

/// Standard normal CDF.
#[pyfunction]
fn normal_cdf(x: f64) -> f64 {
    smoothtest::numerics::normal_cdf(x)
}

/// Standard normal quantile on (0, 1).
#[pyfunction]
fn normal_quantile(p: f64) -> PyResult<f64> {
    smoothtest::numerics::normal_quantile(p).map_err(py_err)
}

/// Chi-square quantile with k degrees of freedom.
#[pyfunction]
fn chi2_quantile(p: f64, k: usize) -> PyResult<f64> {
    smoothtest::numerics::chi2_quantile(p, k).map_err(py_err)
}

/// psi_k(z) for the given basis ("trig" or "legendre") truncated at d.
#[pyfunction]
fn basis_eval(basis: &str, d: usize, k: usize, z: f64) -> PyResult<f64> {
    make_basis(basis, d)?.eval(k, z).map_err(py_err)
}

/// Closed-form sup-norm bound for the ell-th derivatives, ell in {0,1,2}.
#[pyfunction]
fn basis_bound(basis: &str, ell: usize, d: usize) -> PyResult<f64> {
    Ok(BasisSystem::bound(parse_kind(basis)?, ell, d))
}

/// The univariate smooth statistic Psihat(d).
#[pyfunction]
#[pyo3(signature = (x, y, d, basis = "trig"))]
fn smooth_statistic(x: Vec<f64>, y: Vec<f64>, d: usize, basis: &str) -> PyResult<f64> {
    Ok(unitest::smooth_statistic(
        &uni(x)?,
        &uni(y)?,
        &make_basis(basis, d)?,
    ))
}

/// Exact critical value c_alpha(d) of the absolute gaussian maximum.
#[pyfunction]
fn smooth_critical_value(alpha: f64, d: usize) -> PyResult<f64> {
    unitest::smooth_critical_value(alpha, d).map_err(py_err)
}

/// The univariate smooth test; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (x, y, d = 10, alpha = 0.05, basis = "trig"))]
fn smooth_test(
    py: Python<'_>,
    x: Vec<f64>,
    y: Vec<f64>,
    d: usize,
    alpha: f64,
    basis: &str,
) -> PyResult<Py<PyDict>> {
    let report =
        unitest::smooth_test(&uni(x)?, &uni(y)?, &make_basis(basis, d)?, alpha).map_err(py_err)?;
    report_to_dict(py, &report)
}

/// Two-sample Kolmogorov-Smirnov statistic.
#[pyfunction]
fn ks_statistic(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    Ok(unitest::ks_statistic(&uni(x)?, &uni(y)?))
}

/// Two-sample Cramer-von Mises statistic.
#[pyfunction]
fn cvm_statistic(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    Ok(unitest::cvm_statistic(&uni(x)?, &uni(y)?))
}

/// Permutation-calibrated KS test.
#[pyfunction]
#[pyo3(signature = (x, y, alpha = 0.05, permutations = 999, seed = 0))]
fn ks_test(
    py: Python<'_>,
    x: Vec<f64>,
    y: Vec<f64>,
    alpha: f64,
    permutations: usize,
    seed: u64,
) -> PyResult<Py<PyDict>> {
    let stream = RngStream::new(seed, 0);
    let report =
        unitest::ks_test(&uni(x)?, &uni(y)?, alpha, permutations, &stream).map_err(py_err)?;
    report_to_dict(py, &report)
}

/// Permutation-calibrated CVM test.
#[pyfunction]
#[pyo3(signature = (x, y, alpha = 0.05, permutations = 999, seed = 0))]
fn cvm_test(
    py: Python<'_>,
    x: Vec<f64>,
    y: Vec<f64>,
    alpha: f64,
    permutations: usize,
    seed: u64,
) -> PyResult<Py<PyDict>> {
    let stream = RngStream::new(seed, 0);
    let report =
        unitest::cvm_test(&uni(x)?, &uni(y)?, alpha, permutations, &stream).map_err(py_err)?;
    report_to_dict(py, &report)
}

/// The BGX chi-square smooth test.
#[pyfunction]
#[pyo3(signature = (x, y, d = 4, alpha = 0.05, basis = "legendre"))]
fn bgx_test(
    py: Python<'_>,
    x: Vec<f64>,
    y: Vec<f64>,
    d: usize,
    alpha: f64,
    basis: &str,
) -> PyResult<Py<PyDict>> {
    let report =
        unitest::bgx_test(&uni(x)?, &uni(y)?, &make_basis(basis, d)?, alpha).map_err(py_err)?;
    report_to_dict(py, &report)
}

/// Schwarz-rule selection of the truncation parameter.
#[pyfunction]
#[pyo3(signature = (x, y, d_max = 20, basis = "trig"))]
fn select_d(x: Vec<f64>, y: Vec<f64>, d_max: usize, basis: &str) -> PyResult<usize> {
    unitest::select_d_schwarz(&uni(x)?, &uni(y)?, parse_kind(basis)?, d_max).map_err(py_err)
}

/// Unscaled directional statistic Psi_u(d) along a unit vector.
#[pyfunction]
#[pyo3(signature = (x, y, direction, d, basis = "trig"))]
fn directional_statistic(
    x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    direction: Vec<f64>,
    d: usize,
    basis: &str,
) -> PyResult<f64> {
    let dir = Direction::from_unit(direction).map_err(py_err)?;
    multitest::directional_statistic(&multi(x)?, &multi(y)?, &dir, &make_basis(basis, d)?)
        .map_err(py_err)
}

/// The multivariate projection-pursuit smooth test with multiplier
/// bootstrap calibration.
#[pyfunction]
#[pyo3(signature = (x, y, d = 4, alpha = 0.05, bootstrap = 500, restarts = 10, seed = 0, basis = "trig"))]
#[allow(clippy::too_many_arguments)]
fn ms_test(
    py: Python<'_>,
    x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    d: usize,
    alpha: f64,
    bootstrap: usize,
    restarts: usize,
    seed: u64,
    basis: &str,
) -> PyResult<Py<PyDict>> {
    let cfg = OptimConfig {
        restarts,
        ..OptimConfig::default()
    };
    let stream = RngStream::new(seed, 0);
    let report = multitest::ms_test(
        &multi(x)?,
        &multi(y)?,
        &make_basis(basis, d)?,
        alpha,
        bootstrap,
        &cfg,
        &stream,
    )
    .map_err(py_err)?;
    report_to_dict(py, &report)
}

/// Baringhaus-Franz statistic over a Monte Carlo sphere average.
#[pyfunction]
#[pyo3(signature = (x, y, directions = 32, seed = 0))]
fn bf_statistic(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>, directions: usize, seed: u64) -> PyResult<f64> {
    let stream = RngStream::new(seed, 0);
    multitest::bf_statistic(&multi(x)?, &multi(y)?, directions, &stream).map_err(py_err)
}

/// Draw n observations from a generator-spec string such as
/// "gamma(2,2)", "example1(0.5)" or "mvnormal(3,ar1,0.5)". Univariate
/// specs return a list of floats, multivariate ones a list of rows.
#[pyfunction]
#[pyo3(signature = (spec, n, seed = 0))]
fn sample(py: Python<'_>, spec: &str, n: usize, seed: u64) -> PyResult<Py<PyList>> {
    let parsed = simlab::parse_generator(spec).map_err(py_err)?;
    let mut stream = RngStream::new(seed, 0);
    match simlab::sample(&parsed, n, &mut stream).map_err(py_err)? {
        SampleData::Uni(u) => Ok(PyList::new(py, u.values())?.into()),
        SampleData::Multi(m) => Ok(PyList::new(py, m.rows())?.into()),
    }
}

/// Run an experiment config (the same `key = value` text the CLI accepts)
/// and return the result rows as dicts.
#[pyfunction]
#[pyo3(signature = (config_text, jobs = 1))]
fn run_config(py: Python<'_>, config_text: &str, jobs: usize) -> PyResult<Py<PyList>> {
    let cfg = SimConfig::parse(config_text).map_err(py_err)?;
    let rows = cfg.run(jobs).map_err(py_err)?;
    let out = PyList::empty(py);
    for row in rows {
        let dict = PyDict::new(py);
        dict.set_item("param", row.param)?;
        dict.set_item("rate", row.rate)?;
        dict.set_item("se", row.se)?;
        dict.set_item("R", row.replicates)?;
        dict.set_item("seed", row.seed)?;
        out.append(dict)?;
    }
    Ok(out.into())
}

#[pymodule]
fn smoothtest_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(normal_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(chi2_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(basis_eval, m)?)?;
    m.add_function(wrap_pyfunction!(basis_bound, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_critical_value, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_test, m)?)?;
    m.add_function(wrap_pyfunction!(ks_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(cvm_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(ks_test, m)?)?;
    m.add_function(wrap_pyfunction!(cvm_test, m)?)?;
    m.add_function(wrap_pyfunction!(bgx_test, m)?)?;
    m.add_function(wrap_pyfunction!(select_d, m)?)?;
    m.add_function(wrap_pyfunction!(directional_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(ms_test, m)?)?;
    m.add_function(wrap_pyfunction!(bf_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
