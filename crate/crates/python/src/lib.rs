//! Python bindings. Models are described by the same JSON documents the
//! command-line tool reads; reports come back as JSON strings.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pdm_spectra::config::RunConfig;
use pdm_spectra::discretize::matched_domains;
use pdm_spectra::eigen::{eig, VectorSelection};
use pdm_spectra::linalg::CMatrix;
use pdm_spectra::model::{delta_of, ordering_preset, AmbiguityOrdering, ModelSpec, OrderingPreset};
use pdm_spectra::transform;
use pdm_spectra::verify::{self, Picture, BOUND_IM_TOL};
use pdm_spectra::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NoConvergence { .. } | Error::NonFinite { .. } | Error::MissingVectors(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn load(config: Option<&str>) -> PyResult<RunConfig> {
    match config {
        Some(text) => RunConfig::from_json(text).map_err(|e| PyValueError::new_err(e.to_string())),
        None => Ok(RunConfig::default()),
    }
}

fn spec_of(cfg: &RunConfig) -> PyResult<ModelSpec> {
    cfg.model_spec().map_err(py_err)
}

fn picture(name: &str) -> PyResult<Picture> {
    name.parse().map_err(PyValueError::new_err)
}

/// `(name, alpha, beta, gamma, delta)` for each named ordering; `delta` is
/// `None` when undefined.
#[pyfunction]
fn orderings() -> Vec<(String, String, String, String, Option<String>)> {
    OrderingPreset::ALL
        .into_iter()
        .map(|p| {
            let o = ordering_preset(p);
            let d = delta_of(&o).ok().map(|d| d.to_string());
            (p.name().to_string(), o.alpha().to_string(), o.beta().to_string(), o.gamma().to_string(), d)
        })
        .collect()
}

#[pyfunction]
fn delta(alpha: f64, beta: f64, gamma: f64) -> PyResult<f64> {
    let o = AmbiguityOrdering::from_f64(alpha, beta, gamma).map_err(py_err)?;
    delta_of(&o).map(pdm_spectra::model::ratio_to_f64).map_err(py_err)
}

#[pyfunction]
fn default_config() -> String {
    RunConfig::default().to_json()
}

/// Rows `(x, q, mu, M, V_ref(q), V_target(x))` on the matched grid.
#[pyfunction]
#[pyo3(signature = (config=None, n=None))]
fn map_table(config: Option<&str>, n: Option<usize>) -> PyResult<Vec<(f64, f64, f64, f64, Complex64, Complex64)>> {
    let cfg = load(config)?;
    let spec = spec_of(&cfg)?;
    let (grid, _) = matched_domains(&spec, n.unwrap_or(cfg.n)).map_err(py_err)?;
    let map = spec.map();
    grid.nodes
        .iter()
        .map(|&x| {
            let q = map.q_of_x(x)?;
            let pt = spec.profile.eval(x)?;
            let vr = transform::reference_potential(&spec.generator, spec.alpha0, q);
            Ok((x, q, pt.mu, pt.mass, vr, transform::target_potential(&spec, x)?))
        })
        .collect::<pdm_spectra::Result<_>>()
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (q, config=None))]
fn reference_potential(q: f64, config: Option<&str>) -> PyResult<Complex64> {
    let spec = spec_of(&load(config)?)?;
    Ok(transform::reference_potential(&spec.generator, spec.alpha0, q))
}

#[pyfunction]
#[pyo3(signature = (x, config=None))]
fn target_potential(x: f64, config: Option<&str>) -> PyResult<Complex64> {
    let spec = spec_of(&load(config)?)?;
    transform::target_potential(&spec, x).map_err(py_err)
}

/// All eigenvalues of one picture, lowest real part first, with bound flags.
#[pyfunction]
#[pyo3(signature = (config=None, picture="reference", n=None))]
fn solve(py: Python<'_>, config: Option<&str>, picture: &str, n: Option<usize>) -> PyResult<(Vec<Complex64>, Vec<bool>)> {
    let cfg = load(config)?;
    let spec = spec_of(&cfg)?;
    let pic = self::picture(picture)?;
    let n = n.unwrap_or(cfg.n);
    let solved = py
        .allow_threads(|| verify::solve_picture(&spec, pic, n, BOUND_IM_TOL, false))
        .map_err(py_err)?;
    Ok((solved.spectrum.eigenvalues, solved.spectrum.bound))
}

/// Eigenvalues of a dense complex matrix given as a list of rows.
#[pyfunction]
fn eigvals(py: Python<'_>, rows: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(PyValueError::new_err("matrix must be square and non-empty"));
    }
    let m = CMatrix::from_rows(&rows);
    let s = py.allow_threads(|| eig(&m, VectorSelection::None)).map_err(py_err)?;
    Ok(s.eigenvalues)
}

/// Runs one check (`isospectral`, `intertwine`, `analytic`, `sweep` or
/// `eigen`) and returns its report as JSON.
#[pyfunction]
#[pyo3(signature = (which, config=None, picture="reference"))]
fn check(py: Python<'_>, which: &str, config: Option<&str>, picture: &str) -> PyResult<String> {
    let cfg = load(config)?;
    let spec = spec_of(&cfg)?;
    let pic = self::picture(picture)?;
    let tol = match pic {
        Picture::Reference => cfg.analytic_reference_tol(),
        Picture::Target => cfg.analytic_target_tol(),
    };
    let report = py.allow_threads(|| match which {
        "isospectral" => verify::check_isospectral_refinement(
            &spec,
            &[cfg.n / 2, cfg.n],
            cfg.k(),
            cfg.tolerances.isospectral,
            cfg.tolerances.isospectral_min_rate,
        )
        .map(Some),
        "intertwine" => verify::check_intertwining(&spec, &cfg.n_list).map(Some),
        "analytic" => verify::check_analytic(&spec, pic, cfg.n, tol).map(Some),
        "sweep" => verify::convergence_sweep(&spec, pic, &cfg.n_list, cfg.level).map(Some),
        "eigen" => Ok(None),
        other => Err(Error::InvalidArgument(format!("unknown check `{other}`"))),
    });
    match report.map_err(py_err)? {
        Some(r) => Ok(r.to_json()),
        None => {
            let r = py.allow_threads(|| verify::eigen_suite(cfg.seed, cfg.suite_size)).map_err(py_err)?;
            serde_json::to_string_pretty(&r).map_err(|e| PyRuntimeError::new_err(e.to_string()))
        }
    }
}

#[pymodule]
fn pdm_spectra_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(orderings, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(map_table, m)?)?;
    m.add_function(wrap_pyfunction!(reference_potential, m)?)?;
    m.add_function(wrap_pyfunction!(target_potential, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(eigvals, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}
