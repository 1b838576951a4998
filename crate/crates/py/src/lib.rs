//! Python bindings: configuration, rate reports, sparsity metrics, bounds
//! and preset figure sweeps.

use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use sparsesec::experiments::{evaluate_rate, figure, run_sweep, Figure};
use sparsesec::rates::{self, Method};
use sparsesec::Error;

create_exception!(sparsesec_py, InvalidConfigError, PyValueError, "A configuration invariant is violated.");
create_exception!(
    sparsesec_py,
    UnsupportedRegimeError,
    PyValueError,
    "The quantity is undefined or divergent at these parameters."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_) | Error::Domain(_) => InvalidConfigError::new_err(e.to_string()),
        Error::Unsupported(_) | Error::Divergent(_) => UnsupportedRegimeError::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// System parameters. Keyword arguments default to the reference configuration.
#[pyclass(name = "SystemConfig", skip_from_py_object)]
#[derive(Clone)]
struct PySystemConfig {
    inner: sparsesec::SystemConfig,
}

#[pymethods]
impl PySystemConfig {
    #[getter]
    fn n_t(&self) -> usize {
        self.inner.n_t
    }

    #[getter]
    fn n_r(&self) -> usize {
        self.inner.n_r
    }

    #[getter]
    fn n_e(&self) -> usize {
        self.inner.n_e
    }

    #[getter]
    fn m_t(&self) -> usize {
        self.inner.m_t
    }

    #[getter]
    fn m_r(&self) -> usize {
        self.inner.m_r
    }

    #[getter]
    fn m_e(&self) -> usize {
        self.inner.m_e
    }

    #[getter]
    fn l_t(&self) -> usize {
        self.inner.l_t
    }

    #[getter]
    fn l_r(&self) -> usize {
        self.inner.l_r
    }

    #[getter]
    fn l_e(&self) -> usize {
        self.inner.l_e
    }

    #[getter]
    fn power(&self) -> f64 {
        self.inner.power
    }

    #[getter]
    fn noise_var(&self) -> f64 {
        self.inner.noise_var
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.inner.phi
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut inner = sparsesec::SystemConfig::default();
        if let Some(kwargs) = kwargs {
            for (k, v) in kwargs.iter() {
                let key: String = k.extract()?;
                let value = if sparsesec::config::KEYS.contains(&key.as_str()) {
                    v.str()?.to_string()
                } else {
                    return Err(PyValueError::new_err(format!("unknown key `{key}`")));
                };
                inner.set(&key, &value).map_err(to_py)?;
            }
        }
        Ok(PySystemConfig { inner })
    }

    /// `n_r = n_e = n_t` and `l_r = l_e = l_t`.
    #[staticmethod]
    #[allow(clippy::too_many_arguments)]
    fn symmetric(n: usize, l: usize, m_t: usize, m_r: usize, m_e: usize, power: f64, phi: f64, eta: f64) -> Self {
        PySystemConfig { inner: sparsesec::SystemConfig::symmetric(n, l, m_t, m_r, m_e, power, phi, eta) }
    }

    /// Parses the `key=value` text form; every key must be present.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        sparsesec::SystemConfig::parse(text).map(|inner| PySystemConfig { inner }).map_err(to_py)
    }

    /// A copy with one key changed.
    fn with_value(&self, key: &str, value: f64) -> PyResult<Self> {
        let mut inner = self.inner;
        sparsesec::experiments::apply_override(&mut inner, key, value).map_err(to_py)?;
        Ok(PySystemConfig { inner })
    }

    fn with_snr_db(&self, snr_db: f64) -> Self {
        PySystemConfig { inner: self.inner.with_snr_db(snr_db) }
    }

    #[getter]
    fn snr_db(&self) -> f64 {
        self.inner.snr_db()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho()
    }

    /// Violated invariants, one message each; empty when valid.
    fn validate(&self) -> Vec<String> {
        sparsesec::config::validate(&self.inner).violations.iter().map(ToString::to_string).collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SystemConfig(n_t={}, n_r={}, n_e={}, m_t={}, m_r={}, m_e={}, l_t={}, l_r={}, l_e={}, power={}, noise_var={}, phi={}, eta={})",
            c.n_t, c.n_r, c.n_e, c.m_t, c.m_r, c.m_e, c.l_t, c.l_r, c.l_e, c.power, c.noise_var, c.phi, c.eta
        )
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(name = "RateReport", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyRateReport {
    r_u: f64,
    c_e: f64,
    r_s: f64,
    method: String,
    trials: usize,
    std_err: f64,
    retries: usize,
    warning: Option<String>,
}

#[pymethods]
impl PyRateReport {
    fn __repr__(&self) -> String {
        format!(
            "RateReport(method={:?}, r_u={}, c_e={}, r_s={}, std_err={}, trials={})",
            self.method, self.r_u, self.c_e, self.r_s, self.std_err, self.trials
        )
    }
}

impl From<rates::RateReport> for PyRateReport {
    fn from(r: rates::RateReport) -> Self {
        PyRateReport {
            r_u: r.r_u,
            c_e: r.c_e,
            r_s: r.r_s,
            method: r.method.name().to_string(),
            trials: r.trials,
            std_err: r.std_err,
            retries: r.retries,
            warning: r.warning,
        }
    }
}

/// Rate by method name: monte-carlo, theorem1, asymptotic-low,
/// asymptotic-high, bound-low or bound-high.
#[pyfunction]
#[pyo3(signature = (cfg, method = "theorem1", trials = sparsesec::experiments::DEFAULT_TRIALS, seed = 0))]
fn rate(py: Python<'_>, cfg: PyRef<'_, PySystemConfig>, method: &str, trials: usize, seed: u64) -> PyResult<PyRateReport> {
    let method: Method = method.parse().map_err(to_py)?;
    let cfg = cfg.inner;
    cfg.ensure_valid().map_err(to_py)?;
    py.detach(|| evaluate_rate(method, &cfg, trials, seed)).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn rate_theorem1(cfg: PyRef<'_, PySystemConfig>) -> PyResult<PyRateReport> {
    rates::rate_theorem1(&cfg.inner).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (cfg, trials = sparsesec::experiments::DEFAULT_TRIALS, seed = 0))]
fn rate_monte_carlo(py: Python<'_>, cfg: PyRef<'_, PySystemConfig>, trials: usize, seed: u64) -> PyResult<PyRateReport> {
    let cfg = cfg.inner;
    py.detach(|| rates::rate_monte_carlo(&cfg, trials, seed)).map(Into::into).map_err(to_py)
}

/// Dict with chi_l, chi_h, rho_star and l_t_star.
#[pyfunction]
fn chi_metrics<'py>(py: Python<'py>, rho: f64, eta: f64, cfg: PyRef<'_, PySystemConfig>) -> PyResult<Bound<'py, PyDict>> {
    let m = rates::chi_metrics(rho, eta, &cfg.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("chi_l", m.chi_l)?;
    d.set_item("chi_h", m.chi_h)?;
    d.set_item("rho_star", m.rho_star)?;
    d.set_item("l_t_star", m.l_t_star)?;
    Ok(d)
}

/// `(low_snr_bound, high_snr_bound)`.
#[pyfunction]
fn bounds(cfg: PyRef<'_, PySystemConfig>) -> PyResult<(f64, f64)> {
    rates::bounds(&cfg.inner).map(|b| (b.low, b.high)).map_err(to_py)
}

/// CSV text of a preset figure sweep, e.g. `figure_csv("fig3", trials=200, seed=7)`.
#[pyfunction]
#[pyo3(signature = (name, trials = None, seed = 0))]
fn figure_csv(py: Python<'_>, name: &str, trials: Option<usize>, seed: u64) -> PyResult<String> {
    let fig: Figure = name.parse().map_err(to_py)?;
    let mut spec = figure(fig);
    if let Some(t) = trials {
        spec.trials = t;
    }
    spec.seed = seed;
    py.detach(|| run_sweep(&spec)).map(|r| r.to_csv()).map_err(to_py)
}

#[pymodule]
pub fn sparsesec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemConfig>()?;
    m.add_class::<PyRateReport>()?;
    m.add_function(wrap_pyfunction!(rate, m)?)?;
    m.add_function(wrap_pyfunction!(rate_theorem1, m)?)?;
    m.add_function(wrap_pyfunction!(rate_monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(chi_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(figure_csv, m)?)?;
    m.add("InvalidConfigError", m.py().get_type::<InvalidConfigError>())?;
    m.add("UnsupportedRegimeError", m.py().get_type::<UnsupportedRegimeError>())?;
    m.add("DEFAULT_TRIALS", sparsesec::experiments::DEFAULT_TRIALS)?;
    Ok(())
}
