//! Python bindings: `import pyurkit`.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use urkit::config::{parse_experiment, parse_innovations};
use urkit::montecarlo;
use urkit::simulation::{DgpConfig, SeedSpec};
use urkit::unitroot::{run_method, schwert_lags as schwert};
use urkit::{DetSpec, Error, Method, Statistic, TwoStepForm};

create_exception!(pyurkit, DegenerateError, PyValueError, "Degenerate regression or statistic.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::DegenerateResidualVariance
        | Error::DegenerateDof { .. }
        | Error::ZeroStandardError { .. }
        | Error::TooManyDegenerate { .. } => DegenerateError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

/// Result of one unit root regression.
#[pyclass(name = "UnitRootResult", frozen)]
struct PyUnitRootResult {
    inner: urkit::UnitRootResult,
}

#[pymethods]
impl PyUnitRootResult {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.name()
    }
    #[getter]
    fn rho_hat(&self) -> f64 {
        self.inner.rho_hat
    }
    #[getter]
    fn se_rho(&self) -> f64 {
        self.inner.se_rho
    }
    #[getter]
    fn t_df(&self) -> f64 {
        self.inner.t_df
    }
    #[getter]
    fn f_stat(&self) -> f64 {
        self.inner.f_stat
    }
    #[getter]
    fn chi(&self) -> f64 {
        self.inner.chi
    }
    #[getter]
    fn t_lm(&self) -> f64 {
        self.inner.t_lm
    }
    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }
    #[getter]
    fn t_effective(&self) -> usize {
        self.inner.t_effective
    }
    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }
    #[getter]
    fn beta(&self) -> Vec<f64> {
        self.inner.beta.clone()
    }
    #[getter]
    fn gamma_structural(&self) -> Option<Vec<f64>> {
        self.inner.gamma_structural.clone()
    }
    #[getter]
    fn gamma_step1(&self) -> Option<Vec<f64>> {
        self.inner.gamma_step1.clone()
    }
    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2()
    }
    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.inner.fit.residuals.clone()
    }
    #[getter]
    fn design_labels(&self) -> Vec<String> {
        self.inner.design.labels().to_vec()
    }

    fn __repr__(&self) -> String {
        let r = &self.inner;
        format!(
            "UnitRootResult(method='{}', rho_hat={}, t_df={}, t_lm={}, k={}, t_effective={}, m={})",
            r.method, r.rho_hat, r.t_df, r.t_lm, r.k, r.t_effective, r.m
        )
    }
}

fn wrap(r: urkit::Result<urkit::UnitRootResult>) -> PyResult<PyUnitRootResult> {
    r.map(|inner| PyUnitRootResult { inner }).map_err(to_py)
}

/// Runs `method` (onestep, twostep, residual, zeropad) on `y`.
#[pyfunction]
#[pyo3(signature = (y, method = "twostep", det = "c", k = 0))]
fn test(y: Vec<f64>, method: &str, det: &str, k: usize) -> PyResult<PyUnitRootResult> {
    let method: Method = parse(method)?;
    let spec: DetSpec = parse(det)?;
    wrap(run_method(method, &y, &spec, k))
}

#[pyfunction]
#[pyo3(signature = (y, det = "c", k = 0))]
fn one_step_df(y: Vec<f64>, det: &str, k: usize) -> PyResult<PyUnitRootResult> {
    wrap(urkit::one_step_df(&y, &parse(det)?, k))
}

/// `form` is `levels` or `residual`.
#[pyfunction]
#[pyo3(signature = (y, det = "c", k = 0, form = "levels"))]
fn two_step_df(y: Vec<f64>, det: &str, k: usize, form: &str) -> PyResult<PyUnitRootResult> {
    let form = match form {
        "levels" => TwoStepForm::Levels,
        "residual" => TwoStepForm::Residual,
        f => return Err(PyValueError::new_err(format!("form must be `levels` or `residual`, got `{f}`"))),
    };
    wrap(urkit::two_step_df(&y, &parse(det)?, k, form))
}

#[pyfunction]
#[pyo3(signature = (y, det = "c", k = 0))]
fn residual_only_df(y: Vec<f64>, det: &str, k: usize) -> PyResult<PyUnitRootResult> {
    wrap(urkit::residual_only_df(&y, &parse(det)?, k))
}

#[pyfunction]
#[pyo3(signature = (y, det = "c", k = 0))]
fn zero_padded_df(y: Vec<f64>, det: &str, k: usize) -> PyResult<PyUnitRootResult> {
    wrap(urkit::zero_padded_df(&y, &parse(det)?, k))
}

/// Returns `(chi, t_lm)` for an exclusion F statistic.
#[pyfunction]
fn lm_from_f(f_stat: f64, t_effective: usize, m: usize, sign: f64) -> PyResult<(f64, f64)> {
    urkit::lm_from_f(f_stat, t_effective, m, sign).map_err(to_py)
}

#[pyfunction]
fn schwert_lags(t: usize) -> usize {
    schwert(t)
}

/// Simulates `y_1..y_T` from the DGP described by the keyword arguments.
#[pyfunction]
#[pyo3(signature = (
    t, seed, alpha = 1.0, det = "none", gamma = None, error_ar = None,
    sigma = 1.0, z0 = 0.0, burn_in = 0, innovations = "gaussian", replication = 0
))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    t: usize,
    seed: u64,
    alpha: f64,
    det: &str,
    gamma: Option<Vec<f64>>,
    error_ar: Option<Vec<f64>>,
    sigma: f64,
    z0: f64,
    burn_in: usize,
    innovations: &str,
    replication: u64,
) -> PyResult<Vec<f64>> {
    let det: DetSpec = parse(det)?;
    let config = DgpConfig {
        gamma: gamma.unwrap_or_else(|| vec![0.0; det.column_count()]),
        det,
        alpha,
        error_ar: error_ar.unwrap_or_default(),
        sigma,
        z0,
        burn_in,
        innovations: parse_innovations(innovations).map_err(to_py)?,
    };
    urkit::simulate(&config, t, SeedSpec::new(seed, replication)).map_err(to_py)
}

/// Empirical null quantiles of the test statistics.
#[pyclass(name = "CriticalValueTable", frozen)]
struct PyCriticalValueTable {
    inner: montecarlo::CriticalValueTable,
}

#[pymethods]
impl PyCriticalValueTable {
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        montecarlo::CriticalValueTable::from_csv(text)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn lookup(&self, method: &str, statistic: &str, quantile: f64) -> PyResult<Option<f64>> {
        let method: Method = parse(method)?;
        let statistic: Statistic = parse(statistic)?;
        Ok(self.inner.lookup(method, statistic, quantile))
    }

    /// `(method, statistic, quantile, value, std_error)` rows.
    #[getter]
    fn entries(&self) -> Vec<(String, String, f64, f64, f64)> {
        self.inner
            .entries
            .iter()
            .map(|e| (e.method.to_string(), e.statistic.to_string(), e.quantile, e.value, e.std_error))
            .collect()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __len__(&self) -> usize {
        self.inner.entries.len()
    }
}

#[pyclass(name = "ExperimentReport", frozen)]
struct PyExperimentReport {
    inner: montecarlo::ExperimentReport,
}

#[pymethods]
impl PyExperimentReport {
    /// Rejection frequency of `(method, statistic)` under DGP `dgp`.
    fn rate(&self, method: &str, statistic: &str, dgp: &str) -> PyResult<Option<f64>> {
        let method: Method = parse(method)?;
        let statistic: Statistic = parse(statistic)?;
        Ok(self.inner.rate(method, statistic, dgp).map(|r| r.rate))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn power_curve_csv(&self) -> String {
        self.inner.power_curve_csv()
    }
}

/// Tabulates critical values for an INI experiment config.
#[pyfunction]
#[pyo3(signature = (config, threads = 0))]
fn critical_values(py: Python<'_>, config: &str, threads: usize) -> PyResult<PyCriticalValueTable> {
    let cfg = parse_experiment(config).map_err(to_py)?;
    py.detach(|| montecarlo::tabulate_critical_values(&cfg, threads))
        .map(|inner| PyCriticalValueTable { inner })
        .map_err(to_py)
}

/// Runs the analyses of an INI experiment config. Returns the report and
/// the critical value table when one was tabulated.
#[pyfunction]
#[pyo3(signature = (config, cv = None, threads = 0))]
fn run_experiment(
    py: Python<'_>,
    config: &str,
    cv: Option<&PyCriticalValueTable>,
    threads: usize,
) -> PyResult<(PyExperimentReport, Option<PyCriticalValueTable>)> {
    let cfg = parse_experiment(config).map_err(to_py)?;
    let cv = cv.map(|c| &c.inner);
    let (report, table) = py
        .detach(|| montecarlo::run_experiment(&cfg, cv, threads))
        .map_err(to_py)?;
    Ok((
        PyExperimentReport { inner: report },
        table.map(|inner| PyCriticalValueTable { inner }),
    ))
}

#[pymodule]
fn pyurkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DegenerateError", m.py().get_type::<DegenerateError>())?;
    m.add_class::<PyUnitRootResult>()?;
    m.add_class::<PyCriticalValueTable>()?;
    m.add_class::<PyExperimentReport>()?;
    m.add_function(wrap_pyfunction!(test, m)?)?;
    m.add_function(wrap_pyfunction!(one_step_df, m)?)?;
    m.add_function(wrap_pyfunction!(two_step_df, m)?)?;
    m.add_function(wrap_pyfunction!(residual_only_df, m)?)?;
    m.add_function(wrap_pyfunction!(zero_padded_df, m)?)?;
    m.add_function(wrap_pyfunction!(lm_from_f, m)?)?;
    m.add_function(wrap_pyfunction!(schwert_lags, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(critical_values, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
