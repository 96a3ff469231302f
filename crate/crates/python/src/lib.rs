//! Python bindings. Library errors surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use l1minimax::complexity;
use l1minimax::lowerbound;
use l1minimax::measures::{self, Atom, ExpQuadIntegrand, MixtureMeasure1D, Piece};
use l1minimax::numerics::Interval;
use l1minimax::online::{self, DataMode, LambdaChoice, OnlineConfig};
use l1minimax::{penalty, priors};

fn py_err(e: l1minimax::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Measure on the real line: point masses plus a piecewise-constant density.
#[pyclass(name = "Measure", module = "l1minimax", frozen)]
pub struct PyMeasure {
    inner: MixtureMeasure1D,
}

#[pymethods]
impl PyMeasure {
    /// `atoms` is a list of (location, mass); `pieces` a list of (lo, hi, level)
    /// with infinite ends allowed.
    #[new]
    #[pyo3(signature = (atoms = Vec::new(), pieces = Vec::new()))]
    fn new(atoms: Vec<(f64, f64)>, pieces: Vec<(f64, f64, f64)>) -> PyResult<Self> {
        let atoms = atoms
            .into_iter()
            .map(|(location, mass)| Atom { location, mass })
            .collect();
        let pieces = pieces
            .into_iter()
            .map(|(lo, hi, level)| Piece::new(Interval::new(lo, hi)?, level))
            .collect::<l1minimax::Result<Vec<_>>>()
            .map_err(py_err)?;
        MixtureMeasure1D::new(atoms, pieces)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn spike_and_tails(lam: f64) -> PyResult<Self> {
        priors::st_preprior(lam).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn spike_and_tails_scaled(lam: f64, smoothness: f64) -> PyResult<Self> {
        priors::st_preprior_scaled(lam, smoothness)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (level = 1.0))]
    fn lebesgue(level: f64) -> PyResult<Self> {
        MixtureMeasure1D::lebesgue(level)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn spike() -> Self {
        Self {
            inner: priors::spike_only(),
        }
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        self.inner.atoms().iter().map(|a| (a.location, a.mass)).collect()
    }

    fn pieces(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .pieces()
            .iter()
            .map(|p| (p.interval().lo(), p.interval().hi(), p.level()))
            .collect()
    }

    fn density(&self, x: f64) -> f64 {
        self.inner.density(x)
    }

    fn scale(&self, s: f64) -> PyResult<Self> {
        self.inner.scale(s).map(|inner| Self { inner }).map_err(py_err)
    }

    /// ln ∫ e^{−λ|θ|} dw(θ)
    fn log_partition(&self, lam: f64) -> PyResult<f64> {
        measures::log_partition(&self.inner, lam).map_err(py_err)
    }

    /// ln ∫ e^{−(a/2)(θ−u)² − λ|θ| − offset} dw(θ)
    #[pyo3(signature = (curvature, center, lam, offset = 0.0))]
    fn integrate_exp(&self, curvature: f64, center: f64, lam: f64, offset: f64) -> PyResult<f64> {
        let g = ExpQuadIntegrand::new(curvature, center, lam, offset).map_err(py_err)?;
        measures::integrate_exp(&self.inner, &g).map_err(py_err)
    }

    /// (regret, argmax_u, divergent) of the one-dimensional unit-curvature problem.
    #[pyo3(signature = (lam, u_max = None))]
    fn worst_case_regret(&self, lam: f64, u_max: Option<f64>) -> PyResult<(f64, f64, bool)> {
        let u_max = u_max.unwrap_or_else(|| complexity::default_u_max(lam));
        let r = complexity::worst_case_regret(&self.inner, lam, u_max).map_err(py_err)?;
        Ok((r.regret, r.argmax_u, r.divergent))
    }

    fn __repr__(&self) -> String {
        format!("Measure(atoms={:?}, pieces={:?})", self.atoms(), self.pieces())
    }
}

#[pyfunction]
fn shtarkov_exact(d: u64, lam: f64) -> PyResult<f64> {
    complexity::shtarkov_exact(d, lam).map_err(py_err)
}

#[pyfunction]
fn shtarkov_asymptotic_lower(d: u64, lam: f64) -> PyResult<f64> {
    complexity::shtarkov_asymptotic_lower(d, lam).map_err(py_err)
}

#[pyfunction]
fn ec_upper_bound(d: u64, lam: f64, smoothness: f64) -> PyResult<f64> {
    complexity::ec_upper_bound(d, lam, smoothness).map_err(py_err)
}

fn point_dict<'py>(py: Python<'py>, p: &complexity::RegretCurvePoint) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lambda", p.lam)?;
    d.set_item("shtarkov", p.shtarkov)?;
    d.set_item("regret_st", p.regret_st)?;
    d.set_item("regret_jeffreys", p.regret_jeffreys)?;
    d.set_item("st_upper", p.st_upper)?;
    d.set_item("argmax_u_st", p.argmax_u_st)?;
    d.set_item("argmax_u_jeffreys", p.argmax_u_jeffreys)?;
    Ok(d)
}

/// One row per λ, in input order after sorting, as dicts.
#[pyfunction]
#[pyo3(signature = (lams, u_max = None, grid = complexity::DEFAULT_REGRET_GRID))]
fn sweep<'py>(py: Python<'py>, lams: Vec<f64>, u_max: Option<f64>, grid: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let rows = py
        .detach(|| complexity::sweep_lambda(&lams, u_max, grid))
        .map_err(py_err)?;
    rows.iter().map(|r| point_dict(py, r)).collect()
}

#[pyfunction]
fn lambda_star(smoothness: f64, n: usize, d: usize) -> PyResult<f64> {
    online::lambda_star(smoothness, n, d).map_err(py_err)
}

#[pyfunction]
fn regret_upper_bound(radius: f64, smoothness: f64, n: usize, d: usize) -> PyResult<f64> {
    online::regret_upper_bound(radius, smoothness, n, d).map_err(py_err)
}

#[pyfunction]
fn minimax_regret_lower(radius: f64, total_smoothness: f64, d: usize) -> PyResult<f64> {
    lowerbound::minimax_regret_lower(radius, total_smoothness, d).map_err(py_err)
}

#[pyfunction]
fn prior_entropy(eps: f64) -> PyResult<f64> {
    lowerbound::prior_entropy(eps).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (eps, smoothness = 1.0))]
fn bayes_risk_three_point(eps: f64, smoothness: f64) -> PyResult<f64> {
    lowerbound::bayes_risk_three_point(eps, smoothness).map_err(py_err)
}

#[pyfunction]
fn infinite_dim_weights(smoothness: f64, dims: usize) -> PyResult<Vec<f64>> {
    priors::infinite_dim_weights(smoothness, dims).map_err(py_err)
}

#[pyfunction]
fn soft_threshold(u: f64, lam: f64) -> f64 {
    penalty::soft_threshold(u, lam)
}

#[pyfunction]
fn l1_ball_project(x: Vec<f64>, radius: f64) -> PyResult<Vec<f64>> {
    penalty::l1_ball_project(&x, radius).map_err(py_err)
}

/// Sequential run; `lam` is a number or "auto", `data` one of
/// "adversarial", "gaussian", "zeros".
#[pyfunction]
#[pyo3(signature = (d, n, smoothness = 1.0, radius = 1.0, lam = None, data = "adversarial", seed = 7))]
#[allow(clippy::too_many_arguments)]
fn run_online<'py>(
    py: Python<'py>,
    d: usize,
    n: usize,
    smoothness: f64,
    radius: f64,
    lam: Option<f64>,
    data: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let data = match data {
        "adversarial" => DataMode::AdversarialMean,
        "gaussian" => DataMode::IidGaussian,
        "zeros" => DataMode::Zeros,
        other => return Err(PyValueError::new_err(format!("unknown data mode `{other}`"))),
    };
    let cfg = OnlineConfig {
        d,
        n,
        smoothness,
        radius,
        lam: lam.map_or(LambdaChoice::Auto, LambdaChoice::Fixed),
        data,
        seed,
    };
    let r = py.detach(|| online::run_online(&cfg)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("lambda", r.lam)?;
    out.set_item("step_losses", r.step_losses.clone())?;
    out.set_item("cum_regret_luckiness", r.cum_regret_luckiness.clone())?;
    out.set_item("cum_regret_ball", r.cum_regret_ball.clone())?;
    out.set_item("cumulative_regret_ball", r.cumulative_regret_ball)?;
    out.set_item("cumulative_regret_luckiness", r.cumulative_regret_luckiness)?;
    out.set_item("bound", r.bound)?;
    out.set_item("telescoping_gap", r.telescoping_gap())?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "l1minimax")]
fn l1minimax_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMeasure>()?;
    m.add_function(wrap_pyfunction!(shtarkov_exact, m)?)?;
    m.add_function(wrap_pyfunction!(shtarkov_asymptotic_lower, m)?)?;
    m.add_function(wrap_pyfunction!(ec_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_star, m)?)?;
    m.add_function(wrap_pyfunction!(regret_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(minimax_regret_lower, m)?)?;
    m.add_function(wrap_pyfunction!(prior_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(bayes_risk_three_point, m)?)?;
    m.add_function(wrap_pyfunction!(infinite_dim_weights, m)?)?;
    m.add_function(wrap_pyfunction!(soft_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(l1_ball_project, m)?)?;
    m.add_function(wrap_pyfunction!(run_online, m)?)?;
    Ok(())
}
