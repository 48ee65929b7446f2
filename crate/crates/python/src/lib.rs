//! Python module `pyxyzcorr`. Exact results cross the boundary as fraction
//! strings; reports become plain dicts.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use xyzcorr::corrfn;
use xyzcorr::edoracle;
use xyzcorr::exact::RatFunc;
use xyzcorr::pvi;
use xyzcorr::qsolver;
use xyzcorr::taurec::TauTable;
use xyzcorr::thetanum;

fn runtime(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(runtime)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_rational(text: &str) -> PyResult<BigRational> {
    text.trim().parse().map_err(|_| PyValueError::new_err(format!("expected 'p/q', got {text:?}")))
}

fn check_n(n: i64) -> PyResult<()> {
    if n < 0 {
        return Err(PyValueError::new_err("n must be non-negative"));
    }
    Ok(())
}

fn check_tau(tau: Complex64) -> PyResult<()> {
    if tau.im.is_nan() || tau.im <= 0.0 {
        return Err(PyValueError::new_err("Im tau must be positive"));
    }
    Ok(())
}

/// Exact rational function, coefficients ascending.
#[pyclass(frozen, module = "pyxyzcorr")]
struct Rational {
    inner: RatFunc,
}

#[pymethods]
impl Rational {
    #[getter]
    fn variable(&self) -> String {
        self.inner.var().to_string()
    }

    #[getter]
    fn num(&self) -> Vec<String> {
        self.inner.num().coeffs().iter().map(|c| c.to_string()).collect()
    }

    #[getter]
    fn den(&self) -> Vec<String> {
        self.inner.den().coeffs().iter().map(|c| c.to_string()).collect()
    }

    /// Exact value at a fraction string.
    fn exact(&self, x: &str) -> PyResult<String> {
        self.inner.eval(&parse_rational(x)?).map(|v| v.to_string()).map_err(runtime)
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval_f64(x)
    }

    fn __eq__(&self, other: &Rational) -> bool {
        self.inner == other.inner
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Rational({})", self.inner)
    }
}

/// `f_n` in the anisotropy `zeta`.
#[pyfunction]
fn f_zeta(n: i64) -> PyResult<Rational> {
    check_n(n)?;
    corrfn::f_zeta(&mut TauTable::new(), n).map(|inner| Rational { inner }).map_err(runtime)
}

/// `f_n` in the symmetric variable `Z`.
#[pyfunction]
fn f_in_z(n: i64) -> PyResult<Rational> {
    check_n(n)?;
    corrfn::f_in_disc(&mut TauTable::new(), n).map(|f| Rational { inner: f.in_disc }).map_err(runtime)
}

/// Exact `(C^x, C^y, C^z)` as fraction strings.
#[pyfunction]
fn correlations(n: i64, zeta: &str) -> PyResult<(String, String, String)> {
    check_n(n)?;
    let c = corrfn::correlations(&mut TauTable::new(), n, &parse_rational(zeta)?).map_err(runtime)?;
    Ok((c.cx.to_string(), c.cy.to_string(), c.cz.to_string()))
}

#[pyfunction]
fn f_infinity(zeta: f64) -> f64 {
    corrfn::f_infinity(zeta)
}

/// `(s_n, s̄_n)` coefficient lists.
#[pyfunction]
fn tau_polynomials(n: i64) -> PyResult<(Vec<String>, Vec<String>)> {
    let mut t = TauTable::new();
    let coeffs = |p: &xyzcorr::exact::Poly| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>();
    let s = coeffs(t.tau_s(n).map_err(runtime)?);
    let sbar = coeffs(t.tau_sbar(n).map_err(runtime)?);
    Ok((s, sbar))
}

#[pyclass(frozen, module = "pyxyzcorr")]
struct GroundState {
    inner: edoracle::GroundState,
}

#[pymethods]
impl GroundState {
    #[getter]
    fn length(&self) -> usize {
        self.inner.l
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn vector(&self) -> Vec<f64> {
        self.inner.vector.clone()
    }

    /// Bond-averaged `(C^x, C^y, C^z)` and the largest per-bond deviation.
    fn correlations(&self) -> ((f64, f64, f64), f64) {
        let c = edoracle::measure_correlations(&self.inner);
        ((c.cx, c.cy, c.cz), c.spread)
    }

    /// `f` inferred from each of the three correlations.
    fn infer_f(&self, zeta: f64) -> PyResult<(f64, f64, f64)> {
        let c = edoracle::measure_correlations(&self.inner);
        let f = edoracle::infer_from(&c, zeta).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((f.fx, f.fy, f.fz))
    }
}

/// Ground state of the chain in the even sector.
#[pyfunction]
#[pyo3(signature = (length, zeta))]
fn ground_state(py: Python<'_>, length: usize, zeta: f64) -> PyResult<GroundState> {
    let gs = py.detach(|| edoracle::ground_state_even_sector(length, zeta));
    match gs {
        Ok(inner) => Ok(GroundState { inner }),
        Err(e @ edoracle::EdError::SizeLimit { .. }) => Err(PyValueError::new_err(e.to_string())),
        Err(e) => Err(runtime(e)),
    }
}

/// Transfer-matrix eigenvalue and commutation residuals at `η = π/3`.
#[pyfunction]
fn transfer_check<'py>(py: Python<'py>, length: usize, tau: Complex64) -> PyResult<Bound<'py, PyAny>> {
    check_tau(tau)?;
    let report = edoracle::transfer_check(length, tau, &edoracle::SPECTRAL_POINTS).map_err(runtime)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (j, u, tau, order = 0))]
fn theta(j: u8, u: Complex64, tau: Complex64, order: u32) -> PyResult<Complex64> {
    check_tau(tau)?;
    thetanum::theta(j, u, tau, order).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn modular_values<'py>(py: Python<'py>, tau: Complex64) -> PyResult<Bound<'py, PyAny>> {
    check_tau(tau)?;
    to_py(py, &thetanum::modular_values(tau).map_err(runtime)?)
}

#[pyfunction]
#[pyo3(signature = (tau, seed = 2024))]
fn identity_suite<'py>(py: Python<'py>, tau: Complex64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    check_tau(tau)?;
    to_py(py, &thetanum::identity_suite(tau, seed).map_err(runtime)?)
}

#[pyfunction]
fn baxter_f_infinity<'py>(py: Python<'py>, tau: Complex64) -> PyResult<Bound<'py, PyAny>> {
    check_tau(tau)?;
    to_py(py, &thetanum::baxter_f_infinity(tau).map_err(runtime)?)
}

/// Residuals along the Bäcklund chain, each rendered as a fraction string.
#[pyfunction]
fn pvi_verify<'py>(py: Python<'py>, n_max: usize) -> PyResult<Bound<'py, PyAny>> {
    if n_max > 8 {
        return Err(PyValueError::new_err("n_max above 8 is not supported"));
    }
    let points = pvi::chain(n_max).map_err(runtime)?;
    let mut t = TauTable::new();
    let mut rows = Vec::new();
    for (n, pt) in points.iter().enumerate() {
        let (r1, r2) = pvi::hamilton_residuals(pt);
        let f = corrfn::f_in_disc(&mut t, n as i64).map_err(runtime)?;
        let fpqp = pvi::fpqp_residual(pt, n as i64, &f.in_disc).map_err(runtime)?;
        rows.push(serde_json::json!({
            "n": n,
            "hamilton_residuals": [pvi::residual_text(&r1), pvi::residual_text(&r2)],
            "fpqp_residual": pvi::residual_text(&fpqp),
            "factorization": pvi::factorization_check(n as i64),
        }));
    }
    to_py(py, &rows)
}

#[pyclass(frozen, module = "pyxyzcorr")]
struct QSolution {
    inner: qsolver::QCoefficients,
}

#[pymethods]
impl QSolution {
    #[getter]
    fn nullspace_gap(&self) -> f64 {
        self.inner.nullspace_gap
    }

    #[getter]
    fn coefficients(&self) -> Vec<Complex64> {
        self.inner.base.clone()
    }

    fn __call__(&self, u: Complex64) -> Complex64 {
        self.inner.q(u)
    }

    fn wronskian<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &qsolver::wronskian_checks(&self.inner).map_err(runtime)?)
    }

    fn ddt<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &qsolver::ddt_check(&self.inner).map_err(runtime)?)
    }

    fn qfc<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &qsolver::qfc_check(&self.inner).map_err(runtime)?)
    }

    fn f_from_q(&self) -> PyResult<Complex64> {
        qsolver::f_from_q(&self.inner).map_err(runtime)
    }
}

#[pyfunction]
fn solve_q(n: usize, tau: Complex64) -> PyResult<QSolution> {
    check_tau(tau)?;
    qsolver::solve_q(n, tau).map(|inner| QSolution { inner }).map_err(runtime)
}

/// `f_n` at a real anisotropy, evaluated exactly when `zeta` is a fraction string.
#[pyfunction]
fn f_value(n: i64, zeta: &Bound<'_, PyAny>) -> PyResult<f64> {
    check_n(n)?;
    let f = corrfn::f_zeta(&mut TauTable::new(), n).map_err(runtime)?;
    if let Ok(text) = zeta.extract::<String>() {
        let v = f.eval(&parse_rational(&text)?).map_err(runtime)?;
        return Ok(v.to_f64().unwrap_or(f64::NAN));
    }
    Ok(f.eval_f64(zeta.extract::<f64>()?))
}

#[pymodule]
fn pyxyzcorr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Rational>()?;
    m.add_class::<GroundState>()?;
    m.add_class::<QSolution>()?;
    m.add_function(wrap_pyfunction!(f_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(f_in_z, m)?)?;
    m.add_function(wrap_pyfunction!(f_value, m)?)?;
    m.add_function(wrap_pyfunction!(correlations, m)?)?;
    m.add_function(wrap_pyfunction!(f_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(tau_polynomials, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_check, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(modular_values, m)?)?;
    m.add_function(wrap_pyfunction!(identity_suite, m)?)?;
    m.add_function(wrap_pyfunction!(baxter_f_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(pvi_verify, m)?)?;
    m.add_function(wrap_pyfunction!(solve_q, m)?)?;
    Ok(())
}
