//! Python module `exact_wkb_py`.

use std::collections::BTreeMap;
use std::sync::Arc;

use exact_wkb::borel::GridParams;
use exact_wkb::coeffield::Sign;
use exact_wkb::formal::{wkb_recursion, ProblemSpec};
use exact_wkb::geometry::{classify_critical_points, trace_trajectory, LiouvilleFrame, TraceOptions};
use exact_wkb::laplace::{wronskian, ExactRoot, LaplaceOptions};
use exact_wkb::problems::{builtin, catalog};
use exact_wkb::WkbError;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: WkbError) -> PyErr {
    match e {
        WkbError::UnknownProblem(_)
        | WkbError::InvalidParameter(_)
        | WkbError::Syntax { .. }
        | WkbError::UnknownIdentifier { .. }
        | WkbError::NonPolynomialInH
        | WkbError::DegenerateDiscriminant
        | WkbError::Pole(_)
        | WkbError::TurningPoint(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn sign(alpha: &str) -> PyResult<Sign> {
    match alpha {
        "+" | "plus" => Ok(Sign::Plus),
        "-" | "minus" => Ok(Sign::Minus),
        _ => Err(PyValueError::new_err(format!("alpha must be '+' or '-', got {alpha:?}"))),
    }
}

#[pyclass(name = "Problem", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyProblem {
    spec: Arc<ProblemSpec>,
}

#[pymethods]
impl PyProblem {
    /// ħ²ψ″ + pħψ′ + qψ = 0 from expressions in `x` and `h`.
    #[new]
    fn new(name: &str, p: &str, q: &str) -> PyResult<Self> {
        Ok(PyProblem { spec: Arc::new(ProblemSpec::from_exprs(name, p, q).map_err(err)?) })
    }

    #[staticmethod]
    #[pyo3(signature = (name, params = None))]
    fn builtin(name: &str, params: Option<BTreeMap<String, f64>>) -> PyResult<Self> {
        Ok(PyProblem { spec: Arc::new(builtin(name, &params.unwrap_or_default()).map_err(err)?) })
    }

    #[getter]
    fn name(&self) -> String {
        self.spec.name.clone()
    }

    #[getter]
    fn is_rational(&self) -> bool {
        self.spec.is_rational()
    }

    fn d0(&self, x: Complex64) -> Complex64 {
        self.spec.d0(x)
    }

    /// Critical points as JSON objects.
    fn critical_points(&self) -> PyResult<String> {
        let pts = classify_critical_points(&self.spec).map_err(err)?;
        serde_json::to_string(&pts).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Exact WKB coefficients s_k as printed rational functions.
    #[pyo3(signature = (order, alpha = "+"))]
    fn formal_coefficients(&self, order: usize, alpha: &str) -> PyResult<Vec<String>> {
        let roots = wkb_recursion(&self.spec, order).map_err(err)?;
        Ok(roots.coeffs(sign(alpha)?).iter().map(|c| c.to_string()).collect())
    }

    /// Status labels of the two rays of the trajectory through `x0`.
    #[pyo3(signature = (x0, theta = 0.0))]
    fn trace(&self, x0: Complex64, theta: f64) -> PyResult<(String, String)> {
        let fr = LiouvilleFrame::new(self.spec.clone(), x0, Sign::Plus, theta).map_err(err)?;
        let t = trace_trajectory(&fr, x0, &TraceOptions::default()).map_err(err)?;
        Ok((t.plus.status.label().to_string(), t.minus.status.label().to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Problem({:?})", self.spec.name)
    }
}

/// Borel-Laplace resummed WKB solution for one branch.
#[pyclass(name = "ExactSolution", frozen)]
pub struct PyExactSolution {
    root: ExactRoot,
}

#[pymethods]
impl PyExactSolution {
    #[new]
    #[pyo3(signature = (problem, x0, alpha = "+", theta = 0.0, xi_max = 5.0, xi_n = 250, laplace_tol = 1e-8))]
    fn new(problem: &PyProblem, x0: Complex64, alpha: &str, theta: f64, xi_max: f64, xi_n: usize, laplace_tol: f64) -> PyResult<Self> {
        if xi_n == 0 || xi_max <= 0.0 {
            return Err(PyValueError::new_err("xi_max and xi_n must be positive"));
        }
        let fr = LiouvilleFrame::new(problem.spec.clone(), x0, Sign::Plus, theta).map_err(err)?;
        let grid = GridParams { h: xi_max / xi_n as f64, n: xi_n, ..GridParams::default() };
        let opts = LaplaceOptions { tol: laplace_tol, ..LaplaceOptions::default() };
        let root = ExactRoot::new(problem.spec.clone(), &fr, sign(alpha)?, grid, opts).map_err(err)?;
        Ok(PyExactSolution { root })
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.root.theta()
    }

    /// Resummed Riccati root S(x, ħ).
    fn s(&self, x: Complex64, hbar: Complex64) -> PyResult<Complex64> {
        self.root.s(x, hbar).map_err(err)
    }

    /// ψ(x, ħ), normalized to 1 at the base point.
    fn psi(&self, x: Complex64, hbar: Complex64) -> PyResult<Complex64> {
        self.root.psi(x, hbar).map_err(err)
    }
}

/// Normalized Wronskian S₊ − S₋ of two resummed branches.
#[pyfunction(name = "wronskian")]
fn py_wronskian(plus: &PyExactSolution, minus: &PyExactSolution, x: Complex64, hbar: Complex64) -> PyResult<Complex64> {
    wronskian(&plus.root, &minus.root, x, hbar).map_err(err)
}

#[pyfunction]
fn problem_names() -> Vec<String> {
    catalog().into_iter().map(|e| e.name.to_string()).collect()
}

#[pymodule]
fn exact_wkb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyExactSolution>()?;
    m.add_function(wrap_pyfunction!(py_wronskian, m)?)?;
    m.add_function(wrap_pyfunction!(problem_names, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
