//! Python bindings for the zernike-pde solver.
//!
//! Build the module with `cargo build --release -p zernike-pde-py`; the
//! resulting `libzernike_pde_py.so` imports as `zernike_pde` once renamed
//! (see `python/smoke_test.py`, which does this automatically).

use nalgebra::DVector;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use zernike_pde::analysis::GridSpec;
use zernike_pde::assembly;
use zernike_pde::basis::{self, CoefficientMatrix, QuadratureSpec, ZernikeIndex};
use zernike_pde::opmatrix::{self, PhiWeight, Projection};
use zernike_pde::presets;
use zernike_pde::solver::{self, Method, SolveOptions};

fn to_py_err(err: zernike_pde::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_method(method: &str) -> PyResult<Method> {
    match method {
        "l1" => Ok(Method::L1),
        "l2" => Ok(Method::L2),
        other => Err(PyValueError::new_err(format!("unknown method '{other}'"))),
    }
}

fn check_orders(m_max: usize, n_max: usize) -> PyResult<()> {
    if m_max < 3 {
        return Err(PyValueError::new_err("m_max must be at least 3"));
    }
    if n_max < 1 {
        return Err(PyValueError::new_err("n_max must be at least 1"));
    }
    Ok(())
}

fn parse_projection(projection: &str) -> PyResult<Projection> {
    match projection {
        "project" => Ok(Projection::LagrangeProject),
        "truncate" => Ok(Projection::Truncate),
        other => Err(PyValueError::new_err(format!("unknown projection '{other}'"))),
    }
}

fn matrix_to_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Monomial coefficients of the radial polynomial R_n^m (index j holds the
/// coefficient of r^j).
#[pyfunction]
fn radial_polynomial(n: usize, m: usize) -> PyResult<Vec<f64>> {
    let idx = ZernikeIndex::new(n, m).map_err(to_py_err)?;
    Ok(basis::radial_poly(idx).coeffs().to_vec())
}

/// R_n^m(r) for r in [0, 1].
#[pyfunction]
fn eval_radial(n: usize, m: usize, r: f64) -> PyResult<f64> {
    let idx = ZernikeIndex::new(n, m).map_err(to_py_err)?;
    basis::eval_radial(idx, r).map_err(to_py_err)
}

/// The trigonometric vector [1, cos φ, sin φ, ..., cos mφ, sin mφ].
#[pyfunction]
fn trig_vector(phi: f64, m_max: usize) -> Vec<f64> {
    basis::trig_vector(phi, m_max).as_slice().to_vec()
}

/// Degree-n_max equispaced-node Lagrange interpolant of r^p, as monomial
/// coefficients.
#[pyfunction]
fn lagrange_project(p: usize, n_max: usize) -> Vec<f64> {
    opmatrix::lagrange_project(p, n_max)
}

/// One operational matrix as a list of rows. Kinds mirror the CLI:
/// E_phi, E_phi_cos2, E_phi_sin2, E_phi_cos2phi, E_Dphi, M_phi_sin2phi,
/// E_rr0, E_rr0_r, E_rr0_r2, E_rr0_r3, E_Drr0, E_Drr0_r2, M_R_r .. M_R_r4.
#[pyfunction]
#[pyo3(signature = (kind, order, r0 = 0.0, phi0 = 0.0, projection = "project"))]
fn operational_matrix(
    kind: &str,
    order: usize,
    r0: f64,
    phi0: f64,
    projection: &str,
) -> PyResult<Vec<Vec<f64>>> {
    let projection = parse_projection(projection)?;
    let is_phi = kind.starts_with("E_phi") || kind.starts_with("E_Dphi") || kind.starts_with("M_phi");
    if is_phi && order < 3 {
        return Err(PyValueError::new_err("phi matrices need order (m_max) >= 3"));
    }
    if !is_phi && order < 1 {
        return Err(PyValueError::new_err("radial matrices need order (n_max) >= 1"));
    }
    let matrix = match kind {
        "E_phi" => opmatrix::phi_integration_matrix(order, phi0, PhiWeight::One),
        "E_phi_cos2" => opmatrix::phi_integration_matrix(order, phi0, PhiWeight::CosSquared),
        "E_phi_sin2" => opmatrix::phi_integration_matrix(order, phi0, PhiWeight::SinSquared),
        "E_phi_cos2phi" => opmatrix::phi_integration_matrix(order, phi0, PhiWeight::CosTwoPhi),
        "E_Dphi" => opmatrix::phi_double_integration_matrix(order, phi0),
        "M_phi_sin2phi" => opmatrix::phi_multiplication_matrix(order),
        "E_rr0" => opmatrix::radial_integration_matrix(order, r0, 0, projection).map_err(to_py_err)?,
        "E_rr0_r" => opmatrix::radial_integration_matrix(order, r0, 1, projection).map_err(to_py_err)?,
        "E_rr0_r2" => opmatrix::radial_integration_matrix(order, r0, 2, projection).map_err(to_py_err)?,
        "E_rr0_r3" => opmatrix::radial_integration_matrix(order, r0, 3, projection).map_err(to_py_err)?,
        "E_Drr0" => {
            opmatrix::radial_double_integration_matrix(order, r0, 0, projection).map_err(to_py_err)?
        }
        "E_Drr0_r2" => {
            opmatrix::radial_double_integration_matrix(order, r0, 2, projection).map_err(to_py_err)?
        }
        "M_R_r" => opmatrix::radial_multiplication_matrix(order, 1, projection),
        "M_R_r2" => opmatrix::radial_multiplication_matrix(order, 2, projection),
        "M_R_r3" => opmatrix::radial_multiplication_matrix(order, 3, projection),
        "M_R_r4" => opmatrix::radial_multiplication_matrix(order, 4, projection),
        other => return Err(PyValueError::new_err(format!("unknown matrix kind '{other}'"))),
    };
    Ok(matrix_to_rows(matrix.matrix()))
}

/// Expands a Python callable f(r, phi) into Zernike coefficients,
/// returned as an M×N list of rows.
#[pyfunction]
fn expand_function(
    py: Python<'_>,
    f: Py<PyAny>,
    m_max: usize,
    n_max: usize,
) -> PyResult<Vec<Vec<f64>>> {
    let spec = QuadratureSpec::for_orders(m_max, n_max);
    let call_error = std::cell::RefCell::new(None);
    let result = basis::expand_function(
        |r, phi| match f.call1(py, (r, phi)).and_then(|v| v.extract::<f64>(py)) {
            Ok(v) => v,
            Err(e) => {
                call_error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        m_max,
        n_max,
        spec,
    );
    if let Some(e) = call_error.into_inner() {
        return Err(e);
    }
    let u = result.map_err(to_py_err)?;
    Ok(matrix_to_rows(u.matrix()))
}

/// Solution record: coefficient matrix plus solver diagnostics.
#[pyclass(name = "SolveReport")]
struct PySolveReport {
    #[pyo3(get)]
    method: String,
    #[pyo3(get)]
    residual_norm: f64,
    #[pyo3(get)]
    objective: f64,
    #[pyo3(get)]
    iterations: Option<usize>,
    #[pyo3(get)]
    duality_gap: Option<f64>,
    #[pyo3(get)]
    rank_estimate: Option<usize>,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    wall_time_ms: f64,
    u: CoefficientMatrix,
}

#[pymethods]
impl PySolveReport {
    /// The coefficient matrix as a list of rows.
    fn coefficients(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(self.u.matrix())
    }

    /// Evaluates the reconstructed solution at (r, phi).
    fn evaluate(&self, r: f64, phi: f64) -> PyResult<f64> {
        basis::reconstruct(&self.u, r, phi).map_err(to_py_err)
    }

    /// Mean square error of the reconstruction against a callable f(r, phi)
    /// on an equispaced polar grid (the r = 1 ring is excluded when
    /// `exclude_rim` is set, for boundary data with jumps on the rim).
    #[pyo3(signature = (f, n_r = 50, n_phi = 50, exclude_rim = false))]
    fn mse(
        &self,
        py: Python<'_>,
        f: Py<PyAny>,
        n_r: usize,
        n_phi: usize,
        exclude_rim: bool,
    ) -> PyResult<f64> {
        let grid = GridSpec::new(n_r, n_phi).map_err(to_py_err)?;
        let call_error = std::cell::RefCell::new(None);
        let exact = |r: f64, phi: f64| match f
            .call1(py, (r, phi))
            .and_then(|v| v.extract::<f64>(py))
        {
            Ok(v) => v,
            Err(e) => {
                call_error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let result = if exclude_rim {
            zernike_pde::analysis::mse_interior(exact, &self.u, grid)
        } else {
            zernike_pde::analysis::mse(exact, &self.u, grid)
        };
        if let Some(e) = call_error.into_inner() {
            return Err(e);
        }
        result.map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveReport(method='{}', residual_norm={:.3e}, objective={:.6}, converged={})",
            self.method, self.residual_norm, self.objective, self.converged
        )
    }
}

fn report_to_py(report: solver::SolveReport) -> PySolveReport {
    PySolveReport {
        method: match report.method {
            Method::L1 => "l1".into(),
            Method::L2 => "l2".into(),
        },
        residual_norm: report.residual_norm,
        objective: report.objective,
        iterations: report.iterations,
        duality_gap: report.duality_gap,
        rank_estimate: report.rank_estimate,
        converged: report.converged,
        wall_time_ms: report.wall_time.as_secs_f64() * 1e3,
        u: report.u,
    }
}

fn solve_system(
    system: &assembly::AssembledSystem,
    method: Method,
) -> PyResult<PySolveReport> {
    let opts = SolveOptions { method, ..SolveOptions::default() };
    let report = solver::solve(system, &opts)
        .map_err(|e| PyRuntimeError::new_err(format!("solver failed: {e}")))?;
    Ok(report_to_py(report))
}

/// Solves the built-in first-order example (exact solution e^{r cos φ}).
#[pyfunction]
#[pyo3(signature = (m_max, n_max, method = "l1", projection = "project"))]
fn solve_fopde_example(
    m_max: usize,
    n_max: usize,
    method: &str,
    projection: &str,
) -> PyResult<PySolveReport> {
    check_orders(m_max, n_max)?;
    let spec = presets::fopde_example(m_max, n_max, parse_projection(projection)?);
    let system = assembly::assemble_fopde(&spec).map_err(to_py_err)?;
    solve_system(&system, parse_method(method)?)
}

/// Solves the built-in discontinuous Laplace example.
#[pyfunction]
#[pyo3(signature = (m_max, n_max, method = "l1", projection = "project"))]
fn solve_laplace_example(
    m_max: usize,
    n_max: usize,
    method: &str,
    projection: &str,
) -> PyResult<PySolveReport> {
    check_orders(m_max, n_max)?;
    let spec = presets::laplace_example(m_max, n_max, parse_projection(projection)?);
    let system = assembly::assemble_sopde(&spec).map_err(to_py_err)?;
    solve_system(&system, parse_method(method)?)
}

/// Solves the Laplace equation with explicit boundary coefficient vectors:
/// g and h of length 2·m_max + 1 (value and radial derivative at r0), p and
/// q of length N (value and angular derivative at φ0).
#[pyfunction]
#[pyo3(signature = (g, h, p, q, m_max, n_max, method = "l1", r0 = 1.0, phi0 = 0.0))]
#[allow(clippy::too_many_arguments)]
fn solve_laplace(
    g: Vec<f64>,
    h: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
    m_max: usize,
    n_max: usize,
    method: &str,
    r0: f64,
    phi0: f64,
) -> PyResult<PySolveReport> {
    check_orders(m_max, n_max)?;
    let system = assembly::assemble_laplace(
        DVector::from_vec(g),
        DVector::from_vec(h),
        DVector::from_vec(p),
        DVector::from_vec(q),
        r0,
        phi0,
        m_max,
        n_max,
        Projection::LagrangeProject,
    )
    .map_err(to_py_err)?;
    solve_system(&system, parse_method(method)?)
}

/// Exact solution of the built-in Laplace example (for error checks).
#[pyfunction]
fn laplace_example_exact(r: f64, phi: f64) -> f64 {
    presets::laplace_exact(r, phi)
}

/// Exact solution of the built-in first-order example.
#[pyfunction]
fn fopde_example_exact(r: f64, phi: f64) -> f64 {
    presets::fopde_exact(r, phi)
}

#[pymodule(name = "zernike_pde")]
fn zernike_pde_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(radial_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(eval_radial, m)?)?;
    m.add_function(wrap_pyfunction!(trig_vector, m)?)?;
    m.add_function(wrap_pyfunction!(lagrange_project, m)?)?;
    m.add_function(wrap_pyfunction!(operational_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(expand_function, m)?)?;
    m.add_function(wrap_pyfunction!(solve_fopde_example, m)?)?;
    m.add_function(wrap_pyfunction!(solve_laplace_example, m)?)?;
    m.add_function(wrap_pyfunction!(solve_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_example_exact, m)?)?;
    m.add_function(wrap_pyfunction!(fopde_example_exact, m)?)?;
    m.add_class::<PySolveReport>()?;
    Ok(())
}
