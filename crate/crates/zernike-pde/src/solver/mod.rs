//! Solvers for the assembled systems: minimum-norm least squares through a
//! truncated SVD, and equality-constrained l1 minimization (basis pursuit)
//! through a primal-dual interior-point method warm-started from the least
//! squares point.

mod l1;

pub use l1::{basis_pursuit, BasisPursuitOptions, BasisPursuitResult};

use crate::assembly::AssembledSystem;
use crate::basis::CoefficientMatrix;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    L1,
    L2,
}

/// Solver configuration; the defaults match the tolerances used throughout
/// the test suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub method: Method,
    /// Singular values below `svd_cutoff_rel · σ_max` are treated as zero.
    pub svd_cutoff_rel: f64,
    /// Surrogate duality gap at which the interior-point iteration stops.
    pub l1_duality_gap_tol: f64,
    pub l1_max_iterations: usize,
    /// Radius of the residual ball within which b must sit relative to the
    /// range of A for the l1 program to be considered feasible.
    pub l1_residual_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::L1,
            svd_cutoff_rel: 1e-12,
            l1_duality_gap_tol: 1e-8,
            l1_max_iterations: 100,
            l1_residual_tol: 1e-8,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.svd_cutoff_rel <= 0.0
            || self.l1_duality_gap_tol <= 0.0
            || self.l1_residual_tol <= 0.0
        {
            return Err(Error::InvalidArgument("solver tolerances must be positive".into()));
        }
        if self.l1_max_iterations == 0 {
            return Err(Error::InvalidArgument("l1_max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Solution record. The residual norm is recomputed through the sparse
/// matrix, independent of the factorization that produced x.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub method: Method,
    /// Solution vector, length M·N.
    pub x: Vec<f64>,
    /// ||A x - b||₂ against the original right-hand side.
    pub residual_norm: f64,
    /// ||x||₂ for l2, ||x||₁ for l1.
    pub objective: f64,
    /// Number of singular values kept (l2 only).
    pub rank_estimate: Option<usize>,
    /// Interior-point iterations (l1 only).
    pub iterations: Option<usize>,
    /// Final surrogate duality gap (l1 only).
    pub duality_gap: Option<f64>,
    /// False when the iteration cap was hit before the gap tolerance.
    pub converged: bool,
    #[serde(serialize_with = "serialize_duration_ms", rename = "wall_time_ms")]
    pub wall_time: Duration,
    /// The solution reshaped as the M×N coefficient matrix (serialized as
    /// a list of rows).
    #[serde(serialize_with = "serialize_coefficients")]
    pub u: CoefficientMatrix,
}

fn serialize_coefficients<S: serde::Serializer>(
    u: &CoefficientMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..u.num_rows())
        .map(|i| (0..u.num_cols()).map(|j| u.matrix()[(i, j)]).collect())
        .collect();
    rows.serialize(s)
}

fn serialize_duration_ms<S: serde::Serializer>(
    d: &Duration,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

/// Moore–Penrose pseudo-inverse by SVD truncation at `cutoff_rel · σ_max`.
pub fn pseudo_inverse(a: &DMatrix<f64>, cutoff_rel: f64) -> Result<DMatrix<f64>> {
    let (rows, cols) = a.shape();
    let svd = nalgebra::SVD::try_new(a.clone(), true, true, f64::EPSILON, 0)
        .ok_or(Error::SvdFailure { rows, cols })?;
    let sigma_max = svd.singular_values.max();
    let cutoff = cutoff_rel * sigma_max;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut inv_sigma = DMatrix::zeros(v_t.nrows(), u.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            inv_sigma[(i, i)] = 1.0 / s;
        }
    }
    Ok(v_t.transpose() * inv_sigma * u.transpose())
}

struct LeastSquares {
    x: DVector<f64>,
    rank: usize,
}

/// Minimum-norm least squares via SVD, returning the kept rank.
fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, cutoff_rel: f64) -> Result<LeastSquares> {
    let (rows, cols) = a.shape();
    let svd = nalgebra::SVD::try_new(a.clone(), true, true, f64::EPSILON, 0)
        .ok_or(Error::SvdFailure { rows, cols })?;
    let sigma_max = svd.singular_values.max();
    let cutoff = cutoff_rel * sigma_max;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let ut_b = u.transpose() * b;
    let mut scaled = DVector::zeros(v_t.nrows());
    let mut rank = 0;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            scaled[i] = ut_b[i] / s;
            rank += 1;
        }
    }
    Ok(LeastSquares { x: v_t.transpose() * scaled, rank })
}

/// Minimum-norm least squares solve (the l2 method): x = A⁺ b.
pub fn solve_l2(system: &AssembledSystem, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let start = Instant::now();
    let dense = system.a.to_dense();
    let ls = least_squares(&dense, &system.b, opts.svd_cutoff_rel)?;
    let residual_norm = system.residual_norm(&ls.x);
    let u = system.unvec(&ls.x)?;
    Ok(SolveReport {
        method: Method::L2,
        objective: ls.x.norm(),
        residual_norm,
        rank_estimate: Some(ls.rank),
        iterations: None,
        duality_gap: None,
        converged: true,
        wall_time: start.elapsed(),
        x: ls.x.as_slice().to_vec(),
        u,
    })
}

/// Basis-pursuit solve (the l1 method): minimize ||x||₁ subject to A x = b.
///
/// The right-hand side is first projected onto the range of A through the
/// least squares point (assembled systems can place b a hair outside the
/// range after projection of super-degree terms); if the projection residual
/// exceeds `l1_residual_tol · (1 + ||b||)` the system is reported infeasible
/// with the residual as certificate. The interior-point iteration is then
/// warm-started from the least squares point.
pub fn solve_l1(system: &AssembledSystem, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let start = Instant::now();
    let dense = system.a.to_dense();
    let ls = least_squares(&dense, &system.b, opts.svd_cutoff_rel)?;
    let b_norm = system.b.norm();
    let projection_residual = (&dense * &ls.x - &system.b).norm();
    let tol = opts.l1_residual_tol * (1.0 + b_norm);
    if projection_residual > tol {
        let certificate = (&system.b - &dense * &ls.x).as_slice().to_vec();
        return Err(Error::Infeasible {
            residual_norm: projection_residual,
            b_norm,
            tol,
            certificate,
        });
    }
    let b_feasible = &dense * &ls.x;
    let bp = basis_pursuit(
        &dense,
        &b_feasible,
        &ls.x,
        &BasisPursuitOptions {
            duality_gap_tol: opts.l1_duality_gap_tol,
            max_iterations: opts.l1_max_iterations,
        },
    )?;
    let residual_norm = system.residual_norm(&bp.x);
    let u = system.unvec(&bp.x)?;
    Ok(SolveReport {
        method: Method::L1,
        objective: bp.x.iter().map(|v| v.abs()).sum(),
        residual_norm,
        rank_estimate: None,
        iterations: Some(bp.iterations),
        duality_gap: Some(bp.duality_gap),
        converged: bp.converged,
        wall_time: start.elapsed(),
        x: bp.x.as_slice().to_vec(),
        u,
    })
}

/// Dispatch on the configured method.
pub fn solve(system: &AssembledSystem, opts: &SolveOptions) -> Result<SolveReport> {
    match opts.method {
        Method::L1 => solve_l1(system, opts),
        Method::L2 => solve_l2(system, opts),
    }
}
