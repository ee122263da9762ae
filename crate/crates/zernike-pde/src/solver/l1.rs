//! Equality-constrained l1 minimization by a primal-dual interior-point
//! method.
//!
//! The program min ||x||₁ s.t. A x = b is rewritten as the LP
//!
//!   min 1ᵀu   s.t.   x - u <= 0,  -x - u <= 0,  A x = b,
//!
//! and solved by Newton steps on the perturbed KKT conditions, with the
//! central-path parameter driven by the surrogate duality gap (reduced by a
//! factor of ten per outer iteration). Each Newton system is condensed onto
//! the dual variable of the equality constraint; the resulting symmetric
//! positive semi-definite system A Σ⁻¹ Aᵀ is factored by Cholesky with a
//! tiny adaptive diagonal shift so that rank-deficient A (the assembled
//! systems usually are) still yields a well-defined step.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct BasisPursuitOptions {
    pub duality_gap_tol: f64,
    pub max_iterations: usize,
}

impl Default for BasisPursuitOptions {
    fn default() -> Self {
        Self { duality_gap_tol: 1e-8, max_iterations: 100 }
    }
}

/// Primal solution plus the dual variables needed for KKT certification.
#[derive(Debug, Clone)]
pub struct BasisPursuitResult {
    pub x: DVector<f64>,
    /// Multipliers of x - u <= 0.
    pub lambda_upper: DVector<f64>,
    /// Multipliers of -x - u <= 0.
    pub lambda_lower: DVector<f64>,
    /// Multiplier of A x = b.
    pub nu: DVector<f64>,
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final auxiliary variable of the LP (the elementwise bound on |x|).
    final_u: DVector<f64>,
}

impl BasisPursuitResult {
    /// Largest violation of the KKT conditions (stationarity in x and u,
    /// complementary slackness, primal feasibility of the inequalities).
    /// Equality feasibility is measured against the supplied system.
    pub fn kkt_violation(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
        let n = self.x.len();
        let u = &self.final_u;
        let at_nu = a.transpose() * &self.nu;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            // ∂/∂x: λ⁺ - λ⁻ + Aᵀν = 0 and ∂/∂u: 1 - λ⁺ - λ⁻ = 0.
            worst = worst.max((self.lambda_upper[i] - self.lambda_lower[i] + at_nu[i]).abs());
            worst = worst.max((1.0 - self.lambda_upper[i] - self.lambda_lower[i]).abs());
            // Complementary slackness.
            worst = worst.max((self.lambda_upper[i] * (self.x[i] - u[i])).abs());
            worst = worst.max((self.lambda_lower[i] * (-self.x[i] - u[i])).abs());
            // Inequality feasibility and dual sign.
            worst = worst.max(self.x[i] - u[i]);
            worst = worst.max(-self.x[i] - u[i]);
            worst = worst.max(-self.lambda_upper[i]);
            worst = worst.max(-self.lambda_lower[i]);
        }
        worst = worst.max((a * &self.x - b).norm());
        worst
    }
}

/// Surrogate duality gap of the current iterate.
fn surrogate_gap(fu1: &DVector<f64>, fu2: &DVector<f64>, l1: &DVector<f64>, l2: &DVector<f64>) -> f64 {
    -(fu1.dot(l1) + fu2.dot(l2))
}

/// Basis pursuit: min ||x||₁ subject to A x = b exactly.
///
/// `x0` must satisfy A x0 = b (callers project b onto the range of A first;
/// [`crate::solver::solve_l1`] does this through the least squares point).
/// Deterministic: fixed inputs produce bitwise-identical iterates.
pub fn basis_pursuit(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    x0: &DVector<f64>,
    opts: &BasisPursuitOptions,
) -> Result<BasisPursuitResult> {
    let n = a.ncols();
    let mu = 10.0;
    let backtrack_alpha = 0.01;
    let backtrack_beta = 0.5;

    let mut x = x0.clone();
    let x_max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // Strictly interior start: u slightly above |x|.
    let pad = 0.1 * x_max.max(1e-3);
    let mut u = DVector::from_fn(n, |i, _| 0.95 * x[i].abs() + pad);

    let mut fu1 = &x - &u;
    let mut fu2 = -&x - &u;
    let mut lam1 = DVector::from_fn(n, |i, _| -1.0 / fu1[i]);
    let mut lam2 = DVector::from_fn(n, |i, _| -1.0 / fu2[i]);
    let mut nu = -a * (&lam1 - &lam2);

    let mut gap = surrogate_gap(&fu1, &fu2, &lam1, &lam2);
    let mut tau = mu * (2 * n) as f64 / gap;

    let mut at_nu = a.transpose() * &nu;
    let mut r_pri = a * &x - b;

    let residual_norm = |fu1: &DVector<f64>,
                         fu2: &DVector<f64>,
                         lam1: &DVector<f64>,
                         lam2: &DVector<f64>,
                         at_nu: &DVector<f64>,
                         r_pri: &DVector<f64>,
                         tau: f64| {
        let mut acc = 0.0;
        for i in 0..n {
            let r_dual_x = lam1[i] - lam2[i] + at_nu[i];
            let r_dual_u = 1.0 - lam1[i] - lam2[i];
            let r_cent_1 = -lam1[i] * fu1[i] - 1.0 / tau;
            let r_cent_2 = -lam2[i] * fu2[i] - 1.0 / tau;
            acc += r_dual_x * r_dual_x + r_dual_u * r_dual_u;
            acc += r_cent_1 * r_cent_1 + r_cent_2 * r_cent_2;
        }
        (acc + r_pri.norm_squared()).sqrt()
    };

    let mut iterations = 0;
    let mut converged = gap < opts.duality_gap_tol;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;

        // Condensed Newton step (same reduction as the classic l1 LP
        // solvers): eliminate (dλ, du, dx) in favor of dν.
        let mut w1 = DVector::zeros(n);
        let mut w2 = DVector::zeros(n);
        let mut sig1 = DVector::zeros(n);
        let mut sig2 = DVector::zeros(n);
        let mut sigx = DVector::zeros(n);
        for i in 0..n {
            w1[i] = -(-1.0 / fu1[i] + 1.0 / fu2[i]) / tau - at_nu[i];
            w2[i] = -1.0 - (1.0 / fu1[i] + 1.0 / fu2[i]) / tau;
            sig1[i] = -lam1[i] / fu1[i] - lam2[i] / fu2[i];
            sig2[i] = lam1[i] / fu1[i] - lam2[i] / fu2[i];
            // σ1 - σ2²/σ1 in the factored form (σ1-σ2)(σ1+σ2)/σ1 =
            // 4 λ1 λ2 / (f1 f2 σ1): positive by construction and free of
            // the catastrophic cancellation the difference suffers once the
            // iterates approach complementarity.
            sigx[i] = 4.0 * lam1[i] * lam2[i] / (fu1[i] * fu2[i] * sig1[i]);
        }
        let w3 = -&r_pri;

        // H = A diag(1/σx) Aᵀ, with an adaptive shift for rank deficiency.
        let mut scaled_a = a.clone();
        for j in 0..n {
            let s = 1.0 / sigx[j];
            for i in 0..scaled_a.nrows() {
                scaled_a[(i, j)] *= s;
            }
        }
        let h = &scaled_a * a.transpose();
        let rhs_vec = DVector::from_fn(n, |i, _| {
            (w1[i] - w2[i] * sig2[i] / sig1[i]) / sigx[i]
        });
        // Eliminating (dλ, du, dx) leaves H dν = A (w̄₁ / σx) - w3.
        let w1p = a * rhs_vec - &w3;

        // H is positive semi-definite but may be numerically singular
        // (rank-deficient A). A small Tikhonov shift keeps the
        // factorization stable and suppresses the near-null components of
        // dν, whose amplification through A^T/σx would wreck dx.
        let h_scale = h.diagonal().amax().max(1.0);
        let mut shift = 1e-13 * h_scale;
        let mut factorization = None;
        for _ in 0..6 {
            let mut h_shifted = h.clone();
            for i in 0..h_shifted.nrows() {
                h_shifted[(i, i)] += shift;
            }
            if let Some(chol) = nalgebra::Cholesky::new(h_shifted) {
                factorization = Some(chol);
                break;
            }
            shift *= 100.0;
        }
        let chol =
            factorization.ok_or(Error::SvdFailure { rows: h.nrows(), cols: h.ncols() })?;

        // Iterative refinement against the unshifted H trades the
        // shift-induced bias (which shrinks per sweep) against noise along
        // the near-null directions (which grows per sweep). Judge each
        // sweep by the defect that actually drives the iteration,
        // ||A dx - w3||, and keep the best candidate.
        let dx_from = |dnu: &DVector<f64>| {
            let at_dnu = a.transpose() * dnu;
            DVector::from_fn(n, |i, _| {
                (w1[i] - w2[i] * sig2[i] / sig1[i] - at_dnu[i]) / sigx[i]
            })
        };
        let mut candidate = chol.solve(&w1p);
        let mut dx = dx_from(&candidate);
        let mut best_defect = (a * &dx - &w3).norm();
        let mut dnu = candidate.clone();
        for _ in 0..4 {
            let residual = &w1p - &h * &candidate;
            candidate += chol.solve(&residual);
            let dx_candidate = dx_from(&candidate);
            let defect = (a * &dx_candidate - &w3).norm();
            if defect < best_defect {
                best_defect = defect;
                dx = dx_candidate;
                dnu = candidate.clone();
            }
        }
        let at_dnu = a.transpose() * &dnu;

        let mut du = DVector::zeros(n);
        let mut dlam1 = DVector::zeros(n);
        let mut dlam2 = DVector::zeros(n);
        for i in 0..n {
            du[i] = (w2[i] - sig2[i] * dx[i]) / sig1[i];
            dlam1[i] = (lam1[i] / fu1[i]) * (-dx[i] + du[i]) - lam1[i] - 1.0 / (tau * fu1[i]);
            dlam2[i] = (lam2[i] / fu2[i]) * (dx[i] + du[i]) - lam2[i] - 1.0 / (tau * fu2[i]);
        }

        // Longest step keeping λ > 0 and fu < 0, shrunk slightly.
        let mut s = 1.0f64;
        for i in 0..n {
            if dlam1[i] < 0.0 {
                s = s.min(-lam1[i] / dlam1[i]);
            }
            if dlam2[i] < 0.0 {
                s = s.min(-lam2[i] / dlam2[i]);
            }
        }
        for i in 0..n {
            let df1 = dx[i] - du[i];
            if df1 > 0.0 {
                s = s.min(-fu1[i] / df1);
            }
            let df2 = -dx[i] - du[i];
            if df2 > 0.0 {
                s = s.min(-fu2[i] / df2);
            }
        }
        s *= 0.99;

        // Backtrack on the full residual norm.
        let base_residual = residual_norm(&fu1, &fu2, &lam1, &lam2, &at_nu, &r_pri, tau);
        let mut accepted = false;
        for _ in 0..32 {
            let x_new = &x + &dx * s;
            let u_new = &u + &du * s;
            let lam1_new = &lam1 + &dlam1 * s;
            let lam2_new = &lam2 + &dlam2 * s;
            let fu1_new = &x_new - &u_new;
            let fu2_new = -&x_new - &u_new;
            let nu_new = &nu + &dnu * s;
            let at_nu_new = &at_nu + &at_dnu * s;
            let r_pri_new = a * &x_new - b;
            let new_residual =
                residual_norm(&fu1_new, &fu2_new, &lam1_new, &lam2_new, &at_nu_new, &r_pri_new, tau);
            if new_residual <= (1.0 - backtrack_alpha * s) * base_residual {
                x = x_new;
                u = u_new;
                lam1 = lam1_new;
                lam2 = lam2_new;
                nu = nu_new;
                at_nu = at_nu_new;
                fu1 = fu1_new;
                fu2 = fu2_new;
                r_pri = r_pri_new;
                accepted = true;
                break;
            }
            s *= backtrack_beta;
        }
        if !accepted {
            // Stuck on numerical noise around the solution; stop with the
            // current iterate.
            break;
        }

        gap = surrogate_gap(&fu1, &fu2, &lam1, &lam2);
        tau = mu * (2 * n) as f64 / gap;
        converged = gap < opts.duality_gap_tol;
    }

    Ok(BasisPursuitResult {
        x,
        lambda_upper: lam1,
        lambda_lower: lam2,
        nu,
        duality_gap: gap,
        iterations,
        converged,
        final_u: u,
    })
}
