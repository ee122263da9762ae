//! The two worked problems used for validation, with their analytic
//! boundary/forcing coefficient vectors and exact solutions.
//!
//! First-order example: r cos2φ · u_r - sin2φ · u_φ + u = e^{r cosφ}(1 + r cosφ)
//! with u(0, φ) = 1 and u(r, 0) = e^r; exact solution u = e^{r cosφ}.
//!
//! Second-order example: the Laplace equation on the unit disk with the
//! upper half of the boundary held at potential 1 and the lower half at 0
//! (discontinuous Dirichlet data, plus the matching Neumann/φ0 data); exact
//! solution u = 1/2 + arctan(2 r sinφ / (1 - r²)) / π.

use crate::assembly::{FopdeSpec, SopdeSpec};
use crate::basis::{CoefficientMatrix, RadialBasisLayout, TrigIndex, ZernikeIndex};
use crate::opmatrix::Projection;
use nalgebra::DVector;
use std::f64::consts::PI;

/// The (M, N) ladder used in the error tables: m_max = n_max = 3..=10.
pub const ORDER_LADDER: [(usize, usize); 8] =
    [(3, 3), (4, 4), (5, 5), (6, 6), (7, 7), (8, 8), (9, 9), (10, 10)];

/// (M, N) display sizes of the ladder entries.
pub fn ladder_sizes() -> Vec<(usize, usize)> {
    ORDER_LADDER
        .iter()
        .map(|&(m_max, n_max)| (2 * m_max + 1, RadialBasisLayout::new(n_max).len()))
        .collect()
}

/// Harmonic content of cos^k φ: pairs (frequency, weight) with
/// cos^k φ = Σ weight · cos(freq · φ), freq running over k, k-2, ..., and
/// the frequency-0 term representing the constant.
fn cos_power_harmonics(k: usize) -> Vec<(usize, f64)> {
    // cos^k = 2^{1-k} Σ_{j<k/2} C(k,j) cos((k-2j)φ) + [k even] C(k,k/2)/2^k.
    let mut out = Vec::new();
    let scale = (0.5f64).powi(k as i32);
    let mut binom = 1.0f64; // C(k, 0)
    for j in 0..=k / 2 {
        let freq = k - 2 * j;
        if freq == 0 {
            out.push((0, scale * binom));
        } else {
            out.push((freq, 2.0 * scale * binom));
        }
        binom *= (k - j) as f64 / (j + 1) as f64;
    }
    out
}

fn factorial(k: usize) -> f64 {
    (2..=k).map(|i| i as f64).product()
}

/// Coefficient matrix of Σ_k c_k (r cos φ)^k truncated at degree n_max and
/// frequency m_max, with every power r^k mapped onto the diagonal element
/// R_k^k.
fn cos_series_matrix(coeff: impl Fn(usize) -> f64, m_max: usize, n_max: usize) -> CoefficientMatrix {
    let mut out = CoefficientMatrix::zeros(m_max, n_max);
    for k in 0..=n_max {
        let c = coeff(k);
        let col = ZernikeIndex::new(k, k).expect("diagonal index");
        for (freq, w) in cos_power_harmonics(k) {
            if freq > m_max {
                continue;
            }
            let row = if freq == 0 { TrigIndex::Constant } else { TrigIndex::Cosine(freq) };
            let current = out.get(row, col).unwrap_or(0.0);
            out.set(row, col, current + c * w).expect("within bounds");
        }
    }
    out
}

/// Degree-truncated Taylor coefficients of e^{r cos φ} in the tensor basis
/// (the reference coefficient matrix of the first-order example).
pub fn fopde_exact_coefficients(m_max: usize, n_max: usize) -> CoefficientMatrix {
    cos_series_matrix(|k| 1.0 / factorial(k), m_max, n_max)
}

/// The first-order example problem at the given truncation orders.
///
/// Forcing f = e^{r cosφ}(1 + r cosφ) enters through its Taylor
/// coefficients (k+1)/k!, the radial boundary function e^r through 1/k!,
/// and h ≡ 1 through the first unit vector, all truncated analytically.
pub fn fopde_example(m_max: usize, n_max: usize, projection: Projection) -> FopdeSpec {
    let layout = RadialBasisLayout::new(n_max);
    let mut h_vec = DVector::zeros(2 * m_max + 1);
    h_vec[0] = 1.0;
    let mut g_vec = DVector::zeros(layout.len());
    for k in 0..=n_max {
        let col = layout
            .position(ZernikeIndex::new(k, k).expect("diagonal index"))
            .expect("within layout");
        g_vec[col] = 1.0 / factorial(k);
    }
    FopdeSpec {
        alpha: 1.0,
        beta: -1.0,
        gamma: 1.0,
        forcing: cos_series_matrix(|k| (k as f64 + 1.0) / factorial(k), m_max, n_max),
        h_vec,
        g_vec,
        r0: 0.0,
        phi0: 0.0,
        m_max,
        n_max,
        projection,
    }
}

/// Exact solution of the first-order example.
pub fn fopde_exact(r: f64, phi: f64) -> f64 {
    (r * phi.cos()).exp()
}

/// The Laplace example at the given truncation orders.
///
/// Boundary data in coefficient form: the step g(φ) has the Fourier series
/// 1/2 + (2/π) Σ_{odd k} sin(kφ)/k, its radial derivative h(φ) the series
/// (2/π) Σ_{odd k} sin(kφ), the φ0-value p(r) = 1/2 is constant, and the
/// angular derivative q(r) = 2r/(π(1-r²)) has the geometric expansion
/// (2/π) Σ_{odd k} r^k mapped onto the diagonal elements R_k^k.
pub fn laplace_example(m_max: usize, n_max: usize, projection: Projection) -> SopdeSpec {
    let layout = RadialBasisLayout::new(n_max);
    let m = 2 * m_max + 1;
    let mut g_vec = DVector::zeros(m);
    let mut h_vec = DVector::zeros(m);
    g_vec[0] = 0.5;
    for k in (1..=m_max).step_by(2) {
        g_vec[TrigIndex::Sine(k).position()] = 2.0 / (PI * k as f64);
        h_vec[TrigIndex::Sine(k).position()] = 2.0 / PI;
    }
    let mut p_vec = DVector::zeros(layout.len());
    p_vec[0] = 0.5;
    let mut q_vec = DVector::zeros(layout.len());
    for k in (1..=n_max).step_by(2) {
        let col = layout
            .position(ZernikeIndex::new(k, k).expect("diagonal index"))
            .expect("within layout");
        q_vec[col] = 2.0 / PI;
    }
    SopdeSpec {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
        forcing: CoefficientMatrix::zeros(m_max, n_max),
        g_vec,
        h_vec,
        p_vec,
        q_vec,
        r0: 1.0,
        phi0: 0.0,
        m_max,
        n_max,
        projection,
    }
}

/// Exact solution of the Laplace example (the Poisson-integral closed
/// form), valid for r < 1.
pub fn laplace_exact(r: f64, phi: f64) -> f64 {
    0.5 + (2.0 * r * phi.sin() / (1.0 - r * r)).atan() / PI
}
