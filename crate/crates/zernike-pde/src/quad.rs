//! Gauss–Legendre quadrature on [0, 1] and the uniform periodic rule on
//! [0, 2π). These are the only two rules the expansion pipeline needs: the
//! radial integrand is polynomial-times-smooth, the angular one is periodic.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss–Legendre rule mapped to [0, 1].
///
/// Exact for polynomials of degree <= 2n - 1. Nodes are found by Newton
/// iteration on the Legendre polynomial starting from the Chebyshev-based
/// asymptotic guess; this is accurate to machine precision for the orders
/// used here (well below 1000).
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Root guess on [-1, 1], refined by Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let (mut p, mut dp) = legendre_with_derivative(n, x);
        for _ in 0..100 {
            let dx = p / dp;
            x -= dx;
            let pd = legendre_with_derivative(n, x);
            p = pd.0;
            dp = pd.1;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [0, 1]; the symmetric partner comes for free.
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Legendre polynomial P_n and its derivative at `x`, by the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Equispaced angular nodes φ_j = 2πj/n, all carrying weight 2π/n.
///
/// For 2π-periodic integrands this is the trapezoid rule, which is exact on
/// trigonometric polynomials of frequency below n.
pub fn uniform_angular(n: usize) -> (Vec<f64>, f64) {
    assert!(n >= 1, "angular node count must be positive");
    let nodes = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    (nodes, 2.0 * PI / n as f64)
}
