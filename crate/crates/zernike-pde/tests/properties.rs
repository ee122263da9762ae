//! Property and invariant tests that cut across modules: the vec/Kronecker
//! identity, assembly consistency against closed-form solutions, least
//! squares optimality, and the empirical decay/trend behavior of the
//! expansion-based solver.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zernike_pde::analysis::{decay_fit, error_table, ExampleKind};
use zernike_pde::assembly::{
    assemble_fopde, assemble_sopde, kron, unvec, vec_of, FopdeSpec,
};
use zernike_pde::basis::{
    expand_function, reconstruct, CoefficientMatrix, QuadratureSpec, RadialBasisLayout,
    TrigIndex, ZernikeIndex,
};
use zernike_pde::opmatrix::Projection;
use zernike_pde::presets;
use zernike_pde::solver::{solve_l2, Method, SolveOptions};

fn dmatrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-10.0f64..10.0, rows * cols)
        .prop_map(move |v| DMatrix::from_vec(rows, cols, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vec_kron_identity(
        a in dmatrix_strategy(3, 4),
        x in dmatrix_strategy(4, 2),
        b in dmatrix_strategy(2, 5),
    ) {
        let direct = vec_of(&(&a * &x * &b));
        let lifted = kron(&b.transpose(), &a) * vec_of(&x);
        for i in 0..direct.len() {
            prop_assert!((direct[i] - lifted[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn unvec_inverts_vec(values in proptest::collection::vec(-5.0f64..5.0, 42)) {
        let u = DMatrix::from_vec(7, 6, values);
        let back = unvec(&vec_of(&u), 7, 6).unwrap();
        prop_assert_eq!(back, u);
    }

    #[test]
    fn radial_values_stay_bounded(n in 0usize..=15, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = {
            let choices: Vec<usize> = (0..=n).filter(|m| (n - m) % 2 == 0).collect();
            choices[rng.random_range(0..choices.len())]
        };
        let idx = ZernikeIndex::new(n, m).unwrap();
        let r = rng.random_range(0.0..=1.0);
        let value = zernike_pde::basis::eval_radial(idx, r).unwrap();
        prop_assert!(value.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn expansion_roundtrip_on_matched_coefficients(seed in 0u64..500) {
        // Any coefficient matrix supported on matched (row frequency ==
        // column order) slots comes back exactly through expand ∘
        // reconstruct.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m_max = 3;
        let n_max = 3;
        let mut u = CoefficientMatrix::zeros(m_max, n_max);
        let layout = RadialBasisLayout::new(n_max);
        for idx in layout.ordering() {
            if idx.m() > m_max {
                continue;
            }
            let value = rng.random_range(-2.0..2.0);
            if idx.m() == 0 {
                u.set(TrigIndex::Constant, *idx, value).unwrap();
            } else {
                u.set(TrigIndex::Cosine(idx.m()), *idx, value).unwrap();
                u.set(TrigIndex::Sine(idx.m()), *idx, rng.random_range(-2.0..2.0)).unwrap();
            }
        }
        let spec = QuadratureSpec::for_orders(m_max, n_max);
        let recovered =
            expand_function(|r, phi| reconstruct(&u, r, phi).unwrap(), m_max, n_max, spec)
                .unwrap();
        for i in 0..u.num_rows() {
            for j in 0..u.num_cols() {
                prop_assert!((recovered.matrix()[(i, j)] - u.matrix()[(i, j)]).abs() <= 1e-10);
            }
        }
    }
}

/// Assembly oracle: a closed-form harmonic solution with matching boundary
/// vectors must satisfy the assembled second-order system to machine
/// precision (the sharp version of assembly consistency; the discontinuous
/// worked example can only be checked for boundedness, below).
#[test]
fn sopde_assembly_is_exact_on_a_smooth_harmonic() {
    for (m_max, n_max) in [(3usize, 3usize), (5, 5), (7, 9)] {
        let layout = RadialBasisLayout::new(n_max);
        let m = 2 * m_max + 1;
        let n = layout.len();
        // u = r sin φ: harmonic, with g = h = sin φ at r0 = 1, p = 0,
        // q = ∂u/∂φ at φ0 = 0 equal to r.
        let mut spec = presets::laplace_example(m_max, n_max, Projection::LagrangeProject);
        spec.g_vec = DVector::zeros(m);
        spec.g_vec[TrigIndex::Sine(1).position()] = 1.0;
        spec.h_vec = spec.g_vec.clone();
        spec.p_vec = DVector::zeros(n);
        spec.q_vec = DVector::zeros(n);
        spec.q_vec[layout.position(ZernikeIndex::new(1, 1).unwrap()).unwrap()] = 1.0;
        let system = assemble_sopde(&spec).unwrap();
        let mut u_star = CoefficientMatrix::zeros(m_max, n_max);
        u_star.set(TrigIndex::Sine(1), ZernikeIndex::new(1, 1).unwrap(), 1.0).unwrap();
        let residual = system.residual_norm(&vec_of(u_star.matrix()));
        assert!(residual <= 1e-12, "({m_max},{n_max}): residual {residual}");
    }
}

#[test]
fn fopde_assembly_is_exact_on_a_polynomial_solution() {
    // u = r² cos 2φ solves r cos2φ u_r - sin2φ u_φ + u = 2r² + r² cos2φ
    // with u(0, φ) = 0 and u(r, 0) = r².
    let m_max = 3;
    let n_max = 3;
    let layout = RadialBasisLayout::new(n_max);
    let col22 = ZernikeIndex::new(2, 2).unwrap();
    let mut forcing = CoefficientMatrix::zeros(m_max, n_max);
    forcing.set(TrigIndex::Constant, col22, 2.0).unwrap();
    forcing.set(TrigIndex::Cosine(2), col22, 1.0).unwrap();
    let mut g_vec = DVector::zeros(layout.len());
    g_vec[layout.position(col22).unwrap()] = 1.0;
    let spec = FopdeSpec {
        alpha: 1.0,
        beta: -1.0,
        gamma: 1.0,
        forcing,
        h_vec: DVector::zeros(2 * m_max + 1),
        g_vec,
        r0: 0.0,
        phi0: 0.0,
        m_max,
        n_max,
        projection: Projection::Truncate,
    };
    let system = assemble_fopde(&spec).unwrap();
    let mut u_star = CoefficientMatrix::zeros(m_max, n_max);
    u_star.set(TrigIndex::Cosine(2), col22, 1.0).unwrap();
    let residual = system.residual_norm(&vec_of(u_star.matrix()));
    assert!(residual <= 1e-12, "residual {residual}");
}

/// For the discontinuous worked example the expanded exact solution cannot
/// satisfy the truncated system exactly; its relative residual must stay
/// small across the ladder (it oscillates with rung parity rather than
/// decreasing, see the project notes).
#[test]
fn sopde_residual_of_expanded_truth_stays_bounded() {
    for &(m_max, n_max) in &[(3usize, 3usize), (5, 5), (8, 8), (10, 10)] {
        let spec = presets::laplace_example(m_max, n_max, Projection::LagrangeProject);
        let system = assemble_sopde(&spec).unwrap();
        let u_star = expand_function(
            presets::laplace_exact,
            m_max,
            n_max,
            QuadratureSpec { n_radial: 2 * n_max + 40, n_angular: 1024 },
        )
        .unwrap();
        let rel = system.residual_norm(&vec_of(u_star.matrix())) / system.b.norm();
        assert!(rel <= 1e-2, "({m_max},{n_max}): relative residual {rel}");
    }
}

#[test]
fn least_squares_point_has_minimum_norm_among_minimizers() {
    // Random rank-deficient 20×20 systems of rank 12: perturbing the l2
    // solution along the null space strictly increases its norm.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let raw1 = DMatrix::from_fn(20, 20, |_, _| rng.random_range(-1.0..1.0f64));
        let raw2 = DMatrix::from_fn(20, 20, |_, _| rng.random_range(-1.0..1.0f64));
        let q1 = raw1.qr().q();
        let q2 = raw2.qr().q();
        let mut sigma = DMatrix::zeros(20, 20);
        for i in 0..12 {
            sigma[(i, i)] = rng.random_range(0.5..3.0f64);
        }
        let a = &q1 * sigma * q2.transpose();
        let b = DVector::from_fn(20, |_, _| rng.random_range(-1.0..1.0f64));

        use zernike_pde::sparse::SparseMatrix;
        let system = zernike_pde::assembly::AssembledSystem {
            a: SparseMatrix::from_dense(&a, 0.0),
            b,
            m_max: 0,
            n_max: 7, // layout of size 20 wraps the vector as 1×20
            num_trig: 1,
            num_radial: 20,
        };
        let report = solve_l2(&system, &SolveOptions::default()).unwrap();
        let x = DVector::from_vec(report.x.clone());
        // Null space of A = last 8 columns of q2 (right factor).
        for k in 12..20 {
            let delta = q2.column(k) * 1e-3;
            assert!((&a * &delta).norm() <= 1e-12);
            let perturbed = (&x + &delta).norm();
            assert!(
                perturbed > x.norm(),
                "perturbation along null direction {k} did not increase the norm"
            );
        }
    }
}

/// Smoothness-to-decay: a C² test function (third power of |sin(φ/2)|,
/// times a fixed radial factor) must show a fitted decay slope of at most
/// -k + 0.5 = -1.5.
#[test]
fn decay_slope_tracks_smoothness_class() {
    let ladder: Vec<usize> = (4..=12).collect();
    let f = |r: f64, phi: f64| (phi / 2.0).sin().abs().powi(3) * (2.0 * r * r - 1.0);
    let fit = decay_fit(f, &ladder, |m| m + 2).unwrap();
    let slope = fit.slope.expect("finite magnitudes");
    assert!(slope <= -1.5, "slope {slope}");
}

/// Error-curve trend: the second-order l1 errors are non-increasing along
/// the ladder, allowing at most one step reversal.
#[test]
fn sopde_l1_error_curve_trend() {
    let cells = error_table(ExampleKind::Sopde, &presets::ORDER_LADDER, &[Method::L1]).unwrap();
    let mses: Vec<f64> = cells.iter().map(|c| c.mse.expect("cell solved")).collect();
    let reversals = mses.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(reversals <= 1, "error curve reversed {reversals} times: {mses:?}");
}

/// The l1 error never exceeds 1.5× the l2 error in at least 6 of 8 ladder
/// cells, on both worked examples.
#[test]
fn l1_is_competitive_with_l2_across_the_ladder() {
    for kind in [ExampleKind::Fopde, ExampleKind::Sopde] {
        let cells = error_table(kind, &presets::ORDER_LADDER, &[Method::L1, Method::L2]).unwrap();
        let mut wins = 0;
        for &(m_max, _) in &presets::ORDER_LADDER {
            let m_size = 2 * m_max + 1;
            let get = |method: Method| {
                cells
                    .iter()
                    .find(|c| c.m_size == m_size && c.method == method)
                    .and_then(|c| c.mse)
                    .expect("cell solved")
            };
            if get(Method::L1) <= 1.5 * get(Method::L2) {
                wins += 1;
            }
        }
        assert!(wins >= 6, "{kind:?}: l1 within 1.5x of l2 in only {wins} of 8 cells");
    }
}
