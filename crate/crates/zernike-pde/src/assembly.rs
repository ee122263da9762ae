//! Reduction of the integrated PDEs to sparse linear systems A·vec(U) = b
//! via the identity vec(A X B) = (Bᵀ ⊗ A) vec(X).
//!
//! `assemble_fopde` covers the first-order equation
//! αx·u_x + βy·u_y + γu = f on the disk with data u(r0, φ) = h(φ) and
//! u(r, φ0) = g(r); `assemble_sopde` covers the rotation-invariant second
//! order family (Laplace for α = β = γ = 0, F = 0) with Dirichlet/Neumann
//! data at r0 and value/derivative data at φ0.

use crate::basis::CoefficientMatrix;
use crate::opmatrix::{constant_embedding, OperatorSet, Projection};
use crate::sparse::SparseMatrix;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Entries smaller than this in magnitude are dropped when the assembled
/// matrix is compressed. The displayed sparsity counts imply some drop
/// threshold; none is stated, so a conservative one is pinned here.
pub const SPARSE_DROP_THRESHOLD: f64 = 1e-14;

/// First-order problem description.
#[derive(Debug, Clone)]
pub struct FopdeSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Coefficients of the forcing function f = Φᵀ F R.
    pub forcing: CoefficientMatrix,
    /// Length-M coefficients of u(r0, φ) = h(φ) in Φ.
    pub h_vec: DVector<f64>,
    /// Length-N coefficients of u(r, φ0) = g(r) in R.
    pub g_vec: DVector<f64>,
    pub r0: f64,
    pub phi0: f64,
    pub m_max: usize,
    pub n_max: usize,
    pub projection: Projection,
}

/// Second-order problem description.
#[derive(Debug, Clone)]
pub struct SopdeSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub forcing: CoefficientMatrix,
    /// Length-M coefficients of the Dirichlet value u(r0, φ) = g(φ).
    pub g_vec: DVector<f64>,
    /// Length-M coefficients of the radial derivative ∂u/∂r at r0.
    pub h_vec: DVector<f64>,
    /// Length-N coefficients of the value u(r, φ0) = p(r).
    pub p_vec: DVector<f64>,
    /// Length-N coefficients of the angular derivative ∂u/∂φ at φ0.
    pub q_vec: DVector<f64>,
    pub r0: f64,
    pub phi0: f64,
    pub m_max: usize,
    pub n_max: usize,
    pub projection: Projection,
}

/// The assembled system A·vec(U) = b together with its layout metadata.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub a: SparseMatrix,
    pub b: DVector<f64>,
    pub m_max: usize,
    pub n_max: usize,
    /// M = 2·m_max + 1 rows of U.
    pub num_trig: usize,
    /// N columns of U.
    pub num_radial: usize,
}

impl AssembledSystem {
    /// Order of the square system, M·N.
    pub fn order(&self) -> usize {
        self.num_trig * self.num_radial
    }

    /// ||A x - b||₂ through the sparse representation (independent of any
    /// dense factorization path).
    pub fn residual_norm(&self, x: &DVector<f64>) -> f64 {
        (self.a.matvec(x) - &self.b).norm()
    }

    /// Reshape a solution vector into the coefficient matrix U.
    pub fn unvec(&self, x: &DVector<f64>) -> Result<CoefficientMatrix> {
        let u = unvec(x, self.num_trig, self.num_radial)?;
        CoefficientMatrix::from_matrix(u, self.m_max, self.n_max)
    }

    /// Matrix Market export of A plus a plain-text dump of b, for external
    /// solver cross-checks.
    pub fn export<W1: std::io::Write, W2: std::io::Write>(
        &self,
        matrix_out: &mut W1,
        rhs_out: &mut W2,
    ) -> Result<()> {
        self.a.write_matrix_market(matrix_out)?;
        for v in self.b.iter() {
            writeln!(rhs_out, "{v:.17e}")?;
        }
        Ok(())
    }
}

/// Standard Kronecker product, consistent with vec(AXB) = (Bᵀ ⊗ A) vec(X)
/// under column-stacking.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let scale = a[(i, j)];
            if scale == 0.0 {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[(i * br + p, j * bc + q)] = scale * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Column-stacking vec.
pub fn vec_of(u: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(u.as_slice())
}

/// Inverse of [`vec_of`] for an M×N target.
pub fn unvec(x: &DVector<f64>, m: usize, n: usize) -> Result<DMatrix<f64>> {
    if x.len() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot fill a {m}x{n} matrix",
            x.len()
        )));
    }
    Ok(DMatrix::from_column_slice(m, n, x.as_slice()))
}

fn check_fopde(spec: &FopdeSpec) -> Result<()> {
    let m = 2 * spec.m_max + 1;
    let n = crate::basis::RadialBasisLayout::new(spec.n_max).len();
    if spec.h_vec.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "h has length {}, expected M = {m}",
            spec.h_vec.len()
        )));
    }
    if spec.g_vec.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "g has length {}, expected N = {n}",
            spec.g_vec.len()
        )));
    }
    if spec.forcing.num_rows() != m || spec.forcing.num_cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "forcing is {}x{}, expected {m}x{n}",
            spec.forcing.num_rows(),
            spec.forcing.num_cols()
        )));
    }
    Ok(())
}

/// Assembles the first-order system.
///
/// The seven U-terms are Kronecker lifts of
/// α Ec² U M_R^r + β Es² U M_R^r − α Ec² U E_r − β Es² U E_r
/// − (α−β)/2 · M^{sin2φ} U E_r + (α−β) E^{cos2φ} U E_r + γ E_φ U E_r
/// (all φ-matrices transposed on the left), and the right side collects the
/// forcing and boundary contributions.
pub fn assemble_fopde(spec: &FopdeSpec) -> Result<AssembledSystem> {
    check_fopde(spec)?;
    let ops = OperatorSet::new(spec.m_max, spec.n_max, spec.r0, spec.phi0, spec.projection)?;
    assemble_fopde_with(spec, &ops)
}

fn check_ops(
    ops: &OperatorSet,
    m_max: usize,
    n_max: usize,
    r0: f64,
    phi0: f64,
    projection: Projection,
) -> Result<()> {
    if ops.m_max != m_max
        || ops.n_max != n_max
        || ops.r0 != r0
        || ops.phi0 != phi0
        || ops.projection != projection
    {
        return Err(Error::DimensionMismatch(format!(
            "operator set was built for (m_max={}, n_max={}, r0={}, phi0={}, {:?})",
            ops.m_max, ops.n_max, ops.r0, ops.phi0, ops.projection
        )));
    }
    Ok(())
}

/// Same as [`assemble_fopde`] but reusing a prebuilt operator set.
pub fn assemble_fopde_with(spec: &FopdeSpec, ops: &OperatorSet) -> Result<AssembledSystem> {
    check_fopde(spec)?;
    check_ops(ops, spec.m_max, spec.n_max, spec.r0, spec.phi0, spec.projection)?;
    let alpha = spec.alpha;
    let beta = spec.beta;
    let gamma = spec.gamma;
    let ec2_t = ops.phi_int_cos2.matrix().transpose();
    let es2_t = ops.phi_int_sin2.matrix().transpose();
    let ecos2_t = ops.phi_int_cos2phi.matrix().transpose();
    let ephi_t = ops.phi_int.matrix().transpose();
    let msin2_t = ops.phi_mul_sin2phi.matrix().transpose();
    let er = ops.radial_int.matrix();
    let er_t = er.transpose();
    let mr_t = ops.radial_mul_r.matrix().transpose();

    // Fixed term order keeps the assembly bitwise deterministic.
    let mut a = kron(&mr_t, &ec2_t) * alpha;
    a += kron(&mr_t, &es2_t) * beta;
    a -= kron(&er_t, &ec2_t) * alpha;
    a -= kron(&er_t, &es2_t) * beta;
    a -= kron(&er_t, &msin2_t) * (0.5 * (alpha - beta));
    a += kron(&er_t, &ecos2_t) * (alpha - beta);
    a += kron(&er_t, &ephi_t) * gamma;

    let m_r0 = constant_embedding(spec.r0, spec.g_vec.len());
    let m_sin2phi0 = constant_embedding((2.0 * spec.phi0).sin(), spec.h_vec.len());
    let mut rhs = &ephi_t * spec.forcing.matrix() * er;
    rhs += (&ec2_t * &spec.h_vec) * m_r0.transpose() * alpha;
    rhs += (&es2_t * &spec.h_vec) * m_r0.transpose() * beta;
    rhs -= (m_sin2phi0 * spec.g_vec.transpose() * er) * (0.5 * (alpha - beta));

    Ok(AssembledSystem {
        a: SparseMatrix::from_dense(&a, SPARSE_DROP_THRESHOLD),
        b: vec_of(&rhs),
        m_max: spec.m_max,
        n_max: spec.n_max,
        num_trig: 2 * spec.m_max + 1,
        num_radial: spec.g_vec.len(),
    })
}

fn check_sopde(spec: &SopdeSpec) -> Result<()> {
    let m = 2 * spec.m_max + 1;
    let n = crate::basis::RadialBasisLayout::new(spec.n_max).len();
    for (name, len, want) in [
        ("g", spec.g_vec.len(), m),
        ("h", spec.h_vec.len(), m),
        ("p", spec.p_vec.len(), n),
        ("q", spec.q_vec.len(), n),
    ] {
        if len != want {
            return Err(Error::DimensionMismatch(format!(
                "{name} has length {len}, expected {want}"
            )));
        }
    }
    if spec.forcing.num_rows() != m || spec.forcing.num_cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "forcing is {}x{}, expected {m}x{n}",
            spec.forcing.num_rows(),
            spec.forcing.num_cols()
        )));
    }
    Ok(())
}

/// Assembles the second-order system (the 8-term A and 9-term Y).
pub fn assemble_sopde(spec: &SopdeSpec) -> Result<AssembledSystem> {
    check_sopde(spec)?;
    let ops = OperatorSet::new(spec.m_max, spec.n_max, spec.r0, spec.phi0, spec.projection)?;
    assemble_sopde_with(spec, &ops)
}

/// Same as [`assemble_sopde`] but reusing a prebuilt operator set.
pub fn assemble_sopde_with(spec: &SopdeSpec, ops: &OperatorSet) -> Result<AssembledSystem> {
    check_sopde(spec)?;
    check_ops(ops, spec.m_max, spec.n_max, spec.r0, spec.phi0, spec.projection)?;
    let alpha = spec.alpha;
    let beta = spec.beta;
    let gamma = spec.gamma;
    let m = 2 * spec.m_max + 1;
    let n = spec.p_vec.len();

    let edphi_t = ops.phi_double.matrix().transpose();
    let ephi_t = ops.phi_int.matrix().transpose();
    let er = ops.radial_int.matrix();
    let mr2_t = ops.radial_mul_r2.matrix().transpose();
    let mr4_t = ops.radial_mul_r4.matrix().transpose();
    let er_r_t = ops.radial_int_r.matrix().transpose();
    let er_r3_t = ops.radial_int_r3.matrix().transpose();
    let edr = ops.radial_double.matrix();
    let edr_t = edr.transpose();
    let edr_r2 = ops.radial_double_r2.matrix();
    let edr_r2_t = edr_r2.transpose();
    let identity_m = DMatrix::identity(m, m);

    let mut a = kron(&mr2_t, &edphi_t);
    a -= kron(&er_r_t, &edphi_t) * 3.0;
    a += kron(&edr_t, &edphi_t);
    a += kron(&edr_t, &identity_m);
    if alpha != 0.0 {
        a += kron(&mr4_t, &edphi_t) * alpha;
    }
    if alpha != 0.0 || beta != 0.0 {
        a -= kron(&er_r3_t, &edphi_t) * (7.0 * alpha - beta);
        a += kron(&edr_r2_t, &edphi_t) * (3.0 * alpha - beta);
    }
    if gamma != 0.0 {
        a += kron(&edr_r2_t, &edphi_t) * gamma;
    }

    let e1 = constant_embedding(1.0, m);
    let m_r0 = constant_embedding(spec.r0, n);
    let m_r02 = constant_embedding(spec.r0 * spec.r0, n);
    let m_r03 = constant_embedding(spec.r0.powi(3), n);
    let m_r04 = constant_embedding(spec.r0.powi(4), n);

    let mut y = &edphi_t * spec.forcing.matrix() * edr_r2;
    y += (&edphi_t * &spec.g_vec) * m_r02.transpose();
    y += (&edphi_t * &spec.h_vec) * m_r02.transpose() * er;
    y -= (&edphi_t * &spec.g_vec) * m_r0.transpose() * er;
    y += &e1 * spec.p_vec.transpose() * edr;
    y += (&ephi_t * &e1) * spec.q_vec.transpose() * edr;
    if alpha != 0.0 {
        y += (&edphi_t * &spec.g_vec) * m_r04.transpose() * alpha;
        y += (&edphi_t * &spec.h_vec) * m_r04.transpose() * er * alpha;
    }
    if alpha != 0.0 || beta != 0.0 {
        y -= (&edphi_t * &spec.g_vec) * m_r03.transpose() * er * (3.0 * alpha - beta);
    }

    Ok(AssembledSystem {
        a: SparseMatrix::from_dense(&a, SPARSE_DROP_THRESHOLD),
        b: vec_of(&y),
        m_max: spec.m_max,
        n_max: spec.n_max,
        num_trig: m,
        num_radial: n,
    })
}

/// The Laplace special case (α = β = γ = 0, F = 0), kept as its own entry
/// point for the CLI.
#[allow(clippy::too_many_arguments)]
pub fn assemble_laplace(
    g_vec: DVector<f64>,
    h_vec: DVector<f64>,
    p_vec: DVector<f64>,
    q_vec: DVector<f64>,
    r0: f64,
    phi0: f64,
    m_max: usize,
    n_max: usize,
    projection: Projection,
) -> Result<AssembledSystem> {
    let spec = SopdeSpec {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
        forcing: CoefficientMatrix::zeros(m_max, n_max),
        g_vec,
        h_vec,
        p_vec,
        q_vec,
        r0,
        phi0,
        m_max,
        n_max,
        projection,
    };
    assemble_sopde(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    #[test]
    fn kron_identity_and_general_entry() {
        let i2 = DMatrix::identity(2, 2);
        assert_eq!(kron(&i2, &i2), DMatrix::identity(4, 4));

        // (Bᵀ ⊗ A) entry (1,2) in 1-based indexing is a₁₂ b₁₁.
        let a = dmatrix![1.0, 2.0; 3.0, 4.0];
        let b = dmatrix![5.0, 6.0; 7.0, 8.0];
        let k = kron(&b.transpose(), &a);
        assert_eq!(k[(0, 1)], a[(0, 1)] * b[(0, 0)]);
        assert_eq!(k[(1, 0)], a[(1, 0)] * b[(0, 0)]);
        assert_eq!(k[(0, 2)], a[(0, 0)] * b[(1, 0)]);
    }

    #[test]
    fn vec_kron_identity_on_fixed_matrices() {
        // vec(AXB) = (Bᵀ ⊗ A) vec(X) on deterministic 3x3 inputs.
        let a = dmatrix![0.3, -1.2, 0.8; 2.0, 0.1, -0.4; 1.1, 0.9, 0.2];
        let x = dmatrix![1.0, 0.5, -0.7; 0.2, -2.0, 1.4; 0.6, 0.3, -0.1];
        let b = dmatrix![-0.9, 0.4, 1.3; 0.7, 2.2, -0.5; 0.1, -1.1, 0.8];
        let direct = vec_of(&(&a * &x * &b));
        let lifted = kron(&b.transpose(), &a) * vec_of(&x);
        for i in 0..direct.len() {
            assert_abs_diff_eq!(direct[i], lifted[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn vec_positions_and_roundtrip() {
        let mut u = DMatrix::zeros(7, 6);
        u[(2, 3)] = 1.0;
        let v = vec_of(&u);
        assert_eq!(v[3 * 7 + 2], 1.0);
        assert_eq!(v.iter().filter(|&&x| x != 0.0).count(), 1);
        let back = unvec(&v, 7, 6).unwrap();
        assert_eq!(back, u);
        assert!(unvec(&v, 6, 6).is_err());
    }

    #[test]
    fn homogeneous_fopde_has_zero_rhs() {
        let spec = FopdeSpec {
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.0,
            forcing: CoefficientMatrix::zeros(3, 3),
            h_vec: DVector::zeros(7),
            g_vec: DVector::zeros(6),
            r0: 0.0,
            phi0: 0.0,
            m_max: 3,
            n_max: 3,
            projection: Projection::Truncate,
        };
        let system = assemble_fopde(&spec).unwrap();
        assert_eq!(system.order(), 42);
        assert_abs_diff_eq!(system.b.norm(), 0.0);
        // x = 0 solves the homogeneous problem.
        assert_abs_diff_eq!(system.residual_norm(&DVector::zeros(42)), 0.0);
    }

    #[test]
    fn sopde_dimension_checks_fire() {
        let spec = SopdeSpec {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            forcing: CoefficientMatrix::zeros(3, 3),
            g_vec: DVector::zeros(6), // wrong: needs M = 7
            h_vec: DVector::zeros(7),
            p_vec: DVector::zeros(6),
            q_vec: DVector::zeros(6),
            r0: 1.0,
            phi0: 0.0,
            m_max: 3,
            n_max: 3,
            projection: Projection::LagrangeProject,
        };
        assert!(matches!(assemble_sopde(&spec), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn laplace_equals_sopde_with_zero_parameters() {
        let g = DVector::from_fn(7, |i, _| 0.1 * i as f64);
        let h = DVector::from_fn(7, |i, _| if i % 2 == 0 { 0.5 } else { -0.25 });
        let p = DVector::from_fn(6, |i, _| 1.0 / (1.0 + i as f64));
        let q = DVector::from_fn(6, |i, _| (i as f64).sin());
        let via_laplace = assemble_laplace(
            g.clone(),
            h.clone(),
            p.clone(),
            q.clone(),
            1.0,
            0.0,
            3,
            3,
            Projection::LagrangeProject,
        )
        .unwrap();
        let spec = SopdeSpec {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            forcing: CoefficientMatrix::zeros(3, 3),
            g_vec: g,
            h_vec: h,
            p_vec: p,
            q_vec: q,
            r0: 1.0,
            phi0: 0.0,
            m_max: 3,
            n_max: 3,
            projection: Projection::LagrangeProject,
        };
        let via_sopde = assemble_sopde(&spec).unwrap();
        assert_eq!(via_laplace.a, via_sopde.a);
        assert_eq!(via_laplace.b, via_sopde.b);
        assert_eq!(via_laplace.order(), 42);
    }

    #[test]
    fn export_produces_matching_matrix_market_and_rhs() {
        let spec = FopdeSpec {
            alpha: 1.0,
            beta: -1.0,
            gamma: 1.0,
            forcing: CoefficientMatrix::zeros(3, 3),
            h_vec: DVector::from_fn(7, |i, _| if i == 0 { 1.0 } else { 0.0 }),
            g_vec: DVector::from_fn(6, |i, _| 1.0 / (1.0 + i as f64)),
            r0: 0.0,
            phi0: 0.0,
            m_max: 3,
            n_max: 3,
            projection: Projection::LagrangeProject,
        };
        let system = assemble_fopde(&spec).unwrap();
        let mut matrix_out = Vec::new();
        let mut rhs_out = Vec::new();
        system.export(&mut matrix_out, &mut rhs_out).unwrap();
        let matrix_text = String::from_utf8(matrix_out).unwrap();
        let mut lines = matrix_text.lines();
        assert_eq!(lines.next().unwrap(), "%%MatrixMarket matrix coordinate real general");
        let header: Vec<usize> =
            lines.next().unwrap().split_whitespace().map(|v| v.parse().unwrap()).collect();
        assert_eq!(header[0], 42);
        assert_eq!(header[1], 42);
        assert_eq!(header[2], system.a.nnz());
        assert_eq!(lines.count(), system.a.nnz());
        let rhs_text = String::from_utf8(rhs_out).unwrap();
        let values: Vec<f64> = rhs_text.lines().map(|l| l.parse().unwrap()).collect();
        assert_eq!(values.len(), 42);
        for (parsed, original) in values.iter().zip(system.b.iter()) {
            assert_abs_diff_eq!(parsed, original);
        }
    }

    #[test]
    fn prebuilt_operator_set_must_match_the_spec() {
        let spec = FopdeSpec {
            alpha: 0.0,
            beta: 0.0,
            gamma: 1.0,
            forcing: CoefficientMatrix::zeros(3, 3),
            h_vec: DVector::zeros(7),
            g_vec: DVector::zeros(6),
            r0: 0.0,
            phi0: 0.0,
            m_max: 3,
            n_max: 3,
            projection: Projection::Truncate,
        };
        let wrong_ops =
            crate::opmatrix::OperatorSet::new(3, 3, 0.5, 0.0, Projection::Truncate).unwrap();
        assert!(matches!(
            assemble_fopde_with(&spec, &wrong_ops),
            Err(Error::DimensionMismatch(_))
        ));
        let right_ops =
            crate::opmatrix::OperatorSet::new(3, 3, 0.0, 0.0, Projection::Truncate).unwrap();
        let with = assemble_fopde_with(&spec, &right_ops).unwrap();
        let without = assemble_fopde(&spec).unwrap();
        assert_eq!(with.a, without.a);
        assert_eq!(with.b, without.b);
    }

    #[test]
    fn zero_boundary_sopde_rhs_vanishes() {
        let spec = SopdeSpec {
            alpha: 0.4,
            beta: -0.2,
            gamma: 1.5,
            forcing: CoefficientMatrix::zeros(3, 3),
            g_vec: DVector::zeros(7),
            h_vec: DVector::zeros(7),
            p_vec: DVector::zeros(6),
            q_vec: DVector::zeros(6),
            r0: 0.5,
            phi0: 0.0,
            m_max: 3,
            n_max: 3,
            projection: Projection::LagrangeProject,
        };
        let system = assemble_sopde(&spec).unwrap();
        assert_abs_diff_eq!(system.b.norm(), 0.0);
    }
}
