//! The Zernike basis on the unit disk: index bookkeeping, evaluation of the
//! radial polynomials, and expansion of functions into the tensor basis
//! Φ(φ) ⊗ R(r).
//!
//! The trigonometric vector is Φ(φ) = [1, cos φ, sin φ, ..., cos mφ, sin mφ]
//! of length M = 2·m_max + 1. The radial vector R(r) lists the radial
//! polynomials degree-ascending and, within a degree, azimuthal-order
//! ascending: [R_0^0, R_1^1, R_2^0, R_2^2, R_3^1, R_3^3, ...]. A function on
//! the disk is then approximated as Φ(φ)^T U R(r) with U an M×N coefficient
//! matrix.

use crate::{quad, ratpoly, Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Index (n, m) of a radial Zernike polynomial R_n^m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZernikeIndex {
    n: usize,
    m: usize,
}

impl ZernikeIndex {
    /// Validates 0 <= m <= n and n - m even.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m > n || (n - m) % 2 != 0 {
            return Err(Error::InvalidIndex { n, m });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Position of one entry of the trigonometric vector Φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrigIndex {
    Constant,
    /// cos(kφ) with k >= 1.
    Cosine(usize),
    /// sin(kφ) with k >= 1.
    Sine(usize),
}

impl TrigIndex {
    /// Linear position inside Φ: 0 for the constant, 2k-1 for cos kφ,
    /// 2k for sin kφ.
    pub fn position(&self) -> usize {
        match *self {
            TrigIndex::Constant => 0,
            TrigIndex::Cosine(k) => 2 * k - 1,
            TrigIndex::Sine(k) => 2 * k,
        }
    }

    pub fn from_position(pos: usize) -> Self {
        if pos == 0 {
            TrigIndex::Constant
        } else if pos % 2 == 1 {
            TrigIndex::Cosine(pos.div_ceil(2))
        } else {
            TrigIndex::Sine(pos / 2)
        }
    }

    /// Azimuthal frequency (0 for the constant entry).
    pub fn frequency(&self) -> usize {
        match *self {
            TrigIndex::Constant => 0,
            TrigIndex::Cosine(k) | TrigIndex::Sine(k) => k,
        }
    }
}

/// Number of radial polynomials of degree exactly `i`.
pub fn polys_of_degree(i: usize) -> usize {
    i / 2 + 1
}

/// Enumeration of the radial basis vector R(r) up to degree `n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialBasisLayout {
    n_max: usize,
    ordering: Vec<ZernikeIndex>,
}

impl RadialBasisLayout {
    pub fn new(n_max: usize) -> Self {
        let mut ordering = Vec::new();
        for n in 0..=n_max {
            let mut m = n % 2;
            while m <= n {
                ordering.push(ZernikeIndex { n, m });
                m += 2;
            }
        }
        Self { n_max, ordering }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Total number of basis polynomials N = Σ_{i<=n_max} (⌊i/2⌋ + 1).
    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }

    pub fn ordering(&self) -> &[ZernikeIndex] {
        &self.ordering
    }

    /// Column position of R_n^m, or None if it is not in the truncation.
    pub fn position(&self, idx: ZernikeIndex) -> Option<usize> {
        if idx.n > self.n_max {
            return None;
        }
        let offset: usize = (0..idx.n).map(polys_of_degree).sum();
        Some(offset + (idx.m - idx.n % 2) / 2)
    }

    /// Evaluates the whole vector R(r).
    pub fn eval_vector(&self, r: f64) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(self.len());
        for (j, idx) in self.ordering.iter().enumerate() {
            out[j] = eval_radial(*idx, r)?;
        }
        Ok(out)
    }
}

/// Monomial coefficients of one radial polynomial; `coeff(j)` multiplies r^j.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPolyCoeffs {
    coeffs: Vec<f64>,
    index: ZernikeIndex,
}

impl RadialPolyCoeffs {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.index.n
    }

    pub fn index(&self) -> ZernikeIndex {
        self.index
    }

    /// Horner evaluation (no domain check; used internally).
    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }
}

/// Exact monomial coefficients of R_n^m.
///
/// Coefficients are computed in exact integer arithmetic and only converted
/// to floating point at the end, so they are exact in f64 for every degree
/// used in practice (n <= 20 comfortably).
pub fn radial_poly(idx: ZernikeIndex) -> RadialPolyCoeffs {
    let coeffs = ratpoly::poly_to_f64(&ratpoly::radial_poly(idx.n, idx.m));
    RadialPolyCoeffs { coeffs, index: idx }
}

/// Evaluates R_n^m(r) for r in [0, 1].
///
/// Values outside the closed disk are rejected: the expansion is only
/// defined there, and |R_n^m| <= 1 holds only on [0, 1].
pub fn eval_radial(idx: ZernikeIndex, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::RadiusOutOfRange { r });
    }
    Ok(radial_poly(idx).eval(r))
}

/// The trigonometric vector Φ(φ) of length 2·m_max + 1.
pub fn trig_vector(phi: f64, m_max: usize) -> DVector<f64> {
    let mut out = DVector::zeros(2 * m_max + 1);
    out[0] = 1.0;
    for k in 1..=m_max {
        out[2 * k - 1] = (k as f64 * phi).cos();
        out[2 * k] = (k as f64 * phi).sin();
    }
    out
}

/// An M×N matrix of expansion coefficients in the Φ ⊗ R tensor basis.
///
/// Rows follow [`TrigIndex`] positions, columns follow the
/// [`RadialBasisLayout`] ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    data: DMatrix<f64>,
    m_max: usize,
    layout: RadialBasisLayout,
}

impl CoefficientMatrix {
    pub fn zeros(m_max: usize, n_max: usize) -> Self {
        let layout = RadialBasisLayout::new(n_max);
        let data = DMatrix::zeros(2 * m_max + 1, layout.len());
        Self { data, m_max, layout }
    }

    /// Wraps an existing matrix, checking that the dimensions match the
    /// declared truncation orders.
    pub fn from_matrix(data: DMatrix<f64>, m_max: usize, n_max: usize) -> Result<Self> {
        let layout = RadialBasisLayout::new(n_max);
        if data.nrows() != 2 * m_max + 1 || data.ncols() != layout.len() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix is {}x{}, expected {}x{} for (m_max, n_max) = ({m_max}, {n_max})",
                data.nrows(),
                data.ncols(),
                2 * m_max + 1,
                layout.len(),
            )));
        }
        Ok(Self { data, m_max, layout })
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn n_max(&self) -> usize {
        self.layout.n_max()
    }

    /// Number of rows M = 2·m_max + 1.
    pub fn num_rows(&self) -> usize {
        self.data.nrows()
    }

    /// Number of columns N.
    pub fn num_cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn layout(&self) -> &RadialBasisLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.data
    }

    pub fn get(&self, row: TrigIndex, col: ZernikeIndex) -> Option<f64> {
        let i = row.position();
        let j = self.layout.position(col)?;
        if i >= self.data.nrows() {
            return None;
        }
        Some(self.data[(i, j)])
    }

    pub fn set(&mut self, row: TrigIndex, col: ZernikeIndex, value: f64) -> Result<()> {
        let i = row.position();
        let j = self
            .layout
            .position(col)
            .ok_or_else(|| Error::DimensionMismatch(format!("column {col:?} out of layout")))?;
        if i >= self.data.nrows() {
            return Err(Error::DimensionMismatch(format!("row {row:?} out of range")));
        }
        self.data[(i, j)] = value;
        Ok(())
    }

    /// Evaluates the expansion Φ(φ)^T U R(r).
    pub fn evaluate(&self, r: f64, phi: f64) -> Result<f64> {
        reconstruct(self, r, phi)
    }
}

/// Evaluates ũ(r, φ) = Φ(φ)^T U R(r).
pub fn reconstruct(u: &CoefficientMatrix, r: f64, phi: f64) -> Result<f64> {
    let trig = trig_vector(phi, u.m_max());
    let radial = u.layout().eval_vector(r)?;
    Ok((trig.transpose() * u.matrix() * radial)[(0, 0)])
}

/// Node counts for the expansion quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes on [0, 1] (the r-weight is folded into the
    /// integrand).
    pub n_radial: usize,
    /// Uniform angular nodes on [0, 2π).
    pub n_angular: usize,
}

impl QuadratureSpec {
    /// Default spec for truncation orders (m_max, n_max): exact on every
    /// polynomial integrand that arises below those degrees.
    pub fn for_orders(m_max: usize, n_max: usize) -> Self {
        Self {
            n_radial: 2 * n_max + 8,
            n_angular: 4 * m_max + 8,
        }
    }
}

/// Expands a function on the disk into Zernike coefficients.
///
/// Entry (row, col) of the result is the coefficient A_nm (cosine rows and
/// the constant row) or B_nm (sine rows) of Eq.-style normalization
/// ε_m (n+1)/π ∫∫ f · trig(mφ) · R_n^m(r) · r dφ dr, approximated by
/// Gauss–Legendre × uniform-angle quadrature. Deterministic for a fixed
/// spec.
pub fn expand_function<F>(
    f: F,
    m_max: usize,
    n_max: usize,
    spec: QuadratureSpec,
) -> Result<CoefficientMatrix>
where
    F: Fn(f64, f64) -> f64,
{
    let (r_nodes, r_weights) = quad::gauss_legendre_unit(spec.n_radial);
    let (phi_nodes, phi_weight) = quad::uniform_angular(spec.n_angular);

    // Sample f once per node.
    let mut samples: DMatrix<f64> = DMatrix::zeros(spec.n_radial, spec.n_angular);
    for (i, &r) in r_nodes.iter().enumerate() {
        for (j, &phi) in phi_nodes.iter().enumerate() {
            let v = f(r, phi);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { value: v, r, phi });
            }
            samples[(i, j)] = v;
        }
    }

    // Angular reduction: for each radial node, the projections onto
    // 1, cos kφ, sin kφ.
    let m_rows = 2 * m_max + 1;
    let mut angular: DMatrix<f64> = DMatrix::zeros(spec.n_radial, m_rows);
    for (j, &phi) in phi_nodes.iter().enumerate() {
        let trig = trig_vector(phi, m_max);
        for i in 0..spec.n_radial {
            let s = samples[(i, j)] * phi_weight;
            for row in 0..m_rows {
                angular[(i, row)] += s * trig[row];
            }
        }
    }

    let layout = RadialBasisLayout::new(n_max);
    let mut out = CoefficientMatrix::zeros(m_max, n_max);
    for (col, idx) in layout.ordering().iter().enumerate() {
        if idx.m() > m_max {
            // Not representable in this truncation of Φ; the tensor basis
            // simply has no slot for it.
            continue;
        }
        let poly = radial_poly(*idx);
        let neumann = if idx.m() == 0 { 1.0 } else { 2.0 };
        let scale = neumann * (idx.n() as f64 + 1.0) / PI;
        // Radial reduction with the r weight folded in.
        let mut acc_rows = vec![0.0; m_rows];
        for (i, (&r, &w)) in r_nodes.iter().zip(&r_weights).enumerate() {
            let radial_val = poly.eval(r) * r * w;
            for (acc, row) in acc_rows.iter_mut().zip(0..m_rows) {
                *acc += radial_val * angular[(i, row)];
            }
        }
        if idx.m() == 0 {
            out.data[(0, col)] = scale * acc_rows[0];
        } else {
            let c_row = TrigIndex::Cosine(idx.m()).position();
            let s_row = TrigIndex::Sine(idx.m()).position();
            out.data[(c_row, col)] = scale * acc_rows[c_row];
            out.data[(s_row, col)] = scale * acc_rows[s_row];
        }
    }
    Ok(out)
}

/// Standard Fourier coefficients of a function of φ against
/// {1, cos kφ, sin kφ}: the mean for the constant entry, 1/π-weighted
/// integrals otherwise.
///
/// Uses a fixed dense uniform rule; for piecewise-smooth boundary data the
/// coefficients converge at the usual Fourier rate.
pub fn expand_fourier_1d<G>(g: G, m_max: usize) -> Result<DVector<f64>>
where
    G: Fn(f64) -> f64,
{
    let n_nodes = (8 * (m_max + 1)).max(1024);
    // Midpoint placement keeps the common jump locations (multiples of π/2)
    // off the nodes, where piecewise boundary data is typically undefined.
    let weight = 2.0 * PI / n_nodes as f64;
    let nodes: Vec<f64> = (0..n_nodes).map(|j| (j as f64 + 0.5) * weight).collect();
    let mut out = DVector::zeros(2 * m_max + 1);
    for &phi in &nodes {
        let v = g(phi);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { value: v, r: f64::NAN, phi });
        }
        out[0] += v * weight / (2.0 * PI);
        for k in 1..=m_max {
            out[2 * k - 1] += v * (k as f64 * phi).cos() * weight / PI;
            out[2 * k] += v * (k as f64 * phi).sin() * weight / PI;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn zi(n: usize, m: usize) -> ZernikeIndex {
        ZernikeIndex::new(n, m).unwrap()
    }

    #[test]
    fn index_validation_rejects_bad_pairs() {
        assert!(ZernikeIndex::new(3, 2).is_err());
        assert!(ZernikeIndex::new(2, 3).is_err());
        assert!(ZernikeIndex::new(4, 2).is_ok());
    }

    #[test]
    fn layout_matches_the_displayed_ordering() {
        let layout = RadialBasisLayout::new(3);
        let expected = [(0, 0), (1, 1), (2, 0), (2, 2), (3, 1), (3, 3)];
        assert_eq!(layout.len(), 6);
        for (j, (n, m)) in expected.iter().enumerate() {
            assert_eq!(layout.ordering()[j], zi(*n, *m));
            assert_eq!(layout.position(zi(*n, *m)), Some(j));
        }
        // N = sum of p_i.
        let layout10 = RadialBasisLayout::new(10);
        assert_eq!(layout10.len(), 36);
    }

    #[test]
    fn radial_poly_matches_displayed_coefficients() {
        assert_eq!(radial_poly(zi(0, 0)).coeffs(), &[1.0]);
        assert_eq!(radial_poly(zi(2, 0)).coeffs(), &[-1.0, 0.0, 2.0]);
        assert_eq!(radial_poly(zi(3, 1)).coeffs(), &[0.0, -2.0, 0.0, 3.0]);
        // Independently derived from the factorial sum.
        assert_eq!(radial_poly(zi(4, 0)).coeffs(), &[1.0, 0.0, -6.0, 0.0, 6.0]);
    }

    #[test]
    fn eval_radial_basics() {
        assert_abs_diff_eq!(eval_radial(zi(3, 3), 0.5).unwrap(), 0.125);
        assert_abs_diff_eq!(eval_radial(zi(2, 0), 1.0).unwrap(), 1.0);
        // 6r^4 - 6r^2 + 1 at 0.5.
        assert_abs_diff_eq!(eval_radial(zi(4, 0), 0.5).unwrap(), -0.125, epsilon = 1e-15);
        assert!(eval_radial(zi(2, 0), 1.5).is_err());
        assert!(eval_radial(zi(2, 0), -0.1).is_err());
    }

    #[test]
    fn radial_polys_are_bounded_by_one() {
        for n in 0..=15usize {
            let mut m = n % 2;
            while m <= n {
                let poly = radial_poly(zi(n, m));
                for i in 0..=1000 {
                    let r = i as f64 / 1000.0;
                    assert!(
                        poly.eval(r).abs() <= 1.0 + 1e-12,
                        "|R_{n}^{m}({r})| = {}",
                        poly.eval(r).abs()
                    );
                }
                m += 2;
            }
        }
    }

    #[test]
    fn trig_vector_values() {
        let v = trig_vector(0.0, 2);
        assert_eq!(v.as_slice(), &[1.0, 1.0, 0.0, 1.0, 0.0]);
        let v = trig_vector(PI / 2.0, 1);
        assert_abs_diff_eq!(v[0], 1.0);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[2], 1.0);
        let v = trig_vector(PI / 2.0, 2);
        assert_abs_diff_eq!(v[3], -1.0);
        assert_abs_diff_eq!(v[4], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn reconstruct_trivial_cases() {
        let mut u = CoefficientMatrix::zeros(2, 2);
        assert_abs_diff_eq!(reconstruct(&u, 0.3, 1.1).unwrap(), 0.0);
        u.set(TrigIndex::Constant, zi(0, 0), 1.0).unwrap();
        assert_abs_diff_eq!(reconstruct(&u, 0.9, 2.5).unwrap(), 1.0);
    }

    #[test]
    fn reconstruct_truncated_exponential_at_boundary() {
        // Degree-3 truncation of e^{r cos φ}: entries 1, 1, 1/4, 1/8, 1/4,
        // 1/24 in the tensor positions; at (r, φ) = (1, 0) the truncated
        // Taylor series sums to 1 + 1 + 1/2 + 1/6 = 8/3.
        let mut u = CoefficientMatrix::zeros(3, 3);
        u.set(TrigIndex::Constant, zi(0, 0), 1.0).unwrap();
        u.set(TrigIndex::Cosine(1), zi(1, 1), 1.0).unwrap();
        u.set(TrigIndex::Constant, zi(2, 2), 0.25).unwrap();
        u.set(TrigIndex::Cosine(1), zi(3, 3), 0.125).unwrap();
        u.set(TrigIndex::Cosine(2), zi(2, 2), 0.25).unwrap();
        u.set(TrigIndex::Cosine(3), zi(3, 3), 1.0 / 24.0).unwrap();
        assert_abs_diff_eq!(reconstruct(&u, 1.0, 0.0).unwrap(), 8.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn expand_constant_and_basis_element() {
        let spec = QuadratureSpec::for_orders(3, 3);
        let u = expand_function(|_, _| 1.0, 3, 3, spec).unwrap();
        assert_abs_diff_eq!(u.get(TrigIndex::Constant, zi(0, 0)).unwrap(), 1.0, epsilon = 1e-12);
        for (j, idx) in u.layout().ordering().iter().enumerate() {
            for i in 0..u.num_rows() {
                if (i, j) != (0, 0) {
                    assert_abs_diff_eq!(u.matrix()[(i, j)], 0.0, epsilon = 1e-12);
                }
                let _ = idx;
            }
        }

        let u = expand_function(|r, phi| r * phi.cos(), 3, 3, spec).unwrap();
        for i in 0..u.num_rows() {
            for j in 0..u.num_cols() {
                let expected =
                    if (i, j) == (TrigIndex::Cosine(1).position(), 1) { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(u.matrix()[(i, j)], expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn expand_exponential_matches_bessel_oracle() {
        // e^{r cos φ} = I_0(r) + 2 Σ_m I_m(r) cos mφ, so the expansion
        // coefficients are A_nm = 2 ε_m (n+1) ∫ I_m(r) R_n^m(r) r dr. The
        // oracle computes that integral analytically from the power series
        // of I_m (exact monomial integration, series truncated far below
        // f64 precision).
        let oracle = |n: usize, m: usize| -> f64 {
            let poly = radial_poly(zi(n, m));
            let eps = if m == 0 { 1.0 } else { 2.0 };
            let mut acc = 0.0;
            for j in 0..25usize {
                // I_m series term: (r/2)^{m+2j} / (j! (m+j)!).
                let mut term = (0.5f64).powi((m + 2 * j) as i32);
                for k in 2..=j {
                    term /= k as f64;
                }
                for k in 2..=(m + j) {
                    term /= k as f64;
                }
                // ∫ r^{m+2j} R_n^m(r) r dr, exactly.
                let moment: f64 = poly
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(p, c)| c / (m + 2 * j + p + 2) as f64)
                    .sum();
                acc += term * moment;
            }
            2.0 * eps * (n as f64 + 1.0) * acc
        };
        let spec = QuadratureSpec::for_orders(3, 3);
        let u = expand_function(|r, phi: f64| (r * phi.cos()).exp(), 3, 3, spec).unwrap();
        for idx in u.layout().ordering() {
            let expected = oracle(idx.n(), idx.m());
            let row = if idx.m() == 0 { TrigIndex::Constant } else { TrigIndex::Cosine(idx.m()) };
            assert_abs_diff_eq!(u.get(row, *idx).unwrap(), expected, epsilon = 1e-12);
            if idx.m() > 0 {
                // Odd symmetry in φ kills every sine coefficient.
                assert_abs_diff_eq!(
                    u.get(TrigIndex::Sine(idx.m()), *idx).unwrap(),
                    0.0,
                    epsilon = 1e-12
                );
            }
        }
        // The projection is close to the function itself (and hence to the
        // displayed degree-3 Taylor truncation) in function space.
        for (r, phi) in [(0.0, 0.0), (0.5, 1.0), (0.9, 2.0), (1.0, 0.5), (0.7, 4.4)] {
            let projected = reconstruct(&u, r, phi).unwrap();
            assert_abs_diff_eq!(projected, (r * phi.cos()).exp(), epsilon = 0.06);
        }
    }

    #[test]
    fn expand_function_names_the_bad_node() {
        let spec = QuadratureSpec::for_orders(3, 3);
        let err = expand_function(|r, _| 1.0 / (r - r), 3, 3, spec).unwrap_err();
        match err {
            Error::NonFiniteSample { r, phi, .. } => {
                assert!(r.is_finite() && phi.is_finite());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn orthogonality_under_quadrature() {
        // ∫_0^1 R_n^m R_n'^m r dr = δ_{nn'} / (2n + 2), checked for all
        // pairs with n, n' <= 10 under the default Gauss–Legendre rule.
        let n_max = 10;
        let (nodes, weights) = quad::gauss_legendre_unit(2 * n_max + 8);
        for m in 0..=n_max {
            let mut n1 = m;
            while n1 <= n_max {
                let mut n2 = m;
                while n2 <= n_max {
                    let p1 = radial_poly(zi(n1, m));
                    let p2 = radial_poly(zi(n2, m));
                    let quad_val: f64 = nodes
                        .iter()
                        .zip(&weights)
                        .map(|(&r, &w)| w * p1.eval(r) * p2.eval(r) * r)
                        .sum();
                    let expected = if n1 == n2 { 1.0 / (2.0 * n1 as f64 + 2.0) } else { 0.0 };
                    assert_abs_diff_eq!(quad_val, expected, epsilon = 1e-12);
                    n2 += 2;
                }
                n1 += 2;
            }
        }
    }

    #[test]
    fn expansion_roundtrip_on_polynomials() {
        // A coefficient matrix supported on degrees <= n_max must be
        // recovered exactly (quadrature is exact on polynomials).
        let mut u = CoefficientMatrix::zeros(3, 3);
        let entries = [
            (TrigIndex::Constant, zi(0, 0), 0.7),
            (TrigIndex::Constant, zi(2, 0), -0.3),
            (TrigIndex::Cosine(2), zi(2, 2), 1.4),
            (TrigIndex::Sine(1), zi(3, 1), 0.9),
            (TrigIndex::Sine(3), zi(3, 3), -2.2),
            (TrigIndex::Cosine(1), zi(1, 1), 0.05),
        ];
        for (row, col, val) in entries {
            u.set(row, col, val).unwrap();
        }
        let spec = QuadratureSpec::for_orders(3, 3);
        let recovered =
            expand_function(|r, phi| reconstruct(&u, r, phi).unwrap(), 3, 3, spec).unwrap();
        for i in 0..u.num_rows() {
            for j in 0..u.num_cols() {
                assert_abs_diff_eq!(
                    recovered.matrix()[(i, j)],
                    u.matrix()[(i, j)],
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn parseval_identity_at_truncation() {
        // For a truncated polynomial, Σ coefficient² · π / (ε_m (n+1))
        // equals the squared L² norm over the disk (r-weighted).
        let mut u = CoefficientMatrix::zeros(3, 3);
        u.set(TrigIndex::Constant, zi(2, 0), 0.8).unwrap();
        u.set(TrigIndex::Cosine(1), zi(3, 1), -0.4).unwrap();
        u.set(TrigIndex::Sine(2), zi(2, 2), 1.1).unwrap();
        u.set(TrigIndex::Cosine(3), zi(3, 3), 0.6).unwrap();

        let mut coeff_sum = 0.0;
        for (j, idx) in u.layout().ordering().iter().enumerate() {
            for i in 0..u.num_rows() {
                let c = u.matrix()[(i, j)];
                if c == 0.0 {
                    continue;
                }
                let eps = if TrigIndex::from_position(i).frequency() == 0 { 1.0 } else { 2.0 };
                coeff_sum += c * c * PI / (eps * (idx.n() as f64 + 1.0));
            }
        }

        let (r_nodes, r_weights) = quad::gauss_legendre_unit(16);
        let (phi_nodes, phi_weight) = quad::uniform_angular(32);
        let mut norm_sq = 0.0;
        for (&r, &w) in r_nodes.iter().zip(&r_weights) {
            for &phi in &phi_nodes {
                let v = reconstruct(&u, r, phi).unwrap();
                norm_sq += v * v * r * w * phi_weight;
            }
        }
        assert_abs_diff_eq!(coeff_sum, norm_sq, epsilon = 1e-10);
    }

    #[test]
    fn fourier_1d_constant_and_sine() {
        let v = expand_fourier_1d(|_| 1.0, 3).unwrap();
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-12);
        for k in 1..v.len() {
            assert_abs_diff_eq!(v[k], 0.0, epsilon = 1e-12);
        }
        let v = expand_fourier_1d(|phi| phi.sin(), 3).unwrap();
        for (k, &val) in v.iter().enumerate() {
            let expected = if k == TrigIndex::Sine(1).position() { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(val, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn fourier_1d_step_function() {
        // 1 on (0, π), 0 on (π, 2π): coefficients [1/2, 0, 2/π, 0, 0, 0, 2/(3π)].
        let v = expand_fourier_1d(|phi| if phi > 0.0 && phi < PI { 1.0 } else { 0.0 }, 3).unwrap();
        let expected = [0.5, 0.0, 2.0 / PI, 0.0, 0.0, 0.0, 2.0 / (3.0 * PI)];
        for (k, &e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(v[k], e, epsilon = 1e-3);
        }
    }
}
