//! Operational matrices over the radial vector R(r).
//!
//! Integration of the radial polynomials runs through the derivative
//! recurrence ∫ [R_n^m + R_n^{m+2}] = [R_{n+1}^{m+1} - R_{n-1}^{m+1}]/(n+1),
//! telescoped in m. Terms of degree n_max + 1 produced at the top degree are
//! expanded into monomials; the monomials of degree <= n_max are kept
//! (mapped onto columns through the canonical r^p -> R_p^p rule) and the
//! super-degree monomials are either dropped (`Truncate`) or replaced by
//! their equispaced-node Lagrange interpolant (`LagrangeProject`). The
//! constant of integration keeps its exact value at r0 either way.
//!
//! The radial set is linearly dependent as univariate polynomials (for
//! example R_2^0 = 2 R_2^2 - R_0^0), so representations are not unique; the
//! constructions here reproduce the displayed matrices entry for entry.

use super::{OpKind, OperationalMatrix, Projection};
use crate::basis::{polys_of_degree, RadialBasisLayout, ZernikeIndex};
use crate::ratpoly::{self, Rat, RatPoly};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Zero;

/// Monomial coefficients of the degree-`n_max` Lagrange interpolant of r^p
/// at the equispaced nodes 0, 1/n_max, ..., 1.
///
/// Assembly only ever projects super-degree powers (p > n_max), but the
/// routine is general interpolation: invoked with p <= n_max it reproduces
/// r^p exactly.
pub fn lagrange_project(p: usize, n_max: usize) -> Vec<f64> {
    ratpoly::poly_to_f64(&ratpoly::lagrange_interpolant(p, n_max))
}

/// Canonical map of a monomial polynomial onto radial-basis columns:
/// r^p goes to the single column of R_p^p (which equals r^p), with
/// super-degree monomials handled per the projection mode.
fn distribute(
    poly: &[Rat],
    layout: &RadialBasisLayout,
    projection: Projection,
    row: &mut [Rat],
) {
    let n_max = layout.n_max();
    for (p, c) in poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if p <= n_max {
            let col = layout
                .position(ZernikeIndex::new(p, p).expect("diagonal index"))
                .expect("within layout");
            row[col] += c;
        } else if projection == Projection::LagrangeProject {
            let interp = ratpoly::lagrange_interpolant(p, n_max);
            for (q, ic) in interp.iter().enumerate() {
                if ic.is_zero() {
                    continue;
                }
                let col = layout
                    .position(ZernikeIndex::new(q, q).expect("diagonal index"))
                    .expect("within layout");
                row[col] += c * ic;
            }
        }
    }
}

fn rows_to_matrix(rows: Vec<Vec<Rat>>, constants: Vec<f64>) -> DMatrix<f64> {
    let n = rows.len();
    let mut data = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            data[(i, j)] = ratpoly::to_f64(c);
        }
        data[(i, 0)] += constants[i];
    }
    data
}

/// Multiplication matrix: r^j R(r) ≈ M R(r) for j in 1..=4.
///
/// Each product is expanded into monomials and mapped back canonically;
/// products that stay within degree n_max are represented exactly.
pub fn radial_multiplication_matrix(
    n_max: usize,
    j: usize,
    projection: Projection,
) -> OperationalMatrix {
    assert!((1..=4).contains(&j), "multiplication power must be 1..=4");
    let layout = RadialBasisLayout::new(n_max);
    let n = layout.len();
    let mut rows = Vec::with_capacity(n);
    for idx in layout.ordering() {
        let shifted = ratpoly::shift(&ratpoly::radial_poly(idx.n(), idx.m()), j);
        let mut row = vec![Rat::zero(); n];
        distribute(&shifted, &layout, projection, &mut row);
        rows.push(row);
    }
    OperationalMatrix {
        data: rows_to_matrix(rows, vec![0.0; n]),
        kind: OpKind::RadialMultiplication(j),
        origin: 0.0,
        order: n_max,
        projection,
    }
}

/// The exact integral ∫_{r0}^{r} R_i^m(ρ) dρ in Zernike form, as a list of
/// (index, coefficient) terms; indices of degree i + 1 may exceed the
/// truncation and are handled by the caller. Follows from telescoping the
/// recurrence in m (terms with an invalid lower index simply vanish).
fn integral_terms(i: usize, m: usize) -> Vec<(ZernikeIndex, Rat)> {
    let mut terms = Vec::new();
    let steps = (i - m) / 2;
    for t in 0..=steps {
        let order = m + 1 + 2 * t;
        let mut coeff = Rat::new(BigInt::from(1), BigInt::from(i as i64 + 1));
        if t % 2 == 1 {
            coeff = -coeff;
        }
        terms.push((ZernikeIndex::new(i + 1, order).expect("upper index"), coeff.clone()));
        if i >= 1 && order < i {
            terms.push((ZernikeIndex::new(i - 1, order).expect("lower index"), -coeff));
        }
    }
    terms
}

/// Integration operational matrix ∫_{r0}^{r} ρ^j R(ρ) dρ = E R(r) for
/// j in 0..=3.
///
/// For j = 0 the rows come from the recurrence (and agree entry for entry
/// with the block construction of [`appendix_block_construction`]); for
/// j >= 1 the integrand is integrated monomial by monomial. In both cases
/// the constant of integration (the negated antiderivative at r0) lands in
/// column 0 at its exact value.
pub fn radial_integration_matrix(
    n_max: usize,
    r0: f64,
    j: usize,
    projection: Projection,
) -> Result<OperationalMatrix> {
    if !(0.0..=1.0).contains(&r0) {
        return Err(Error::OriginOutOfRange { r0 });
    }
    assert!(j <= 3, "integration weight power must be 0..=3");
    let layout = RadialBasisLayout::new(n_max);
    let n = layout.len();
    let mut rows = Vec::with_capacity(n);
    let mut constants = Vec::with_capacity(n);
    for idx in layout.ordering() {
        let mut row = vec![Rat::zero(); n];
        let mut at_origin = 0.0;
        if j == 0 {
            let mut super_part = RatPoly::new();
            for (term, coeff) in integral_terms(idx.n(), idx.m()) {
                let poly = ratpoly::radial_poly(term.n(), term.m());
                at_origin += ratpoly::to_f64(&coeff) * ratpoly::eval_f64(&poly, r0);
                if term.n() <= n_max {
                    let col = layout.position(term).expect("within layout");
                    row[col] += &coeff;
                } else {
                    if super_part.len() < poly.len() {
                        super_part.resize(poly.len(), Rat::zero());
                    }
                    for (p, c) in poly.iter().enumerate() {
                        super_part[p] += c * &coeff;
                    }
                }
            }
            distribute(&super_part, &layout, projection, &mut row);
        } else {
            let antider =
                ratpoly::integrate(&ratpoly::shift(&ratpoly::radial_poly(idx.n(), idx.m()), j));
            at_origin = ratpoly::eval_f64(&antider, r0);
            distribute(&antider, &layout, projection, &mut row);
        }
        rows.push(row);
        constants.push(-at_origin);
    }
    Ok(OperationalMatrix {
        data: rows_to_matrix(rows, constants),
        kind: OpKind::RadialIntegration(j),
        origin: r0,
        order: n_max,
        projection,
    })
}

/// Double integration: ∫∫ ρ^j R (dρ)² = E_{D}^{r^j} R with
/// E_{D}^{r^j} = E^{r^j} · E, so the identity holds at the operator level.
pub fn radial_double_integration_matrix(
    n_max: usize,
    r0: f64,
    j: usize,
    projection: Projection,
) -> Result<OperationalMatrix> {
    let outer = radial_integration_matrix(n_max, r0, j, projection)?;
    let inner = radial_integration_matrix(n_max, r0, 0, projection)?;
    Ok(OperationalMatrix {
        data: &outer.data * &inner.data,
        kind: OpKind::RadialDoubleIntegration(j),
        origin: r0,
        order: n_max,
        projection,
    })
}

/// The bidiagonal block Δ_{i+1} (ones on and above the main diagonal).
pub fn delta_block(size: usize) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |r, c| if c == r || c == r + 1 { 1.0 } else { 0.0 })
}

/// Its inverse: upper triangular with alternating ±1.
pub fn delta_inverse_block(size: usize) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |r, c| {
        if c < r {
            0.0
        } else if (c - r) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
}

/// The pair (E_r1, E_r2) of the block construction: E_r1 is block-diagonal
/// with Δ blocks, E_r2 holds the recurrence right sides
/// [R_{n+1}^{m+1} - R_{n-1}^{m+1}]/(n+1) as non-zero blocks Γ_{kl}, with the
/// r0-dependent first-column block Γ_{k1} and degree-(n_max+1) terms
/// truncated at the monomial level.
pub fn appendix_blocks(n_max: usize, r0: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !(0.0..=1.0).contains(&r0) {
        return Err(Error::OriginOutOfRange { r0 });
    }
    let layout = RadialBasisLayout::new(n_max);
    let n = layout.len();
    let mut er1 = DMatrix::zeros(n, n);
    let mut er2_rows: Vec<Vec<Rat>> = Vec::with_capacity(n);
    let mut constants = Vec::with_capacity(n);
    let mut offset = 0;
    for degree in 0..=n_max {
        let block = polys_of_degree(degree);
        let delta = delta_block(block);
        for r in 0..block {
            for c in 0..block {
                er1[(offset + r, offset + c)] = delta[(r, c)];
            }
        }
        for k in 0..block {
            let m = degree % 2 + 2 * k;
            // ∫ [R_degree^m + R_degree^{m+2}] = [R_{degree+1}^{m+1} -
            // R_{degree-1}^{m+1}] / (degree + 1).
            let coeff = Rat::new(BigInt::from(1), BigInt::from(degree as i64 + 1));
            let mut row = vec![Rat::zero(); n];
            let mut at_origin = 0.0;
            let upper = ZernikeIndex::new(degree + 1, m + 1).expect("upper index");
            let upper_poly = ratpoly::radial_poly(upper.n(), upper.m());
            at_origin += ratpoly::to_f64(&coeff) * ratpoly::eval_f64(&upper_poly, r0);
            if upper.n() <= n_max {
                row[layout.position(upper).expect("within layout")] += &coeff;
            } else {
                let scaled: RatPoly = upper_poly.iter().map(|c| c * &coeff).collect();
                distribute(&scaled, &layout, Projection::Truncate, &mut row);
            }
            if degree >= 1 && m + 1 < degree {
                let lower = ZernikeIndex::new(degree - 1, m + 1).expect("lower index");
                let lower_poly = ratpoly::radial_poly(lower.n(), lower.m());
                at_origin -= ratpoly::to_f64(&coeff) * ratpoly::eval_f64(&lower_poly, r0);
                row[layout.position(lower).expect("within layout")] -= &coeff;
            }
            er2_rows.push(row);
            constants.push(-at_origin);
        }
        offset += block;
    }
    Ok((er1, rows_to_matrix(er2_rows, constants)))
}

/// The Appendix form of the radial integration matrix: E_{r1}^{-1} E_{r2},
/// with E_{r1}^{-1} assembled from the alternating-sign Δ inverses. Equals
/// `radial_integration_matrix(n_max, r0, 0, Truncate)` entry for entry.
pub fn appendix_block_construction(n_max: usize, r0: f64) -> Result<OperationalMatrix> {
    let (_, er2) = appendix_blocks(n_max, r0)?;
    let layout = RadialBasisLayout::new(n_max);
    let n = layout.len();
    let mut er1_inv = DMatrix::zeros(n, n);
    let mut offset = 0;
    for degree in 0..=n_max {
        let block = polys_of_degree(degree);
        let inv = delta_inverse_block(block);
        for r in 0..block {
            for c in 0..block {
                er1_inv[(offset + r, offset + c)] = inv[(r, c)];
            }
        }
        offset += block;
    }
    Ok(OperationalMatrix {
        data: er1_inv * er2,
        kind: OpKind::RadialIntegration(0),
        origin: r0,
        order: n_max,
        projection: Projection::Truncate,
    })
}
