//! Integration and multiplication operational matrices.
//!
//! An operational matrix E satisfies `∫ weight · basis = E · basis` (or
//! `weight · basis = M · basis` for multiplication) over a truncated basis
//! vector, so that integral equations become matrix equations. The φ-side
//! matrices live in [`phi`], the radial ones in [`radial`]; [`OperatorSet`]
//! builds the full family once per configuration so repeated solves with
//! different boundary data can share them.

mod phi;
mod radial;

pub use phi::{phi_double_integration_matrix, phi_integration_matrix, phi_multiplication_matrix};
pub use radial::{
    appendix_block_construction, appendix_blocks, delta_block, delta_inverse_block,
    lagrange_project, radial_double_integration_matrix, radial_integration_matrix,
    radial_multiplication_matrix,
};

use crate::Result;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Trigonometric weight of a φ-side operational matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhiWeight {
    One,
    CosSquared,
    SinSquared,
    CosTwoPhi,
    SinTwoPhi,
}

impl PhiWeight {
    pub fn label(&self) -> &'static str {
        match self {
            PhiWeight::One => "1",
            PhiWeight::CosSquared => "cos^2",
            PhiWeight::SinSquared => "sin^2",
            PhiWeight::CosTwoPhi => "cos2phi",
            PhiWeight::SinTwoPhi => "sin2phi",
        }
    }
}

/// How super-degree radial terms are handled during construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    /// Replace each monomial r^p with p > n_max by its degree-n_max
    /// Lagrange interpolant at equispaced nodes.
    #[serde(rename = "project")]
    LagrangeProject,
    /// Drop the super-degree monomials outright.
    Truncate,
}

/// Integral or multiplication semantics of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    PhiIntegration(PhiWeight),
    PhiDoubleIntegration,
    PhiMultiplication(PhiWeight),
    /// ∫ ρ^power R(ρ) dρ.
    RadialIntegration(usize),
    RadialDoubleIntegration(usize),
    /// r^power R(r).
    RadialMultiplication(usize),
}

impl OpKind {
    pub fn label(&self) -> String {
        match self {
            OpKind::PhiIntegration(w) => format!("phi-integration[{}]", w.label()),
            OpKind::PhiDoubleIntegration => "phi-double-integration".into(),
            OpKind::PhiMultiplication(w) => format!("phi-multiplication[{}]", w.label()),
            OpKind::RadialIntegration(p) => format!("radial-integration[r^{p}]"),
            OpKind::RadialDoubleIntegration(p) => format!("radial-double-integration[r^{p}]"),
            OpKind::RadialMultiplication(p) => format!("radial-multiplication[r^{p}]"),
        }
    }
}

/// A dense operational matrix tagged with its semantics, integration origin
/// and truncation order. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationalMatrix {
    pub(crate) data: DMatrix<f64>,
    pub(crate) kind: OpKind,
    /// φ0 for φ-side matrices, r0 for radial ones.
    pub(crate) origin: f64,
    /// m_max or n_max respectively.
    pub(crate) order: usize,
    pub(crate) projection: Projection,
}

impl OperationalMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn projection(&self) -> Projection {
        self.projection
    }

    /// CSV dump with a header naming the matrix; used by golden-file tests
    /// and the `matrices` CLI command.
    pub fn write_csv<W: Write>(&self, w: &mut W, significant_digits: usize) -> Result<()> {
        writeln!(
            w,
            "# kind={} origin={} order={} projection={:?} rows={} cols={}",
            self.kind.label(),
            self.origin,
            self.order,
            self.projection,
            self.data.nrows(),
            self.data.ncols()
        )?;
        for i in 0..self.data.nrows() {
            let row: Vec<String> = (0..self.data.ncols())
                .map(|j| format!("{:.*e}", significant_digits.saturating_sub(1), self.data[(i, j)]))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// A vector with a single nonzero leading entry, used to embed the scalars
/// r0, r0², sin 2φ0, ... into the basis representation.
pub fn constant_embedding(value: f64, len: usize) -> DVector<f64> {
    let mut v = DVector::zeros(len);
    v[0] = value;
    v
}

/// Every operational matrix a solve needs, built once per configuration.
///
/// Construction is pure, the set is immutable, and the same set can be
/// reused across problems that share (m_max, n_max, r0, φ0, projection) but
/// differ in forcing or boundary data.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub m_max: usize,
    pub n_max: usize,
    pub r0: f64,
    pub phi0: f64,
    pub projection: Projection,
    /// E_{φφ0}: plain φ integration.
    pub phi_int: OperationalMatrix,
    /// E_{φφ0}^{cos²φ}.
    pub phi_int_cos2: OperationalMatrix,
    /// E_{φφ0}^{sin²φ}.
    pub phi_int_sin2: OperationalMatrix,
    /// E_{φφ0}^{cos 2φ}.
    pub phi_int_cos2phi: OperationalMatrix,
    /// E_{Dφφ0}: double φ integration.
    pub phi_double: OperationalMatrix,
    /// M_Φ^{sin 2φ}.
    pub phi_mul_sin2phi: OperationalMatrix,
    /// E_{rr0}: plain radial integration.
    pub radial_int: OperationalMatrix,
    /// E_{rr0}^{r}.
    pub radial_int_r: OperationalMatrix,
    /// E_{rr0}^{r³}.
    pub radial_int_r3: OperationalMatrix,
    /// E_{Drr0}.
    pub radial_double: OperationalMatrix,
    /// E_{Drr0}^{r²}.
    pub radial_double_r2: OperationalMatrix,
    /// M_R^{r}.
    pub radial_mul_r: OperationalMatrix,
    /// M_R^{r²}.
    pub radial_mul_r2: OperationalMatrix,
    /// M_R^{r⁴}.
    pub radial_mul_r4: OperationalMatrix,
}

impl OperatorSet {
    pub fn new(
        m_max: usize,
        n_max: usize,
        r0: f64,
        phi0: f64,
        projection: Projection,
    ) -> Result<Self> {
        Ok(Self {
            m_max,
            n_max,
            r0,
            phi0,
            projection,
            phi_int: phi_integration_matrix(m_max, phi0, PhiWeight::One),
            phi_int_cos2: phi_integration_matrix(m_max, phi0, PhiWeight::CosSquared),
            phi_int_sin2: phi_integration_matrix(m_max, phi0, PhiWeight::SinSquared),
            phi_int_cos2phi: phi_integration_matrix(m_max, phi0, PhiWeight::CosTwoPhi),
            phi_double: phi_double_integration_matrix(m_max, phi0),
            phi_mul_sin2phi: phi_multiplication_matrix(m_max),
            radial_int: radial_integration_matrix(n_max, r0, 0, projection)?,
            radial_int_r: radial_integration_matrix(n_max, r0, 1, projection)?,
            radial_int_r3: radial_integration_matrix(n_max, r0, 3, projection)?,
            radial_double: radial_double_integration_matrix(n_max, r0, 0, projection)?,
            radial_double_r2: radial_double_integration_matrix(n_max, r0, 2, projection)?,
            radial_mul_r: radial_multiplication_matrix(n_max, 1, projection),
            radial_mul_r2: radial_multiplication_matrix(n_max, 2, projection),
            radial_mul_r4: radial_multiplication_matrix(n_max, 4, projection),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_set_dimensions() {
        let ops = OperatorSet::new(3, 3, 0.0, 0.0, Projection::Truncate).unwrap();
        assert_eq!(ops.phi_int.matrix().nrows(), 7);
        assert_eq!(ops.phi_double.matrix().ncols(), 7);
        assert_eq!(ops.radial_int.matrix().nrows(), 6);
        assert_eq!(ops.radial_mul_r4.matrix().ncols(), 6);
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let e = radial_integration_matrix(3, 0.0, 0, Projection::Truncate).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf, 17).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.contains("radial-integration[r^0]"));
        assert!(header.contains("order=3"));
        assert_eq!(lines.count(), 6);
    }
}
