//! Operational matrices over the trigonometric vector Φ(φ).
//!
//! Each row is built the same way: multiply the row's basis element by the
//! weight, take the exact antiderivative in a Fourier basis extended to
//! frequency m_max + 2, then
//! - keep oscillatory components with frequency <= m_max in their columns
//!   and drop the overflow,
//! - replace the secular φ term by its Fourier series on [0, 2π],
//!   π - Σ_k (2/k) sin kφ, truncated at m_max,
//! - put the full constant of integration (the negated antiderivative value
//!   at φ0, overflow frequencies included) into column 0.
//!
//! Keeping the overflow inside the constant is what produces the closed-form
//! corner entries such as 1/(2m) + 1/(4(m-2)) + 1/(4(m+2)).

use super::{OpKind, OperationalMatrix, PhiWeight, Projection};
use crate::basis::TrigIndex;
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// A truncated trigonometric polynomial, possibly with a secular φ term.
#[derive(Debug, Clone)]
struct TrigPoly {
    secular: f64,
    constant: f64,
    /// cos[k - 1] multiplies cos(kφ).
    cos: Vec<f64>,
    /// sin[k - 1] multiplies sin(kφ).
    sin: Vec<f64>,
}

impl TrigPoly {
    fn zero(k_max: usize) -> Self {
        Self {
            secular: 0.0,
            constant: 0.0,
            cos: vec![0.0; k_max],
            sin: vec![0.0; k_max],
        }
    }

    fn basis(idx: TrigIndex, k_max: usize) -> Self {
        let mut p = Self::zero(k_max);
        match idx {
            TrigIndex::Constant => p.constant = 1.0,
            TrigIndex::Cosine(k) => p.cos[k - 1] = 1.0,
            TrigIndex::Sine(k) => p.sin[k - 1] = 1.0,
        }
        p
    }

    fn add_cos(&mut self, k: usize, c: f64) {
        if k == 0 {
            self.constant += c;
        } else {
            self.cos[k - 1] += c;
        }
    }

    /// sin(-kφ) = -sin(kφ); sin(0φ) contributes nothing.
    fn add_sin(&mut self, k: isize, c: f64) {
        match k.cmp(&0) {
            std::cmp::Ordering::Greater => self.sin[k as usize - 1] += c,
            std::cmp::Ordering::Less => self.sin[(-k) as usize - 1] -= c,
            std::cmp::Ordering::Equal => {}
        }
    }

    /// Product with cos(jφ) via product-to-sum identities.
    fn mul_cos(&self, j: usize) -> Self {
        assert_eq!(self.secular, 0.0, "secular terms cannot be multiplied");
        let mut out = Self::zero(self.cos.len());
        out.add_cos(j, self.constant);
        for (k0, &a) in self.cos.iter().enumerate() {
            if a != 0.0 {
                let k = k0 + 1;
                out.add_cos(k + j, 0.5 * a);
                out.add_cos(k.abs_diff(j), 0.5 * a);
            }
        }
        for (k0, &b) in self.sin.iter().enumerate() {
            if b != 0.0 {
                let k = (k0 + 1) as isize;
                out.add_sin(k + j as isize, 0.5 * b);
                out.add_sin(k - j as isize, 0.5 * b);
            }
        }
        out
    }

    /// Product with sin(jφ).
    fn mul_sin(&self, j: usize) -> Self {
        assert_eq!(self.secular, 0.0, "secular terms cannot be multiplied");
        let mut out = Self::zero(self.cos.len());
        out.add_sin(j as isize, self.constant);
        for (k0, &a) in self.cos.iter().enumerate() {
            if a != 0.0 {
                let k = k0 + 1;
                // sin jφ cos kφ = [sin(j+k)φ + sin(j-k)φ] / 2
                out.add_sin((j + k) as isize, 0.5 * a);
                out.add_sin(j as isize - k as isize, 0.5 * a);
            }
        }
        for (k0, &b) in self.sin.iter().enumerate() {
            if b != 0.0 {
                let k = k0 + 1;
                // sin jφ sin kφ = [cos(j-k)φ - cos(j+k)φ] / 2
                out.add_cos(j.abs_diff(k), 0.5 * b);
                out.add_cos(j + k, -0.5 * b);
            }
        }
        out
    }

    fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.secular *= s;
        out.constant *= s;
        out.cos.iter_mut().for_each(|c| *c *= s);
        out.sin.iter_mut().for_each(|c| *c *= s);
        out
    }

    fn add(&mut self, other: &Self) {
        self.secular += other.secular;
        self.constant += other.constant;
        for (a, b) in self.cos.iter_mut().zip(&other.cos) {
            *a += b;
        }
        for (a, b) in self.sin.iter_mut().zip(&other.sin) {
            *a += b;
        }
    }

    fn mul_weight(&self, weight: PhiWeight) -> Self {
        match weight {
            PhiWeight::One => self.clone(),
            // cos²φ = 1/2 + cos(2φ)/2
            PhiWeight::CosSquared => {
                let mut out = self.scaled(0.5);
                out.add(&self.mul_cos(2).scaled(0.5));
                out
            }
            // sin²φ = 1/2 - cos(2φ)/2
            PhiWeight::SinSquared => {
                let mut out = self.scaled(0.5);
                out.add(&self.mul_cos(2).scaled(-0.5));
                out
            }
            PhiWeight::CosTwoPhi => self.mul_cos(2),
            PhiWeight::SinTwoPhi => self.mul_sin(2),
        }
    }

    /// Exact antiderivative; the integration constant is left at zero and
    /// handled by the caller.
    fn antiderivative(&self) -> Self {
        assert_eq!(self.secular, 0.0, "cannot integrate a secular term again");
        let mut out = Self::zero(self.cos.len());
        out.secular = self.constant;
        for (k0, &a) in self.cos.iter().enumerate() {
            let k = (k0 + 1) as f64;
            out.sin[k0] = a / k;
        }
        for (k0, &b) in self.sin.iter().enumerate() {
            let k = (k0 + 1) as f64;
            out.cos[k0] = -b / k;
        }
        out
    }

    fn eval(&self, phi: f64) -> f64 {
        let mut v = self.constant + self.secular * phi;
        for (k0, &a) in self.cos.iter().enumerate() {
            v += a * ((k0 + 1) as f64 * phi).cos();
        }
        for (k0, &b) in self.sin.iter().enumerate() {
            v += b * ((k0 + 1) as f64 * phi).sin();
        }
        v
    }
}

/// Integration operational matrix: ∫_{φ0}^{φ} weight(ψ) Φ(ψ) dψ = E Φ(φ).
///
/// The displayed structures need the shifted frequencies m ± 2, so m_max
/// must be at least 3.
pub fn phi_integration_matrix(m_max: usize, phi0: f64, weight: PhiWeight) -> OperationalMatrix {
    assert!(m_max >= 3, "phi operational matrices need m_max >= 3");
    assert!(
        !matches!(weight, PhiWeight::SinTwoPhi),
        "sin 2φ only appears as a multiplication weight"
    );
    let m_rows = 2 * m_max + 1;
    let k_max = m_max + 2;
    let mut data = DMatrix::zeros(m_rows, m_rows);
    for row in 0..m_rows {
        let basis = TrigPoly::basis(TrigIndex::from_position(row), k_max);
        let antider = basis.mul_weight(weight).antiderivative();
        // Oscillatory part, truncated to the represented frequencies.
        for k in 1..=m_max {
            data[(row, 2 * k - 1)] += antider.cos[k - 1];
            data[(row, 2 * k)] += antider.sin[k - 1];
        }
        // Secular φ replaced by π - Σ (2/k) sin kφ.
        data[(row, 0)] += antider.secular * PI;
        for k in 1..=m_max {
            data[(row, 2 * k)] -= antider.secular * 2.0 / k as f64;
        }
        // Constant of integration, kept in full.
        data[(row, 0)] -= antider.eval(phi0);
    }
    OperationalMatrix {
        data,
        kind: OpKind::PhiIntegration(weight),
        origin: phi0,
        order: m_max,
        projection: Projection::Truncate,
    }
}

/// Double integration: E_{φφ0}² with the (0,0) entry replaced by the exact
/// constant of ∫∫ 1, which the truncated square only approaches as
/// π² - 2 Σ_{k<=m} 1/k². For φ0 = 0 the exact value is 2π²/3.
pub fn phi_double_integration_matrix(m_max: usize, phi0: f64) -> OperationalMatrix {
    let single = phi_integration_matrix(m_max, phi0, PhiWeight::One);
    let mut data = &single.data * &single.data;
    data[(0, 0)] = 2.0 * PI * PI / 3.0 - PI * phi0 + 0.5 * phi0 * phi0;
    OperationalMatrix {
        data,
        kind: OpKind::PhiDoubleIntegration,
        origin: phi0,
        order: m_max,
        projection: Projection::Truncate,
    }
}

/// Multiplication matrix: sin(2φ) Φ(φ) = M Φ(φ), truncated to frequencies
/// <= m_max.
pub fn phi_multiplication_matrix(m_max: usize) -> OperationalMatrix {
    assert!(m_max >= 3, "phi operational matrices need m_max >= 3");
    let m_rows = 2 * m_max + 1;
    let k_max = m_max + 2;
    let mut data = DMatrix::zeros(m_rows, m_rows);
    for row in 0..m_rows {
        let product = TrigPoly::basis(TrigIndex::from_position(row), k_max).mul_sin(2);
        data[(row, 0)] = product.constant;
        for k in 1..=m_max {
            data[(row, 2 * k - 1)] = product.cos[k - 1];
            data[(row, 2 * k)] = product.sin[k - 1];
        }
    }
    OperationalMatrix {
        data,
        kind: OpKind::PhiMultiplication(PhiWeight::SinTwoPhi),
        origin: 0.0,
        order: m_max,
        projection: Projection::Truncate,
    }
}
