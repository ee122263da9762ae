//! Exact rational polynomial arithmetic used while constructing the radial
//! operational matrices. All radial Zernike polynomials have integer
//! monomial coefficients, and the integration recurrence only ever divides
//! by small integers, so building the matrices over `BigRational` and
//! converting to `f64` at the very end keeps every displayed entry exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// A polynomial as a dense vector of monomial coefficients, `coeffs[k]`
/// multiplying `r^k`.
pub type RatPoly = Vec<Rat>;

fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Exact monomial coefficients of the radial Zernike polynomial R_n^m.
///
/// The caller must pass a valid index pair (0 <= m <= n, n - m even); this
/// is enforced by the public wrapper in [`crate::basis`].
pub fn radial_poly(n: usize, m: usize) -> RatPoly {
    debug_assert!(m <= n && (n - m) % 2 == 0);
    let half_diff = (n - m) / 2;
    let half_sum = (n + m) / 2;
    let mut coeffs = vec![Rat::zero(); n + 1];
    for l in 0..=half_diff {
        let num = factorial(n - l);
        let den = factorial(l) * factorial(half_diff - l) * factorial(half_sum - l);
        let mut c = Rat::new(num, den);
        if l % 2 == 1 {
            c = -c;
        }
        coeffs[n - 2 * l] = c;
    }
    coeffs
}

/// Antiderivative with zero constant term: r^k -> r^(k+1)/(k+1).
pub fn integrate(poly: &[Rat]) -> RatPoly {
    let mut out = vec![Rat::zero(); poly.len() + 1];
    for (k, c) in poly.iter().enumerate() {
        if !c.is_zero() {
            out[k + 1] = c / Rat::from_integer(BigInt::from(k + 1));
        }
    }
    out
}

/// Multiply by r^j (shift all coefficients up by j).
pub fn shift(poly: &[Rat], j: usize) -> RatPoly {
    let mut out = vec![Rat::zero(); poly.len() + j];
    for (k, c) in poly.iter().enumerate() {
        out[k + j] = c.clone();
    }
    out
}

/// Degree-`n_max` Lagrange interpolant of r^p at the equispaced nodes
/// 0, 1/n_max, ..., 1, returned as exact monomial coefficients.
///
/// For p <= n_max this reproduces r^p itself.
pub fn lagrange_interpolant(p: usize, n_max: usize) -> RatPoly {
    assert!(n_max >= 1);
    let nodes: Vec<Rat> = (0..=n_max)
        .map(|i| Rat::new(BigInt::from(i), BigInt::from(n_max)))
        .collect();
    let mut result = vec![Rat::zero(); n_max + 1];
    for (i, xi) in nodes.iter().enumerate() {
        let yi = pow(xi, p);
        if yi.is_zero() {
            continue;
        }
        // Expand prod_{j != i} (x - x_j) and its scalar denominator.
        let mut num: RatPoly = vec![Rat::one()];
        let mut den = Rat::one();
        for (j, xj) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            num = mul_linear(&num, xj);
            den *= xi - xj;
        }
        let scale = yi / den;
        for (k, c) in num.iter().enumerate() {
            result[k] += c * &scale;
        }
    }
    result
}

/// Multiply a polynomial by the linear factor (x - a).
fn mul_linear(poly: &[Rat], a: &Rat) -> RatPoly {
    let mut out = vec![Rat::zero(); poly.len() + 1];
    for (k, c) in poly.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= c * a;
    }
    out
}

fn pow(x: &Rat, p: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..p {
        acc *= x;
    }
    acc
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

pub fn poly_to_f64(poly: &[Rat]) -> Vec<f64> {
    poly.iter().map(to_f64).collect()
}

/// Evaluate a rational polynomial at an f64 point (Horner).
pub fn eval_f64(poly: &[Rat], x: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
}

/// True if every coefficient is exactly zero.
pub fn is_zero_poly(poly: &[Rat]) -> bool {
    poly.iter().all(|c| c.is_zero())
}

/// Largest absolute coefficient, as f64 (used by tests to bound drift).
pub fn max_abs_coeff(poly: &[Rat]) -> f64 {
    poly.iter().map(|c| to_f64(&c.abs())).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn radial_polys_match_the_low_order_table() {
        // R_0^0 = 1, R_1^1 = r, R_2^0 = 2r^2 - 1, R_2^2 = r^2,
        // R_3^1 = 3r^3 - 2r, R_3^3 = r^3.
        assert_eq!(radial_poly(0, 0), vec![rat(1, 1)]);
        assert_eq!(radial_poly(1, 1), vec![rat(0, 1), rat(1, 1)]);
        assert_eq!(radial_poly(2, 0), vec![rat(-1, 1), rat(0, 1), rat(2, 1)]);
        assert_eq!(radial_poly(2, 2), vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(
            radial_poly(3, 1),
            vec![rat(0, 1), rat(-2, 1), rat(0, 1), rat(3, 1)]
        );
        assert_eq!(
            radial_poly(4, 0),
            vec![rat(1, 1), rat(0, 1), rat(-6, 1), rat(0, 1), rat(6, 1)]
        );
    }

    #[test]
    fn lagrange_interpolant_matches_displayed_projections() {
        // r^4 ~ 2r^3 - 11/9 r^2 + 2/9 r and r^5 ~ (25r^3 - 20r^2 + 4r)/9
        // at the four nodes 0, 1/3, 2/3, 1.
        let p4 = lagrange_interpolant(4, 3);
        assert_eq!(p4, vec![rat(0, 1), rat(2, 9), rat(-11, 9), rat(2, 1)]);
        let p5 = lagrange_interpolant(5, 3);
        assert_eq!(p5, vec![rat(0, 1), rat(4, 9), rat(-20, 9), rat(25, 9)]);
    }

    #[test]
    fn lagrange_interpolant_reproduces_low_degrees() {
        for n_max in 1..=6 {
            for p in 0..=n_max {
                let interp = lagrange_interpolant(p, n_max);
                for (k, c) in interp.iter().enumerate() {
                    let expected = if k == p { Rat::one() } else { Rat::zero() };
                    assert_eq!(*c, expected, "p={p} n_max={n_max} k={k}");
                }
            }
        }
    }

    #[test]
    fn integrate_and_shift_are_exact() {
        let p = radial_poly(2, 0); // 2r^2 - 1
        let q = integrate(&p); // 2r^3/3 - r
        assert_eq!(q[1], rat(-1, 1));
        assert_eq!(q[3], rat(2, 3));
        let s = shift(&p, 2); // 2r^4 - r^2
        assert_eq!(s[2], rat(-1, 1));
        assert_eq!(s[4], rat(2, 1));
    }
}
