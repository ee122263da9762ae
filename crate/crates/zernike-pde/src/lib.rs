//! Spectral solver for first- and second-order linear PDEs on the unit disk.
//!
//! The solution is expanded in a tensor basis of trigonometric functions and
//! radial Zernike polynomials. Integrating the PDE against the basis turns
//! every integral operator into a fixed matrix (an integration operational
//! matrix), which reduces the problem to a sparse linear system
//! `A vec(U) = b`. The system is solved either by minimum-norm least squares
//! (SVD pseudo-inverse) or by equality-constrained l1 minimization (basis
//! pursuit), the latter typically recovering sparser and more accurate
//! coefficient matrices. Discontinuous Dirichlet/Neumann boundary data is
//! supported because boundary functions enter only through their Fourier
//! coefficients, never through point values at collocation nodes.
//!
//! Modules:
//! - [`basis`]: the Zernike basis itself (enumeration, evaluation, expansion)
//! - [`opmatrix`]: the integration and multiplication operational matrices
//! - [`assembly`]: Kronecker-product assembly of the linear systems
//! - [`solver`]: pseudo-inverse and basis-pursuit solvers
//! - [`analysis`]: error measurement, sparsity reports, coefficient decay
//! - [`presets`]: the two worked examples used throughout the test suite
//! - [`cli`]: the `zernike-pde` command-line driver

pub mod analysis;
pub mod assembly;
pub mod basis;
pub mod cli;
pub mod opmatrix;
pub mod presets;
pub mod quad;
pub mod ratpoly;
pub mod solver;
pub mod sparse;

pub use basis::{CoefficientMatrix, RadialBasisLayout, RadialPolyCoeffs, TrigIndex, ZernikeIndex};
pub use opmatrix::{OperationalMatrix, OperatorSet, Projection};
pub use solver::{Method, SolveOptions, SolveReport};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid Zernike index (n={n}, m={m}): need 0 <= m <= n with n - m even")]
    InvalidIndex { n: usize, m: usize },
    #[error("radial coordinate r={r} lies outside [0, 1]")]
    RadiusOutOfRange { r: f64 },
    #[error("integration origin r0={r0} lies outside [0, 1]")]
    OriginOutOfRange { r0: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite sample value {value} at node (r={r}, phi={phi})")]
    NonFiniteSample { value: f64, r: f64, phi: f64 },
    #[error("SVD failed to converge on a {rows}x{cols} matrix")]
    SvdFailure { rows: usize, cols: usize },
    #[error(
        "right-hand side is not in the range of A: ||A x_ls - b|| = {residual_norm:.3e} \
         exceeds tolerance {tol:.3e} (||b|| = {b_norm:.3e})"
    )]
    Infeasible {
        residual_norm: f64,
        b_norm: f64,
        tol: f64,
        /// Certificate vector z = b - A x_ls; it satisfies A^T z ~ 0 while
        /// z^T b stays bounded away from zero.
        certificate: Vec<f64>,
    },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
