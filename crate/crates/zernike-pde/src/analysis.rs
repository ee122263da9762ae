//! Error measurement, sparsity reporting, and empirical checks of the
//! coefficient-decay behavior of the expansion.

use crate::assembly::{self, AssembledSystem};
use crate::basis::{
    expand_function, reconstruct, trig_vector, CoefficientMatrix, QuadratureSpec, TrigIndex,
    ZernikeIndex,
};
use crate::opmatrix::Projection;
use crate::presets;
use crate::solver::{self, Method, SolveOptions};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

/// Polar evaluation grid: radial nodes include both endpoints, angular
/// nodes cover [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_r: usize,
    pub n_phi: usize,
}

impl GridSpec {
    pub fn new(n_r: usize, n_phi: usize) -> Result<Self> {
        if n_r < 2 || n_phi < 2 {
            return Err(Error::InvalidArgument(
                "grid needs at least 2 nodes per direction".into(),
            ));
        }
        Ok(Self { n_r, n_phi })
    }

    pub fn radial_nodes(&self) -> Vec<f64> {
        (0..self.n_r).map(|i| i as f64 / (self.n_r - 1) as f64).collect()
    }

    pub fn angular_nodes(&self) -> Vec<f64> {
        (0..self.n_phi).map(|j| 2.0 * PI * j as f64 / self.n_phi as f64).collect()
    }
}

fn mse_impl<F>(exact: F, u: &CoefficientMatrix, grid: GridSpec, skip_rim: bool) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let radial = grid.radial_nodes();
    let angular = grid.angular_nodes();
    let layout = u.layout();
    let mut sum = 0.0;
    let mut count = 0usize;
    // Row-major accumulation in a fixed order.
    for &r in &radial {
        if skip_rim && r >= 1.0 {
            continue;
        }
        let radial_vec = layout.eval_vector(r)?;
        for &phi in &angular {
            let e = exact(r, phi);
            if !e.is_finite() {
                return Err(Error::NonFiniteSample { value: e, r, phi });
            }
            let trig = trig_vector(phi, u.m_max());
            let computed = (trig.transpose() * u.matrix() * &radial_vec)[(0, 0)];
            let diff = e - computed;
            sum += diff * diff;
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Mean square error between an exact surface and the reconstruction of U
/// over the grid.
pub fn mse<F>(exact: F, u: &CoefficientMatrix, grid: GridSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    mse_impl(exact, u, grid, false)
}

/// Same, but the r = 1 ring is excluded. Used for problems whose boundary
/// data jumps on the rim, where the closed-form reference has
/// discontinuity points.
pub fn mse_interior<F>(exact: F, u: &CoefficientMatrix, grid: GridSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    mse_impl(exact, u, grid, true)
}

/// Sparsity accounting for an assembled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SparsityReport {
    pub order: usize,
    pub nonzeros: usize,
    pub density: f64,
}

/// Counts entries of A with |a| > threshold.
pub fn sparsity_report(system: &AssembledSystem, threshold: f64) -> SparsityReport {
    let order = system.order();
    let nonzeros = system.a.count_above(threshold);
    SparsityReport {
        order,
        nonzeros,
        density: nonzeros as f64 / (order as f64 * order as f64),
    }
}

/// Observed decay of the expansion coefficients with azimuthal order.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub orders: Vec<usize>,
    /// max over n of |A_nm|, |B_nm| at each order m.
    pub magnitudes: Vec<f64>,
    /// Log-log slope fitted over the tail of the ladder; `None` when every
    /// magnitude sits at machine precision (finite expansions).
    pub slope: Option<f64>,
}

/// Expands `f` at each azimuthal order in the ladder and fits the decay
/// exponent of the largest coefficient magnitude. `n_rule` chooses the
/// radial truncation for a given order (n and m are pushed up together).
pub fn decay_fit<F>(f: F, m_ladder: &[usize], n_rule: impl Fn(usize) -> usize) -> Result<DecayFit>
where
    F: Fn(f64, f64) -> f64,
{
    let mut orders = Vec::with_capacity(m_ladder.len());
    let mut magnitudes = Vec::with_capacity(m_ladder.len());
    for &m in m_ladder {
        let n_max = n_rule(m);
        if n_max < m {
            return Err(Error::InvalidArgument(format!(
                "n_rule({m}) = {n_max} cannot represent azimuthal order {m}"
            )));
        }
        // A dense angular rule keeps the coefficients of discontinuous test
        // functions accurate well below the magnitudes being measured.
        let spec = QuadratureSpec {
            n_radial: 2 * n_max + 8,
            n_angular: (4 * m + 8).max(2048),
        };
        let u = expand_function(&f, m, n_max, spec)?;
        let mut magnitude = 0.0f64;
        let mut n = m;
        while n <= n_max {
            let idx = ZernikeIndex::new(n, m).expect("ladder index");
            if m == 0 {
                magnitude = magnitude.max(u.get(TrigIndex::Constant, idx).unwrap().abs());
            } else {
                magnitude = magnitude.max(u.get(TrigIndex::Cosine(m), idx).unwrap().abs());
                magnitude = magnitude.max(u.get(TrigIndex::Sine(m), idx).unwrap().abs());
            }
            n += 2;
        }
        orders.push(m);
        magnitudes.push(magnitude);
    }

    let slope = if magnitudes.iter().all(|&v| v < 1e-15) {
        None
    } else {
        // Least squares on the top half of the ladder (the tail), skipping
        // the pre-asymptotic head.
        let tail_start = orders.len() / 2;
        let pts: Vec<(f64, f64)> = orders[tail_start..]
            .iter()
            .zip(&magnitudes[tail_start..])
            .filter(|&(_, &mag)| mag > 0.0)
            .map(|(&m, &mag)| ((m as f64).ln(), mag.ln()))
            .collect();
        if pts.len() < 2 {
            None
        } else {
            let n = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum();
            let sy: f64 = pts.iter().map(|p| p.1).sum();
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
            Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
        }
    };

    Ok(DecayFit { orders, magnitudes, slope })
}

/// Which worked example an error table runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    Fopde,
    Sopde,
}

/// One cell of an error table.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorTableCell {
    pub m_size: usize,
    pub n_size: usize,
    pub method: Method,
    /// MSE against the exact solution, or the error text when the solve
    /// failed (failures do not abort the rest of the table).
    pub mse: Option<f64>,
    pub error: Option<String>,
    pub wall_time_ms: f64,
}

/// Full error table: solves the chosen example across the ladder with the
/// requested methods and measures each MSE on a fixed 50×50 grid (the rim
/// is excluded for the discontinuous second-order example). Cells are
/// independent and run in parallel; the table order is fixed.
pub fn error_table(
    example: ExampleKind,
    ladder: &[(usize, usize)],
    methods: &[Method],
) -> Result<Vec<ErrorTableCell>> {
    let grid = GridSpec::new(50, 50)?;
    let jobs: Vec<(usize, usize, Method)> = ladder
        .iter()
        .flat_map(|&(m_max, n_max)| methods.iter().map(move |&m| (m_max, n_max, m)))
        .collect();
    let cells: Vec<ErrorTableCell> = jobs
        .into_par_iter()
        .map(|(m_max, n_max, method)| run_cell(example, m_max, n_max, method, grid))
        .collect();
    Ok(cells)
}

fn run_cell(
    example: ExampleKind,
    m_max: usize,
    n_max: usize,
    method: Method,
    grid: GridSpec,
) -> ErrorTableCell {
    let start = Instant::now();
    let opts = SolveOptions { method, ..SolveOptions::default() };
    let outcome = (|| -> Result<f64> {
        match example {
            ExampleKind::Fopde => {
                let spec = presets::fopde_example(m_max, n_max, Projection::LagrangeProject);
                let system = assembly::assemble_fopde(&spec)?;
                let report = solver::solve(&system, &opts)?;
                mse(presets::fopde_exact, &report.u, grid)
            }
            ExampleKind::Sopde => {
                let spec = presets::laplace_example(m_max, n_max, Projection::LagrangeProject);
                let system = assembly::assemble_sopde(&spec)?;
                let report = solver::solve(&system, &opts)?;
                mse_interior(presets::laplace_exact, &report.u, grid)
            }
        }
    })();
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(value) => ErrorTableCell {
            m_size: 2 * m_max + 1,
            n_size: crate::basis::RadialBasisLayout::new(n_max).len(),
            method,
            mse: Some(value),
            error: None,
            wall_time_ms,
        },
        Err(err) => ErrorTableCell {
            m_size: 2 * m_max + 1,
            n_size: crate::basis::RadialBasisLayout::new(n_max).len(),
            method,
            mse: None,
            error: Some(err.to_string()),
            wall_time_ms,
        },
    }
}

/// Writes a solution grid as CSV: r, phi, u_computed, u_exact, abs_err.
/// When no exact reference is available the last two columns are NaN.
pub fn write_solution_grid<W: std::io::Write>(
    w: &mut W,
    u: &CoefficientMatrix,
    exact: Option<&dyn Fn(f64, f64) -> f64>,
    grid: GridSpec,
    digits: usize,
) -> Result<()> {
    writeln!(w, "r,phi,u_computed,u_exact,abs_err")?;
    let prec = digits.saturating_sub(1);
    for r in grid.radial_nodes() {
        for phi in grid.angular_nodes() {
            let computed = reconstruct(u, r, phi)?;
            let (e, err) = match exact {
                Some(f) => {
                    let e = f(r, phi);
                    (e, (e - computed).abs())
                }
                None => (f64::NAN, f64::NAN),
            };
            writeln!(
                w,
                "{r:.*e},{phi:.*e},{computed:.*e},{e:.*e},{err:.*e}",
                prec, prec, prec, prec, prec
            )?;
        }
    }
    Ok(())
}
