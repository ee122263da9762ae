//! The `zernike-pde` command-line driver: configure a problem from JSON,
//! run solves, and emit grids, tables, and operational matrices as CSV.
//!
//! Exit codes: 0 on success, 2 on schema/usage violations, 3 on solver
//! failure.

use crate::analysis::{self, ExampleKind, GridSpec};
use crate::assembly::{self, AssembledSystem, FopdeSpec, SopdeSpec};
use crate::basis::{CoefficientMatrix, RadialBasisLayout};
use crate::opmatrix::{self, OperationalMatrix, PhiWeight, Projection};
use crate::presets;
use crate::solver::{self, Method, SolveOptions};
use clap::{Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Significant digits used for CSV output; override with the
/// ZERNIKE_PDE_CSV_DIGITS environment variable.
fn csv_digits() -> usize {
    std::env::var("ZERNIKE_PDE_CSV_DIGITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&d: &usize| (1..=17).contains(&d))
        .unwrap_or(17)
}

#[derive(Parser, Debug)]
#[command(
    name = "zernike-pde",
    about = "Spectral PDE solver on the unit disk (Zernike basis + integration operational matrices)",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a problem described by a JSON file.
    Solve {
        /// Path to the problem JSON.
        problem_file: PathBuf,
        /// Solver method; overrides the one in the problem file.
        #[arg(long, value_parser = parse_method)]
        method: Option<Method>,
        /// Output directory (created if missing).
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reproduce the error and sparsity tables across the order ladder.
    Tables {
        /// Which worked example to run: fopde | sopde.
        #[arg(long)]
        example: String,
        /// Ladder selection; only "default" is defined.
        #[arg(long, default_value = "default")]
        ladder: String,
        /// Output directory (created if missing).
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Dump one operational matrix as CSV.
    Matrices {
        /// Matrix kind, e.g. E_phi, E_phi_cos2, E_Dphi, M_phi_sin2phi,
        /// E_rr0, E_rr0_r, E_rr0_r2, E_rr0_r3, E_Drr0, E_Drr0_r2,
        /// M_R_r, M_R_r2, M_R_r3, M_R_r4.
        #[arg(long)]
        kind: String,
        /// Truncation order (m_max for phi kinds, n_max for radial kinds).
        #[arg(long)]
        order: usize,
        /// Radial integration origin.
        #[arg(long, default_value_t = 0.0)]
        r0: f64,
        /// Angular integration origin.
        #[arg(long, default_value_t = 0.0)]
        phi0: f64,
        /// Super-degree handling: project | truncate.
        #[arg(long, default_value = "project", value_parser = parse_projection)]
        projection: Projection,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "l1" => Ok(Method::L1),
        "l2" => Ok(Method::L2),
        other => Err(format!("unknown method '{other}' (expected l1 or l2)")),
    }
}

fn parse_projection(s: &str) -> Result<Projection, String> {
    match s {
        "project" => Ok(Projection::LagrangeProject),
        "truncate" => Ok(Projection::Truncate),
        other => Err(format!("unknown projection '{other}' (expected project or truncate)")),
    }
}

// ---------------------------------------------------------------------
// Problem file schema
// ---------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
enum ProblemKind {
    Fopde,
    Sopde,
    Laplace,
}

#[derive(Debug, Deserialize, Default, Clone, Copy)]
#[serde(deny_unknown_fields, default)]
struct Params {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct Orders {
    m_max: usize,
    n_max: usize,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields, default)]
struct Origins {
    r0: f64,
    phi0: f64,
}

impl Default for Origins {
    fn default() -> Self {
        Self { r0: 0.0, phi0: 0.0 }
    }
}

/// Forcing coefficients: a preset name, "zero", or an explicit M×N matrix.
#[derive(Debug, Deserialize, Clone)]
#[serde(untagged)]
enum ForcingSpec {
    Named(String),
    Rows(Vec<Vec<f64>>),
}

impl Default for ForcingSpec {
    fn default() -> Self {
        ForcingSpec::Named("zero".into())
    }
}

/// Boundary coefficient vectors: a preset name or explicit vectors
/// (h and g for first-order problems; g, h, p, q for second-order).
#[derive(Debug, Deserialize, Clone)]
#[serde(untagged)]
enum BoundarySpec {
    Named(String),
    Explicit {
        #[serde(default)]
        g: Option<Vec<f64>>,
        #[serde(default)]
        h: Option<Vec<f64>>,
        #[serde(default)]
        p: Option<Vec<f64>>,
        #[serde(default)]
        q: Option<Vec<f64>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    kind: ProblemKind,
    #[serde(default)]
    params: Params,
    orders: Orders,
    #[serde(default)]
    origins: Origins,
    #[serde(default)]
    forcing: ForcingSpec,
    boundary: BoundarySpec,
    #[serde(default)]
    solver: SolveOptions,
    #[serde(default = "default_projection")]
    projection: Projection,
    #[serde(default = "default_grid")]
    grid: GridSpec,
}

fn default_projection() -> Projection {
    Projection::LagrangeProject
}

fn default_grid() -> GridSpec {
    GridSpec { n_r: 50, n_phi: 50 }
}

struct PreparedProblem {
    system: AssembledSystem,
    opts: SolveOptions,
    exact: Option<fn(f64, f64) -> f64>,
    /// Exclude the r = 1 ring from the reported MSE (set for boundary data
    /// with jumps on the rim).
    exclude_rim: bool,
}

fn schema_err(msg: String) -> String {
    format!("problem file error: {msg}")
}

fn vector_from(values: Option<Vec<f64>>, want: usize, name: &str) -> Result<DVector<f64>, String> {
    let values = values.ok_or_else(|| schema_err(format!("boundary vector '{name}' missing")))?;
    if values.len() != want {
        return Err(schema_err(format!(
            "boundary vector '{name}' has length {}, expected {want}",
            values.len()
        )));
    }
    Ok(DVector::from_vec(values))
}

fn forcing_from(
    spec: &ForcingSpec,
    m_max: usize,
    n_max: usize,
) -> Result<CoefficientMatrix, String> {
    match spec {
        ForcingSpec::Named(name) => match name.as_str() {
            "zero" => Ok(CoefficientMatrix::zeros(m_max, n_max)),
            "preset:example21" => Ok(presets::fopde_example(m_max, n_max, Projection::Truncate)
                .forcing),
            other => Err(schema_err(format!("unknown forcing '{other}'"))),
        },
        ForcingSpec::Rows(rows) => {
            let m = 2 * m_max + 1;
            let n = RadialBasisLayout::new(n_max).len();
            if rows.len() != m || rows.iter().any(|r| r.len() != n) {
                return Err(schema_err(format!("forcing matrix must be {m}x{n}")));
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            let data = DMatrix::from_row_slice(m, n, &flat);
            CoefficientMatrix::from_matrix(data, m_max, n_max).map_err(|e| schema_err(e.to_string()))
        }
    }
}

fn prepare(problem: ProblemFile) -> Result<PreparedProblem, String> {
    let Orders { m_max, n_max } = problem.orders;
    if m_max < 3 {
        return Err(schema_err("m_max must be at least 3".into()));
    }
    if n_max < 1 {
        return Err(schema_err("n_max must be at least 1".into()));
    }
    let m = 2 * m_max + 1;
    let n = RadialBasisLayout::new(n_max).len();
    let opts = problem.solver;
    opts.validate().map_err(|e| schema_err(e.to_string()))?;
    let grid = problem.grid;
    GridSpec::new(grid.n_r, grid.n_phi).map_err(|e| schema_err(e.to_string()))?;

    match problem.kind {
        ProblemKind::Fopde => {
            let (h_vec, g_vec, forcing, exact) = match &problem.boundary {
                BoundarySpec::Named(name) if name == "preset:example21" => {
                    let preset = presets::fopde_example(m_max, n_max, problem.projection);
                    let forcing = match &problem.forcing {
                        ForcingSpec::Named(n) if n == "zero" => preset.forcing.clone(),
                        other => forcing_from(other, m_max, n_max)?,
                    };
                    (
                        preset.h_vec,
                        preset.g_vec,
                        forcing,
                        Some(presets::fopde_exact as fn(f64, f64) -> f64),
                    )
                }
                BoundarySpec::Named(other) => {
                    return Err(schema_err(format!("unknown boundary preset '{other}' for fopde")))
                }
                BoundarySpec::Explicit { g, h, p, q } => {
                    if p.is_some() || q.is_some() {
                        return Err(schema_err(
                            "fopde boundaries take only 'h' (length M) and 'g' (length N)".into(),
                        ));
                    }
                    (
                        vector_from(h.clone(), m, "h")?,
                        vector_from(g.clone(), n, "g")?,
                        forcing_from(&problem.forcing, m_max, n_max)?,
                        None,
                    )
                }
            };
            let spec = FopdeSpec {
                alpha: problem.params.alpha,
                beta: problem.params.beta,
                gamma: problem.params.gamma,
                forcing,
                h_vec,
                g_vec,
                r0: problem.origins.r0,
                phi0: problem.origins.phi0,
                m_max,
                n_max,
                projection: problem.projection,
            };
            let system = assembly::assemble_fopde(&spec).map_err(|e| schema_err(e.to_string()))?;
            Ok(PreparedProblem { system, opts, exact, exclude_rim: false })
        }
        ProblemKind::Sopde | ProblemKind::Laplace => {
            let is_laplace = matches!(problem.kind, ProblemKind::Laplace);
            let (g_vec, h_vec, p_vec, q_vec, exact) = match &problem.boundary {
                BoundarySpec::Named(name) if name == "preset:example31" => {
                    let preset = presets::laplace_example(m_max, n_max, problem.projection);
                    (
                        preset.g_vec,
                        preset.h_vec,
                        preset.p_vec,
                        preset.q_vec,
                        Some(presets::laplace_exact as fn(f64, f64) -> f64),
                    )
                }
                BoundarySpec::Named(other) => {
                    return Err(schema_err(format!("unknown boundary preset '{other}'")))
                }
                BoundarySpec::Explicit { g, h, p, q } => (
                    vector_from(g.clone(), m, "g")?,
                    vector_from(h.clone(), m, "h")?,
                    vector_from(p.clone(), n, "p")?,
                    vector_from(q.clone(), n, "q")?,
                    None,
                ),
            };
            let params = if is_laplace { Params::default() } else { problem.params };
            let forcing = if is_laplace {
                CoefficientMatrix::zeros(m_max, n_max)
            } else {
                forcing_from(&problem.forcing, m_max, n_max)?
            };
            let spec = SopdeSpec {
                alpha: params.alpha,
                beta: params.beta,
                gamma: params.gamma,
                forcing,
                g_vec,
                h_vec,
                p_vec,
                q_vec,
                r0: if matches!(problem.boundary, BoundarySpec::Named(_)) {
                    1.0
                } else {
                    problem.origins.r0
                },
                phi0: problem.origins.phi0,
                m_max,
                n_max,
                projection: problem.projection,
            };
            let exclude_rim = exact.is_some();
            let system = assembly::assemble_sopde(&spec).map_err(|e| schema_err(e.to_string()))?;
            Ok(PreparedProblem { system, opts, exact, exclude_rim })
        }
    }
}

// ---------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------

fn write_coefficients_csv(path: &Path, u: &CoefficientMatrix, digits: usize) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    let prec = digits.saturating_sub(1);
    for i in 0..u.num_rows() {
        let row: Vec<String> =
            (0..u.num_cols()).map(|j| format!("{:.*e}", prec, u.matrix()[(i, j)])).collect();
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(())
}

fn cmd_solve(problem_file: &Path, method: Option<Method>, out: &Path) -> i32 {
    let text = match fs::read_to_string(problem_file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", problem_file.display());
            return EXIT_SCHEMA;
        }
    };
    let mut problem: ProblemFile = match serde_json::from_str(&text) {
        Ok(p) => p,
        Err(e) => {
            // serde_json reports line/column for schema violations.
            eprintln!("{}: {e}", problem_file.display());
            return EXIT_SCHEMA;
        }
    };
    if let Some(m) = method {
        problem.solver.method = m;
    }
    let grid = problem.grid;
    let prepared = match prepare(problem) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_SCHEMA;
        }
    };
    if let Err(e) = fs::create_dir_all(out) {
        eprintln!("cannot create {}: {e}", out.display());
        return EXIT_SCHEMA;
    }
    let digits = csv_digits();
    match solver::solve(&prepared.system, &prepared.opts) {
        Ok(report) => {
            let grid_path = out.join("solution_grid.csv");
            let coeff_path = out.join("coefficients.csv");
            let report_path = out.join("report.json");
            let mut mse_value = None;
            if let Some(exact) = prepared.exact {
                mse_value = if prepared.exclude_rim {
                    analysis::mse_interior(exact, &report.u, grid).ok()
                } else {
                    analysis::mse(exact, &report.u, grid).ok()
                };
            }
            let io_result = (|| -> crate::Result<()> {
                let mut f = fs::File::create(&grid_path)?;
                let exact_dyn: Option<&dyn Fn(f64, f64) -> f64> = prepared
                    .exact
                    .as_ref()
                    .map(|f| f as &dyn Fn(f64, f64) -> f64);
                analysis::write_solution_grid(&mut f, &report.u, exact_dyn, grid, digits)?;
                write_coefficients_csv(&coeff_path, &report.u, digits)?;
                let mut f = fs::File::create(&report_path)?;
                let mut value = serde_json::to_value(&report).expect("report serializes");
                if let Some(mse) = mse_value {
                    value["mse"] = serde_json::json!(mse);
                }
                writeln!(f, "{}", serde_json::to_string_pretty(&value).expect("json"))?;
                Ok(())
            })();
            match io_result {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("failed to write outputs: {e}");
                    EXIT_SCHEMA
                }
            }
        }
        Err(e) => {
            let report_path = out.join("report.json");
            let payload = serde_json::json!({ "error": e.to_string() });
            if let Ok(mut f) = fs::File::create(&report_path) {
                let _ = writeln!(f, "{}", serde_json::to_string_pretty(&payload).expect("json"));
            }
            eprintln!("solver failed: {e}");
            EXIT_SOLVER
        }
    }
}

fn cmd_tables(example: &str, ladder: &str, out: &Path) -> i32 {
    let kind = match example {
        "fopde" => ExampleKind::Fopde,
        "sopde" => ExampleKind::Sopde,
        other => {
            eprintln!("unknown example '{other}' (expected fopde or sopde)");
            return EXIT_SCHEMA;
        }
    };
    if ladder != "default" {
        eprintln!("unknown ladder '{ladder}' (only 'default' is defined)");
        return EXIT_SCHEMA;
    }
    if let Err(e) = fs::create_dir_all(out) {
        eprintln!("cannot create {}: {e}", out.display());
        return EXIT_SCHEMA;
    }
    let digits = csv_digits();
    let prec = digits.saturating_sub(1);

    let cells = match analysis::error_table(kind, &presets::ORDER_LADDER, &[Method::L1, Method::L2])
    {
        Ok(c) => c,
        Err(e) => {
            eprintln!("table run failed: {e}");
            return EXIT_SOLVER;
        }
    };

    let table_path = out.join(format!("error_table_{example}.csv"));
    let write_result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&table_path)?;
        writeln!(f, "order_M,order_N,method,mse,wall_time_ms")?;
        for cell in &cells {
            let method = match cell.method {
                Method::L1 => "l1",
                Method::L2 => "l2",
            };
            match (&cell.mse, &cell.error) {
                (Some(v), _) => writeln!(
                    f,
                    "{},{},{method},{:.*e},{:.3}",
                    cell.m_size, cell.n_size, prec, v, cell.wall_time_ms
                )?,
                (None, Some(err)) => writeln!(
                    f,
                    "{},{},{method},error:{},{:.3}",
                    cell.m_size,
                    cell.n_size,
                    err.replace(',', ";"),
                    cell.wall_time_ms
                )?,
                (None, None) => unreachable!("cell carries neither value nor error"),
            }
        }
        Ok(())
    })();
    if let Err(e) = write_result {
        eprintln!("failed to write {}: {e}", table_path.display());
        return EXIT_SCHEMA;
    }

    // Sparsity table across the same ladder.
    let sparsity_path = out.join(format!("sparsity_{example}.csv"));
    let write_result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&sparsity_path)?;
        writeln!(f, "order_M,order_N,order,nonzeros,density")?;
        for &(m_max, n_max) in presets::ORDER_LADDER.iter() {
            let system = match kind {
                ExampleKind::Fopde => assembly::assemble_fopde(&presets::fopde_example(
                    m_max,
                    n_max,
                    Projection::LagrangeProject,
                )),
                ExampleKind::Sopde => assembly::assemble_sopde(&presets::laplace_example(
                    m_max,
                    n_max,
                    Projection::LagrangeProject,
                )),
            };
            match system {
                Ok(system) => {
                    let report = analysis::sparsity_report(&system, 1e-14);
                    writeln!(
                        f,
                        "{},{},{},{},{:.6}",
                        2 * m_max + 1,
                        RadialBasisLayout::new(n_max).len(),
                        report.order,
                        report.nonzeros,
                        report.density
                    )?;
                }
                Err(e) => writeln!(
                    f,
                    "{},{},error:{},,",
                    2 * m_max + 1,
                    RadialBasisLayout::new(n_max).len(),
                    e.to_string().replace(',', ";")
                )?,
            }
        }
        Ok(())
    })();
    if let Err(e) = write_result {
        eprintln!("failed to write {}: {e}", sparsity_path.display());
        return EXIT_SCHEMA;
    }

    let succeeded = cells.iter().filter(|c| c.mse.is_some()).count();
    if succeeded * 2 >= cells.len() {
        EXIT_OK
    } else {
        eprintln!("{} of {} cells failed", cells.len() - succeeded, cells.len());
        EXIT_SOLVER
    }
}

fn build_matrix(
    kind: &str,
    order: usize,
    r0: f64,
    phi0: f64,
    projection: Projection,
) -> Option<crate::Result<OperationalMatrix>> {
    // Guard the library preconditions so bad orders surface as clean
    // usage errors instead of panics.
    if kind.starts_with("E_phi") || kind.starts_with("E_Dphi") || kind.starts_with("M_phi") {
        if order < 3 {
            return Some(Err(crate::Error::InvalidArgument(format!(
                "phi matrices need order (m_max) >= 3, got {order}"
            ))));
        }
    } else if order < 1 {
        return Some(Err(crate::Error::InvalidArgument(format!(
            "radial matrices need order (n_max) >= 1, got {order}"
        ))));
    }
    let m = match kind {
        "E_phi" => Ok(opmatrix::phi_integration_matrix(order, phi0, PhiWeight::One)),
        "E_phi_cos2" => Ok(opmatrix::phi_integration_matrix(order, phi0, PhiWeight::CosSquared)),
        "E_phi_sin2" => Ok(opmatrix::phi_integration_matrix(order, phi0, PhiWeight::SinSquared)),
        "E_phi_cos2phi" => {
            Ok(opmatrix::phi_integration_matrix(order, phi0, PhiWeight::CosTwoPhi))
        }
        "E_Dphi" => Ok(opmatrix::phi_double_integration_matrix(order, phi0)),
        "M_phi_sin2phi" => Ok(opmatrix::phi_multiplication_matrix(order)),
        "E_rr0" => opmatrix::radial_integration_matrix(order, r0, 0, projection),
        "E_rr0_r" => opmatrix::radial_integration_matrix(order, r0, 1, projection),
        "E_rr0_r2" => opmatrix::radial_integration_matrix(order, r0, 2, projection),
        "E_rr0_r3" => opmatrix::radial_integration_matrix(order, r0, 3, projection),
        "E_Drr0" => opmatrix::radial_double_integration_matrix(order, r0, 0, projection),
        "E_Drr0_r2" => opmatrix::radial_double_integration_matrix(order, r0, 2, projection),
        "M_R_r" => Ok(opmatrix::radial_multiplication_matrix(order, 1, projection)),
        "M_R_r2" => Ok(opmatrix::radial_multiplication_matrix(order, 2, projection)),
        "M_R_r3" => Ok(opmatrix::radial_multiplication_matrix(order, 3, projection)),
        "M_R_r4" => Ok(opmatrix::radial_multiplication_matrix(order, 4, projection)),
        _ => return None,
    };
    Some(m)
}

fn cmd_matrices(
    kind: &str,
    order: usize,
    r0: f64,
    phi0: f64,
    projection: Projection,
    out: Option<&Path>,
) -> i32 {
    let Some(result) = build_matrix(kind, order, r0, phi0, projection) else {
        eprintln!("unknown matrix kind '{kind}'");
        return EXIT_SCHEMA;
    };
    let matrix = match result {
        Ok(m) => m,
        Err(e) => {
            eprintln!("cannot build {kind}: {e}");
            return EXIT_SCHEMA;
        }
    };
    let digits = csv_digits();
    let write_result = match out {
        Some(path) => fs::File::create(path)
            .map_err(crate::Error::from)
            .and_then(|mut f| matrix.write_csv(&mut f, digits)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            matrix.write_csv(&mut lock, digits)
        }
    };
    match write_result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("failed to write matrix: {e}");
            EXIT_SCHEMA
        }
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // Help/version requests are successes; everything else is a
            // usage violation.
            let code = if e.use_stderr() { EXIT_SCHEMA } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve { problem_file, method, out } => cmd_solve(&problem_file, method, &out),
        Command::Tables { example, ladder, out } => cmd_tables(&example, &ladder, &out),
        Command::Matrices { kind, order, r0, phi0, projection, out } => {
            cmd_matrices(&kind, order, r0, phi0, projection, out.as_deref())
        }
    }
}
