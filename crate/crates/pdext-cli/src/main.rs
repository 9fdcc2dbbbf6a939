//! `pdext`: positive definite functions on an interval, from the command
//! line. Subcommands map one-to-one onto the library modules; every command
//! prints a JSON result to stdout and writes its artifacts under `--out`.
//!
//! Exit codes: 0 pass, 1 refutation/fail verdict, 2 usage or input error,
//! 3 numeric failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdext_core::bochner::{self, PeriodizeWindow, QuadratureSpec};
use pdext_core::gp::{self, CovKernel};
use pdext_core::mercer;
use pdext_core::model::{GridSpec, Interval, Kernel, PdFunction, SpectralMeasure};
use pdext_core::pdcheck::{self, PsdVerdict};
use pdext_core::polya::{self, Classification, ExtensionMode};
use pdext_core::rkhs::{self, GreensCase, MembershipVerdict, TestCurve, TestFunction};
use pdext_core::Error as CoreError;
use serde_json::json;

#[derive(Parser)]
#[command(name = "pdext", version, about = "positive definite extension toolkit")]
struct Cli {
    /// Output directory for artifacts (created if missing).
    #[arg(long, global = true, default_value = "pdext-out")]
    out: PathBuf,
    /// Pretty-print the JSON written to stdout.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gram-matrix positivity test of a function on a grid.
    PdCheck(PdCheckArgs),
    /// Build and classify a spline extension.
    PolyaExtend(PolyaArgs),
    /// Mercer spectrum of a function or named kernel.
    Mercer(MercerArgs),
    /// Shannon-sampling membership criterion for Ext(F).
    Shannon(ShannonArgs),
    /// RKHS diagnostics (membership, Green's residual, boundary identity,
    /// isometry defect, deficiency integral).
    Rkhs(RkhsArgs),
    /// Gaussian process path sampling with a covariance report.
    GpSim(GpArgs),
    /// Bochner transform and measure diagnostics.
    Bochner(BochnerArgs),
    /// Lattice Fourier weights of a function on the line or its window.
    Periodize(PeriodizeArgs),
    /// Inversion formula for interval masses.
    Invert(InvertArgs),
    /// Catalog summary table.
    CatalogTable,
}

#[derive(Args)]
struct PdCheckArgs {
    /// Function JSON (inline or @file).
    #[arg(long = "f")]
    function: String,
    /// Number of uniform grid points.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Explicit comma-separated points (overrides --grid).
    #[arg(long)]
    points: Option<String>,
    /// Also dump the eigenvalues as CSV.
    #[arg(long)]
    eigen_csv: bool,
}

#[derive(Args)]
struct PolyaArgs {
    #[arg(long = "f")]
    function: String,
    #[arg(long, value_enum, default_value_t = ExtMode::Auto)]
    mode: ExtMode,
    /// Knots as "x:value,x:value,...", required in knots mode.
    #[arg(long)]
    knots: Option<String>,
    /// Sample count for the emitted extension CSV.
    #[arg(long, default_value_t = 513)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtMode {
    Auto,
    Knots,
}

#[derive(Args)]
struct MercerArgs {
    /// Function JSON; omit when --kernel names a built-in kernel.
    #[arg(long = "f")]
    function: Option<String>,
    /// Built-in kernel: min | greens-polya-f3.
    #[arg(long)]
    kernel: Option<String>,
    /// Right endpoint of the interval (0, a).
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 512)]
    n: usize,
    /// Number of eigenfunction columns to emit.
    #[arg(long, default_value_t = 8)]
    modes: usize,
}

#[derive(Args)]
struct ShannonArgs {
    #[arg(long = "f")]
    function: String,
    #[arg(long)]
    mu: String,
    #[arg(long, default_value_t = 64)]
    n_max: i64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args)]
struct RkhsArgs {
    #[arg(long)]
    op: RkhsOp,
    #[arg(long = "f")]
    function: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    /// ξ for membership: exp | one | linear.
    #[arg(long)]
    xi: Option<String>,
    /// Which Green's case: f2 | f3.
    #[arg(long)]
    which: Option<String>,
    /// Evaluation point for the boundary identity.
    #[arg(long)]
    x: Option<f64>,
    /// Polynomial g coefficients "c0,c1,..." for the boundary identity.
    #[arg(long)]
    g: Option<String>,
    /// Interval length for the deficiency integral.
    #[arg(long)]
    a: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RkhsOp {
    Membership,
    Greens,
    Boundary,
    Isometry,
    Deficiency,
}

#[derive(Args)]
struct GpArgs {
    /// bm | bridge | ou:alpha | fbm:H
    #[arg(long)]
    kernel: String,
    #[arg(long, default_value_t = 1000)]
    m: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Time grid "lo:hi:n".
    #[arg(long, default_value = "0.05:0.95:16")]
    times: String,
    /// Cap on the number of paths written to CSV.
    #[arg(long, default_value_t = 32)]
    paths_csv_limit: usize,
}

#[derive(Args)]
struct BochnerArgs {
    #[arg(long)]
    op: BochnerOp,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long = "f")]
    function: Option<String>,
    /// Evaluation points "a,b,c" for the transform.
    #[arg(long)]
    x: Option<String>,
    /// Moment order.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Truncation radius override.
    #[arg(long)]
    radius: Option<f64>,
    /// Grid size for verify.
    #[arg(long, default_value_t = 41)]
    grid: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum BochnerOp {
    Transform,
    Verify,
    Moment,
    Index,
}

#[derive(Args)]
struct PeriodizeArgs {
    #[arg(long = "f")]
    function: String,
    #[arg(long, value_enum, default_value_t = WindowArg::None)]
    window: WindowArg,
    #[arg(long, default_value_t = 100)]
    n_max: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    None,
    UnitBox,
}

#[derive(Args)]
struct InvertArgs {
    #[arg(long = "f")]
    function: String,
    #[arg(long)]
    a0: f64,
    #[arg(long)]
    b0: f64,
    #[arg(long, default_value_t = 1000.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Present for interface compatibility: the build executes single-threaded,
    // so any positive cap is already satisfied.
    if let Ok(v) = std::env::var("PDEXT_THREADS") {
        if v.parse::<usize>().map(|n| n == 0).unwrap_or(true) {
            eprintln!("error: PDEXT_THREADS must be a positive integer");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                CoreError::Numeric(_) | CoreError::Degenerate(_) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CoreError> {
    fs::create_dir_all(&cli.out)
        .map_err(|e| CoreError::Config(format!("cannot create output directory: {e}")))?;
    match &cli.command {
        Command::PdCheck(a) => pd_check(cli, a),
        Command::PolyaExtend(a) => polya_extend(cli, a),
        Command::Mercer(a) => mercer_cmd(cli, a),
        Command::Shannon(a) => shannon_cmd(cli, a),
        Command::Rkhs(a) => rkhs_cmd(cli, a),
        Command::GpSim(a) => gp_sim(cli, a),
        Command::Bochner(a) => bochner_cmd(cli, a),
        Command::Periodize(a) => periodize_cmd(cli, a),
        Command::Invert(a) => invert_cmd(cli, a),
        Command::CatalogTable => catalog_table(cli),
    }
}

fn read_spec(text: &str) -> Result<String, CoreError> {
    if let Some(path) = text.strip_prefix('@') {
        fs::read_to_string(path).map_err(|e| CoreError::Data(format!("cannot read {path}: {e}")))
    } else {
        Ok(text.to_string())
    }
}

fn load_function(text: &str) -> Result<PdFunction, CoreError> {
    PdFunction::from_json(&read_spec(text)?)
}

fn load_measure(text: &str) -> Result<SpectralMeasure, CoreError> {
    SpectralMeasure::from_json(&read_spec(text)?)
}

fn emit_json(cli: &Cli, name: &str, value: &serde_json::Value) -> Result<(), CoreError> {
    let text = if cli.pretty {
        serde_json::to_string_pretty(value).unwrap()
    } else {
        serde_json::to_string(value).unwrap()
    };
    println!("{text}");
    fs::write(cli.out.join(name), text)
        .map_err(|e| CoreError::Config(format!("cannot write {name}: {e}")))?;
    Ok(())
}

/// Full-precision decimal for CSV cells (17 significant digits).
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CoreError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CoreError::Config(format!("cannot open {}: {e}", path.display())))?;
    w.write_record(header).map_err(|e| CoreError::Config(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| CoreError::Config(e.to_string()))?;
    }
    w.flush().map_err(|e| CoreError::Config(e.to_string()))?;
    Ok(())
}

fn parse_points(text: &str) -> Result<Vec<f64>, CoreError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CoreError::Argument(format!("bad number {s:?}: {e}")))
        })
        .collect()
}

fn pd_check(cli: &Cli, a: &PdCheckArgs) -> Result<ExitCode, CoreError> {
    let f = load_function(&a.function)?;
    let points = match &a.points {
        Some(p) => parse_points(p)?,
        None => {
            let hw = f.half_width() * 0.49;
            let n = a.grid.max(2);
            (0..n).map(|i| -hw + 2.0 * hw * i as f64 / (n - 1) as f64).collect()
        }
    };
    let r = pdcheck::is_pd_grid(&f, &points)?;
    let verdict = r.verdict == PsdVerdict::Psd;
    emit_json(
        cli,
        "pd_check.json",
        &json!({
            "op": "pd-check",
            "points": r.points,
            "min_eigenvalue": r.min_eigenvalue,
            "max_eigenvalue": r.max_eigenvalue,
            "verdict": if verdict { "psd" } else { "indefinite" },
        }),
    )?;
    if a.eigen_csv {
        let rows: Vec<Vec<String>> =
            r.eigenvalues.iter().enumerate().map(|(i, &v)| vec![i.to_string(), fmt17(v)]).collect();
        write_csv(&cli.out.join("pd_check_eigenvalues.csv"), &["index", "eigenvalue"], &rows)?;
    }
    Ok(if verdict { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_knots(text: &str) -> Result<Vec<(f64, f64)>, CoreError> {
    text.split(',')
        .map(|pair| {
            let mut it = pair.split(':');
            let x = it
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| CoreError::Argument(format!("bad knot {pair:?}")))?;
            let v = it
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| CoreError::Argument(format!("bad knot {pair:?}")))?;
            Ok((x, v))
        })
        .collect()
}

fn polya_extend(cli: &Cli, a: &PolyaArgs) -> Result<ExitCode, CoreError> {
    let f = load_function(&a.function)?;
    let ext = match a.mode {
        ExtMode::Auto => polya::build_spline_extension(&f, ExtensionMode::AutoTangent, None)?,
        ExtMode::Knots => {
            let knots = parse_knots(
                a.knots
                    .as_deref()
                    .ok_or_else(|| CoreError::Argument("knots mode needs --knots".into()))?,
            )?;
            polya::build_spline_extension(&f, ExtensionMode::Knots, Some(&knots))?
        }
    };
    let classification = polya::classify_extension(&ext, 64)?;
    let n = a.samples.max(16);
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| {
            let x = -ext.support_radius + 2.0 * ext.support_radius * i as f64 / (n - 1) as f64;
            vec![fmt17(x), fmt17(ext.evaluate(x))]
        })
        .collect();
    write_csv(&cli.out.join("extension.csv"), &["x", "f_ext"], &rows)?;
    let (verdict, refuted) = match &classification {
        Classification::PolyaPd => ("polya_pd".to_string(), false),
        Classification::Refuted { witness, min_eigenvalue } => {
            (format!("refuted({} points, min eig {min_eigenvalue:.3e})", witness.len()), true)
        }
        Classification::Undecided => ("undecided".to_string(), false),
    };
    emit_json(
        cli,
        "extension.json",
        &json!({
            "op": "polya-extend",
            "support_radius": ext.support_radius,
            "knots": ext.knots,
            "verdict": verdict,
        }),
    )?;
    Ok(if refuted { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn mercer_cmd(cli: &Cli, a: &MercerArgs) -> Result<ExitCode, CoreError> {
    let grid = GridSpec::midpoint(Interval::new(0.0, a.a)?, a.n)?;
    let matrix = match (&a.kernel, &a.function) {
        (Some(name), _) => {
            let kernel = match name.as_str() {
                "min" => Kernel::MinXY,
                "greens-polya-f3" => Kernel::GreensPolyaF3,
                other => {
                    return Err(CoreError::Argument(format!(
                        "unknown kernel {other:?} (use min | greens-polya-f3)"
                    )))
                }
            };
            mercer::discretize_kernel(&kernel, &grid)?
        }
        (None, Some(spec)) => {
            let f = load_function(spec)?;
            mercer::discretize(&f, a.a, a.n)?.0
        }
        (None, None) => {
            return Err(CoreError::Argument("need either --f or --kernel".into()));
        }
    };
    let trace = matrix.trace();
    let (eigenvalues, modes_written) = match &matrix {
        mercer::MercerMatrix::Real(_) => {
            let d = mercer::eigensystem(&matrix, &grid)?;
            let k = a.modes.min(d.eigenvalues.len());
            let mut rows = Vec::with_capacity(grid.n());
            for i in 0..grid.n() {
                let mut row = vec![fmt17(grid.nodes[i])];
                for j in 0..k {
                    row.push(fmt17(d.eigenfunctions[(i, j)]));
                }
                rows.push(row);
            }
            let mut header = vec!["x".to_string()];
            for j in 0..k {
                header.push(format!("xi_{}", j + 1));
            }
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            write_csv(&cli.out.join("mercer_eigenfunctions.csv"), &header_refs, &rows)?;
            (d.eigenvalues, k)
        }
        mercer::MercerMatrix::Hermitian(_) => (mercer::eigenvalues_only(&matrix), 0),
    };
    let rows: Vec<Vec<String>> = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &v)| vec![(i + 1).to_string(), fmt17(v)])
        .collect();
    write_csv(&cli.out.join("mercer_eigenvalues.csv"), &["k", "lambda"], &rows)?;
    emit_json(
        cli,
        "mercer_trace.json",
        &json!({
            "op": "mercer",
            "n": a.n,
            "interval": [0.0, a.a],
            "trace": trace,
            "eigenvalue_sum": eigenvalues.iter().sum::<f64>(),
            "top_eigenvalue": eigenvalues.first().copied().unwrap_or(0.0),
            "modes_written": modes_written,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn shannon_cmd(cli: &Cli, a: &ShannonArgs) -> Result<ExitCode, CoreError> {
    let f = load_function(&a.function)?;
    let mu = load_measure(&a.mu)?;
    let grid = mercer::shannon_default_grid(64);
    let q = QuadratureSpec::default();
    let r = mercer::ext_membership_shannon(&f, &mu, &grid, a.n_max, a.tol, &q)?;
    emit_json(
        cli,
        "shannon.json",
        &json!({
            "op": "shannon",
            "pass": r.pass,
            "sup_error": r.sup_error,
            "n_used": r.n_used,
            "tol": a.tol,
        }),
    )?;
    Ok(if r.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_greens_case(which: Option<&str>) -> Result<GreensCase, CoreError> {
    match which.map(|s| s.to_ascii_lowercase()).as_deref() {
        Some("f2") => Ok(GreensCase::F2),
        Some("f3") => Ok(GreensCase::F3),
        other => Err(CoreError::Argument(format!("--which must be f2 or f3, got {other:?}"))),
    }
}

fn rkhs_cmd(cli: &Cli, a: &RkhsArgs) -> Result<ExitCode, CoreError> {
    let q = QuadratureSpec::default();
    match a.op {
        RkhsOp::Membership => {
            let f = load_function(
                a.function
                    .as_deref()
                    .ok_or_else(|| CoreError::Argument("membership needs --f".into()))?,
            )?;
            let xi_name = a.xi.as_deref().unwrap_or("exp");
            let report = match xi_name {
                "exp" => rkhs::membership_test(&f, |x| (-x).exp(), &[64, 128, 256, 512])?,
                "one" => rkhs::membership_test(&f, |_| 1.0, &[64, 128, 256, 512])?,
                "linear" => rkhs::membership_test(&f, |x| x, &[64, 128, 256, 512])?,
                other => {
                    return Err(CoreError::Argument(format!(
                        "unknown xi {other:?} (use exp | one | linear)"
                    )))
                }
            };
            let (verdict, norm) = match report.verdict {
                MembershipVerdict::MemberEvidence { a } => ("member-evidence", Some(a)),
                MembershipVerdict::Diverging => ("diverging", None),
            };
            emit_json(
                cli,
                "rkhs_membership.json",
                &json!({
                    "op": "rkhs-membership",
                    "xi": xi_name,
                    "verdict": verdict,
                    "norm_estimate": norm,
                    "history": report.history,
                    "increment_exponent": report.increment_exponent,
                }),
            )?;
            Ok(if verdict == "diverging" { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        RkhsOp::Greens => {
            let which = parse_greens_case(a.which.as_deref())?;
            let half = which == GreensCase::F2;
            let phi = TestFunction::RaisedCosine {
                center: if half { 0.25 } else { 0.5 },
                halfwidth: if half { 0.12 } else { 0.24 },
            };
            let residual = rkhs::greens_residual(which, &phi, 1024)?;
            emit_json(
                cli,
                "rkhs_greens.json",
                &json!({ "op": "rkhs-greens", "which": a.which, "residual": residual }),
            )?;
            Ok(if residual < 1e-4 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        RkhsOp::Boundary => {
            let which = parse_greens_case(a.which.as_deref())?;
            let x = a.x.unwrap_or(0.3);
            let coeffs = match &a.g {
                Some(g) => parse_points(g)?,
                None => vec![0.0, 0.0, 1.0],
            };
            let r = rkhs::boundary_reproducing(which, x, &TestCurve::Poly(coeffs))?;
            emit_json(
                cli,
                "rkhs_boundary.json",
                &json!({
                    "op": "rkhs-boundary",
                    "which": a.which,
                    "x": x,
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "error": r.error,
                }),
            )?;
            Ok(if r.error < 1e-6 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        RkhsOp::Isometry => {
            let f = load_function(
                a.function
                    .as_deref()
                    .ok_or_else(|| CoreError::Argument("isometry needs --f".into()))?,
            )?;
            let mu = load_measure(
                a.mu.as_deref().ok_or_else(|| CoreError::Argument("isometry needs --mu".into()))?,
            )?;
            let hw = f.half_width();
            let phi = TestFunction::RaisedCosine { center: 0.5 * hw, halfwidth: 0.3 * hw };
            let err = rkhs::isometry_check(&f, &mu, &phi, 2048, &q)?;
            emit_json(
                cli,
                "rkhs_isometry.json",
                &json!({ "op": "rkhs-isometry", "abs_error": err }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        RkhsOp::Deficiency => {
            let mu = load_measure(
                a.mu.as_deref()
                    .ok_or_else(|| CoreError::Argument("deficiency needs --mu".into()))?,
            )?;
            let len = a.a.unwrap_or(1.0);
            let r = rkhs::deficiency_integral(len, &mu, &q)?;
            emit_json(
                cli,
                "rkhs_deficiency.json",
                &json!({
                    "op": "rkhs-deficiency",
                    "a": len,
                    "value": r.value,
                    "divergent": r.divergent,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_kernel(text: &str) -> Result<CovKernel, CoreError> {
    let lower = text.to_ascii_lowercase();
    if lower == "bm" {
        return Ok(CovKernel::Bm);
    }
    if lower == "bridge" {
        return Ok(CovKernel::Bridge);
    }
    if let Some(rest) = lower.strip_prefix("ou:") {
        let alpha = rest
            .parse::<f64>()
            .map_err(|e| CoreError::Argument(format!("bad ou parameter: {e}")))?;
        return Ok(CovKernel::Ou { alpha });
    }
    if let Some(rest) = lower.strip_prefix("fbm:") {
        let hurst = rest
            .parse::<f64>()
            .map_err(|e| CoreError::Argument(format!("bad fbm parameter: {e}")))?;
        return Ok(CovKernel::Fbm { hurst });
    }
    Err(CoreError::Argument(format!(
        "unknown kernel {text:?} (use bm | bridge | ou:alpha | fbm:H)"
    )))
}

fn parse_times(text: &str) -> Result<Vec<f64>, CoreError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CoreError::Argument(format!("times must be lo:hi:n, got {text:?}")));
    }
    let lo: f64 = parts[0].parse().map_err(|e| CoreError::Argument(format!("bad lo: {e}")))?;
    let hi: f64 = parts[1].parse().map_err(|e| CoreError::Argument(format!("bad hi: {e}")))?;
    let n: usize = parts[2].parse().map_err(|e| CoreError::Argument(format!("bad n: {e}")))?;
    if !(lo < hi) || n < 2 {
        return Err(CoreError::Argument("times need lo < hi and n >= 2".into()));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn gp_sim(cli: &Cli, a: &GpArgs) -> Result<ExitCode, CoreError> {
    let kernel = parse_kernel(&a.kernel)?;
    let times = parse_times(&a.times)?;
    let ens = gp::sample_paths(&kernel, &times, a.m, a.seed)?;
    let emp = ens.empirical_cov();
    let model = gp::cov_matrix(&kernel, &times)?;
    let mut worst = 0.0f64;
    for i in 0..times.len() {
        for j in 0..times.len() {
            worst = worst.max((emp[(i, j)] - model[(i, j)]).abs());
        }
    }
    let tol = 5.0 / (a.m as f64).sqrt();
    let pass = worst < tol;

    let mut rows = Vec::with_capacity(times.len());
    let shown = a.paths_csv_limit.min(ens.paths.len());
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![fmt17(t)];
        for p in ens.paths.iter().take(shown) {
            row.push(fmt17(p[i]));
        }
        rows.push(row);
    }
    let mut header = vec!["t".to_string()];
    for p in 0..shown {
        header.push(format!("path_{p}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(&cli.out.join("gp_paths.csv"), &header_refs, &rows)?;

    emit_json(
        cli,
        "gp_cov_report.json",
        &json!({
            "op": "gp-sim",
            "kernel": ens.kernel_id,
            "m": a.m,
            "seed": a.seed,
            "entrywise_error": worst,
            "tolerance": tol,
            "pass": pass,
        }),
    )?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn bochner_cmd(cli: &Cli, a: &BochnerArgs) -> Result<ExitCode, CoreError> {
    let q = QuadratureSpec { truncation_radius: a.radius, ..QuadratureSpec::default() };
    match a.op {
        BochnerOp::Transform => {
            let mu = load_measure(
                a.mu.as_deref().ok_or_else(|| CoreError::Argument("transform needs --mu".into()))?,
            )?;
            let xs = parse_points(a.x.as_deref().unwrap_or("0.0"))?;
            let mut rows = Vec::with_capacity(xs.len());
            let mut values = Vec::with_capacity(xs.len());
            for &x in &xs {
                let v = bochner::bochner_transform(&mu, x, &q)?;
                rows.push(vec![fmt17(x), fmt17(v.re), fmt17(v.im)]);
                values.push(json!([v.re, v.im]));
            }
            write_csv(&cli.out.join("bochner_transform.csv"), &["x", "re", "im"], &rows)?;
            emit_json(
                cli,
                "bochner_transform.json",
                &json!({ "op": "transform", "x": xs, "values": values }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        BochnerOp::Verify => {
            let f = load_function(
                a.function
                    .as_deref()
                    .ok_or_else(|| CoreError::Argument("verify needs --f".into()))?,
            )?;
            let mu = load_measure(
                a.mu.as_deref().ok_or_else(|| CoreError::Argument("verify needs --mu".into()))?,
            )?;
            let grid = bochner::symmetric_grid(f.half_width(), a.grid.max(3));
            let r = bochner::verify_ext(&f, &mu, &grid, a.tol, &q)?;
            // plot-ready comparison rows
            let mut rows = Vec::with_capacity(grid.len());
            for &x in &grid {
                let lhs = f.evaluate(x)?;
                let rhs = bochner::bochner_transform(&mu, x, &q)?;
                rows.push(vec![fmt17(x), fmt17(lhs.re), fmt17(lhs.im), fmt17(rhs.re), fmt17(rhs.im)]);
            }
            write_csv(
                &cli.out.join("verify_ext.csv"),
                &["x", "re_f", "im_f", "re_muhat", "im_muhat"],
                &rows,
            )?;
            emit_json(
                cli,
                "verify_ext.json",
                &json!({
                    "op": "verify_ext",
                    "sup_error": r.sup_error,
                    "worst_x": r.worst_x,
                    "pass": r.pass,
                }),
            )?;
            Ok(if r.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        BochnerOp::Moment => {
            let mu = load_measure(
                a.mu.as_deref().ok_or_else(|| CoreError::Argument("moment needs --mu".into()))?,
            )?;
            let n = a.n.unwrap_or(1);
            let m = bochner::moment(&mu, n, &q)?;
            let (value, status) = match m {
                bochner::MomentResult::Value(v) => (Some(v), "value"),
                bochner::MomentResult::Divergent => (None, "divergent"),
                bochner::MomentResult::Inconclusive { last_value } => (Some(last_value), "inconclusive"),
            };
            emit_json(
                cli,
                "moment.json",
                &json!({ "op": "moment", "n": n, "status": status, "value": value }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        BochnerOp::Index => {
            let mu = load_measure(
                a.mu.as_deref().ok_or_else(|| CoreError::Argument("index needs --mu".into()))?,
            )?;
            let d = bochner::second_moment_index_diagnostic(&mu, &q)?;
            let text = match d {
                bochner::IndexDiagnostic::ZeroZero => "(0,0)",
                bochner::IndexDiagnostic::OneOne => "(1,1)",
                bochner::IndexDiagnostic::Inconclusive => "inconclusive",
            };
            emit_json(cli, "index.json", &json!({ "op": "index", "indices": text }))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn periodize_cmd(cli: &Cli, a: &PeriodizeArgs) -> Result<ExitCode, CoreError> {
    let f = load_function(&a.function)?;
    let window = match a.window {
        WindowArg::None => PeriodizeWindow::None,
        WindowArg::UnitBox => PeriodizeWindow::UnitBox,
    };
    let q = QuadratureSpec::default();
    let w = bochner::periodize(&f, window, a.n_max, &q)?;
    let rows: Vec<Vec<String>> = (-w.n_max..=w.n_max)
        .map(|n| vec![n.to_string(), fmt17(w.weight(n))])
        .collect();
    write_csv(&cli.out.join("periodize.csv"), &["n", "weight"], &rows)?;
    emit_json(
        cli,
        "periodize.json",
        &json!({
            "op": "periodize",
            "n_max": w.n_max,
            "sum": w.sum,
            "all_nonnegative": w.all_nonnegative,
            "convention": w.convention,
        }),
    )?;
    Ok(if w.all_nonnegative { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn invert_cmd(cli: &Cli, a: &InvertArgs) -> Result<ExitCode, CoreError> {
    let f = load_function(&a.function)?;
    let schedule = [a.t_max / 4.0, a.t_max / 2.0, a.t_max];
    let q = QuadratureSpec::default();
    let r = bochner::invert(&f, a.a0, a.b0, &schedule, a.tol, &q)?;
    emit_json(
        cli,
        "invert.json",
        &json!({
            "op": "invert",
            "a0": a.a0,
            "b0": a.b0,
            "value": r.value,
            "converged": r.converged,
            "history": r.history,
        }),
    )?;
    Ok(if r.converged { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn catalog_table(cli: &Cli) -> Result<ExitCode, CoreError> {
    use pdext_core::model::CatalogId;
    let q = QuadratureSpec::default();
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for id in CatalogId::ALL {
        let f = if id == CatalogId::F7 { PdFunction::f7(2.0).unwrap() } else { PdFunction::catalog(id) };
        let mu = SpectralMeasure::catalog_pair(id, 2.0);
        let hw = f.half_width();
        let pts: Vec<f64> = (0..16).map(|i| -0.49 * hw + 0.98 * hw * i as f64 / 15.0).collect();
        let pd = pdcheck::is_pd_grid(&f, &pts)?;
        let idx = bochner::second_moment_index_diagnostic(&mu, &q)?;
        let grid = bochner::symmetric_grid(hw, 21);
        let ver = bochner::verify_ext(&f, &mu, &grid, 1e-4, &q)?;
        let (m, _g) = mercer::discretize(&f, hw, 256)?;
        let trace_err = (mercer::eigenvalues_only(&m).iter().sum::<f64>() - hw).abs();
        let idx_text = match idx {
            bochner::IndexDiagnostic::ZeroZero => "(0,0)",
            bochner::IndexDiagnostic::OneOne => "(1,1)",
            bochner::IndexDiagnostic::Inconclusive => "inconclusive",
        };
        let pd_text = if pd.verdict == PsdVerdict::Psd { "psd" } else { "indefinite" };
        rows.push(vec![
            id.name().to_string(),
            pd_text.to_string(),
            idx_text.to_string(),
            fmt17(ver.sup_error),
            fmt17(trace_err),
        ]);
        json_rows.push(json!({
            "id": id.name(),
            "pd_verdict": pd_text,
            "indices": idx_text,
            "verify_ext_sup_error": ver.sup_error,
            "mercer_trace_error": trace_err,
        }));
    }
    write_csv(
        &cli.out.join("catalog_table.csv"),
        &["id", "pd_verdict", "indices", "verify_ext_sup_error", "mercer_trace_error"],
        &rows,
    )?;
    emit_json(cli, "catalog_table.json", &json!({ "op": "catalog-table", "rows": json_rows }))?;
    Ok(ExitCode::SUCCESS)
}
