//! Argument parsing and command implementations for `helistab`.
//!
//! Every command writes plain-text or JSON to stdout, or CSV to `--out`.
//! Missing numbers are written as `NA` in CSV and `null` in JSON.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use helicoid_stability::analytic::flat_eigenvalue;
use helicoid_stability::eigen1d::{self, DEFAULT_K_CHECK, DEFAULT_NODES};
use helicoid_stability::oracle2d;
use helicoid_stability::stability::{
    classify, region_map, trace_boundary, validate, GridSpec, TraceConfig, ValidateConfig,
    ValidationReport,
};
use helicoid_stability::{
    ClassifyConfig, DataPoint, FilmParams, MethodSelection, RegionMap, SolverConfig,
    StabilityVerdict,
};

#[derive(Debug, Parser)]
#[command(
    name = "helistab",
    version,
    about = "Stability of helicoidal soap films in a cylinder"
)]
pub struct Cli {
    /// Emit JSON instead of text or CSV.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one helicoid as stable, unstable or inconclusive.
    Classify(ClassifyArgs),
    /// Classify every cell of a (rho, theta) grid.
    Region(RegionArgs),
    /// Trace the marginal curve lambda_hat = 1 as rho*(theta).
    Curve(CurveArgs),
    /// Report the smallest eigenvalue of each axial mode.
    Eig(EigArgs),
    /// Compare measured (rho, theta) points against the marginal band.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct Resolution {
    /// Nodes of the 1D discretization.
    #[arg(long, default_value_t = DEFAULT_NODES, value_parser = parse_nodes)]
    pub nodes: usize,
}

#[derive(Debug, Args)]
pub struct VerdictArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Half-width of the marginal band around lambda_hat = 1.
    #[arg(long, default_value_t = 1e-6, value_parser = parse_positive)]
    pub tol: f64,
    /// Axial modes checked for monotonicity.
    #[arg(long, default_value_t = DEFAULT_K_CHECK, value_parser = parse_mode_count)]
    pub k_check: usize,
    #[command(flatten)]
    pub resolution: Resolution,
}

impl VerdictArgs {
    fn config(&self) -> ClassifyConfig {
        ClassifyConfig {
            nodes: self.resolution.nodes,
            k_check: self.k_check,
            tol: self.tol,
            method: self.method.into(),
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Analytic,
    Numeric,
    Both,
}

impl From<MethodArg> for MethodSelection {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => MethodSelection::Analytic,
            MethodArg::Numeric => MethodSelection::Numeric,
            MethodArg::Both => MethodSelection::Both,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_parser = parse_positive)]
    pub rho: f64,
    #[arg(long, value_parser = parse_nonnegative)]
    pub theta: f64,
    #[command(flatten)]
    pub verdict: VerdictArgs,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, default_value_t = 0.5, value_parser = parse_positive)]
    pub rho_min: f64,
    #[arg(long, default_value_t = 4.0, value_parser = parse_positive)]
    pub rho_max: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_nonnegative)]
    pub theta_min: f64,
    #[arg(long, default_value_t = 3.0, value_parser = parse_nonnegative)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 36, value_parser = parse_steps)]
    pub rho_steps: usize,
    #[arg(long, default_value_t = 31, value_parser = parse_steps)]
    pub theta_steps: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub verdict: VerdictArgs,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 0.0, value_parser = parse_nonnegative)]
    pub theta_min: f64,
    #[arg(long, default_value_t = 3.0, value_parser = parse_nonnegative)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 31, value_parser = parse_mode_count)]
    pub steps: usize,
    /// Bisection tolerance on rho*.
    #[arg(long, default_value_t = 1e-6, value_parser = parse_positive)]
    pub rho_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub resolution: Resolution,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    #[arg(long, value_parser = parse_positive)]
    pub rho: f64,
    #[arg(long, value_parser = parse_nonnegative)]
    pub theta: f64,
    /// Report modes 1..=K.
    #[arg(long, default_value_t = 1, value_parser = parse_mode_count)]
    pub k: usize,
    /// Also solve the full 2D problem on an NY x NZ grid.
    #[arg(long, num_args = 2, value_names = ["NY", "NZ"], value_parser = parse_grid)]
    pub oracle_2d: Option<Vec<usize>>,
    #[command(flatten)]
    pub resolution: Resolution,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// CSV with header `rho,theta,err_rho,err_theta,source`.
    #[arg(long)]
    pub points: PathBuf,
    /// Half-width of the marginal band in lambda_hat.
    #[arg(long, default_value_t = 0.05, value_parser = parse_positive)]
    pub band: f64,
    #[command(flatten)]
    pub resolution: Resolution,
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn parse_nonnegative(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be nonnegative, got {v}"))
    }
}

fn parse_count(s: &str, min: usize) -> std::result::Result<usize, String> {
    let v: usize = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a count"))?;
    if v >= min {
        Ok(v)
    } else {
        Err(format!("must be at least {min}, got {v}"))
    }
}

fn parse_mode_count(s: &str) -> std::result::Result<usize, String> {
    parse_count(s, 1)
}

fn parse_nodes(s: &str) -> std::result::Result<usize, String> {
    parse_count(s, 3)
}

fn parse_steps(s: &str) -> std::result::Result<usize, String> {
    parse_count(s, 2)
}

fn parse_grid(s: &str) -> std::result::Result<usize, String> {
    parse_count(s, 4)
}

/// Formats an optional number for CSV: shortest round-trip decimal or `NA`.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Classify(a) => cmd_classify(a, cli.json),
        Command::Region(a) => cmd_region(a, cli.json),
        Command::Curve(a) => cmd_curve(a, cli.json),
        Command::Eig(a) => cmd_eig(a, cli.json),
        Command::Validate(a) => cmd_validate(a, cli.json),
    }
}

/// One classified point; the region CSV row and JSON object share this shape.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    pub rho: f64,
    pub theta: f64,
    pub lambda_hat: Option<f64>,
    pub lambda_bar: Option<f64>,
    pub lambda1: Option<f64>,
    pub status: String,
    pub method: String,
}

impl VerdictRecord {
    fn new(rho: f64, theta: f64, v: &StabilityVerdict) -> Self {
        Self {
            rho,
            theta,
            lambda_hat: v.lambda_hat,
            lambda_bar: v.lambda_bar,
            lambda1: v.lambda1,
            status: v.status.to_string(),
            method: v.method.to_string(),
        }
    }

    fn csv_row(&self) -> [String; 7] {
        [
            self.rho.to_string(),
            self.theta.to_string(),
            fmt_opt(self.lambda_hat),
            fmt_opt(self.lambda_bar),
            fmt_opt(self.lambda1),
            self.status.clone(),
            self.method.clone(),
        ]
    }
}

pub const REGION_HEADER: [&str; 7] = [
    "rho",
    "theta",
    "lambda_hat",
    "lambda_bar",
    "lambda1",
    "status",
    "method",
];
pub const CURVE_HEADER: [&str; 3] = ["theta", "rho_star", "residual"];
pub const POINTS_HEADER: [&str; 5] = ["rho", "theta", "err_rho", "err_theta", "source"];

fn cmd_classify(a: &ClassifyArgs, json: bool) -> Result<()> {
    let p = FilmParams::new(a.rho, a.theta)?;
    let v = classify(&p, &a.verdict.config())?;
    let rec = VerdictRecord::new(a.rho, a.theta, &v);
    if json {
        return write_json(None, &rec);
    }
    let mut out = io::stdout().lock();
    writeln!(out, "rho={} theta={}", rec.rho, rec.theta)?;
    writeln!(out, "status={}", rec.status)?;
    writeln!(out, "method={}", rec.method)?;
    writeln!(out, "lambda_hat={}", fmt_opt(rec.lambda_hat))?;
    writeln!(out, "lambda_bar={}", fmt_opt(rec.lambda_bar))?;
    writeln!(out, "lambda1={}", fmt_opt(rec.lambda1))?;
    writeln!(out, "margin={}", v.margin)?;
    Ok(())
}

fn region_records(map: &RegionMap) -> Result<Vec<VerdictRecord>> {
    let failed: Vec<String> = map
        .cells
        .iter()
        .filter_map(|c| {
            c.error
                .as_ref()
                .map(|e| format!("({}, {}): {e}", c.rho, c.theta))
        })
        .collect();
    if !failed.is_empty() {
        bail!("{} cells failed:\n  {}", failed.len(), failed.join("\n  "));
    }
    Ok(map
        .cells
        .iter()
        .map(|c| VerdictRecord::new(c.rho, c.theta, c.verdict.as_ref().expect("no error")))
        .collect())
}

fn cmd_region(a: &RegionArgs, json: bool) -> Result<()> {
    let grid = GridSpec {
        rho: (a.rho_min, a.rho_max),
        theta: (a.theta_min, a.theta_max),
        rho_steps: a.rho_steps,
        theta_steps: a.theta_steps,
    };
    let map = region_map(&grid, &a.verdict.config())?;
    let records = region_records(&map)?;
    if json {
        return write_json(a.out.as_deref(), &records);
    }
    let mut w = csv::Writer::from_writer(sink(a.out.as_deref())?);
    w.write_record(REGION_HEADER)?;
    for r in &records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct CurveRecord {
    theta: f64,
    rho_star: Option<f64>,
    residual: Option<f64>,
}

fn cmd_curve(a: &CurveArgs, json: bool) -> Result<()> {
    if a.steps > 1 && a.theta_max <= a.theta_min {
        bail!("--theta-max must exceed --theta-min");
    }
    let cfg = TraceConfig {
        nodes: a.resolution.nodes,
        rho_tol: a.rho_tol,
        ..TraceConfig::default()
    };
    let curve = trace_boundary((a.theta_min, a.theta_max), a.steps, &cfg)?;
    let records: Vec<CurveRecord> = curve
        .samples
        .iter()
        .map(|s| CurveRecord {
            theta: s.theta,
            rho_star: s.rho_star,
            residual: s.residual.map(f64::abs),
        })
        .collect();
    if json {
        return write_json(a.out.as_deref(), &records);
    }
    let mut w = csv::Writer::from_writer(sink(a.out.as_deref())?);
    w.write_record(CURVE_HEADER)?;
    for r in &records {
        w.write_record([
            r.theta.to_string(),
            fmt_opt(r.rho_star),
            fmt_opt(r.residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ModeRecord {
    k: usize,
    lambda: f64,
    residual: f64,
}

#[derive(Debug, Serialize)]
struct OracleRecord {
    ny: usize,
    nz: usize,
    lambda_2d: f64,
    residual: f64,
    discrepancy: f64,
}

#[derive(Debug, Serialize)]
struct EigReport {
    rho: f64,
    theta: f64,
    nodes: usize,
    modes: Vec<ModeRecord>,
    flat_exact: Option<f64>,
    oracle_2d: Option<OracleRecord>,
}

fn cmd_eig(a: &EigArgs, json: bool) -> Result<()> {
    let p = FilmParams::new(a.rho, a.theta)?;
    let n = a.resolution.nodes;
    let sweep = eigen1d::mode_sweep(&p, n, a.k, &SolverConfig::default())
        .context("1D eigensolve failed")?;
    let modes: Vec<ModeRecord> = sweep
        .iter()
        .map(|e| ModeRecord {
            k: e.k,
            lambda: e.lambda,
            residual: e.residual,
        })
        .collect();
    let oracle_2d = match a.oracle_2d.as_deref() {
        Some(&[ny, nz]) => {
            let e = oracle2d::lambda_2d(&p, ny, nz).context("2D eigensolve failed")?;
            Some(OracleRecord {
                ny,
                nz,
                lambda_2d: e.lambda,
                residual: e.residual,
                discrepancy: (e.lambda - modes[0].lambda).abs(),
            })
        }
        Some(other) => bail!("--oracle-2d takes two values, got {}", other.len()),
        None => None,
    };
    let report = EigReport {
        rho: a.rho,
        theta: a.theta,
        nodes: n,
        modes,
        flat_exact: if p.is_flat() {
            Some(flat_eigenvalue(a.rho)?)
        } else {
            None
        },
        oracle_2d,
    };
    if json {
        return write_json(None, &report);
    }
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "rho={} theta={} nodes={}",
        report.rho, report.theta, report.nodes
    )?;
    for m in &report.modes {
        writeln!(
            out,
            "k={} lambda={} residual={:e}",
            m.k, m.lambda, m.residual
        )?;
    }
    if let Some(x) = report.flat_exact {
        writeln!(out, "flat_exact={x}")?;
    }
    if let Some(o) = &report.oracle_2d {
        writeln!(
            out,
            "oracle_2d={}x{} lambda_2d={} residual={:e} discrepancy={}",
            o.ny, o.nz, o.lambda_2d, o.residual, o.discrepancy
        )?;
    }
    Ok(())
}

/// Reads a validation point file. The header is mandatory; every row that
/// fails to parse is reported by its 1-based line number.
pub fn read_points(path: &Path) -> Result<Vec<DataPoint>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r.context("unreadable header")?,
        None => bail!(
            "{}: empty file, expected header {}",
            path.display(),
            POINTS_HEADER.join(",")
        ),
    };
    if header.iter().collect::<Vec<_>>() != POINTS_HEADER {
        bail!(
            "{}: line 1: expected header `{}`, found `{}`",
            path.display(),
            POINTS_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        );
    }

    let mut points = Vec::new();
    let mut lines = Vec::new();
    let mut bad = Vec::new();
    for rec in records {
        let parsed = rec.map_err(|e| e.to_string()).and_then(|r| {
            let line = r.position().map_or(0, |p| p.line() as usize);
            if r.len() != POINTS_HEADER.len() {
                return Err(format!("line {line}: expected 5 fields, found {}", r.len()));
            }
            let num = |i: usize| {
                r[i].parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        format!(
                            "line {line}: {} = `{}` is not a finite number",
                            POINTS_HEADER[i], &r[i]
                        )
                    })
            };
            Ok((
                line,
                DataPoint {
                    rho: num(0)?,
                    theta: num(1)?,
                    err_rho: num(2)?,
                    err_theta: num(3)?,
                    source: r[4].to_string(),
                },
            ))
        });
        match parsed {
            Ok((line, p)) => {
                lines.push(line);
                points.push(p);
            }
            Err(e) => bad.push(e),
        }
    }
    if !bad.is_empty() {
        bail!("{}: malformed rows\n  {}", path.display(), bad.join("\n  "));
    }
    if points.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    let invalid: Vec<String> = points
        .iter()
        .zip(&lines)
        .filter(|(p, _)| !(p.rho > 0.0 && p.theta >= 0.0 && p.err_rho >= 0.0 && p.err_theta >= 0.0))
        .map(|(_, l)| l.to_string())
        .collect();
    if !invalid.is_empty() {
        bail!(
            "{}: rho must be positive and theta, err_rho, err_theta nonnegative on lines {}",
            path.display(),
            invalid.join(", ")
        );
    }
    Ok(points)
}

fn cmd_validate(a: &ValidateArgs, json: bool) -> Result<()> {
    let points = read_points(&a.points)?;
    let cfg = ValidateConfig {
        band: a.band,
        nodes: a.resolution.nodes,
        ..ValidateConfig::default()
    };
    let report: ValidationReport<f64> = validate(&points, &cfg)?;
    if json {
        return write_json(None, &report);
    }
    let mut out = io::stdout().lock();
    for r in &report.rows {
        let p = &r.point;
        writeln!(
            out,
            "rho={} theta={} err_rho={} err_theta={} source={} lambda_hat={} status={} box=[{}, {}] {}",
            p.rho,
            p.theta,
            p.err_rho,
            p.err_theta,
            p.source,
            r.lambda_hat,
            r.status,
            r.lambda_min,
            r.lambda_max,
            if r.pass { "pass" } else { "fail" }
        )?;
    }
    writeln!(out, "passed={} failed={}", report.passed, report.failed)?;
    Ok(())
}
