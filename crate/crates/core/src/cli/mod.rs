//! Command-line driver: `inscribe`, `diagnose`, `sweep` and `export-median`.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 hypothesis violation,
//! 3 failed diagnostics, 4 incomplete sweep. Data goes to files, short
//! summaries to stdout.

mod export;

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostics::{crosspolytope_condition_report, special_corner_scan, ScanConfig};
use crate::error::Error;
use crate::geometry::{ConvexBody, Frame};
use crate::median::MedianEvaluator;
use crate::par;
use crate::solver::{inscribe_rhomb, verify_rhomb, RhombRecord, SolverConfig, VERIFY_TOL};
use crate::sweep::{direction_sweep, equalized_sweep, random_frame, write_csv};

pub use export::{median_csv, median_obj, median_svg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_DIAGNOSTICS: i32 = 3;
pub const EXIT_SWEEP: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rhombs", version, about = "Inscribed rhombs in strictly convex bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inscribe a rhomb with the given frame and write it as JSON.
    Inscribe(RunArgs),
    /// Check special corners, regularity and pole conditions for a frame.
    Diagnose(RunArgs),
    /// Inscribe rhombs over seeded random frames and write a CSV.
    Sweep(RunArgs),
    /// Sample a median surface and export it as OBJ, SVG, CSV or JSON.
    ExportMedian(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Body description (JSON).
    #[arg(long)]
    pub body: PathBuf,
    /// identity | seed:N | angles:a1,a2,... | matrix:PATH
    #[arg(long, default_value = "identity")]
    pub frame: FrameSpec,
    /// Root tolerance for `inscribe` and `sweep`, scan tolerance for `diagnose`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Sampling resolution for `diagnose` and `export-median`.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Number of frames for `sweep`.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Base seed for sweep frames and diagnostic sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file; each command has its own default name.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Rotate each sweep frame until the half-diagonals agree (exploratory).
    #[arg(long)]
    pub equalize: bool,
    /// Median axis for `export-median`, 1-based; defaults to the last axis.
    #[arg(long)]
    pub axis: Option<usize>,
    /// Skip the special-corner scan that `inscribe` runs first.
    #[arg(long)]
    pub skip_checks: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Obj,
    Svg,
}

/// How the direction frame is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameSpec {
    Identity,
    Seed(u64),
    Angles(Vec<f64>),
    Matrix(PathBuf),
}

impl FromStr for FrameSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "identity" {
            return Ok(FrameSpec::Identity);
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("unrecognized frame `{s}`"))?;
        match kind {
            "seed" => rest.parse().map(FrameSpec::Seed).map_err(|e| format!("bad frame seed `{rest}`: {e}")),
            "angles" => rest
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|e| format!("bad angle `{a}`: {e}")))
                .collect::<Result<Vec<_>, _>>()
                .map(FrameSpec::Angles),
            "matrix" => Ok(FrameSpec::Matrix(PathBuf::from(rest))),
            _ => Err(format!("unrecognized frame kind `{kind}`")),
        }
    }
}

impl FrameSpec {
    pub fn build(&self, dim: usize) -> Result<Frame, CliError> {
        let frame = match self {
            FrameSpec::Identity => Frame::identity(dim),
            FrameSpec::Seed(s) => random_frame(dim, *s)?,
            FrameSpec::Angles(a) => Frame::identity(dim).givens(a)?,
            FrameSpec::Matrix(path) => {
                let rows: Vec<Vec<f64>> = serde_json::from_str(&read(path)?)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                Frame::try_from(rows)?
            }
        };
        if frame.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: frame.dim() }.into());
        }
        Ok(frame)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(Error::HypothesisViolation(_) | Error::DegenerateIntersection { .. }) => EXIT_HYPOTHESIS,
            _ => EXIT_USAGE,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

/// Parsed inputs shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub body: ConvexBody,
    pub args: RunArgs,
}

impl RunConfig {
    pub fn load(args: RunArgs) -> Result<Self, CliError> {
        let body = ConvexBody::from_json_str(&read(&args.body)?)?;
        if let Some(t) = args.threads {
            if t == 0 {
                return Err(CliError::Usage("--threads must be >= 1".into()));
            }
        }
        Ok(Self { body, args })
    }

    fn frame(&self) -> Result<Frame, CliError> {
        self.args.frame.build(self.body.dim())
    }

    fn solver(&self) -> Result<SolverConfig, CliError> {
        let mut c = SolverConfig::default();
        if let Some(t) = self.args.tol {
            c.root_tol = t;
        }
        c.validate()?;
        Ok(c)
    }

    fn scan(&self) -> Result<ScanConfig, CliError> {
        let mut c = ScanConfig { seed: self.args.seed, ..ScanConfig::default() };
        if let Some(r) = self.args.resolution {
            c.resolution = r;
        }
        if let Some(t) = self.args.tol {
            c.tol = t;
        }
        c.validate()?;
        Ok(c)
    }

    fn out(&self, default: &str) -> PathBuf {
        self.args.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }

    fn only_format(&self, allowed: &[Format], command: &str) -> Result<Format, CliError> {
        match self.args.format {
            None => Ok(allowed[0]),
            Some(f) if allowed.contains(&f) => Ok(f),
            Some(f) => Err(CliError::Usage(format!("`{command}` does not support --format {f:?}"))),
        }
    }
}

type Handler = fn(&RunConfig) -> Result<i32, CliError>;

pub fn cmd_inscribe(cfg: &RunConfig) -> Result<i32, CliError> {
    cfg.only_format(&[Format::Json], "inscribe")?;
    let frame = cfg.frame()?;
    let solver = cfg.solver()?;
    if !cfg.args.skip_checks {
        let scan = ScanConfig { seed: cfg.args.seed, ..ScanConfig::default() };
        let hits = special_corner_scan(&cfg.body, &frame, &scan)?;
        if let Some(h) = hits.first() {
            return Err(Error::HypothesisViolation(format!(
                "the body has {} special corner(s) for this frame, e.g. at {:?}",
                hits.len(),
                h.point
            ))
            .into());
        }
    }
    let (rhomb, report) = inscribe_rhomb(&cfg.body, &frame, &solver)?;
    let check = verify_rhomb(&cfg.body, &rhomb, VERIFY_TOL)?;
    let out = cfg.out("rhomb.json");
    write(&out, &json(&RhombRecord::new(&rhomb, &check, &report)))?;
    println!(
        "inscribed rhomb: half-diagonals {:?}, residual {:e}, {:?} -> {}",
        rhomb.half_diagonals,
        report.final_residual,
        report.method,
        out.display()
    );
    Ok(EXIT_OK)
}

pub fn cmd_diagnose(cfg: &RunConfig) -> Result<i32, CliError> {
    cfg.only_format(&[Format::Json], "diagnose")?;
    let frame = cfg.frame()?;
    let scan = cfg.scan()?;
    let report = crosspolytope_condition_report(&cfg.body, &frame, &scan)?;
    let out = cfg.out("diagnostics.json");
    write(&out, &json(&report))?;
    println!(
        "special corners: {}, regularity violations: {}, poles passed: {}/{}, certificates passed: {}/{} -> {}",
        report.special_corners.len(),
        report.regularity_violations.len(),
        report.pole_checks.iter().filter(|p| p.passed).count(),
        report.pole_checks.len(),
        report.intersection_certificates.iter().filter(|c| c.passed).count(),
        report.intersection_certificates.len(),
        out.display()
    );
    Ok(if report.passed { EXIT_OK } else { EXIT_DIAGNOSTICS })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<i32, CliError> {
    let format = cfg.only_format(&[Format::Csv, Format::Json], "sweep")?;
    let solver = cfg.solver()?;
    let sweep = if cfg.args.equalize {
        equalized_sweep(&cfg.body, cfg.args.count, cfg.args.seed, &solver)?
    } else {
        direction_sweep(&cfg.body, cfg.args.count, cfg.args.seed, &solver)?
    };
    let out = cfg.out(if format == Format::Csv { "sweep.csv" } else { "sweep.json" });
    match format {
        Format::Json => write(&out, &json(&sweep))?,
        _ => {
            let mut buf = Vec::new();
            write_csv(&sweep.records, &mut buf)?;
            write(&out, &buf)?;
        }
    }
    let summary_path = out.with_extension("summary.json");
    write(&summary_path, &json(&sweep.summary))?;
    println!(
        "{} / {} frames converged -> {}, {}",
        sweep.summary.converged,
        sweep.summary.count,
        out.display(),
        summary_path.display()
    );
    Ok(if sweep.summary.converged == sweep.summary.count { EXIT_OK } else { EXIT_SWEEP })
}

pub fn cmd_export_median(cfg: &RunConfig) -> Result<i32, CliError> {
    let d = cfg.body.dim();
    let format = cfg.args.format.unwrap_or(match d {
        2 => Format::Svg,
        3 => Format::Obj,
        _ => Format::Csv,
    });
    match format {
        Format::Svg if d != 2 => return Err(CliError::Usage(format!("SVG export needs a 2-dimensional body, got {d}"))),
        Format::Obj if d != 3 => return Err(CliError::Usage(format!("OBJ export needs a 3-dimensional body, got {d}"))),
        _ => {}
    }
    let frame = cfg.frame()?;
    let resolution = cfg.args.resolution.unwrap_or(if format == Format::Svg { 256 } else { 33 });
    let axis = match cfg.args.axis {
        None => d - 1,
        Some(a) if (1..=d).contains(&a) => a - 1,
        Some(a) => return Err(CliError::Usage(format!("--axis must lie in 1..={d}, got {a}"))),
    };
    let (bytes, ext) = match format {
        Format::Svg => {
            let solver = cfg.solver()?;
            (median_svg(&cfg.body, &frame, resolution, &solver)?.into_bytes(), "svg")
        }
        Format::Obj => {
            let set = MedianEvaluator::new(&cfg.body, &frame, axis)?.median_mesh(resolution)?;
            (median_obj(&set).into_bytes(), "obj")
        }
        Format::Csv => {
            let set = MedianEvaluator::new(&cfg.body, &frame, axis)?.median_mesh(resolution)?;
            (median_csv(&set, d)?, "csv")
        }
        Format::Json => {
            let set = MedianEvaluator::new(&cfg.body, &frame, axis)?.median_mesh(resolution)?;
            (json(&set), "json")
        }
    };
    let out = cfg.out(&format!("median.{ext}"));
    write(&out, &bytes)?;
    println!("median export ({ext}, resolution {resolution}) -> {}", out.display());
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let (args, run): (RunArgs, Handler) = match cli.command {
        Command::Inscribe(a) => (a, cmd_inscribe),
        Command::Diagnose(a) => (a, cmd_diagnose),
        Command::Sweep(a) => (a, cmd_sweep),
        Command::ExportMedian(a) => (a, cmd_export_median),
    };
    let cfg = RunConfig::load(args)?;
    match cfg.args.threads {
        Some(t) => par::with_threads(t, || run(&cfg)),
        None => run(&cfg),
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
