//! Batch front end: JSON problem descriptions in, JSON/CSV/text reports out.
//!
//! Exit codes: 0 success, 2 domain validation, 3 parse, 4 numerical
//! non-convergence, 1 I/O failure while writing results.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charclass::{self, RootSet};
use crate::jlo::{self, Extrapolation, FunctionSpec, JloError, JloResult, QuadratureConfig};
use crate::lefschetz::{self, FixedComponentSpec, LefschetzError};
use crate::spectral::{
    self, heat_supertrace, integrate_density, local_density, log_spaced_grid, outside_mass,
    GeometryError, GeometryStanza, ModelGeometry,
};
use crate::spectral::mehler::{self, MehlerError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<LefschetzError> for CliError {
    fn from(e: LefschetzError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<JloError> for CliError {
    fn from(e: JloError) -> Self {
        match e {
            JloError::NonConvergence { .. } | JloError::NoisyCurve { .. } => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<MehlerError> for CliError {
    fn from(e: MehlerError) -> Self {
        match e {
            MehlerError::InvalidTime(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "odd-lefschetz", version, about = "Equivariant index and JLO checks for odd-dimensional involutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Fixed-point index from a list of fixed components
    Index,
    /// Heat supertrace curve of a model geometry
    Spectral,
    /// Deformed JLO character against its local limit
    Jlo,
    /// Mehler kernel against the Hermite expansion
    Mehler,
    /// Localization of the supertrace density
    Localize,
    /// Characteristic-class expansions as text
    Series,
}

#[derive(Debug, Clone, Default, Args)]
struct Options {
    /// Input JSON file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file (JSON or text); CSV goes beside it with a .csv extension
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Momentum cutoff K
    #[arg(long, global = true)]
    cutoff: Option<u32>,
    /// Heat times: "0.4,0.2,0.1" or "log:T_MIN:T_MAX:N"
    #[arg(long = "t-grid", global = true)]
    t_grid: Option<String>,
    /// Gauss-Legendre nodes per simplex dimension
    #[arg(long = "quad-nodes", global = true)]
    quad_nodes: Option<usize>,
    /// Pass/fail tolerance of the command
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Truncation cap (root-polynomial degree) for series
    #[arg(long, global = true)]
    cap: Option<u32>,
}

/// Validated command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub cutoff: Option<u32>,
    pub t_grid: Option<Vec<f64>>,
    pub quad_nodes: Option<usize>,
    pub tolerance: Option<f64>,
    pub cap: Option<u32>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            output: None,
            cutoff: None,
            t_grid: None,
            quad_nodes: None,
            tolerance: None,
            cap: None,
        }
    }

    pub fn from_args<I, T>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| CliError::Parse(e.to_string()))?;
        let o = cli.options;
        let t_grid = o.t_grid.as_deref().map(parse_t_grid).transpose()?;
        let config = RunConfig {
            command: cli.command,
            input: o.input,
            output: o.output,
            cutoff: o.cutoff,
            t_grid,
            quad_nodes: o.quad_nodes,
            tolerance: o.tolerance,
            cap: o.cap,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Validation(format!("{what} must be positive")));
        if self.cutoff == Some(0) {
            return bad("--cutoff");
        }
        if self.quad_nodes == Some(0) {
            return bad("--quad-nodes");
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return bad("--tolerance");
            }
        }
        if let Some(g) = &self.t_grid {
            if g.is_empty() || g.iter().any(|t| !(*t > 0.0)) {
                return bad("every --t-grid entry");
            }
        }
        Ok(())
    }
}

/// Parses `"a,b,c"` or `"log:T_MIN:T_MAX:N"` (descending log-spaced).
pub fn parse_t_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let perr = |m: String| CliError::Parse(format!("--t-grid `{s}`: {m}"));
    if let Some(rest) = s.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(perr("expected log:T_MIN:T_MAX:N".into()));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|e| perr(format!("{e}")))?;
        let hi: f64 = parts[1].trim().parse().map_err(|e| perr(format!("{e}")))?;
        let n: usize = parts[2].trim().parse().map_err(|e| perr(format!("{e}")))?;
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(CliError::Validation(format!(
                "--t-grid `{s}` needs 0 < T_MIN < T_MAX and N >= 2"
            )));
        }
        return Ok(log_spaced_grid(lo, hi, n));
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| perr(format!("{e}"))))
        .collect()
}

/// Parses arguments, runs the command and reports errors on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match Cli::try_parse_from(&args) {
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = write_stdout(&e.to_string());
            return 0;
        }
        _ => {}
    }
    let result = RunConfig::from_args(&args).and_then(|c| execute(&c));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<(), CliError> {
    config.validate()?;
    match config.command {
        Command::Index => cmd_index(config),
        Command::Spectral => cmd_spectral(config),
        Command::Jlo => cmd_jlo(config),
        Command::Mehler => cmd_mehler(config),
        Command::Localize => cmd_localize(config),
        Command::Series => cmd_series(config),
    }
}

fn read_input(config: &RunConfig) -> Result<Option<String>, CliError> {
    match &config.input {
        None => Ok(None),
        Some(p) => fs::read_to_string(p)
            .map(Some)
            .map_err(|e| CliError::Validation(format!("cannot read input {}: {e}", p.display()))),
    }
}

fn required_input(config: &RunConfig) -> Result<String, CliError> {
    read_input(config)?.ok_or_else(|| {
        CliError::Validation(format!("{:?} needs --input", config.command).to_lowercase())
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn write_stdout(text: &str) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()
}

fn csv_path(output: &Path) -> PathBuf {
    output.with_extension("csv")
}

/// Writes the main report (stdout without `--output`) and the CSV beside it.
fn emit(config: &RunConfig, main: &str, csv: Option<String>) -> Result<(), CliError> {
    match &config.output {
        None => write_stdout(main).map_err(|e| CliError::Io(format!("stdout: {e}"))),
        Some(path) => {
            let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
            fs::write(path, main).map_err(io)?;
            if let Some(csv) = csv {
                let cp = csv_path(path);
                fs::write(&cp, csv).map_err(|e| CliError::Io(format!("{}: {e}", cp.display())))?;
            }
            Ok(())
        }
    }
}

fn csv_text<R: Serialize>(rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

pub fn cmd_index(config: &RunConfig) -> Result<(), CliError> {
    let comps: Vec<FixedComponentSpec> = parse_json(&required_input(config)?)?;
    let report = lefschetz::index(&comps)?;
    emit(config, &to_json(&report), None)
}

/// Geometry stanza plus the cutoff override.
fn geometry(config: &RunConfig, stanza: &GeometryStanza) -> Result<ModelGeometry, CliError> {
    let mut stanza = stanza.clone();
    if let Some(k) = config.cutoff {
        stanza.cutoff = k;
    }
    Ok(stanza.build()?)
}

#[derive(Debug, Serialize)]
struct HeatRow {
    t: f64,
    supertrace: f64,
    tail_bound: f64,
}

#[derive(Debug, Serialize)]
struct SpectralReport {
    geometry: GeometryStanza,
    index: f64,
    index_exact: String,
    curve: Vec<(f64, f64)>,
    spread: f64,
    constancy_tolerance: f64,
    constant: bool,
    matches_index: bool,
    localization: LocalizationSummary,
}

#[derive(Debug, Serialize)]
struct LocalizationSummary {
    eps: f64,
    t_large: f64,
    t_small: f64,
    outside_mass_large: f64,
    outside_mass_small: f64,
    ratio: f64,
}

pub const DEFAULT_SPECTRAL_TOLERANCE: f64 = 1e-10;
const INDEX_TOLERANCE: f64 = 1e-8;
const LOCALIZATION_EPS: f64 = 0.3;
const OUTSIDE_PANELS: usize = 32;

pub fn cmd_spectral(config: &RunConfig) -> Result<(), CliError> {
    let stanza: GeometryStanza = parse_json(&required_input(config)?)?;
    let geom = geometry(config, &stanza)?;
    let times = config
        .t_grid
        .clone()
        .unwrap_or_else(|| log_spaced_grid(0.05, 1.0, 10));
    let rows: Vec<HeatRow> = times
        .iter()
        .map(|&t| {
            let h = heat_supertrace(&geom, t);
            HeatRow {
                t,
                supertrace: h.value,
                tail_bound: h.tail_bound,
            }
        })
        .collect();
    let report = lefschetz::index(geom.fixed_components())?;
    let curve: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.supertrace)).collect();
    let spread = spectral::HeatCurve { samples: curve.clone() }.spread();
    let tolerance = config.tolerance.unwrap_or(DEFAULT_SPECTRAL_TOLERANCE);
    let (t_large, t_small) = times
        .iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &t| (hi.max(t), lo.min(t)));
    let outside_mass_large = outside_mass(&geom, LOCALIZATION_EPS, t_large, OUTSIDE_PANELS);
    let outside_mass_small = outside_mass(&geom, LOCALIZATION_EPS, t_small, OUTSIDE_PANELS);
    let summary = SpectralReport {
        geometry: geom.stanza().clone(),
        index: report.total,
        index_exact: report.total_exact.clone(),
        matches_index: curve.iter().all(|(_, v)| (v - report.total).abs() <= INDEX_TOLERANCE),
        curve,
        spread,
        constancy_tolerance: tolerance,
        constant: spread <= tolerance,
        localization: LocalizationSummary {
            eps: LOCALIZATION_EPS,
            t_large,
            t_small,
            outside_mass_large,
            outside_mass_small,
            ratio: outside_mass_large / outside_mass_small,
        },
    };
    emit(config, &to_json(&summary), Some(csv_text(&rows)))
}

/// JSON run descriptor of the `jlo` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JloRun {
    pub geometry: GeometryStanza,
    /// `f^0, ..., f^k`
    pub functions: Vec<FunctionSpec>,
    /// Optional consistency check against `functions.len() - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    /// Extrapolation variable `h = t^exponent`.
    #[serde(default = "default_exponent")]
    pub extrapolation_exponent: f64,
    /// Relative tolerance of the limit comparison (absolute when the
    /// predicted limit vanishes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Non-monotone oscillation of the t-curve above this is an error.
    #[serde(default = "default_noise")]
    pub noise_tolerance: f64,
    /// Trapezoid points per fixed-component direction for the local formula.
    #[serde(default = "default_rhs_grid")]
    pub rhs_grid: usize,
}

fn default_exponent() -> f64 {
    0.5
}

fn default_noise() -> f64 {
    1e-6
}

fn default_rhs_grid() -> usize {
    64
}

pub const DEFAULT_JLO_T_GRID: [f64; 3] = [0.4, 0.2, 0.1];
pub const DEFAULT_JLO_TOLERANCE: f64 = 0.01;

#[derive(Debug, Serialize)]
struct JloRow {
    t: f64,
    re: f64,
    im: f64,
    quadrature_error: f64,
}

#[derive(Debug, Serialize)]
pub struct JloReport {
    pub k: usize,
    pub cutoff: u32,
    pub tau_invariant: bool,
    pub warnings: Vec<String>,
    pub curve: Vec<JloResult>,
    pub extrapolation: Extrapolation,
    pub rhs: Complex64,
    pub abs_error: f64,
    pub rel_error: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Runs a JLO descriptor: t-curve, extrapolation and local limit.
pub fn run_jlo(run: &JloRun, config: &RunConfig) -> Result<JloReport, CliError> {
    let geom = geometry(config, &run.geometry)?;
    if run.functions.is_empty() {
        return Err(JloError::NoFunctions.into());
    }
    let k = run.functions.len() - 1;
    if let Some(declared) = run.k {
        if declared != k {
            return Err(CliError::Validation(format!(
                "k = {declared} but {} functions were given",
                run.functions.len()
            )));
        }
    }
    let mut quad = run.quadrature.unwrap_or_default();
    if let Some(n) = config.quad_nodes {
        quad.nodes = n;
    }
    let times = config
        .t_grid
        .clone()
        .or_else(|| run.t_grid.clone())
        .unwrap_or_else(|| DEFAULT_JLO_T_GRID.to_vec());
    let mut warnings = Vec::new();
    if run.functions.iter().any(|f| !f.is_real()) {
        warnings.push("some functions are not real-valued".to_string());
    }
    let curve = times
        .iter()
        .map(|&t| jlo::jlo_ch_k(&geom, &run.functions, t, quad))
        .collect::<Result<Vec<_>, _>>()?;
    let tau_invariant = curve.iter().all(|r| r.tau_invariant);
    if !tau_invariant {
        warnings.push("functions are not invariant under the involution; the limit formula is applied regardless".to_string());
    }
    let samples: Vec<(f64, Complex64)> = curve.iter().map(|r| (r.t, r.value)).collect();
    let extrapolation = jlo::extrapolate_to_zero(&samples, run.extrapolation_exponent, run.noise_tolerance)?;
    let rhs = jlo::limit_rhs(geom.fixed_components(), &run.functions, k, run.rhs_grid)?;
    let tolerance = config
        .tolerance
        .or(run.tolerance)
        .unwrap_or(DEFAULT_JLO_TOLERANCE);
    let abs_error = (extrapolation.value - rhs).norm();
    let rel_error = (rhs.norm() > 1e-12).then(|| abs_error / rhs.norm());
    let pass = match rel_error {
        Some(r) => r <= tolerance,
        None => abs_error <= tolerance,
    };
    Ok(JloReport {
        k,
        cutoff: geom.cutoff(),
        tau_invariant,
        warnings,
        curve,
        extrapolation,
        rhs,
        abs_error,
        rel_error,
        tolerance,
        pass,
    })
}

pub fn cmd_jlo(config: &RunConfig) -> Result<(), CliError> {
    let run: JloRun = parse_json(&required_input(config)?)?;
    let report = run_jlo(&run, config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let rows: Vec<JloRow> = report
        .curve
        .iter()
        .map(|r| JloRow {
            t: r.t,
            re: r.value.re,
            im: r.value.im,
            quadrature_error: r.quadrature_error,
        })
        .collect();
    emit(config, &to_json(&report), Some(csv_text(&rows)))
}

/// Options of the `mehler` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MehlerRun {
    #[serde(default = "default_a_values")]
    pub a_values: Vec<f64>,
    #[serde(default = "default_mehler_times")]
    pub t_values: Vec<f64>,
    /// Grid `|y|_∞ <= y_max` with spacing `y_step`.
    #[serde(default = "default_y_max")]
    pub y_max: f64,
    #[serde(default = "default_y_step")]
    pub y_step: f64,
    /// Curvature values `x_s` for the trigonometric form, evaluated at `y = 0`.
    #[serde(default)]
    pub curvature: Vec<f64>,
}

impl Default for MehlerRun {
    fn default() -> Self {
        MehlerRun {
            a_values: default_a_values(),
            t_values: default_mehler_times(),
            y_max: default_y_max(),
            y_step: default_y_step(),
            curvature: Vec::new(),
        }
    }
}

fn default_a_values() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_mehler_times() -> Vec<f64> {
    vec![0.1, 0.5, 1.0]
}

fn default_y_max() -> f64 {
    2.0
}

fn default_y_step() -> f64 {
    0.25
}

pub const DEFAULT_MEHLER_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct MehlerRow {
    pub a: f64,
    pub t: f64,
    pub y1: f64,
    pub y2: f64,
    pub closed_form: f64,
    pub reference: f64,
    pub abs_error: f64,
}

#[derive(Debug, Serialize)]
pub struct MehlerReport {
    pub points: usize,
    pub max_error: f64,
    /// `(a, max error)`; `a = 0` is compared with the flat Gaussian.
    pub max_error_by_a: Vec<(f64, f64)>,
    pub curvature: Vec<CurvatureRow>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CurvatureRow {
    pub x_s: f64,
    pub t: f64,
    pub density_at_origin: f64,
}

/// Symmetric grid `-y_max, ..., y_max` with spacing `step`.
pub fn symmetric_grid(y_max: f64, step: f64) -> Vec<f64> {
    let n = (y_max / step).round() as i64;
    (-n..=n).map(|i| i as f64 * step).collect()
}

pub fn run_mehler(run: &MehlerRun, config: &RunConfig) -> Result<(MehlerReport, Vec<MehlerRow>), CliError> {
    if !(run.y_step > 0.0 && run.y_max >= 0.0) {
        return Err(CliError::Validation("y_step must be positive and y_max non-negative".into()));
    }
    let times = config.t_grid.clone().unwrap_or_else(|| run.t_values.clone());
    let ys = symmetric_grid(run.y_max, run.y_step);
    let mut rows = Vec::new();
    let mut by_a = Vec::new();
    for &a in &run.a_values {
        let mut worst: f64 = 0.0;
        for &t in &times {
            for &y1 in &ys {
                for &y2 in &ys {
                    let y = [y1, y2];
                    let closed_form = mehler::mehler_density(a, y, t)?;
                    let reference = if a == 0.0 {
                        mehler::flat_gaussian(y, t)
                    } else {
                        mehler::hermite_heat_oracle(a, y, t)?
                    };
                    let abs_error = (closed_form - reference).abs();
                    worst = worst.max(abs_error);
                    rows.push(MehlerRow {
                        a,
                        t,
                        y1,
                        y2,
                        closed_form,
                        reference,
                        abs_error,
                    });
                }
            }
        }
        by_a.push((a, worst));
    }
    let mut curvature = Vec::new();
    for &x_s in &run.curvature {
        for &t in &times {
            curvature.push(CurvatureRow {
                x_s,
                t,
                density_at_origin: mehler::mehler_density_curvature(x_s, [0.0, 0.0], t)?,
            });
        }
    }
    let max_error = by_a.iter().map(|p| p.1).fold(0.0, f64::max);
    let tolerance = config.tolerance.unwrap_or(DEFAULT_MEHLER_TOLERANCE);
    Ok((
        MehlerReport {
            points: rows.len(),
            max_error,
            max_error_by_a: by_a,
            curvature,
            tolerance,
            pass: max_error <= tolerance,
        },
        rows,
    ))
}

pub fn cmd_mehler(config: &RunConfig) -> Result<(), CliError> {
    let run = match read_input(config)? {
        Some(text) => parse_json(&text)?,
        None => MehlerRun::default(),
    };
    let (report, rows) = run_mehler(&run, config)?;
    emit(config, &to_json(&report), Some(csv_text(&rows)))
}

/// Input of the `localize` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizeRun {
    pub geometry: GeometryStanza,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Sample points of the density along the reflected coordinate.
    #[serde(default = "default_points")]
    pub points: usize,
    /// Gauss-Legendre panels per interval for the outside mass.
    #[serde(default = "default_panels")]
    pub panels: usize,
}

fn default_eps() -> f64 {
    LOCALIZATION_EPS
}

fn default_points() -> usize {
    64
}

fn default_panels() -> usize {
    OUTSIDE_PANELS
}

pub const DEFAULT_LOCALIZE_T_GRID: [f64; 4] = [0.5, 0.2, 0.1, 0.05];

#[derive(Debug, Serialize)]
struct DensityRow {
    t: f64,
    x: f64,
    density: f64,
}

#[derive(Debug, Serialize)]
pub struct MassRow {
    pub t: f64,
    pub outside_mass: f64,
    pub integral: f64,
}

#[derive(Debug, Serialize)]
pub struct LocalizeReport {
    pub eps: f64,
    pub table: Vec<MassRow>,
    pub strictly_decreasing: bool,
    /// Outside mass at the first time over the last.
    pub ratio: f64,
}

pub fn cmd_localize(config: &RunConfig) -> Result<(), CliError> {
    let run: LocalizeRun = parse_json(&required_input(config)?)?;
    if !(run.eps > 0.0 && run.eps < std::f64::consts::FRAC_PI_2) || run.points == 0 || run.panels == 0 {
        return Err(CliError::Validation(
            "eps must lie in (0, pi/2); points and panels must be positive".into(),
        ));
    }
    let geom = geometry(config, &run.geometry)?;
    let times = config
        .t_grid
        .clone()
        .unwrap_or_else(|| DEFAULT_LOCALIZE_T_GRID.to_vec());
    let axis = geom.reflection_axis();
    let h = 2.0 * std::f64::consts::PI / run.points as f64;
    let mut density = Vec::new();
    let mut table = Vec::new();
    for &t in &times {
        let mut x = vec![0.0; geom.ambient_dim()];
        for j in 0..run.points {
            x[axis] = j as f64 * h;
            density.push(DensityRow {
                t,
                x: x[axis],
                density: local_density(&geom, &x, t),
            });
        }
        table.push(MassRow {
            t,
            outside_mass: outside_mass(&geom, run.eps, t, run.panels),
            integral: integrate_density(&geom, t, run.points),
        });
    }
    let strictly_decreasing = table.windows(2).all(|w| w[1].outside_mass < w[0].outside_mass);
    let ratio = table.first().map(|r| r.outside_mass).unwrap_or(0.0)
        / table.last().map(|r| r.outside_mass).unwrap_or(1.0);
    let report = LocalizeReport {
        eps: run.eps,
        table,
        strictly_decreasing,
        ratio,
    };
    emit(config, &to_json(&report), Some(csv_text(&density)))
}

/// Input of the `series` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRun {
    /// `n'` tangent roots (`dim F = 2n'`).
    #[serde(default = "one")]
    pub n_prime: usize,
    /// `m` normal roots (`codim F = 2m + 1`).
    #[serde(default = "one")]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    /// Any of `ahat`, `ch_delta`, `ch_delta_inverse`, `density`,
    /// `density_pontryagin`.
    #[serde(default = "default_classes")]
    pub classes: Vec<String>,
}

impl Default for SeriesRun {
    fn default() -> Self {
        SeriesRun {
            n_prime: 1,
            m: 1,
            cap: None,
            classes: default_classes(),
        }
    }
}

fn one() -> usize {
    1
}

fn default_classes() -> Vec<String> {
    ["ahat", "ch_delta", "ch_delta_inverse", "density"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Plain-text expansions, one block per requested class.
pub fn series_text(run: &SeriesRun, cap_override: Option<u32>) -> Result<String, CliError> {
    let roots = RootSet::new(run.n_prime, run.m);
    let cap = cap_override.or(run.cap).unwrap_or_else(|| roots.default_cap());
    let mut out = String::new();
    for class in &run.classes {
        let body = match class.as_str() {
            "ahat" => charclass::ahat_series(&roots, cap).to_string(),
            "ch_delta" => charclass::ch_delta(&roots, cap).to_string(),
            "ch_delta_inverse" => charclass::ch_delta_inverse(&roots, cap).to_string(),
            "density" => charclass::local_density(&roots, cap).to_string(),
            "density_pontryagin" => {
                charclass::roots_to_pontryagin(&charclass::local_density(&roots, cap), &roots)
                    .map_err(|e| CliError::Validation(e.to_string()))?
                    .to_string()
            }
            other => {
                return Err(CliError::Validation(format!("unknown class `{other}`")));
            }
        };
        out.push_str(&format!("# {class} n'={} m={} cap={cap}\n", run.n_prime, run.m));
        out.push_str(&body);
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_series(config: &RunConfig) -> Result<(), CliError> {
    let run = match read_input(config)? {
        Some(text) => parse_json(&text)?,
        None => SeriesRun::default(),
    };
    emit(config, &series_text(&run, config.cap)?, None)
}
