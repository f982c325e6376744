//! Command-line front end.
//!
//! Every table is emitted as CSV, with `#` comment lines for the format
//! version, conventions and parameters, or as one JSON object with the same
//! field names. Exit codes: 0 success, 2 usage, 3 numerical failure, 4 oracle
//! mismatch.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, LevelFilter};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bell::Scheme;
use crate::error::Error;
use crate::experiment::{log_gain_grid, split_and_bell, threshold_sweep, Crossing, Source};
use crate::fock::check::{run_oracle_check, OracleCheckConfig, Perturbation};
use crate::optimize::{maximize_bell, sweep, BellOutcome, OptimizerConfig};
use crate::states::{husimi_single, husimi_two_mode, wigner_scs, wigner_two_mode, Family, StateSpec};
use crate::Complex64;

pub const FORMAT_VERSION: u32 = 1;

pub const CONVENTIONS: &str = "dimensionless quadrature units with alpha = (x + i p)/sqrt(2); \
S(s) = exp[(s/2)(a^2 - a^dag^2)], s > 0 squeezes Re(alpha); W and Q are densities in the complex alpha plane";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "catbell",
    version,
    about = "Bell tests with squeezed cat states in phase space"
)]
struct Cli {
    /// Read `key = value` defaults from this file; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate W and Q of a state at points.
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Maximize a Bell functional for one state.
    #[command(args_override_self = true)]
    Bell(BellArgs),
    /// Maximize a Bell functional over a (gamma, s) grid.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Fidelity and Bell thresholds of the experimental squeezed cat.
    #[command(args_override_self = true)]
    Experiment(ExperimentArgs),
    /// Compare the closed forms with the truncated Fock simulation.
    #[command(name = "oracle-check", args_override_self = true)]
    OracleCheck(OracleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here (atomically) instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StateArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s: f64,
}

#[derive(Args, Debug)]
struct OptimizerArgs {
    #[arg(long)]
    n_starts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    box_halfwidth: Option<f64>,
    #[arg(long)]
    screen_factor: Option<usize>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    state: StateArgs,
    /// `re,im` points for one mode or `a_re,a_im,b_re,b_im` for two, separated by `;`.
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "grid",
        required_unless_present = "grid"
    )]
    points: Option<String>,
    /// Square grid `min:max:n` over the mode-a point.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Fixed mode-b point `re,im` for a two-mode grid.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    b: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BellArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, value_parser = parse_scheme, default_value = "parity")]
    scheme: Scheme,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// `start:stop:n` or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    gammas: String,
    /// `start:stop:n` or a comma-separated list.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    ss: String,
    #[arg(long, value_parser = parse_scheme, default_value = "parity")]
    scheme: Scheme,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Ideal {
    Phi2,
    Sscs,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_parser = parse_scheme, default_value = "parity")]
    scheme: Scheme,
    #[arg(long, default_value_t = 1.0002)]
    g_min: f64,
    #[arg(long, default_value_t = 1.075)]
    g_max: f64,
    /// Number of gains, log-spaced in g − 1.
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Split an ideal pure state instead of sweeping the experimental model.
    #[arg(long, value_enum)]
    ideal: Option<Ideal>,
    #[arg(long, default_value_t = 2.6f64.sqrt())]
    sscs_amplitude: f64,
    #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
    sscs_s: f64,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, hide = true, value_parser = parse_family)]
    perturb_family: Option<Family>,
    #[arg(long, hide = true, default_value_t = 1e-6)]
    perturb_offset: f64,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter { .. } | Error::WrongFamily { .. } | Error::OddAtZeroAmplitude => {
                EXIT_USAGE
            }
            _ => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure {
        code: EXIT_NUMERICAL,
        message: format!("could not write output: {e}"),
    }
}

/// `start:stop:n` (inclusive, evenly spaced) or `v1,v2,...`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let bad = |what: &str| format!("invalid grid `{s}`: {what}");
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("`{t}` is not a number")))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad("expected start:stop:n"));
        };
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| bad("n must be a positive integer"))?;
        match n {
            0 => Err(bad("n must be positive")),
            1 => Ok(vec![a]),
            _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
        }
    } else {
        s.split(',').map(num).collect()
    }
}

fn parse_tuples(s: &str, width: usize) -> Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let v: Vec<f64> = t
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("invalid number `{x}` in `{t}`"))
                })
                .collect::<Result<_, _>>()?;
            if v.len() == width {
                Ok(v)
            } else {
                Err(format!("point `{t}` needs {width} comma-separated numbers"))
            }
        })
        .collect()
}

impl OptimizerArgs {
    fn config(&self) -> Result<OptimizerConfig, Failure> {
        let mut c = OptimizerConfig::default();
        if let Some(v) = self.n_starts {
            c.n_starts = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.max_iter {
            c.max_iter = v;
        }
        if let Some(v) = self.tol {
            c.local_tol = v;
        }
        if let Some(v) = self.screen_factor {
            c.screen_factor = v;
        }
        c.box_halfwidth = self.box_halfwidth;
        c.validate()?;
        Ok(c)
    }

    fn describe(&self) -> Value {
        let c = self.config().unwrap_or_default();
        json!({
            "n_starts": c.n_starts,
            "seed": c.seed,
            "max_iter": c.max_iter,
            "tol": c.local_tol,
            "box_halfwidth": c.box_halfwidth,
            "screen_factor": c.screen_factor,
            "screen_iter": c.screen_iter,
            "initial_step": c.initial_step,
        })
    }
}

/// A rendered table: name, parameters, rows and an optional summary.
struct Table<R> {
    name: &'static str,
    parameters: Value,
    rows: Vec<R>,
    summary: Option<Value>,
}

impl<R: Serialize> Table<R> {
    fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Json => {
                let mut doc = json!({
                    "tool": "catbell",
                    "format_version": FORMAT_VERSION,
                    "table": self.name,
                    "conventions": CONVENTIONS,
                    "parameters": self.parameters,
                    "rows": self.rows,
                });
                if let Some(s) = &self.summary {
                    doc["summary"] = s.clone();
                }
                let mut out = serde_json::to_string_pretty(&doc).map_err(|e| io_failure(e.into()))?;
                out.push('\n');
                Ok(out)
            }
            Format::Csv => {
                let mut out = format!(
                    "# catbell format_version={FORMAT_VERSION} table={}; {CONVENTIONS}\n# parameters: {}\n",
                    self.name, self.parameters
                );
                let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
                for row in &self.rows {
                    w.serialize(row).map_err(|e| io_failure(e.into()))?;
                }
                let body = w.into_inner().map_err(|e| io_failure(e.into_error()))?;
                out.push_str(&String::from_utf8_lossy(&body));
                if let Some(s) = &self.summary {
                    out.push_str(&format!("# summary: {s}\n"));
                }
                Ok(out)
            }
        }
    }
}

/// Write to stdout, or to `path` through a temporary file in the same
/// directory followed by a rename.
fn emit(content: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        None => {
            let mut out = io::stdout().lock();
            out.write_all(content.as_bytes()).map_err(io_failure)?;
            out.flush().map_err(io_failure)
        }
        Some(p) => {
            let dir = p
                .parent()
                .filter(|d| !d.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_failure)?;
            tmp.write_all(content.as_bytes()).map_err(io_failure)?;
            tmp.as_file().sync_all().map_err(io_failure)?;
            tmp.persist(p).map_err(|e| io_failure(e.error))?;
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct EvalRow {
    pub family: String,
    pub gamma: f64,
    pub s: f64,
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: Option<f64>,
    pub b_im: Option<f64>,
    pub wigner: f64,
    pub husimi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct BellRow {
    pub family: String,
    pub gamma: f64,
    pub s: f64,
    pub scheme: String,
    pub b: Option<f64>,
    pub signed_b: Option<f64>,
    pub a_re: Option<f64>,
    pub a_im: Option<f64>,
    pub a_prime_re: Option<f64>,
    pub a_prime_im: Option<f64>,
    pub b_set_re: Option<f64>,
    pub b_set_im: Option<f64>,
    pub b_prime_re: Option<f64>,
    pub b_prime_im: Option<f64>,
    pub starts_converged: Option<usize>,
    pub best_start: Option<usize>,
    pub error: Option<String>,
}

impl BellRow {
    fn new(family: &str, gamma: f64, s: f64, scheme: Scheme, outcome: &Result<BellOutcome, Error>) -> Self {
        let mut row = BellRow {
            family: family.to_string(),
            gamma,
            s,
            scheme: scheme.name().to_string(),
            b: None,
            signed_b: None,
            a_re: None,
            a_im: None,
            a_prime_re: None,
            a_prime_im: None,
            b_set_re: None,
            b_set_im: None,
            b_prime_re: None,
            b_prime_im: None,
            starts_converged: None,
            best_start: None,
            error: None,
        };
        match outcome {
            Ok(o) => {
                let p = o.settings.to_params();
                row.b = Some(o.value);
                row.signed_b = Some(o.signed_value);
                row.a_re = Some(p[0]);
                row.a_im = Some(p[1]);
                row.a_prime_re = Some(p[2]);
                row.a_prime_im = Some(p[3]);
                row.b_set_re = Some(p[4]);
                row.b_set_im = Some(p[5]);
                row.b_prime_re = Some(p[6]);
                row.b_prime_im = Some(p[7]);
                row.starts_converged = Some(o.starts_converged);
                row.best_start = Some(o.best_start_index);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ThresholdCsvRow {
    pub g: f64,
    pub fidelity: f64,
    pub norm_deficit: f64,
    pub scheme: String,
    pub b: f64,
    pub signed_b: f64,
    pub a_re: f64,
    pub a_im: f64,
    pub a_prime_re: f64,
    pub a_prime_im: f64,
    pub b_set_re: f64,
    pub b_set_im: f64,
    pub b_prime_re: f64,
    pub b_prime_im: f64,
}

fn cmd_eval(args: &EvalArgs) -> Result<i32, Failure> {
    let spec = StateSpec::new(args.state.family, args.state.gamma, args.state.s)?;
    let two = spec.family.is_two_mode();
    let points: Vec<(Complex64, Option<Complex64>)> = match (&args.points, &args.grid) {
        (Some(p), _) => parse_tuples(p, if two { 4 } else { 2 })
            .map_err(usage)?
            .into_iter()
            .map(|v| {
                let a = Complex64::new(v[0], v[1]);
                (a, two.then(|| Complex64::new(v[2], v[3])))
            })
            .collect(),
        (None, Some(g)) => {
            let axis = parse_grid(g).map_err(usage)?;
            let b = parse_tuples(&args.b, 2).map_err(usage)?;
            let b = b.first().map(|v| Complex64::new(v[0], v[1])).unwrap_or_default();
            axis.iter()
                .flat_map(|&re| axis.iter().map(move |&im| Complex64::new(re, im)))
                .map(|a| (a, two.then_some(b)))
                .collect()
        }
        (None, None) => return Err(usage("either --points or --grid is required")),
    };
    let mut rows = Vec::with_capacity(points.len());
    for (a, b) in points {
        let (w, q) = match b {
            Some(b) => (wigner_two_mode(&spec, a, b)?, husimi_two_mode(&spec, a, b)?),
            None => (wigner_scs(&spec, a)?, husimi_single(&spec, a)?),
        };
        rows.push(EvalRow {
            family: spec.family.name().to_string(),
            gamma: spec.gamma,
            s: spec.s,
            a_re: a.re,
            a_im: a.im,
            b_re: b.map(|z| z.re),
            b_im: b.map(|z| z.im),
            wigner: w,
            husimi: q,
        });
    }
    let table = Table {
        name: "eval",
        parameters: json!({
            "family": spec.family.name(),
            "gamma": spec.gamma,
            "s": spec.s,
        }),
        rows,
        summary: None,
    };
    emit(&table.render(args.output.format)?, args.output.output.as_deref())?;
    Ok(EXIT_OK)
}

fn cmd_bell(args: &BellArgs) -> Result<i32, Failure> {
    let spec = StateSpec::new(args.state.family, args.state.gamma, args.state.s)?;
    let config = args.optimizer.config()?;
    let outcome = maximize_bell(&spec, args.scheme, &config);
    if let Err(e) = &outcome {
        return Err(e.clone().into());
    }
    let table = Table {
        name: "bell",
        parameters: json!({
            "family": spec.family.name(),
            "gamma": spec.gamma,
            "s": spec.s,
            "scheme": args.scheme.name(),
            "optimizer": args.optimizer.describe(),
        }),
        rows: vec![BellRow::new(
            spec.family.name(),
            spec.gamma,
            spec.s,
            args.scheme,
            &outcome,
        )],
        summary: None,
    };
    emit(&table.render(args.output.format)?, args.output.output.as_deref())?;
    Ok(EXIT_OK)
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, Failure> {
    let gammas = parse_grid(&args.gammas).map_err(usage)?;
    let ss = parse_grid(&args.ss).map_err(usage)?;
    let config = args.optimizer.config()?;
    let rows = sweep(args.family, &gammas, &ss, args.scheme, &config)?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    let table = Table {
        name: "sweep",
        parameters: json!({
            "family": args.family.name(),
            "gammas": gammas,
            "ss": ss,
            "scheme": args.scheme.name(),
            "optimizer": args.optimizer.describe(),
        }),
        rows: rows
            .iter()
            .map(|r| BellRow::new(r.family.name(), r.gamma, r.s, r.scheme, &r.outcome))
            .collect(),
        summary: Some(json!({ "points": rows.len(), "failed": failed })),
    };
    emit(&table.render(args.output.format)?, args.output.output.as_deref())?;
    if failed > 0 {
        error!("{failed} of {} sweep points failed", rows.len());
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<i32, Failure> {
    let config = args.optimizer.config()?;
    if let Some(ideal) = args.ideal {
        let (source, name) = match ideal {
            Ideal::Phi2 => (Source::Phi2, "phi2"),
            Ideal::Sscs => (
                Source::Sscs {
                    amplitude: args.sscs_amplitude,
                    s: args.sscs_s,
                },
                "sscs",
            ),
        };
        let outcome = split_and_bell(source, args.scheme, &config);
        if let Err(e) = &outcome {
            return Err(e.clone().into());
        }
        let (gamma, s) = match source {
            Source::Sscs { amplitude, s } => (amplitude, s),
            _ => (0.0, 0.0),
        };
        let table = Table {
            name: "experiment-ideal",
            parameters: json!({
                "source": name,
                "scheme": args.scheme.name(),
                "sscs_amplitude": args.sscs_amplitude,
                "sscs_s": args.sscs_s,
                "optimizer": args.optimizer.describe(),
            }),
            rows: vec![BellRow::new(name, gamma, s, args.scheme, &outcome)],
            summary: None,
        };
        emit(&table.render(args.output.format)?, args.output.output.as_deref())?;
        return Ok(EXIT_OK);
    }
    let grid = log_gain_grid(args.g_min, args.g_max, args.n)?;
    let result = threshold_sweep(&grid, args.scheme, &config)?;
    let rows = result
        .rows
        .iter()
        .map(|r| {
            let p = r.outcome.settings.to_params();
            ThresholdCsvRow {
                g: r.g,
                fidelity: r.fidelity,
                norm_deficit: r.norm_deficit,
                scheme: args.scheme.name().to_string(),
                b: r.outcome.value,
                signed_b: r.outcome.signed_value,
                a_re: p[0],
                a_im: p[1],
                a_prime_re: p[2],
                a_prime_im: p[3],
                b_set_re: p[4],
                b_set_im: p[5],
                b_prime_re: p[6],
                b_prime_im: p[7],
            }
        })
        .collect();
    let code = match result.crossing {
        Crossing::NonMonotone { .. } => EXIT_NUMERICAL,
        _ => EXIT_OK,
    };
    let table = Table {
        name: "experiment",
        parameters: json!({
            "scheme": args.scheme.name(),
            "g_min": args.g_min,
            "g_max": args.g_max,
            "n": args.n,
            "optimizer": args.optimizer.describe(),
        }),
        rows,
        summary: Some(json!({ "crossing": result.crossing })),
    };
    emit(&table.render(args.output.format)?, args.output.output.as_deref())?;
    Ok(code)
}

fn cmd_oracle_check(args: &OracleArgs) -> Result<i32, Failure> {
    let config = OracleCheckConfig::default();
    let perturbation = args.perturb_family.map(|family| Perturbation {
        family,
        offset: args.perturb_offset,
    });
    let report = run_oracle_check(&config, perturbation)?;
    let code = if report.passed { EXIT_OK } else { EXIT_ORACLE };
    let content = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({
                "tool": "catbell",
                "format_version": FORMAT_VERSION,
                "table": "oracle-check",
                "conventions": CONVENTIONS,
                "report": report,
            }))
            .map_err(|e| io_failure(e.into()))?;
            s.push('\n');
            s
        }
        Format::Csv => Table {
            name: "oracle-check",
            parameters: json!({
                "tolerance": report.tolerance,
                "n_max": report.n_max,
            }),
            rows: report.families.clone(),
            summary: Some(json!({
                "comparisons": report.comparisons,
                "max_error": report.max_error,
                "passed": report.passed,
                "mismatches": report.mismatches.len(),
            })),
        }
        .render(Format::Csv)?,
    };
    emit(&content, args.output.as_deref())?;
    if !report.passed {
        if let Some(m) = report.mismatches.first() {
            error!(
                "oracle mismatch: family {} (gamma {}, s {}) {} at {:?}/{:?}: analytic {} vs oracle {}",
                m.family, m.gamma, m.s, m.quantity, m.a, m.b, m.analytic, m.oracle
            );
        }
    }
    Ok(code)
}

/// `key = value` lines to flag arguments; `#` starts a comment.
pub fn config_file_args(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
        let key = format!("--{}", k.trim().replace('_', "-"));
        match v.trim() {
            "true" => out.push(key),
            "false" => {}
            v => {
                out.push(key);
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

/// Splice the config file's arguments in front of the subcommand's own flags.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut out = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            out.push(a);
        }
    }
    if let Some(path) = path {
        let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config `{path}`: {e}"))?;
        let extra = config_file_args(&text)?;
        let sub = out
            .iter()
            .skip(1)
            .position(|a| !a.starts_with('-'))
            .map(|p| p + 2)
            .unwrap_or(out.len());
        out.splice(sub..sub, extra);
    }
    Ok(out)
}

/// Run the command line and return the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Bell(a) => cmd_bell(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-0.3,0,0.3").unwrap(), vec![-0.3, 0.0, 0.3]);
        assert_eq!(parse_grid("2:5:1").unwrap(), vec![2.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn config_lines() {
        let text = "# defaults\ngamma = 0.5\nn_starts=8 # fewer\nverbose = false\n";
        assert_eq!(
            config_file_args(text).unwrap(),
            ["--gamma", "0.5", "--n-starts", "8"]
        );
        assert!(config_file_args("gamma 0.5").is_err());
    }

    #[test]
    fn config_goes_before_command_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "gamma = 0.5\n").unwrap();
        let args: Vec<String> = [
            "catbell",
            "bell",
            "--config",
            path.to_str().unwrap(),
            "--gamma",
            "1",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let out = expand_config(args).unwrap();
        assert_eq!(out, ["catbell", "bell", "--gamma", "0.5", "--gamma", "1"]);
    }

    #[test]
    fn tuples() {
        assert_eq!(
            parse_tuples("0,0; 1,-2", 2).unwrap(),
            vec![vec![0.0, 0.0], vec![1.0, -2.0]]
        );
        assert!(parse_tuples("0,0,1", 2).is_err());
    }
}
