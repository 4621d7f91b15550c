//! Command-line driver. Every experiment is a subcommand; output is CSV or
//! newline-delimited JSON, preceded by a record of the resolved
//! configuration and the tool version.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{error::ErrorKind, ArgAction, Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::densities::{box_mass_l, PartitionSpec};
use crate::error::{Error, Result};
use crate::estimate::{collect_streams, McConfig};
use crate::gaussian::{gaussian_charfun, mp_convergence_table, s_grid, sphere_charfun_mc, sphere_charfun_quad, SphereConfig};
use crate::laplace::{analytic_laplace, mc_laplace, quasi_invariance_check, LaplaceMc};
use crate::mellin::{divergence_experiment, l_limit_study, solve_saddle, RadiusSchedule};
use crate::processes::{
    sample_dirichlet_process, sample_gamma_process, sample_lebesgue_weighted, weighted_box_mass, SeriesTag,
    DEFAULT_EPS,
};
use crate::step::StepFunction;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Draw series from the Dirichlet process, gamma process or weighted Lebesgue measure.
    Sample,
    /// Monte Carlo and exact Laplace transform of a step function.
    Laplace,
    /// Quasi-invariance of the Laplace transform under a multiplicator.
    Invariance,
    /// Weighted box masses of partition sums against the exact values.
    PartitionSums,
    /// Convergence of ln F_n(lambda)/n to L(lambda).
    Mellin,
    /// Saddle point gamma(lambda) and L(lambda).
    Saddle,
    /// Sphere characteristic functionals against the Gaussian limit.
    MpDemo,
    /// ln D_n/n along a radius schedule.
    Divergence,
    /// Exact box masses of the finite-dimensional Lebesgue measure.
    BoxMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Dirichlet,
    Gamma,
    Lebesgue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    SqrtN,
}

/// Resolved configuration of one run.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "lebesgue", version, about = "Samplers and numerical checks for sigma-finite Lebesgue measures on discrete positive measures")]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Total mass theta of the base measure.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Truncation tolerance on the discarded stick mass.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    /// Monte Carlo samples (series for `sample`).
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent random streams; samples are split evenly across them.
    #[arg(long, default_value_t = 1)]
    pub streams: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; tables default to csv, reports to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Optional key=value file pre-populating flags; flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Series law for `sample`.
    #[arg(long, value_enum, default_value_t = SeriesKind::Gamma)]
    pub kind: SeriesKind,
    /// Test function, as `v1@b0:b1,v2@b1:b2,...`.
    #[arg(long, default_value = "2@0:1")]
    pub f: String,
    /// Multiplicator, as `v1@b0:b1,...`.
    #[arg(long, default_value = "2@0:0.5,0.5@0.5:1")]
    pub a: String,
    /// Comma-separated list of lambda values.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "1")]
    pub lambda: Vec<f64>,
    /// Comma-separated dimensions for `mp-demo`.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "5,10,20,50,100,200")]
    pub n: Vec<usize>,
    /// Largest dimension for `mellin` and `divergence`.
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    /// Upper end of the |s| grid for `mp-demo`.
    #[arg(long, default_value_t = 3.0)]
    pub smax: f64,
    /// Points on the |s| grid.
    #[arg(long, default_value_t = 31)]
    pub s_points: usize,
    /// Comma-separated box sides.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "0.5,1,2")]
    pub b: Vec<f64>,
    /// Comma-separated part masses theta_1,...,theta_n; defaults to the single part theta.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub weights: Option<Vec<f64>>,
    /// Radius scale.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Radius schedule for `divergence`.
    #[arg(long, value_enum, default_value_t = ScheduleKind::Constant)]
    pub schedule: ScheduleKind,
    /// Run Laplace estimators even when their variance is infinite (min f <= 1/2).
    #[arg(long)]
    pub allow_high_variance: bool,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return bad(format!("--theta must be finite and > 0, got {}", self.theta));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("--eps must lie in (0, 1), got {}", self.eps));
        }
        if self.samples == 0 {
            return bad("--samples must be >= 1".into());
        }
        if self.streams == 0 {
            return bad("--streams must be >= 1".into());
        }
        if let Some(v) = self.lambda.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return bad(format!("--lambda values must be finite and > 0, got {v}"));
        }
        if let Some(v) = self.b.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return bad(format!("--b values must be finite and > 0, got {v}"));
        }
        if !(self.r.is_finite() && self.r > 0.0) {
            return bad(format!("--r must be finite and > 0, got {}", self.r));
        }
        Ok(())
    }

    fn mc(&self) -> Result<McConfig> {
        McConfig::new(self.samples, self.seed, self.streams)
    }

    fn laplace_mc(&self) -> Result<LaplaceMc> {
        Ok(LaplaceMc { mc: self.mc()?, eps: self.eps, allow_high_variance: self.allow_high_variance })
    }

    fn partition(&self) -> Result<PartitionSpec> {
        match &self.weights {
            Some(w) => PartitionSpec::new(w.clone()),
            None => PartitionSpec::single(self.theta),
        }
    }

    fn resolved_format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::PartitionSums | Command::Mellin | Command::MpDemo | Command::Divergence => Format::Csv,
            _ => Format::Json,
        })
    }
}

/// Records of one run, rendered in either format.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    /// Extra JSON-only records.
    notes: Vec<Value>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: vec![], notes: vec![] }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, cfg: &RunConfig) -> String {
        let config = serde_json::to_value(cfg).expect("config serializes");
        let mut out = String::new();
        match cfg.resolved_format() {
            Format::Json => {
                let header = json!({"tool": "lebesgue", "version": VERSION, "config": config});
                writeln!(out, "{header}").unwrap();
                for row in &self.rows {
                    let obj: serde_json::Map<String, Value> =
                        self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.clone())).collect();
                    writeln!(out, "{}", Value::Object(obj)).unwrap();
                }
                for note in &self.notes {
                    writeln!(out, "{note}").unwrap();
                }
            }
            Format::Csv => {
                writeln!(out, "# lebesgue {VERSION} config: {config}").unwrap();
                writeln!(out, "{}", self.columns.join(",")).unwrap();
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    writeln!(out, "{}", cells.join(",")).unwrap();
                }
            }
        }
        out
    }
}

fn csv_cell(v: &Value) -> String {
    let text = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text
    }
}

fn num(x: f64) -> Value {
    json!(x)
}

fn parse_step(text: &str, flag: &str) -> Result<StepFunction> {
    text.parse().map_err(|e: Error| match e {
        Error::Parse(m) => Error::Parse(format!("{flag}: {m}")),
        other => other,
    })
}

fn run_sample(cfg: &RunConfig) -> Result<Table> {
    let mc = cfg.mc()?;
    let series = collect_streams(&mc, |rng, stream_id| {
        let tag = SeriesTag { seed: cfg.seed, stream_id };
        match cfg.kind {
            SeriesKind::Dirichlet => sample_dirichlet_process(cfg.theta, cfg.eps, tag, rng),
            SeriesKind::Gamma => sample_gamma_process(cfg.theta, cfg.eps, tag, rng),
            SeriesKind::Lebesgue => sample_lebesgue_weighted(cfg.theta, cfg.eps, tag, rng),
        }
    })?;
    match cfg.resolved_format() {
        Format::Json => {
            let mut t = Table::new(&[]);
            t.notes = series.iter().map(|s| serde_json::to_value(s).expect("series serializes")).collect();
            Ok(t)
        }
        Format::Csv => {
            let mut t = Table::new(&[
                "series", "stream_id", "rank", "mass", "location", "total_mass", "tail_bound", "log_weight",
            ]);
            for (i, s) in series.iter().enumerate() {
                for (k, (c, x)) in s.masses.iter().zip(&s.locations).enumerate() {
                    t.push(vec![
                        json!(i),
                        json!(s.stream_id),
                        json!(k + 1),
                        num(*c),
                        num(*x),
                        s.total_mass.map_or(Value::Null, num),
                        num(s.tail_bound),
                        num(s.log_weight),
                    ]);
                }
            }
            Ok(t)
        }
    }
}

fn laplace_config(cfg: &RunConfig) -> Value {
    json!({
        "theta": cfg.theta, "f": cfg.f, "samples": cfg.samples, "seed": cfg.seed,
        "streams": cfg.streams, "eps": cfg.eps,
    })
}

fn run_laplace(cfg: &RunConfig) -> Result<Table> {
    let f = parse_step(&cfg.f, "--f")?;
    let analytic = analytic_laplace(cfg.theta, &f)?;
    let r = mc_laplace(cfg.theta, &f, &cfg.laplace_mc()?)?;
    let mut t = Table::new(&["config", "estimate", "stderr", "analytic", "z_score", "n_samples"]);
    t.push(vec![laplace_config(cfg), num(r.estimate), num(r.stderr), num(analytic), num(r.z_score(analytic)), json!(r.n_samples)]);
    Ok(t)
}

fn run_invariance(cfg: &RunConfig) -> Result<Table> {
    let f = parse_step(&cfg.f, "--f")?;
    let a = parse_step(&cfg.a, "--a")?;
    let r = quasi_invariance_check(cfg.theta, &a, &f, &cfg.laplace_mc()?)?;
    let mut config = laplace_config(cfg);
    config["a"] = json!(cfg.a);
    let mut t = Table::new(&[
        "config", "phi_a", "analytic_f", "analytic", "analytic_residual", "estimate", "stderr", "z_score",
    ]);
    t.push(vec![
        config,
        num(r.phi_a),
        num(r.analytic_f),
        num(r.analytic_af),
        num(r.analytic_residual),
        num(r.mc_af.estimate),
        num(r.mc_af.stderr),
        num(r.z_score),
    ]);
    Ok(t)
}

fn run_partition_sums(cfg: &RunConfig) -> Result<Table> {
    let spec = cfg.partition()?;
    let rows = weighted_box_mass(&spec, &cfg.b, cfg.eps, &cfg.mc()?)?;
    let mut t = Table::new(&["b", "estimate", "stderr", "exact", "z_score"]);
    for r in rows {
        t.push(vec![num(r.b), num(r.weighted.estimate), num(r.weighted.stderr), num(r.exact), num(r.z_score)]);
    }
    Ok(t)
}

fn run_mellin(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["n", "lambda", "r", "gamma", "L", "lnFn_over_n", "gap"]);
    for &lambda in &cfg.lambda {
        let study = l_limit_study(lambda * cfg.r, cfg.n_max)?;
        for row in &study.rows {
            t.push(vec![
                json!(row.n),
                num(lambda),
                num(cfg.r),
                num(study.saddle.gamma),
                num(study.saddle.l_value),
                num(row.ln_f_over_n),
                num(row.gap),
            ]);
        }
        t.notes.push(json!({
            "lambda": lambda, "r": cfg.r, "L": study.saddle.l_value, "L_ratio": study.saddle.l_ratio,
            "extrapolated": study.extrapolated, "extrapolated_gap": study.extrapolated_gap,
            "envelope_c": study.envelope_c, "envelope_ok": study.envelope_ok, "monotone": study.monotone,
        }));
    }
    Ok(t)
}

fn run_saddle(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["lambda", "gamma", "L", "L_ratio", "curvature", "residual"]);
    for &lambda in &cfg.lambda {
        let s = solve_saddle(lambda)?;
        t.push(vec![num(lambda), num(s.gamma), num(s.l_value), num(s.l_ratio), num(s.curvature), num(s.residual)]);
    }
    Ok(t)
}

fn run_mp_demo(cfg: &RunConfig) -> Result<Table> {
    let grid = s_grid(cfg.smax, cfg.s_points)?;
    let mc = cfg.mc()?;
    let mut t = Table::new(&["n", "s", "quad", "mc", "stderr", "gauss", "gap"]);
    for &n in &cfg.n {
        let sphere = SphereConfig::standard(n)?;
        for &s in &grid {
            let quad = sphere_charfun_quad(&sphere, s)?;
            let est = sphere_charfun_mc(&sphere, s, &mc)?;
            let gauss = gaussian_charfun(s);
            t.push(vec![json!(n), num(s), num(quad), num(est.estimate), num(est.stderr), num(gauss), num((quad - gauss).abs())]);
        }
    }
    for row in mp_convergence_table(&grid, &cfg.n)? {
        t.notes.push(json!({"n": row.n, "sup_gap": row.sup_gap, "argmax_s": row.argmax_s}));
    }
    Ok(t)
}

fn run_divergence(cfg: &RunConfig) -> Result<Table> {
    let schedule = match cfg.schedule {
        ScheduleKind::Constant => RadiusSchedule::Constant { scale: cfg.r },
        ScheduleKind::SqrtN => RadiusSchedule::SqrtN { scale: cfg.r },
    };
    let ns: Vec<usize> = (1..=cfg.n_max).collect();
    let mut t = Table::new(&["n", "lambda", "r", "gamma", "L", "lnDn_over_n", "gap"]);
    for &lambda in &cfg.lambda {
        for row in divergence_experiment(lambda, &schedule, &ns)? {
            t.push(vec![json!(row.n), num(lambda), num(row.r), num(row.gamma), num(row.l_value), num(row.ln_d_over_n), num(row.gap)]);
        }
    }
    Ok(t)
}

fn run_box_mass(cfg: &RunConfig) -> Result<Table> {
    let spec = cfg.partition()?;
    let mut t = Table::new(&["weights", "b", "exact"]);
    let weights: Vec<String> = spec.weights().iter().map(|w| w.to_string()).collect();
    for &b in &cfg.b {
        t.push(vec![json!(weights.join(";")), num(b), num(box_mass_l(&spec, b)?)]);
    }
    Ok(t)
}

fn execute(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let table = match cfg.command {
        Command::Sample => run_sample(cfg)?,
        Command::Laplace => run_laplace(cfg)?,
        Command::Invariance => run_invariance(cfg)?,
        Command::PartitionSums => run_partition_sums(cfg)?,
        Command::Mellin => run_mellin(cfg)?,
        Command::Saddle => run_saddle(cfg)?,
        Command::MpDemo => run_mp_demo(cfg)?,
        Command::Divergence => run_divergence(cfg)?,
        Command::BoxMass => run_box_mass(cfg)?,
    };
    Ok(table.render(cfg))
}

/// Exit code for a library error: bad input is a usage error, failed
/// numerics are diagnostics.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Parse(_) | Error::HighVariance(_) => EXIT_USAGE,
        Error::Numerical(_) | Error::Singularity(_) => EXIT_NUMERICAL,
    }
}

/// Reads `key = value` lines into `--key value` arguments. Blank lines and
/// lines starting with `#` are skipped; boolean flags take `true`/`false`.
pub fn config_file_args(path: &Path) -> std::result::Result<Vec<OsString>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut args = vec![];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        if key == "config" || key == "command" {
            return Err(format!("{}:{}: '{key}' cannot be set from a config file", path.display(), lineno + 1));
        }
        if key == "allow-high-variance" {
            match value {
                "true" => args.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(format!("{}:{}: {key} must be true or false", path.display(), lineno + 1)),
            }
            continue;
        }
        args.push(OsString::from(format!("--{key}")));
        args.push(OsString::from(value));
    }
    Ok(args)
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut found = None;
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            found = it.next().map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
        }
    }
    found
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if args.is_empty() {
        args.push(OsString::from("lebesgue"));
    }
    if let Some(path) = find_config(&args) {
        match config_file_args(&path) {
            Ok(extra) => {
                args.splice(1..1, extra);
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                return EXIT_USAGE;
            }
        }
    }
    let cfg = match RunConfig::try_parse_from(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let output = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{output}"),
    }
    EXIT_OK
}
