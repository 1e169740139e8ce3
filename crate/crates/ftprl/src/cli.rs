//! Command-line front end: `run`, `bound`, `compare`, and `gen` subcommands
//! over the library. Configuration comes from an optional key-value file plus
//! flag overrides; reports are JSON on stdout or `--out`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure
//! (infeasible iterate or non-finite arithmetic).

use crate::bounds::{
    posthoc_const_sphere, posthoc_diag_box, posthoc_fullpsd_sphere, posthoc_lp_diag,
    transformed_grad_sq, PosthocOptimizer, PosthocResult,
};
use crate::learner::{LearnerConfig, LearnerError, OgdSchedule, Variant};
use crate::linalg::{SymPd, Vector};
use crate::problems::{bad_family_instance, GeneratorSpec, GradientTrace};
use crate::runner::{run_trace, RegretReport, RunError};
use crate::set::FeasibleSet;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Infeasible { .. } | RunError::NonFiniteLoss { .. } => {
                CliError::Numeric(e.to_string())
            }
            RunError::Learner(LearnerError::NumericFailure(_)) => CliError::Numeric(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ftprl",
    about = "Online convex optimization with adaptive quadratic regularization",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one learner over a trace and emit a JSON regret report.
    Run(RunArgs),
    /// Compute a post-hoc optimal bound for a trace on a set.
    Bound(BoundArgs),
    /// Run several learners on the same instance, side by side.
    Compare(RunArgs),
    /// Generate a gradient trace to a CSV file.
    Gen(GenArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Learner: diag | const | scale | ogd[:eta=..|:invsqrt=..]. Repeat or
    /// comma-separate for `compare`.
    #[arg(long)]
    learner: Vec<String>,
    /// Feasible set, e.g. "box:-0.5..0.5,-0.5..0.5", "l2ball:r=1;n=2",
    /// "lpball:p=1.5;r=1;n=3", "ellipsoid:diag=1,2;p=2".
    #[arg(long)]
    set: Option<String>,
    /// Gradient trace CSV (alternative to --generator).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Generator, e.g. "heavytail:alpha=1.5;n=100", "randomsphere:n=5",
    /// "quaddrift:centers=4;n=3", "badfamily[:blocks=K]".
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rounds for generated traces.
    #[arg(long)]
    rounds: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stream per-round CSV (t,loss,regret,B_R) to this path.
    #[arg(long)]
    per_round_csv: Option<PathBuf>,
    /// Emit every k-th row of the per-round CSV.
    #[arg(long)]
    sample_every: Option<usize>,
    /// Post-hoc family for `bound`: const | diag | full.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    epsilon_seed: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct BoundArgs {
    #[command(flatten)]
    common: RunArgs,
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Output trace path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses argv and executes; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.cmd {
        Cmd::Run(args) => cmd_run(&args),
        Cmd::Bound(args) => cmd_bound(&args.common),
        Cmd::Compare(args) => cmd_compare(&args),
        Cmd::Gen(args) => cmd_gen(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

// ---------------------------------------------------------------------------
// configuration resolution
// ---------------------------------------------------------------------------

/// Fully resolved experiment settings: file config overridden by flags.
#[derive(Debug, Clone, Default)]
struct Resolved {
    learners: Vec<String>,
    set: Option<String>,
    trace: Option<PathBuf>,
    generator: Option<String>,
    seed: u64,
    rounds: Option<usize>,
    out: Option<PathBuf>,
    per_round_csv: Option<PathBuf>,
    sample_every: usize,
    family: Option<String>,
    epsilon_seed: f64,
}

const CONFIG_KEYS: &[&str] = &[
    "learner",
    "set",
    "trace",
    "generator",
    "seed",
    "rounds",
    "out",
    "per_round_csv",
    "sample_every",
    "family",
    "epsilon_seed",
];

fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "config {} line {}: expected `key = value`",
                path.display(),
                idx + 1
            ))
        })?;
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return config_err(format!(
                "config {} line {}: unknown key `{key}` (expected one of {})",
                path.display(),
                idx + 1,
                CONFIG_KEYS.join(", ")
            ));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn resolve(args: &RunArgs) -> Result<Resolved, CliError> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let mut r = Resolved {
        sample_every: 1,
        epsilon_seed: 1e-6,
        ..Resolved::default()
    };
    if let Some(v) = file.get("learner") {
        r.learners = v.split(',').map(|s| s.trim().to_string()).collect();
    }
    if !args.learner.is_empty() {
        r.learners = args
            .learner
            .iter()
            .flat_map(|s| s.split(','))
            .map(|s| s.trim().to_string())
            .collect();
    }
    r.set = args.set.clone().or_else(|| file.get("set").cloned());
    r.trace = args
        .trace
        .clone()
        .or_else(|| file.get("trace").map(PathBuf::from));
    r.generator = args
        .generator
        .clone()
        .or_else(|| file.get("generator").cloned());
    r.seed = match (&args.seed, file.get("seed")) {
        (Some(s), _) => *s,
        (None, Some(s)) => s
            .parse()
            .map_err(|_| CliError::Config(format!("seed: `{s}` is not an integer")))?,
        _ => 0,
    };
    r.rounds = match (&args.rounds, file.get("rounds")) {
        (Some(v), _) => Some(*v),
        (None, Some(s)) => Some(
            s.parse()
                .map_err(|_| CliError::Config(format!("rounds: `{s}` is not an integer")))?,
        ),
        _ => None,
    };
    r.out = args.out.clone().or_else(|| file.get("out").map(PathBuf::from));
    r.per_round_csv = args
        .per_round_csv
        .clone()
        .or_else(|| file.get("per_round_csv").map(PathBuf::from));
    r.sample_every = match (&args.sample_every, file.get("sample_every")) {
        (Some(v), _) => *v,
        (None, Some(s)) => s
            .parse()
            .map_err(|_| CliError::Config(format!("sample_every: `{s}` is not an integer")))?,
        _ => 1,
    };
    if r.sample_every == 0 {
        return config_err("sample_every must be at least 1");
    }
    r.family = args.family.clone().or_else(|| file.get("family").cloned());
    r.epsilon_seed = match (&args.epsilon_seed, file.get("epsilon_seed")) {
        (Some(v), _) => *v,
        (None, Some(s)) => s
            .parse()
            .map_err(|_| CliError::Config(format!("epsilon_seed: `{s}` is not a number")))?,
        _ => 1e-6,
    };
    if !r.epsilon_seed.is_finite() || r.epsilon_seed < 0.0 {
        return config_err(format!(
            "epsilon_seed: must be nonnegative and finite, got {}",
            r.epsilon_seed
        ));
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// grammar parsers
// ---------------------------------------------------------------------------

fn parse_params<'a>(body: &'a str, context: &str) -> Result<BTreeMap<&'a str, &'a str>, CliError> {
    let mut map = BTreeMap::new();
    for part in body.split(';').filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("{context}: expected key=value, got `{part}`")))?;
        map.insert(k.trim(), v.trim());
    }
    Ok(map)
}

fn param_f64(map: &BTreeMap<&str, &str>, key: &str, context: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => {
            if v.eq_ignore_ascii_case("inf") || v.eq_ignore_ascii_case("infinity") {
                return Ok(Some(f64::INFINITY));
            }
            v.parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{context}: `{key}={v}` is not a number")))
        }
    }
}

fn param_usize(
    map: &BTreeMap<&str, &str>,
    key: &str,
    context: &str,
) -> Result<Option<usize>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{context}: `{key}={v}` is not an integer"))),
    }
}

pub fn parse_set(text: &str) -> Result<FeasibleSet, CliError> {
    let (kind, body) = text.split_once(':').unwrap_or((text, ""));
    match kind {
        "box" => {
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for (i, range) in body.split(',').enumerate() {
                let (a, b) = range.split_once("..").ok_or_else(|| {
                    CliError::Config(format!(
                        "--set box: coordinate {i}: expected lo..hi, got `{range}`"
                    ))
                })?;
                let a: f64 = a.trim().parse().map_err(|_| {
                    CliError::Config(format!("--set box: `{a}` is not a number"))
                })?;
                let b: f64 = b.trim().parse().map_err(|_| {
                    CliError::Config(format!("--set box: `{b}` is not a number"))
                })?;
                lo.push(a);
                hi.push(b);
            }
            let lo = Vector::new(lo)
                .map_err(|e| CliError::Config(format!("--set box: {e}")))?;
            let hi = Vector::new(hi)
                .map_err(|e| CliError::Config(format!("--set box: {e}")))?;
            FeasibleSet::box_set(lo, hi).map_err(|e| CliError::Config(format!("--set box: {e}")))
        }
        "l2ball" => {
            let p = parse_params(body, "--set l2ball")?;
            let r = param_f64(&p, "r", "--set l2ball")?
                .ok_or_else(|| CliError::Config("--set l2ball: missing r=<radius>".into()))?;
            let n = param_usize(&p, "n", "--set l2ball")?
                .ok_or_else(|| CliError::Config("--set l2ball: missing n=<dim>".into()))?;
            FeasibleSet::l2_ball(n, r).map_err(|e| CliError::Config(format!("--set l2ball: {e}")))
        }
        "lpball" => {
            let params = parse_params(body, "--set lpball")?;
            let p = param_f64(&params, "p", "--set lpball")?
                .ok_or_else(|| CliError::Config("--set lpball: missing p=<exponent>".into()))?;
            let r = param_f64(&params, "r", "--set lpball")?
                .ok_or_else(|| CliError::Config("--set lpball: missing r=<radius>".into()))?;
            let n = param_usize(&params, "n", "--set lpball")?
                .ok_or_else(|| CliError::Config("--set lpball: missing n=<dim>".into()))?;
            FeasibleSet::lp_ball(n, p, r)
                .map_err(|e| CliError::Config(format!("--set lpball: {e}")))
        }
        "ellipsoid" => {
            let params = parse_params(body, "--set ellipsoid")?;
            let diag = params.get("diag").ok_or_else(|| {
                CliError::Config("--set ellipsoid: missing diag=<d1,d2,...>".into())
            })?;
            let mut entries = Vec::new();
            for tok in diag.split(',') {
                entries.push(tok.trim().parse().map_err(|_| {
                    CliError::Config(format!("--set ellipsoid: `{tok}` is not a number"))
                })?);
            }
            let a = SymPd::from_diag(&entries)
                .map_err(|e| CliError::Config(format!("--set ellipsoid: {e}")))?;
            let p = param_f64(&params, "p", "--set ellipsoid")?.unwrap_or(2.0);
            FeasibleSet::transformed_ball(a, p)
                .map_err(|e| CliError::Config(format!("--set ellipsoid: {e}")))
        }
        other => config_err(format!(
            "--set: unknown kind `{other}` (expected box, l2ball, lpball, ellipsoid)"
        )),
    }
}

pub fn parse_learner(text: &str) -> Result<(Variant, OgdSchedule), CliError> {
    let (name, body) = text.split_once(':').unwrap_or((text, ""));
    let variant = match name {
        "diag" => Variant::Diag,
        "const" => Variant::Const,
        "scale" => Variant::Scale,
        "ogd" => Variant::Ogd,
        other => {
            return config_err(format!(
                "--learner: unknown learner `{other}` (expected diag, const, scale, ogd)"
            ))
        }
    };
    let mut schedule = OgdSchedule::AdaptiveGlobal;
    if !body.is_empty() {
        if variant != Variant::Ogd {
            return config_err(format!("--learner: `{name}` takes no parameters"));
        }
        let params = parse_params(body, "--learner ogd")?;
        if let Some(eta) = param_f64(&params, "eta", "--learner ogd")? {
            schedule = OgdSchedule::Constant(eta);
        } else if let Some(c) = param_f64(&params, "invsqrt", "--learner ogd")? {
            schedule = OgdSchedule::InvSqrtRound(c);
        } else {
            return config_err("--learner ogd: expected eta=<step> or invsqrt=<c>");
        }
    }
    Ok((variant, schedule))
}

pub fn parse_generator(
    text: &str,
    seed: u64,
    rounds: Option<usize>,
) -> Result<GeneratorSpec, CliError> {
    let (kind, body) = text.split_once(':').unwrap_or((text, ""));
    let params = parse_params(body, "--generator")?;
    let need_rounds = || {
        rounds.ok_or_else(|| {
            CliError::Config("--generator: --rounds is required for generated traces".into())
        })
    };
    match kind {
        "heavytail" => {
            let alpha = param_f64(&params, "alpha", "--generator heavytail")?
                .ok_or_else(|| CliError::Config("--generator heavytail: missing alpha".into()))?;
            let n = param_usize(&params, "n", "--generator heavytail")?
                .ok_or_else(|| CliError::Config("--generator heavytail: missing n".into()))?;
            GeneratorSpec::heavy_tail(seed, n, need_rounds()?, alpha)
                .map_err(|e| CliError::Config(format!("--generator heavytail: {e}")))
        }
        "randomsphere" => {
            let n = param_usize(&params, "n", "--generator randomsphere")?
                .ok_or_else(|| CliError::Config("--generator randomsphere: missing n".into()))?;
            GeneratorSpec::random_sphere(seed, n, need_rounds()?)
                .map_err(|e| CliError::Config(format!("--generator randomsphere: {e}")))
        }
        "quaddrift" => {
            let centers = param_usize(&params, "centers", "--generator quaddrift")?
                .ok_or_else(|| CliError::Config("--generator quaddrift: missing centers".into()))?;
            let n = param_usize(&params, "n", "--generator quaddrift")?
                .ok_or_else(|| CliError::Config("--generator quaddrift: missing n".into()))?;
            GeneratorSpec::quadratic_drift(seed, n, need_rounds()?, centers)
                .map_err(|e| CliError::Config(format!("--generator quaddrift: {e}")))
        }
        "badfamily" => {
            let blocks = param_usize(&params, "blocks", "--generator badfamily")?;
            GeneratorSpec::bad_family(seed, need_rounds()?, blocks)
                .map_err(|e| CliError::Config(format!("--generator badfamily: {e}")))
        }
        other => config_err(format!(
            "--generator: unknown kind `{other}` (expected heavytail, randomsphere, quaddrift, badfamily)"
        )),
    }
}

/// Feasible set and trace for a resolved experiment. The bad-family
/// generator supplies its own box when no set is given.
fn resolve_instance(r: &Resolved) -> Result<(FeasibleSet, GradientTrace), CliError> {
    let trace = match (&r.trace, &r.generator) {
        (Some(_), Some(_)) => {
            return config_err("--trace and --generator are mutually exclusive")
        }
        (Some(path), None) => crate::problems::read_trace(path)
            .map_err(|e| CliError::Config(format!("--trace {}: {e}", path.display())))?,
        (None, Some(gen)) => {
            let spec = parse_generator(gen, r.seed, r.rounds)?;
            if r.set.is_none() {
                if let Ok((trace, set)) = bad_family_instance(&spec) {
                    return Ok((set, trace));
                }
            }
            spec.generate()
        }
        (None, None) => return config_err("one of --trace or --generator is required"),
    };
    let set = match &r.set {
        Some(text) => parse_set(text)?,
        None => return config_err("--set is required (the badfamily generator implies its own)"),
    };
    let trace = match r.rounds {
        Some(limit) if limit < trace.rounds() => {
            GradientTrace::from_rows(trace.iter().take(limit).collect())
                .map_err(|e| CliError::Config(e.to_string()))?
        }
        _ => trace,
    };
    if trace.rounds() > 0 && trace.n() != set.dim() {
        return config_err(format!(
            "trace dimension {} does not match set dimension {}",
            trace.n(),
            set.dim()
        ));
    }
    Ok((set, trace))
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialize: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Config(format!("write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_one(
    set: &FeasibleSet,
    trace: &GradientTrace,
    learner_text: &str,
    epsilon_seed: f64,
    per_round: Option<(&Path, usize)>,
) -> Result<RegretReport, CliError> {
    let (variant, schedule) = parse_learner(learner_text)?;
    let config = LearnerConfig::new(variant, set.clone())
        .with_epsilon_seed(epsilon_seed)
        .with_ogd_schedule(schedule);
    let mut csv: Option<std::io::BufWriter<std::fs::File>> = match per_round {
        Some((path, _)) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Config(format!("--per-round-csv {}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            writeln!(w, "t,loss,regret,B_R")
                .map_err(|e| CliError::Config(format!("per-round csv: {e}")))?;
            Some(w)
        }
        None => None,
    };
    let every = per_round.map(|(_, k)| k).unwrap_or(1);
    let mut g_prefix = Vector::zeros(set.dim());
    let mut csv_err: Option<String> = None;
    let outcome = run_trace(&config, trace, |view| {
        g_prefix.add_assign(view.g);
        if let Some(w) = csv.as_mut() {
            if view.t % every == 0 {
                let comparator = set.linear_minimizer(&g_prefix);
                let regret = view.cumulative_loss - g_prefix.dot(&comparator);
                if let Err(e) = writeln!(
                    w,
                    "{},{},{},{}",
                    view.t,
                    view.loss,
                    regret,
                    view.tracker.value()
                ) {
                    csv_err.get_or_insert(e.to_string());
                }
            }
        }
    })?;
    if let Some(e) = csv_err {
        return config_err(format!("per-round csv: {e}"));
    }
    Ok(outcome.report)
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args)?;
    if r.learners.len() != 1 {
        return config_err(format!(
            "run: exactly one --learner is required, got {}",
            r.learners.len()
        ));
    }
    let (set, trace) = resolve_instance(&r)?;
    let per_round = r
        .per_round_csv
        .as_deref()
        .map(|p| (p, r.sample_every));
    let report = run_one(&set, &trace, &r.learners[0], r.epsilon_seed, per_round)?;
    emit_json(&report, r.out.as_deref())
}

/// Side-by-side output of `compare`.
#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub schema: u32,
    pub reports: Vec<RegretReport>,
    /// For ellipsoid instances: `2 D sqrt(G_T)` for the untransformed
    /// constant scheme against `4 sqrt(sum_t ||A^{-1} g_t||^2)` for the
    /// transformed one. The second is never larger.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_pair: Option<BoundPair>,
}

#[derive(Debug, Serialize)]
pub struct BoundPair {
    pub direct_const_bound: f64,
    pub transformed_bound: f64,
}

fn cmd_compare(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args)?;
    if r.learners.len() < 2 {
        return config_err(format!(
            "compare: at least two --learner values are required, got {}",
            r.learners.len()
        ));
    }
    let (set, trace) = resolve_instance(&r)?;
    // one task per learner; deterministic assembly in listed order
    let mut slots: Vec<Option<Result<RegretReport, CliError>>> =
        (0..r.learners.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for name in &r.learners {
            let set = &set;
            let trace = &trace;
            let eps = r.epsilon_seed;
            handles.push(scope.spawn(move || run_one(set, trace, name, eps, None)));
        }
        for (slot, handle) in slots.iter_mut().zip(handles) {
            *slot = Some(handle.join().expect("learner thread panicked"));
        }
    });
    let mut reports = Vec::with_capacity(slots.len());
    for slot in slots {
        reports.push(slot.expect("slot filled")?);
    }
    let bound_pair = match &set {
        FeasibleSet::TransformedBall { a, p } if *p == 2.0 => {
            let mut g_total = 0.0;
            for row in trace.iter() {
                g_total += row.dot(&row);
            }
            let g_hat = transformed_grad_sq(a, trace.iter());
            let g_hat_total: f64 = g_hat.iter().sum();
            Some(BoundPair {
                direct_const_bound: 2.0 * set.l2_diameter() * g_total.sqrt(),
                transformed_bound: 4.0 * g_hat_total.sqrt(),
            })
        }
        _ => None,
    };
    let out = CompareReport {
        schema: 1,
        reports,
        bound_pair,
    };
    emit_json(&out, r.out.as_deref())
}

/// Post-hoc bound computation for a (set, family, trace) triple.
pub fn posthoc_for(
    set: &FeasibleSet,
    family: &str,
    trace: &GradientTrace,
) -> Result<PosthocResult, CliError> {
    let n = set.dim();
    let mut g_sq = Vector::zeros(n);
    for row in trace.iter() {
        if row.dim() != n {
            return config_err(format!(
                "trace dimension {} does not match set dimension {n}",
                row.dim()
            ));
        }
        let cells = g_sq.as_mut_slice();
        for i in 0..n {
            cells[i] += row[i] * row[i];
        }
    }
    let g_total: f64 = g_sq.iter().sum();
    match family {
        "const" => posthoc_const_sphere(set.l2_diameter(), g_total)
            .map_err(|e| CliError::Config(format!("bound: {e}"))),
        "diag" => match set {
            FeasibleSet::Box { .. } => posthoc_diag_box(&set.widths(), &g_sq)
                .map_err(|e| CliError::Config(format!("bound: {e}"))),
            FeasibleSet::L2Ball { radius, .. } => {
                // unit-ball formula after rescaling gradients by the radius
                posthoc_lp_diag(2.0, &g_sq.scale(radius * radius))
                    .map_err(|e| CliError::Config(format!("bound: {e}")))
            }
            FeasibleSet::LpBall { p, radius, .. } => {
                posthoc_lp_diag(*p, &g_sq.scale(radius * radius))
                    .map_err(|e| CliError::Config(format!("bound: {e}")))
            }
            FeasibleSet::TransformedBall { a, p } => {
                let g_hat = transformed_grad_sq(a, trace.iter());
                posthoc_lp_diag(*p, &g_hat)
                    .map_err(|e| CliError::Config(format!("bound: {e}")))
            }
        },
        "full" => match set {
            FeasibleSet::L2Ball { radius, .. } => {
                posthoc_fullpsd_sphere(radius * radius * g_total)
                    .map_err(|e| CliError::Config(format!("bound: {e}")))
            }
            FeasibleSet::TransformedBall { a, p } if *p == 2.0 => {
                let g_hat = transformed_grad_sq(a, trace.iter());
                posthoc_fullpsd_sphere(g_hat.iter().sum())
                    .map_err(|e| CliError::Config(format!("bound: {e}")))
            }
            _ => config_err("full-PSD post-hoc supported only for L2 balls/ellipsoids"),
        },
        other => config_err(format!(
            "--family: unknown family `{other}` (expected const, diag, full)"
        )),
    }
}

#[derive(Debug, Serialize)]
struct BoundReport {
    schema: u32,
    family: String,
    bound: f64,
    optimizer: serde_json::Value,
}

fn cmd_bound(args: &RunArgs) -> Result<(), CliError> {
    let r = resolve(args)?;
    let family = r
        .family
        .clone()
        .ok_or_else(|| CliError::Config("--family is required for bound".into()))?;
    let (set, trace) = resolve_instance(&r)?;
    let result = posthoc_for(&set, &family, &trace)?;
    let optimizer = match &result.optimizer {
        PosthocOptimizer::Scalar(a) => serde_json::json!({ "alpha": a }),
        PosthocOptimizer::Diagonal(d) => serde_json::json!({ "diag": d.diag().as_slice() }),
    };
    let out = BoundReport {
        schema: 1,
        family,
        bound: result.bound_value,
        optimizer,
    };
    emit_json(&out, r.out.as_deref())
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let run_args = RunArgs {
        config: args.config.clone(),
        generator: args.generator.clone(),
        seed: args.seed,
        rounds: args.rounds,
        out: args.out.clone(),
        ..RunArgs::default()
    };
    let r = resolve(&run_args)?;
    let gen = r
        .generator
        .clone()
        .ok_or_else(|| CliError::Config("--generator is required for gen".into()))?;
    let spec = parse_generator(&gen, r.seed, r.rounds)?;
    let trace = spec.generate();
    match &r.out {
        Some(path) => crate::problems::write_trace(&trace, path)
            .map_err(|e| CliError::Config(format!("write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "# n={} T={}", trace.n(), trace.rounds())
                .map_err(|e| CliError::Config(e.to_string()))?;
            for row in trace.iter() {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(stdout, "{}", line.join(","))
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            Ok(())
        }
    }
}
