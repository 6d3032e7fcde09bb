//! Argument definitions and command dispatch.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cutlab_core::blackhole::{
    verify_firewall_with, verify_hp_extended_with, verify_no_cloning_with, AliceTiming, HpConfig, DEFAULT_EMITTED,
    DEFAULT_INTERIOR, DEFAULT_SEEDS,
};
use cutlab_core::game::{
    game_bound, grid_search_optimum, optimal_strategy, referee_rounds, win_probability, RefereeMode,
};
use cutlab_core::pdl::{self, PdlError};
use cutlab_core::protocols::{
    run_deutsch, run_fr, run_fr_meta, run_fr_with, run_wigner, run_wigner_with, sample_fr_restarts,
    verify_objective_outcomes_with, Assumption, ProtocolTrace, TheoremId, TheoremReport, Toggles,
};
use cutlab_core::qcore::MAX_VECTOR_QUBITS;
use serde::Serialize;

use crate::report::{fmt17, ReportEnvelope};
use crate::strategy::parse_strategy;
use crate::sweep::{parse_m_range, per_m_means, run_sweep, write_csv, SweepConfig};

pub const OUT_DIR_ENV: &str = "CUTLAB_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Trace matching tolerance against the built-in runners.
const BUILTIN_MATCH_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "cutlab", version, about = "Multi-observer quantum thought experiments and their no-go theorems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse, validate and execute a `.wfp` protocol file.
    Run(RunArgs),
    /// Reproduce a theorem under the chosen assumption toggles.
    Verify(VerifyArgs),
    /// Hayden–Preskill decoupling sweep over seeds and emitted qubits.
    Sweep(SweepArgs),
    /// The complementarity game.
    Game(GameArgs),
}

/// `--json` alone writes `<command>.json` into the default output directory.
#[derive(Args, Debug, Clone)]
pub struct JsonOut {
    /// JSON envelope destination; `-` for stdout.
    #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "")]
    pub json: Option<String>,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TraceLevel {
    /// Purities, probabilities and records per step.
    Summary,
    /// Every density matrix.
    Full,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "summary")]
    pub trace_level: TraceLevel,
    #[command(flatten)]
    pub out: JsonOut,
    /// Per-step perspective table.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq, Eq)]
pub enum AssumptionArg {
    Quantum,
    Consistency,
    Agreement,
    Objectivity,
    BlackHole,
}

impl From<AssumptionArg> for Assumption {
    fn from(a: AssumptionArg) -> Self {
        match a {
            AssumptionArg::Quantum => Assumption::Quantum,
            AssumptionArg::Consistency => Assumption::Consistency,
            AssumptionArg::Agreement => Assumption::Agreement,
            AssumptionArg::Objectivity => Assumption::Objectivity,
            AssumptionArg::BlackHole => Assumption::BlackHole,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq, Eq)]
pub enum TheoremArg {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    NoCloning,
}

impl From<TheoremArg> for TheoremId {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Thm1 => TheoremId::Thm1,
            TheoremArg::Thm2 => TheoremId::Thm2,
            TheoremArg::Thm3 => TheoremId::Thm3,
            TheoremArg::Thm4 => TheoremId::Thm4,
            TheoremArg::Thm5 => TheoremId::Thm5,
            TheoremArg::NoCloning => TheoremId::NoCloning,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TimingArg {
    Before,
    After,
    Never,
}

impl From<TimingArg> for AliceTiming {
    fn from(t: TimingArg) -> Self {
        match t {
            TimingArg::Before => AliceTiming::BeforeScrambling,
            TimingArg::After => AliceTiming::AfterScrambling,
            TimingArg::Never => AliceTiming::Never,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub theorem: TheoremArg,
    /// Apply the consistency rule (default).
    #[arg(long = "with-C", conflicts_with = "without_c")]
    pub with_c: bool,
    /// Disable the consistency rule.
    #[arg(long = "without-C")]
    pub without_c: bool,
    /// Disable an assumption; repeatable.
    #[arg(long, value_enum, value_name = "ASSUMPTION")]
    pub without: Vec<AssumptionArg>,
    /// Number of seeds (thm4) starting at `--seed`.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// First seed; the only seed for thm5.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_interior: Option<usize>,
    /// Emitted radiation qubits handed to Bob.
    #[arg(long)]
    pub m: Option<usize>,
    /// Skip Bob's reconstruction (thm4).
    #[arg(long)]
    pub no_reconstruct: bool,
    /// Statistics of the meta-observer's final measurement (thm3).
    #[arg(long)]
    pub meta: bool,
    /// Sampled restart loop with this many accepted runs (thm3).
    #[arg(long, value_name = "RUNS")]
    pub restarts: Option<usize>,
    #[command(flatten)]
    pub out: JsonOut,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, default_value_t = DEFAULT_INTERIOR)]
    pub n_interior: usize,
    /// `0..=4`, `0..5`, `0-4` or a comma list.
    #[arg(long, default_value = "0..=4")]
    pub m_range: String,
    #[arg(long, default_value_t = DEFAULT_SEEDS)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    #[arg(long, value_enum, default_value = "before")]
    pub timing: TimingArg,
    /// Per-run CSV; bare `--csv` writes `sweep.csv` into the default output directory.
    #[arg(long, value_name = "PATH", num_args = 0..=1, default_missing_value = "")]
    pub csv: Option<String>,
    #[command(flatten)]
    pub out: JsonOut,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Standard,
    AndBits,
}

#[derive(Args, Debug)]
#[group(id = "game_action", required = true, multiple = false, args = ["optimize", "eval", "sample"])]
pub struct GameArgs {
    #[arg(long)]
    pub optimize: bool,
    /// `STATE,P,P̄`, e.g. `|1>,1,0bar` or `bloch:0.785,0,0bar`.
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    pub eval: Option<String>,
    /// Number of refereed rounds.
    #[arg(long, value_name = "N")]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Strategy for `--sample`; defaults to the optimum.
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    pub strategy: Option<String>,
    #[arg(long, value_enum, default_value = "standard")]
    pub mode: ModeArg,
    #[command(flatten)]
    pub out: JsonOut,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
    fn internal(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INTERNAL, message: format!("internal error: {e}") }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure { code: EXIT_INVALID, message: format!("{e:#}") }
    }
}

type CmdResult = Result<(), Failure>;

/// Set when the JSON envelope goes to stdout; human output then moves to stderr.
static JSON_ON_STDOUT: AtomicBool = AtomicBool::new(false);

macro_rules! say {
    ($($t:tt)*) => {
        if JSON_ON_STDOUT.load(Ordering::Relaxed) {
            eprintln!($($t)*)
        } else {
            println!($($t)*)
        }
    };
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn dispatch(cli: Cli) -> CmdResult {
    let out = match &cli.command {
        Command::Run(a) => &a.out,
        Command::Verify(a) => &a.out,
        Command::Sweep(a) => &a.out,
        Command::Game(a) => &a.out,
    };
    JSON_ON_STDOUT.store(out.json.as_deref() == Some("-"), Ordering::Relaxed);
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Game(a) => cmd_game(a),
    }
}

fn default_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// Empty path means the default file name in the default directory.
fn resolve(path: &str, default_name: &str) -> PathBuf {
    if path.is_empty() {
        default_dir().join(default_name)
    } else {
        PathBuf::from(path)
    }
}

fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: &JsonOut, default_name: &str, env: &ReportEnvelope) -> CmdResult {
    let Some(p) = &out.json else { return Ok(()) };
    let text = env.to_json();
    if p == "-" {
        print!("{text}");
        return Ok(());
    }
    let path = resolve(p, default_name);
    write_file(&path, text.as_bytes())?;
    say!("report written to {}", path.display());
    Ok(())
}

fn envelope(command: &str, config: impl Serialize, seeds: Vec<u64>, report: impl Serialize, t0: Instant) -> Result<ReportEnvelope, Failure> {
    ReportEnvelope::new(command, config, seeds, report, t0.elapsed()).map_err(Failure::internal)
}

fn print_report(r: &TheoremReport) {
    say!("{}: {}", r.title, verdict_str(r));
    for (k, v) in &r.evidence {
        let shown = match serde_json::to_value(v) {
            Ok(serde_json::Value::Number(n)) if n.is_f64() => n.as_f64().map(fmt17).unwrap_or_default(),
            Ok(other) => other.to_string(),
            Err(_) => String::from("?"),
        };
        say!("  {k} = {shown}");
    }
    for f in &r.feasibility {
        say!("  feasibility {} = {:?}", f.name, f.report.verdict);
    }
}

fn verdict_str(r: &TheoremReport) -> String {
    serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

// ---------------------------------------------------------------- run

#[derive(Serialize)]
struct PerspectiveSummary<'a> {
    owner: &'a str,
    condition: &'a [(String, usize)],
    probability: f64,
    purity: f64,
}

#[derive(Serialize)]
struct StepSummary<'a> {
    label: &'a str,
    actor: &'a str,
    operation: &'a str,
    acceptance: f64,
    global_purity: f64,
    records: &'a [cutlab_core::protocols::RecordProbability],
    perspectives: Vec<PerspectiveSummary<'a>>,
}

#[derive(Serialize)]
struct TraceSummary<'a> {
    protocol: &'a str,
    systems: Vec<&'a str>,
    steps: Vec<StepSummary<'a>>,
}

fn summarize(t: &ProtocolTrace) -> TraceSummary<'_> {
    TraceSummary {
        protocol: &t.protocol,
        systems: t.systems.iter().map(|s| s.name.as_str()).collect(),
        steps: t
            .steps
            .iter()
            .map(|s| StepSummary {
                label: &s.label,
                actor: &s.actor,
                operation: &s.operation,
                acceptance: s.acceptance,
                global_purity: s.global.purity(),
                records: &s.records,
                perspectives: s
                    .perspectives
                    .iter()
                    .map(|p| PerspectiveSummary {
                        owner: &p.owner,
                        condition: &p.condition,
                        probability: p.probability,
                        purity: p.state.purity(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum TraceOut<'a> {
    Summary(TraceSummary<'a>),
    Full(&'a ProtocolTrace),
}

#[derive(Serialize)]
struct RunReport<'a> {
    trace: TraceOut<'a>,
    builtin: Option<&'static str>,
    theorem: Option<TheoremReport>,
}

#[derive(Serialize)]
struct RunConfig {
    path: String,
    trace_level: TraceLevel,
}

fn matches(a: &ProtocolTrace, b: &ProtocolTrace) -> bool {
    a.systems == b.systems && a.steps.len() == b.steps.len() && a.max_deviation(b).is_ok_and(|d| d <= BUILTIN_MATCH_TOL)
}

/// The built-in runner whose trace this one reproduces, with its report.
pub fn builtin_for(trace: &ProtocolTrace) -> Result<Option<(&'static str, Option<TheoremReport>)>, Failure> {
    let (w, wr) = run_wigner().map_err(Failure::internal)?;
    if matches(trace, &w) {
        return Ok(Some(("wigner", Some(wr))));
    }
    let d = run_deutsch().map_err(Failure::internal)?;
    if matches(trace, &d) {
        return Ok(Some(("deutsch", None)));
    }
    let (f, fr) = run_fr(true).map_err(Failure::internal)?;
    if matches(trace, &f) {
        return Ok(Some(("fr", Some(fr))));
    }
    Ok(None)
}

fn write_trace_csv(t: &ProtocolTrace, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "actor", "operation", "acceptance", "owner", "condition", "probability", "purity"])?;
    for s in &t.steps {
        for p in &s.perspectives {
            let cond: Vec<String> = p.condition.iter().map(|(r, o)| format!("{r}={o}")).collect();
            w.write_record([
                s.label.clone(),
                s.actor.clone(),
                s.operation.clone(),
                fmt17(s.acceptance),
                p.owner.clone(),
                cond.join(";"),
                fmt17(p.probability),
                fmt17(p.state.purity()),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_file(path, &bytes)
}

fn cmd_run(a: RunArgs) -> CmdResult {
    let t0 = Instant::now();
    let source = fs::read_to_string(&a.path)
        .with_context(|| format!("reading {}", a.path.display()))
        .map_err(Failure::from)?;
    let name = a.path.file_stem().and_then(|s| s.to_str()).unwrap_or("protocol").to_string();
    let trace = match pdl::run_source(&source, &name) {
        Ok(t) => t,
        Err(e) => {
            let code = e.exit_code();
            let message = match &e {
                PdlError::Parse(p) => format!("{}: parse error: {p}", a.path.display()),
                PdlError::Invalid(ds) => {
                    let lines: Vec<String> = ds.iter().map(|d| format!("  {d}")).collect();
                    format!("{}: {} diagnostic(s)\n{}", a.path.display(), ds.len(), lines.join("\n"))
                }
                PdlError::Runtime { .. } => format!("{}: {e}", a.path.display()),
            };
            return Err(Failure { code, message });
        }
    };
    let builtin = builtin_for(&trace)?;
    let last = trace.last();
    say!("{}: {} steps, final acceptance {}", trace.protocol, trace.steps.len(), fmt17(last.acceptance));
    let (builtin_name, theorem) = match builtin {
        Some((n, r)) => (Some(n), r),
        None => (None, None),
    };
    if let Some(n) = builtin_name {
        say!("trace matches the built-in `{n}` runner");
    }
    if let Some(r) = &theorem {
        print_report(r);
    }
    if let Some(p) = &a.csv {
        let path = PathBuf::from(p);
        write_trace_csv(&trace, &path)?;
    }
    let trace_out = match a.trace_level {
        TraceLevel::Summary => TraceOut::Summary(summarize(&trace)),
        TraceLevel::Full => TraceOut::Full(&trace),
    };
    let report = RunReport { trace: trace_out, builtin: builtin_name, theorem };
    let config = RunConfig { path: a.path.display().to_string(), trace_level: a.trace_level };
    let env = envelope("run", config, Vec::new(), report, t0)?;
    emit(&a.out, &format!("{name}.json"), &env)
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyConfig {
    theorem: TheoremId,
    disabled: Vec<Assumption>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_interior: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reconstruct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts: Option<usize>,
    meta: bool,
}

#[derive(Serialize)]
struct RestartSummary {
    runs: usize,
    attempts: Vec<usize>,
    mean_attempts: f64,
    expected_attempts: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(flatten)]
    theorem: TheoremReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<TheoremReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts: Option<RestartSummary>,
}

fn reject(cond: bool, flag: &str, theorem: TheoremId) -> CmdResult {
    if cond {
        let name = serde_json::to_value(theorem).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        return Err(Failure::invalid(format!("{flag} does not apply to {name}")));
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let t0 = Instant::now();
    let theorem: TheoremId = a.theorem.into();
    let required = theorem.required();
    for w in &a.without {
        let asm: Assumption = (*w).into();
        if !required.contains(&asm) {
            return Err(Failure::invalid(format!(
                "--without {} is not an assumption of this theorem (required: {})",
                asm.key(),
                required.iter().map(|r| r.key()).collect::<Vec<_>>().join(", ")
            )));
        }
    }
    let uses_c = required.contains(&Assumption::Consistency);
    reject((a.with_c || a.without_c) && !uses_c, "--with-C/--without-C", theorem)?;
    if a.with_c && a.without.contains(&AssumptionArg::Consistency) {
        return Err(Failure::invalid("--with-C conflicts with --without consistency"));
    }
    let is4 = theorem == TheoremId::Thm4;
    let is3 = theorem == TheoremId::Thm3;
    reject(
        !is4 && (a.seeds.is_some() || a.n_interior.is_some() || a.m.is_some() || a.no_reconstruct),
        "--seeds/--n-interior/--m/--no-reconstruct",
        theorem,
    )?;
    reject(a.seed.is_some() && !(is4 || theorem == TheoremId::Thm5), "--seed", theorem)?;
    reject(!is3 && (a.meta || a.restarts.is_some()), "--meta/--restarts", theorem)?;

    let mut toggles = Toggles::all();
    for w in &a.without {
        toggles = toggles.without((*w).into());
    }
    if a.without_c {
        toggles = toggles.without(Assumption::Consistency);
    }

    let mut config = VerifyConfig {
        theorem,
        disabled: required.iter().copied().filter(|r| !toggles.enabled(*r)).collect(),
        n_interior: None,
        m: None,
        reconstruct: None,
        restarts: a.restarts,
        meta: a.meta,
    };
    let mut seeds = Vec::new();
    let (report, meta, restarts) = match theorem {
        TheoremId::Thm1 => (run_wigner_with(&toggles).map_err(Failure::internal)?.1, None, None),
        TheoremId::Thm2 => (verify_objective_outcomes_with(&toggles).map_err(Failure::internal)?, None, None),
        TheoremId::Thm3 => {
            let r = run_fr_with(&toggles).map_err(Failure::internal)?.1;
            let meta = if a.meta { Some(run_fr_meta().map_err(Failure::internal)?) } else { None };
            let restarts = match a.restarts {
                Some(runs) => {
                    let seed = a.seed.unwrap_or(0);
                    seeds.push(seed);
                    let attempts = sample_fr_restarts(runs, seed).map_err(Failure::internal)?;
                    let mean = attempts.iter().sum::<usize>() as f64 / attempts.len().max(1) as f64;
                    Some(RestartSummary { runs, attempts, mean_attempts: mean, expected_attempts: 6.0 })
                }
                None => None,
            };
            (r, meta, restarts)
        }
        TheoremId::Thm4 => {
            let n = a.n_interior.unwrap_or(DEFAULT_INTERIOR);
            let m = a.m.unwrap_or(DEFAULT_EMITTED);
            check_hp_size(n, &[m])?;
            let base = a.seed.unwrap_or(0);
            seeds = (base..base + a.seeds.unwrap_or(DEFAULT_SEEDS)).collect();
            if seeds.is_empty() {
                return Err(Failure::invalid("--seeds must be at least 1"));
            }
            let cfg = HpConfig {
                n_interior: n,
                m,
                seeds: seeds.clone(),
                timing: AliceTiming::BeforeScrambling,
                reconstruct: !a.no_reconstruct,
            };
            config.n_interior = Some(n);
            config.m = Some(m);
            config.reconstruct = Some(cfg.reconstruct);
            (verify_hp_extended_with(&cfg, &toggles).map_err(Failure::internal)?, None, None)
        }
        TheoremId::Thm5 => {
            let seed = a.seed.unwrap_or(0);
            seeds.push(seed);
            (verify_firewall_with(&toggles, seed).map_err(Failure::internal)?, None, None)
        }
        TheoremId::NoCloning => (verify_no_cloning_with(&toggles).map_err(Failure::internal)?, None, None),
    };
    print_report(&report);
    if let Some(m) = &meta {
        print_report(m);
    }
    if let Some(r) = &restarts {
        say!("  restarts: {} accepted runs, mean attempts {}", r.runs, fmt17(r.mean_attempts));
    }
    let name = format!("verify_{}", verdict_file(theorem));
    let env = envelope("verify", config, seeds, VerifyReport { theorem: report, meta, restarts }, t0)?;
    emit(&a.out, &format!("{name}.json"), &env)
}

fn verdict_file(t: TheoremId) -> String {
    serde_json::to_value(t).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn check_hp_size(n: usize, ms: &[usize]) -> CmdResult {
    let qubits = 2 * n + 3;
    if qubits > MAX_VECTOR_QUBITS {
        return Err(Failure::invalid(format!(
            "size cap exceeded: n_interior = {n} needs {qubits} qubits, cap is {MAX_VECTOR_QUBITS}"
        )));
    }
    if let Some(&m) = ms.iter().find(|&&m| m > n + 1) {
        return Err(Failure::invalid(format!("m = {m} exceeds the {} qubits Bob can collect before R_A", n + 1)));
    }
    Ok(())
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepReport {
    rows: Vec<cutlab_core::blackhole::SweepRow>,
    means: Vec<crate::sweep::MeanRow>,
    fidelity_non_decreasing: bool,
    fidelity_above_one_minus_trace_distance: bool,
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let t0 = Instant::now();
    let m_values = parse_m_range(&a.m_range).map_err(Failure::invalid)?;
    check_hp_size(a.n_interior, &m_values)?;
    if a.seeds == 0 {
        return Err(Failure::invalid("--seeds must be at least 1"));
    }
    let cfg = SweepConfig {
        n_interior: a.n_interior,
        m_values,
        seeds: (a.seed_base..a.seed_base + a.seeds).collect(),
        timing: a.timing.into(),
    };
    let rows = run_sweep(&cfg).map_err(Failure::internal)?;
    let means = per_m_means(&rows);
    let non_decreasing = means.windows(2).all(|w| w[1].fidelity >= w[0].fidelity);
    let above = rows.iter().all(|r| r.fidelity >= 1.0 - r.trace_distance);
    say!("m  mean_fidelity  mean_trace_distance  mean_H(X|R_B)  mean_H(Z|R_A)");
    for r in &means {
        say!(
            "{}  {:.6}  {:.6}  {:.6}  {:.6}",
            r.m, r.fidelity, r.trace_distance, r.h_x_given_rb, r.h_z_given_ra
        );
    }
    say!("fidelity non-decreasing in m: {non_decreasing}");
    if let Some(p) = &a.csv {
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).map_err(Failure::internal)?;
        let path = resolve(p, "sweep.csv");
        write_file(&path, &buf)?;
        say!("csv written to {}", path.display());
    }
    let seeds = cfg.seeds.clone();
    let report = SweepReport {
        rows,
        means,
        fidelity_non_decreasing: non_decreasing,
        fidelity_above_one_minus_trace_distance: above,
    };
    let env = envelope("sweep", &cfg, seeds, report, t0)?;
    emit(&a.out, "sweep.json", &env)
}

// ---------------------------------------------------------------- game

#[derive(Serialize)]
struct GameConfig<'a> {
    action: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<ModeArg>,
}

#[derive(Serialize)]
struct SampleSummary {
    rounds: usize,
    wins: usize,
    mean_win: f64,
    exact: cutlab_core::game::GameReport,
}

#[derive(Serialize)]
struct OptimizeSummary {
    eigen: cutlab_core::game::GameReport,
    strategy: cutlab_core::game::GameStrategy,
    grid_value: f64,
    grid_theta: f64,
    grid_phi: f64,
}

fn cmd_game(a: GameArgs) -> CmdResult {
    let t0 = Instant::now();
    if a.optimize {
        reject_game(a.strategy.is_some(), "--strategy")?;
        let (s, _) = optimal_strategy();
        let eigen = win_probability(&s);
        let (grid_value, grid_theta, grid_phi) = grid_search_optimum(64);
        say!("optimal win probability {} (bound {})", fmt17(eigen.win_probability), fmt17(game_bound()));
        say!("grid search {}", fmt17(grid_value));
        let cfg = GameConfig { action: "optimize", strategy: None, rounds: None, mode: None };
        let rep = OptimizeSummary { eigen, strategy: s, grid_value, grid_theta, grid_phi };
        let env = envelope("game", cfg, Vec::new(), rep, t0)?;
        return emit(&a.out, "game_optimize.json", &env);
    }
    if let Some(spec) = &a.eval {
        reject_game(a.strategy.is_some(), "--strategy")?;
        let s = parse_strategy(spec).map_err(|e| Failure::invalid(format!("invalid state spec `{spec}`: {e}")))?;
        let r = win_probability(&s);
        say!("win probability {} (bound {})", fmt17(r.win_probability), fmt17(r.bound));
        let cfg = GameConfig { action: "eval", strategy: Some(spec), rounds: None, mode: None };
        let env = envelope("game", cfg, Vec::new(), r, t0)?;
        return emit(&a.out, "game_eval.json", &env);
    }
    let n = a.sample.unwrap_or(0);
    let s = match &a.strategy {
        Some(spec) => parse_strategy(spec).map_err(|e| Failure::invalid(format!("invalid state spec `{spec}`: {e}")))?,
        None => optimal_strategy().0,
    };
    let mode = match a.mode {
        ModeArg::Standard => RefereeMode::Standard,
        ModeArg::AndBits => RefereeMode::AndBits,
    };
    let rounds = referee_rounds(&s, n, a.seed, mode);
    let wins = rounds.iter().filter(|r| r.win).count();
    let mean = wins as f64 / n.max(1) as f64;
    say!("{wins}/{n} rounds won, mean {}", fmt17(mean));
    let cfg = GameConfig { action: "sample", strategy: a.strategy.as_deref(), rounds: Some(n), mode: Some(a.mode) };
    let rep = SampleSummary { rounds: n, wins, mean_win: mean, exact: win_probability(&s) };
    let env = envelope("game", cfg, vec![a.seed], rep, t0)?;
    emit(&a.out, "game_sample.json", &env)
}

fn reject_game(cond: bool, flag: &str) -> CmdResult {
    if cond {
        return Err(Failure::invalid(format!("{flag} only applies to --sample")));
    }
    Ok(())
}
