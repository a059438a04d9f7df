//! Command drivers behind the `flocksim` binary.
//!
//! Every command writes a human-readable summary to the given writer and, when an output
//! directory is set, machine-readable files next to it.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dashu_int::ops::BitTest;
use dashu_int::UBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{detect_switches, fusion_tree, network_period, steady_state, SwitchLog};
use crate::dynamics::io::{read_trace, SimConfig, TraceWriter};
use crate::dynamics::{
    build_network, run, run_streaming, transition, ConfidencePolicy, Configuration, DynamicsError, ExactState,
    FlockNetwork, FlockState, HysteresisRule, ScheduledEvents, StopReason, TickRecord, Trace,
};
use crate::lowerbound::{run_lowerbound, FlipMode, LBParams, LowerBoundError, LowerBoundOptions};
use crate::numerics::{Matrix, Mode, NumericsError, Rational, DEFAULT_PRECISION};
use crate::residue::{canonical_tree, CombineTree, ResidueError, DEFAULT_EXPONENT_BITS};
use crate::spectral::spectrum;

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Budget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Runtime(_) | CliError::Io(_) => EXIT_RUNTIME,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Runtime(_) | CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

fn dynamics_err(context: &str, e: DynamicsError) -> CliError {
    match e {
        DynamicsError::Config { .. } | DynamicsError::Trace(_) | DynamicsError::Numerics(NumericsError::Parse(_)) => {
            CliError::Parse(format!("{context}: {e}"))
        }
        DynamicsError::Numerics(NumericsError::ZeroDenominator) => CliError::Parse(format!("{context}: {e}")),
        DynamicsError::Io(e) => CliError::Runtime(format!("{context}: {e}")),
        other => CliError::Runtime(format!("{context}: {other}")),
    }
}

fn runtime(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{context}: {e}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Approx,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Approx => Mode::Approx,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlipArg {
    TrueRule,
    RightOnly,
}

#[derive(Debug, Parser)]
#[command(name = "flocksim", version, about = "Exact simulation of neighbor-averaging flocks")]
pub struct Cli {
    /// Experiment config (TOML); repeat to run several.
    #[arg(long, global = true)]
    pub config: Vec<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, global = true)]
    pub horizon: Option<u64>,
    /// Maximum number of ticks advanced.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Keep only network and flock data in traces.
    #[arg(long, global = true)]
    pub sparse: bool,
    /// Worker threads for independent experiment files.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed for a random configuration when no config is given.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run configs and write traces, switch logs and final states.
    Simulate(SimulateArgs),
    /// Switch, period and fusion-tree analysis of traces (or of configs run in memory).
    Analyze(AnalyzeArgs),
    /// Drive the slow-merging path construction and compare against predictions.
    Lowerbound(LowerboundArgs),
    /// Eigenvalues of flock transition matrices.
    Spectrum(SpectrumArgs),
    /// Evaluate ⊕ combination trees.
    Residue(ResidueArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Birds in a random configuration.
    #[arg(long, default_value_t = 8)]
    pub birds: usize,
    /// Skip ticks over which the network provably stays fixed.
    #[arg(long)]
    pub fast_forward: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Trace files written by `simulate`.
    pub traces: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LowerboundArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Drift unit, `1/Q` with `Q ≡ 2 (mod 6)`.
    #[arg(long, default_value = "1/32")]
    pub q: String,
    #[arg(long, default_value_t = 6)]
    pub lag: u64,
    /// Add a shared unit drift along a second axis.
    #[arg(long)]
    pub planar: bool,
    #[arg(long, value_enum, default_value_t = FlipArg::TrueRule)]
    pub flip_mode: FlipArg,
    /// Stop once a flock of this height forms.
    #[arg(long)]
    pub stop_height: Option<u32>,
    /// Relative half-width of the predicted merge windows.
    #[arg(long, default_value_t = 0.25)]
    pub slack: f64,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Path of this many birds instead of a config's initial network.
    #[arg(long)]
    pub path: Option<usize>,
    #[arg(long, default_value = "lazy")]
    pub policy: String,
}

#[derive(Debug, Args)]
pub struct ResidueArgs {
    /// Canonical tree with `2^k` leaves.
    #[arg(long)]
    pub k: Option<u32>,
    /// Explicit tree such as `((x, x), (x, -x))`.
    #[arg(long)]
    pub tree: Option<String>,
    /// Largest exponent bit length allowed.
    #[arg(long, default_value_t = DEFAULT_EXPONENT_BITS)]
    pub bits: usize,
}

/// Runs the parsed command, writing summaries to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(cli, a, out),
        Command::Analyze(a) => cmd_analyze(cli, a, out),
        Command::Lowerbound(a) => cmd_lowerbound(cli, a, out),
        Command::Spectrum(a) => cmd_spectrum(cli, a, out),
        Command::Residue(a) => cmd_residue(cli, a, out),
    }
}

/// Runs `job` on every item with up to `jobs` threads; output is kept in item order.
fn fan_out<T: Sync>(
    items: &[T],
    jobs: usize,
    out: &mut dyn Write,
    job: impl Fn(&T, &mut Vec<u8>) -> Result<(), CliError> + Sync,
) -> Result<(), CliError> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<(Vec<u8>, Result<(), CliError>)>>> =
        Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, items.len().max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                let mut buf = Vec::new();
                let r = job(&items[k], &mut buf);
                results.lock().unwrap_or_else(|e| e.into_inner())[k] = Some((buf, r));
            });
        }
    });
    let mut worst: Option<CliError> = None;
    for (buf, r) in results.into_inner().unwrap_or_else(|e| e.into_inner()).into_iter().flatten() {
        out.write_all(&buf)?;
        if let Err(e) = r {
            if items.len() > 1 {
                writeln!(out, "error: {e}")?;
            }
            if worst.as_ref().is_none_or(|w| e.rank() > w.rank()) {
                worst = Some(e);
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into())
}

/// Each input gets its own subdirectory when several are run.
fn job_dir(cli: &Cli, name: &str, many: bool) -> Option<PathBuf> {
    cli.out.as_ref().map(|o| if many { o.join(name) } else { o.clone() })
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| runtime(&format!("cannot create {}", dir.display()), e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| runtime("json", e))?;
    fs::write(path, text + "\n").map_err(|e| runtime(&path.display().to_string(), e))
}

/// Random planar configuration on a 1/8 grid.
pub fn random_config(seed: u64, n: usize, horizon: u64) -> SimConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = (n as i64 * 4).max(8);
    let mut x = Matrix::zeros(n, 2);
    let mut v = Matrix::zeros(n, 2);
    for i in 0..n {
        for k in 0..2 {
            x[(i, k)] = Rational::frac(rng.gen_range(0..=span), 8);
            v[(i, k)] = Rational::frac(rng.gen_range(-4..=4), 32);
        }
    }
    SimConfig {
        mode: Mode::Exact,
        precision: DEFAULT_PRECISION,
        initial: Configuration { tick: 0, x, v },
        policy: ConfidencePolicy::Vicsek,
        rule: HysteresisRule::default(),
        horizon,
        events: Vec::new(),
    }
}

enum Input {
    File(PathBuf),
    Random(u64),
}

impl Input {
    fn name(&self) -> String {
        match self {
            Input::File(p) => stem(p),
            Input::Random(s) => format!("random-{s}"),
        }
    }

    fn load(&self, cli: &Cli, birds: usize) -> Result<SimConfig, CliError> {
        let mut cfg = match self {
            Input::File(p) => SimConfig::load(p).map_err(|e| dynamics_err(&p.display().to_string(), e))?,
            Input::Random(s) => random_config(*s, birds, 100),
        };
        if let Some(m) = cli.mode {
            cfg.mode = m.into();
        }
        if let Some(h) = cli.horizon {
            cfg.horizon = h;
        }
        Ok(cfg)
    }
}

fn inputs(cli: &Cli) -> Result<Vec<Input>, CliError> {
    if !cli.config.is_empty() {
        for p in &cli.config {
            if !p.is_file() {
                return Err(CliError::Parse(format!("config {} does not exist", p.display())));
            }
        }
        return Ok(cli.config.iter().cloned().map(Input::File).collect());
    }
    match cli.seed {
        Some(s) => Ok(vec![Input::Random(s)]),
        None => Err(CliError::Parse("give --config PATH or --seed S".into())),
    }
}

#[derive(Serialize)]
struct Snapshot {
    tick: u64,
    positions: Vec<Vec<String>>,
    velocities: Vec<Vec<String>>,
}

fn snapshot<St: FlockState>(state: &St) -> Snapshot {
    Snapshot {
        tick: state.tick(),
        positions: (0..state.n()).map(|i| (0..state.d()).map(|k| state.position_text(i, k)).collect()).collect(),
        velocities: (0..state.n()).map(|i| (0..state.d()).map(|k| state.velocity_text(i, k)).collect()).collect(),
    }
}

#[derive(Serialize)]
struct SimSummary {
    records: usize,
    switches: usize,
    stop: String,
    last_tick: u64,
    stepped: u64,
    skipped: u64,
    soundness_violations: usize,
    seconds: f64,
}

fn edge_list(edges: &[(usize, usize)]) -> String {
    let parts: Vec<String> = edges.iter().map(|(i, j)| format!("{i}-{j}")).collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(",")
    }
}

/// Streams the run of one config into `dir`.
fn simulate_one<St: FlockState>(
    initial: St,
    cfg: &SimConfig,
    cli: &Cli,
    args: &SimulateArgs,
    dir: &Path,
    text: &mut dyn Write,
) -> Result<(), CliError> {
    let started = Instant::now();
    let mut opts = cfg.run_options();
    opts.budget = cli.budget;
    opts.record_states = !cli.sparse;
    if args.fast_forward {
        opts.fast_forward = Some(Default::default());
    }
    let trace_path = dir.join("trace.jsonl");
    let file = File::create(&trace_path).map_err(|e| runtime(&trace_path.display().to_string(), e))?;
    let mut writer = TraceWriter::new(BufWriter::new(file), initial.n(), initial.d()).map_err(|e| runtime("trace", e))?;
    let mut switches = String::from("tick\tgained\tlost\n");
    let mut prev: Option<Vec<(usize, usize)>> = None;
    let mut count = 0usize;
    let mut n_switches = 0usize;
    let mut events = ScheduledEvents::new(cfg.events.clone());
    let outcome = run_streaming(initial, &opts, &mut events, &mut [], &mut |r: TickRecord| {
        if let Some(p) = &prev {
            if r.switched {
                let gained: Vec<(usize, usize)> = r.edges.iter().filter(|e| !p.contains(e)).copied().collect();
                let lost: Vec<(usize, usize)> = p.iter().filter(|e| !r.edges.contains(e)).copied().collect();
                let _ = writeln!(switches, "{}\t{}\t{}", r.tick, edge_list(&gained), edge_list(&lost));
                n_switches += 1;
            }
        }
        prev = Some(r.edges.clone());
        count += 1;
        writer.record(&r)
    });
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writer.flush();
            return Err(dynamics_err("run", e));
        }
    };
    fs::write(dir.join("switches.tsv"), &switches)?;
    write_json(&dir.join("final.json"), &snapshot(&outcome.state))?;
    let summary = SimSummary {
        records: count,
        switches: n_switches,
        stop: format!("{:?}", outcome.stop).to_lowercase(),
        last_tick: outcome.state.tick(),
        stepped: outcome.stepped,
        skipped: outcome.skipped,
        soundness_violations: outcome.trace.soundness_violations.len(),
        seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    writeln!(
        text,
        "records: {}, switches: {}, stop: {}, last tick: {}",
        summary.records, summary.switches, summary.stop, summary.last_tick
    )?;
    if outcome.stop == StopReason::Budget {
        writer.flush().map_err(|e| runtime("trace", e))?;
        return Err(CliError::Budget(format!(
            "budget of {} ticks exhausted at tick {}; partial trace in {}",
            cli.budget.unwrap_or(0),
            summary.last_tick,
            trace_path.display()
        )));
    }
    writer.finish(&outcome.trace.soundness_violations).map_err(|e| runtime("trace", e))?;
    Ok(())
}

pub fn cmd_simulate(cli: &Cli, args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let inputs = inputs(cli)?;
    let many = inputs.len() > 1;
    let base = cli.out.clone().unwrap_or_else(|| PathBuf::from("flocksim-out"));
    fan_out(&inputs, cli.jobs, out, |input, text| {
        let cfg = input.load(cli, args.birds)?;
        let dir = if many { base.join(input.name()) } else { base.clone() };
        create_dir(&dir)?;
        writeln!(text, "[{}] {} birds, d = {}, horizon {}", input.name(), cfg.initial.x.rows(), cfg.initial.x.cols(), cfg.horizon)?;
        match cfg.mode {
            Mode::Exact => simulate_one(ExactState::from_configuration(&cfg.initial), &cfg, cli, args, &dir, text),
            Mode::Approx => simulate_one(cfg.initial.to_approx(cfg.precision), &cfg, cli, args, &dir, text),
        }
    })
}

#[derive(Serialize)]
struct AnalysisSummary<'a> {
    records: usize,
    last_tick: u64,
    switches: usize,
    period: Option<u64>,
    steady: bool,
    last_switch: Option<u64>,
    final_flocks: &'a [Vec<usize>],
    switch_log: &'a SwitchLog,
}

fn analyze_trace(name: &str, trace: &Trace, dir: Option<&Path>, text: &mut dyn Write) -> Result<(), CliError> {
    let log = detect_switches(trace).map_err(|e| runtime("switches", e))?;
    let period = network_period(trace);
    let last = trace.records.last().map_or(0, |r| r.tick);
    let steady = steady_state(&log, last, trace.n, None);
    let tree = fusion_tree(trace).map_err(|e| runtime("fusion tree", e))?;
    let flocks: &[Vec<usize>] = trace.records.last().map_or(&[], |r| r.flocks.as_slice());
    writeln!(text, "[{name}]")?;
    match period {
        Some(p) => writeln!(text, "switches: {}, period: {p}", log.count())?,
        None => writeln!(text, "switches: {}, period: none", log.count())?,
    }
    writeln!(
        text,
        "steady: {}, last switch: {}",
        if steady.reached { "yes" } else { "no" },
        steady.last_switch.map_or("-".into(), |t| t.to_string())
    )?;
    writeln!(text, "flocks at tick {last}: {flocks:?}")?;
    write!(text, "{}", tree.to_text())?;
    if let Some(dir) = dir {
        create_dir(dir)?;
        let summary = AnalysisSummary {
            records: trace.records.len(),
            last_tick: last,
            switches: log.count(),
            period,
            steady: steady.reached,
            last_switch: steady.last_switch,
            final_flocks: flocks,
            switch_log: &log,
        };
        write_json(&dir.join("analysis.json"), &summary)?;
        fs::write(dir.join("fusion.dot"), tree.to_dot())?;
    }
    Ok(())
}

pub fn cmd_analyze(cli: &Cli, args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    enum Source {
        Trace(PathBuf),
        Run(Input),
    }
    let mut sources: Vec<Source> = args.traces.iter().cloned().map(Source::Trace).collect();
    if sources.is_empty() {
        sources = inputs(cli)?.into_iter().map(Source::Run).collect();
    }
    let many = sources.len() > 1;
    fan_out(&sources, cli.jobs, out, |src, text| {
        let (name, trace) = match src {
            Source::Trace(p) => {
                let f = File::open(p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
                let trace = read_trace(std::io::BufReader::new(f)).map_err(|e| dynamics_err(&p.display().to_string(), e))?;
                (stem(p), trace)
            }
            Source::Run(input) => {
                let cfg = input.load(cli, 8)?;
                let mut opts = cfg.run_options();
                opts.record_states = !cli.sparse;
                opts.budget = cli.budget;
                let mut events = ScheduledEvents::new(cfg.events.clone());
                let trace = match cfg.mode {
                    Mode::Exact => run(ExactState::from_configuration(&cfg.initial), &opts, &mut events, &mut []).map(|o| o.trace),
                    Mode::Approx => run(cfg.initial.to_approx(cfg.precision), &opts, &mut events, &mut []).map(|o| o.trace),
                }
                .map_err(|e| dynamics_err("run", e))?;
                (input.name(), trace)
            }
        };
        analyze_trace(&name, &trace, job_dir(cli, &name, many).as_deref(), text)
    })
}

fn lb_err(e: LowerBoundError) -> CliError {
    match e {
        LowerBoundError::Params(_) | LowerBoundError::Congruence(_) => CliError::Parse(format!("parameters: {e}")),
        other => runtime("lowerbound", other),
    }
}

pub fn cmd_lowerbound(cli: &Cli, args: &LowerboundArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let q: Rational = args.q.parse().map_err(|e| CliError::Parse(format!("--q {:?}: {e}", args.q)))?;
    let mut params = LBParams::new(args.n, q, args.lag).map_err(lb_err)?;
    params.planar = args.planar;
    params.validate().map_err(lb_err)?;
    let mut opts = LowerBoundOptions::default();
    if let Some(m) = cli.mode {
        opts.mode = m.into();
    }
    if let Some(b) = cli.budget {
        opts.budget = b;
    }
    opts.slack = args.slack;
    opts.stop_height = args.stop_height;
    opts.flip_mode = match args.flip_mode {
        FlipArg::TrueRule => FlipMode::TrueRule,
        FlipArg::RightOnly => FlipMode::RightOnly,
    };
    let report = run_lowerbound(&params, &opts).map_err(lb_err)?;
    writeln!(
        out,
        "n = {}, q = {}, lag = {}, mode = {}, flips = {:?}",
        params.n, params.q, params.lag, report.mode, report.flip_mode
    )?;
    writeln!(
        out,
        "stop: {}, last tick: {}, stepped: {}, skipped: {}, seconds: {:.2}",
        report.stop, report.last_tick, report.stepped, report.skipped, report.seconds
    )?;
    let yes_no = |b: Option<bool>| b.map_or("-".to_string(), |b| if b { "ok".into() } else { "mismatch".into() });
    writeln!(out, "theta1: {} (closed form {})", report.height(1).and_then(|h| h.theta).map_or("-".into(), |t| t.to_string()), params.theta1())?;
    writeln!(out, "early trajectory: {}, merge gap: {}", yes_no(report.trajectory_ok), yes_no(report.merge_gap_exact))?;
    let integ = &report.integrity;
    writeln!(
        out,
        "integrity: {} ({} violations, edges in [{:.4}, {:.4}])",
        if integ.pass() { "pass" } else { "FAIL" },
        integ.violations,
        integ.min_edge,
        integ.max_edge
    )?;
    writeln!(out, "noise: {} ({} flips checked)", if report.noise_ok() { "pass" } else { "FAIL" }, report.noise.len())?;
    if let Some(r) = report.theta_ratio {
        writeln!(out, "theta2/theta1: {r:.1}")?;
    }
    if let Some(r) = &report.refused {
        writeln!(out, "not attempted: {r}")?;
    }
    write!(out, "{}", report.to_table())?;
    if let Some(dir) = &cli.out {
        create_dir(dir)?;
        write_json(&dir.join("report.json"), &report)?;
        fs::write(dir.join("heights.tsv"), report.to_table())?;
        fs::write(dir.join("fusion.txt"), report.genealogy.to_text())?;
        fs::write(dir.join("fusion.dot"), report.genealogy.to_dot())?;
    }
    if report.stop == "budget" {
        return Err(CliError::Budget(format!("budget of {} ticks exhausted at tick {}", opts.budget, report.last_tick)));
    }
    Ok(())
}

/// Smallest-denominator rational within `tol` of `x`, via continued fractions.
pub fn recognize_rational(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            return None;
        }
        let a = a as i64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > max_den {
            return None;
        }
        if (h as f64 / k as f64 - x).abs() <= tol {
            return Some(Rational::frac(h, k));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

pub fn cmd_spectrum(cli: &Cli, args: &SpectrumArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (policy, networks): (ConfidencePolicy, Vec<(String, FlockNetwork)>) = match args.path {
        Some(m) => {
            if m == 0 {
                return Err(CliError::Parse("--path needs at least one bird".into()));
            }
            let policy: ConfidencePolicy = args.policy.parse().map_err(|e| dynamics_err("--policy", e))?;
            let edges: Vec<(usize, usize)> = (1..m).map(|i| (i - 1, i)).collect();
            let g = FlockNetwork::from_edges(m, &edges).map_err(|e| dynamics_err("path", e))?;
            (policy, vec![(format!("path{m}"), g)])
        }
        None => {
            let input = inputs(cli)?.into_iter().next().ok_or_else(|| CliError::Parse("no config".into()))?;
            let cfg = input.load(cli, 8)?;
            let g = build_network(&cfg.initial, None, &cfg.rule).map_err(|e| dynamics_err("network", e))?.network;
            let mut nets = Vec::new();
            for members in g.flocks() {
                let local: Vec<(usize, usize)> = g
                    .edges()
                    .into_iter()
                    .filter_map(|(i, j)| {
                        let a = members.iter().position(|&m| m == i)?;
                        let b = members.iter().position(|&m| m == j)?;
                        Some((a, b))
                    })
                    .collect();
                let sub = FlockNetwork::from_edges(members.len(), &local).map_err(|e| dynamics_err("flock", e))?;
                nets.push((format!("{members:?}").replace(' ', ""), sub));
            }
            (cfg.policy, nets)
        }
    };
    let mut csv = String::from("flock,k,eigenvalue,exact,exact_residual\n");
    for (name, g) in &networks {
        let t = transition(g, &policy).map_err(|e| dynamics_err("transition", e))?;
        let s = spectrum(&t.p).map_err(|e| runtime(&format!("spectrum of {name}"), e))?;
        let mut exact = Vec::new();
        for (k, &lam) in s.eigenvalues.iter().enumerate() {
            let r = recognize_rational(lam, 1000, 1e-9);
            let (shown, resid) = match &r {
                Some(r) => (r.to_string(), format!("{:.3e}", (lam - r.to_f64()).abs())),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(csv, "\"{name}\",{k},{lam:.15},{shown},{resid}");
            exact.push(r.map_or(format!("{lam:.6}"), |r| r.to_string()));
        }
        writeln!(out, "{name}: {}", exact.join(", "))?;
        writeln!(out, "  pi: {}", s.pi.iter().map(Rational::to_string).collect::<Vec<_>>().join(", "))?;
        writeln!(out, "  mu: {:.12}, residual: {:.3e}", s.mu, s.residual)?;
    }
    write!(out, "{csv}")?;
    if let Some(dir) = &cli.out {
        create_dir(dir)?;
        fs::write(dir.join("spectrum.csv"), &csv)?;
    }
    Ok(())
}

/// Decimal for small values, otherwise a sum of powers of two or a bit count.
pub fn format_big(d: &UBig) -> String {
    let bits = d.bit_len();
    if bits <= 128 {
        return d.to_string();
    }
    let ones: Vec<usize> = (0..bits).rev().filter(|&b| d.bit(b)).collect();
    if ones.len() <= 8 {
        let terms: Vec<String> = ones.iter().map(|&b| if b == 0 { "1".into() } else { format!("2^{b}") }).collect();
        terms.join(" + ")
    } else {
        format!("(a {bits}-bit integer)")
    }
}

pub fn cmd_residue(cli: &Cli, args: &ResidueArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tree: CombineTree = match (&args.tree, args.k) {
        (Some(t), _) => t.parse().map_err(|e: ResidueError| CliError::Parse(format!("--tree: {e}")))?,
        (None, Some(k)) => canonical_tree(k).map_err(|e| CliError::Parse(format!("--k: {e}")))?,
        (None, None) => return Err(CliError::Parse("give --k K or --tree T".into())),
    };
    let p = match tree.eval(args.bits) {
        Ok(p) => p,
        Err(e @ ResidueError::Overflow { .. }) => return Err(CliError::Budget(format!("residue: {e}"))),
        Err(e) => return Err(runtime("residue", e)),
    };
    writeln!(out, "leaves: {}", tree.leaves())?;
    match (p.degree(), p.leading_coeff()) {
        (Ok(d), Some(c)) => {
            writeln!(out, "terms: {}", p.len())?;
            writeln!(out, "degree: {}, coeff: {c}", format_big(d))?;
        }
        _ => writeln!(out, "result: 0")?,
    }
    if let Some(dir) = &cli.out {
        create_dir(dir)?;
        fs::write(dir.join("residue.txt"), format!("{p}\n"))?;
    }
    Ok(())
}
