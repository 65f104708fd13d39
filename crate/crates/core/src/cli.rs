//! `dagcast` command line: `capacity`, `simulate`, `sweep`, `fixtures`.
//!
//! Results go to stdout (or `--out`) as JSON or CSV. Failures print one
//! JSON line to stderr and exit with 2 (bad input), 3 (solver or runtime
//! failure) or 1 (fixture mismatch).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::capacity::{
    approx_capacity, capacity_bounds, compute_capacity_with, CapacityError, CapacityOptions,
    CapacityResult, CutConstraints,
};
use crate::connectivity::{ConfigProcess, IidLinkProcess, RawProcess, DEFAULT_TABLE_LIMIT};
use crate::fixtures;
use crate::graph::{validate_network, GraphError, Network, RawNetwork, DEFAULT_MATCHING_LIMIT};
use crate::sim::{self, Arrivals, CheckLevel, PolicyChoice, SimConfig, SimError, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment override for the matching enumeration guard.
pub const MATCH_LIMIT_ENV: &str = "DAGCAST_MATCH_LIMIT";

#[derive(Debug, Parser)]
#[command(
    name = "dagcast",
    version,
    about = "Broadcast capacity and scheduling on time-varying DAGs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the broadcast capacity and an optimal activation mixture.
    Capacity(CapacityArgs),
    /// Simulate one policy and write a JSON report.
    Simulate(SimulateArgs),
    /// Run a sweep file and write CSV rows.
    Sweep(SweepArgs),
    /// Bundled golden instances.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Debug, Subcommand)]
enum FixtureAction {
    /// List bundled fixtures with their frozen values.
    List,
    /// Recompute every fixture and compare with its frozen value.
    Run,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Network JSON file.
    #[arg(long, conflicts_with = "fixture", requires = "process")]
    net: Option<PathBuf>,
    /// Process JSON file.
    #[arg(long, conflicts_with = "fixture", requires = "net")]
    process: Option<PathBuf>,
    /// Bundled fixture name (see `fixtures list`).
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Ignore the process and assume every link is always ON.
    #[arg(long = "static")]
    static_: bool,
    /// Also report `p λ_stat <= λ* <= λ_stat` for this ON probability.
    #[arg(long)]
    bounds: Option<f64>,
    /// Also report the static-certificate approximation for this ON probability.
    #[arg(long)]
    approx: Option<f64>,
    /// Add every proper cut to the LP instead of single-node cuts only.
    #[arg(long)]
    all_cuts: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Pistar,
    Piprime,
    Rand,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckArg {
    Off,
    Sampled,
    EverySlot,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Replace the process with i.i.d. links ON with this probability.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum)]
    policy: PolicyArg,
    /// Arrival rate in packets per slot.
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    slots: u64,
    #[arg(long)]
    seed: u64,
    /// Design rate of the randomized policy (required with `--policy rand`).
    #[arg(long)]
    lambda_design: Option<f64>,
    /// Per-slot exchange probability of an ON link under `piprime`.
    #[arg(long, default_value_t = 1.0)]
    update_prob: f64,
    /// Slots excluded from delay statistics (default: slots / 10).
    #[arg(long)]
    warmup: Option<u64>,
    /// Deterministic arrivals instead of Poisson.
    #[arg(long)]
    deterministic: bool,
    #[arg(long, value_enum, default_value = "off")]
    check_invariants: CheckArg,
    /// Stability threshold factor on the largest capacity.
    #[arg(long, default_value_t = sim::DEFAULT_THETA)]
    theta: f64,
    /// Leave the per-packet delay list out of the report.
    #[arg(long)]
    no_delays: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep JSON file, or `fixture:NAME` for a bundled sweep.
    #[arg(long)]
    spec: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error with an exit code and a machine-readable kind.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn input(kind: &'static str, message: impl ToString) -> CliError {
        CliError {
            code: EXIT_INPUT,
            kind,
            message: message.to_string(),
        }
    }

    fn solver(kind: &'static str, message: impl ToString) -> CliError {
        CliError {
            code: EXIT_SOLVER,
            kind,
            message: message.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind, "message": self.message, "exit_code": self.code }).to_string()
    }
}

impl From<CapacityError> for CliError {
    fn from(e: CapacityError) -> CliError {
        match e {
            CapacityError::Graph(GraphError::TooManyMatchings { .. })
            | CapacityError::Graph(GraphError::TooManyCuts { .. })
            | CapacityError::LpNumericalFailure { .. }
            | CapacityError::LpTooLarge { .. }
            | CapacityError::TooManyOddSets { .. } => CliError::solver("solver", e),
            CapacityError::Process(crate::connectivity::ProcessError::TableTooLarge { .. }) => {
                CliError::solver("solver", e)
            }
            _ => CliError::input("input", e),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> CliError {
        match e {
            SimError::BadConfig(_) | SimError::Graph(_) | SimError::Process(_) => {
                CliError::input("input", e)
            }
            SimError::Capacity(c) => c.into(),
            SimError::InvariantViolation { .. } => CliError::solver("invariant", e),
            _ => CliError::solver("simulation", e),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input("parse", format!("{}: {e}", path.display())))
}

fn load_input(input: &InputArgs) -> Result<(Network, ConfigProcess), CliError> {
    if let Some(name) = &input.fixture {
        let f = fixtures::get(name)
            .ok_or_else(|| CliError::input("input", format!("unknown fixture {name:?}")))?;
        return Ok((f.network(), f.process()));
    }
    let (Some(net_path), Some(proc_path)) = (&input.net, &input.process) else {
        return Err(CliError::input(
            "input",
            "give --fixture or both --net and --process",
        ));
    };
    let raw: RawNetwork = read_json(net_path)?;
    let net = validate_network(&raw).map_err(|e| CliError::input("input", e))?;
    let raw_proc: RawProcess = read_json(proc_path)?;
    let process = raw_proc
        .resolve(&net)
        .map_err(|e| CliError::input("input", e))?;
    Ok((net, process))
}

fn match_limit() -> Result<usize, CliError> {
    match std::env::var(MATCH_LIMIT_ENV) {
        Ok(v) => v.parse().map_err(|_| {
            CliError::input("input", format!("{MATCH_LIMIT_ENV}={v:?} is not a count"))
        }),
        Err(_) => Ok(DEFAULT_MATCHING_LIMIT),
    }
}

fn capacity_json(net: &Network, res: &CapacityResult) -> Value {
    let pairs = |edges: &mut dyn Iterator<Item = usize>| -> Vec<[&str; 2]> {
        edges
            .map(|e| {
                let edge = net.edge(e);
                [net.name(edge.src), net.name(edge.dst)]
            })
            .collect()
    };
    let schedules: Vec<Value> = res
        .schedules
        .iter()
        .map(|s| {
            json!({
                "on": pairs(&mut s.mask.iter()),
                "p": s.prob,
                "activations": s.weights.iter().map(|(a, w)| json!({
                    "edges": pairs(&mut a.edges().iter().copied()),
                    "weight": w,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "lambda_star": res.lambda_star,
        "tight_nodes": res.tight_nodes.iter().map(|&v| net.name(v)).collect::<Vec<_>>(),
        "schedules": schedules,
    })
}

fn cmd_capacity(args: &CapacityArgs) -> Result<Value, CliError> {
    let (net, process) = load_input(&args.input)?;
    let table = if args.static_ {
        crate::connectivity::ConfigTable::all_on(net.edge_count())
    } else {
        process
            .stationary_distribution(DEFAULT_TABLE_LIMIT)
            .map_err(CapacityError::from)?
    };
    let opts = CapacityOptions {
        match_limit: match_limit()?,
        cuts: if args.all_cuts {
            CutConstraints::AllProper
        } else {
            CutConstraints::SingleNode
        },
        ..Default::default()
    };
    let res = compute_capacity_with(&net, &table, &opts)?;
    let mut out = capacity_json(&net, &res);
    if let Some(p) = args.bounds {
        out["bounds"] = serde_json::to_value(capacity_bounds(&net, p)?).unwrap();
    }
    if let Some(p) = args.approx {
        let a = approx_capacity(&net, p)?;
        out["approx"] = json!({
            "value": a.value,
            "p": a.p,
            "achieved_rate": a.achieved_rate(&net, &table),
        });
    }
    Ok(out)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Value, CliError> {
    let (net, mut process) = load_input(&args.input)?;
    if let Some(p) = args.p {
        process = ConfigProcess::Iid(
            IidLinkProcess::uniform(net.edge_count(), p)
                .map_err(|e| CliError::input("input", e))?,
        );
    }
    let policy = match args.policy {
        PolicyArg::Pistar => PolicyChoice::Pistar,
        PolicyArg::Piprime => PolicyChoice::Piprime {
            update_prob: args.update_prob,
        },
        PolicyArg::Rand => PolicyChoice::Rand {
            lambda_design: args
                .lambda_design
                .ok_or_else(|| CliError::input("input", "--policy rand needs --lambda-design"))?,
        },
    };
    let arrivals = if args.deterministic {
        Arrivals::Deterministic(args.lambda)
    } else {
        Arrivals::Poisson(args.lambda)
    };
    let mut cfg = SimConfig::new(
        Arc::new(net),
        Arc::new(process),
        policy,
        arrivals,
        args.slots,
        args.seed,
    );
    cfg.warmup = args.warmup;
    cfg.theta = args.theta;
    cfg.checks = match args.check_invariants {
        CheckArg::Off => CheckLevel::Off,
        CheckArg::Sampled => CheckLevel::Sampled,
        CheckArg::EverySlot => CheckLevel::EverySlot,
    };
    let mut report = sim::run(&cfg)?;
    if args.no_delays {
        report.delays.clear();
    }
    Ok(serde_json::to_value(&report).unwrap())
}

fn cmd_sweep(args: &SweepArgs) -> Result<Vec<u8>, CliError> {
    let spec: SweepSpec = match args.spec.strip_prefix("fixture:") {
        Some(name) => fixtures::sweep_spec(name)
            .ok_or_else(|| CliError::input("input", format!("unknown sweep fixture {name:?}")))?,
        None => read_json(Path::new(&args.spec))?,
    };
    let points = spec.points()?;
    let rows = sim::sweep(&points);
    for r in rows.iter() {
        if let Some(e) = &r.error {
            eprintln!(
                "{}",
                json!({ "row_error": e, "lambda": r.lambda, "p": r.p, "seed": r.seed })
            );
        }
    }
    let mut buf = Vec::new();
    sim::write_sweep_csv(&rows, &mut buf).map_err(|e| CliError::solver("io", e))?;
    Ok(buf)
}

#[derive(Serialize)]
struct FixtureListing {
    name: &'static str,
    kind: &'static str,
    origin: String,
    description: String,
    lambda_star: Option<f64>,
}

fn cmd_fixtures(action: &FixtureAction, out: &mut dyn Write) -> Result<i32, CliError> {
    match action {
        FixtureAction::List => {
            for name in fixtures::names() {
                let f = fixtures::get(name).unwrap();
                let row = FixtureListing {
                    name,
                    kind: "capacity",
                    origin: f.origin.clone(),
                    description: f.description.clone(),
                    lambda_star: Some(f.expected_lambda()),
                };
                writeln!(out, "{}", serde_json::to_string(&row).unwrap()).ok();
            }
            for name in fixtures::sweep_names() {
                let s = fixtures::sweep_spec(name).unwrap();
                let row = FixtureListing {
                    name,
                    kind: "sweep",
                    origin: s.origin.clone().unwrap_or_default(),
                    description: format!("{} rows", s.points()?.len()),
                    lambda_star: None,
                };
                writeln!(out, "{}", serde_json::to_string(&row).unwrap()).ok();
            }
            Ok(EXIT_OK)
        }
        FixtureAction::Run => {
            let mut code = EXIT_OK;
            for f in fixtures::all() {
                let outcome = f.verify()?;
                if !outcome.pass {
                    code = EXIT_MISMATCH;
                }
                writeln!(out, "{}", serde_json::to_string(&outcome).unwrap()).ok();
            }
            Ok(code)
        }
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, bytes).map_err(|e| CliError::input("io", format!("{}: {e}", p.display())))
        }
        None => out.write_all(bytes).map_err(|e| CliError::solver("io", e)),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Capacity(args) => {
            let v = cmd_capacity(&args)?;
            writeln!(out, "{v}").ok();
            Ok(EXIT_OK)
        }
        Command::Simulate(args) => {
            let v = cmd_simulate(&args)?;
            let mut text = serde_json::to_vec_pretty(&v).unwrap();
            text.push(b'\n');
            write_output(args.out.as_deref(), &text, out)?;
            Ok(EXIT_OK)
        }
        Command::Sweep(args) => {
            let csv = cmd_sweep(&args)?;
            write_output(args.out.as_deref(), &csv, out)?;
            Ok(EXIT_OK)
        }
        Command::Fixtures { action } => cmd_fixtures(&action, out),
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(out, "{e}").ok();
                return EXIT_OK;
            }
            let e = CliError::input("usage", e.to_string().lines().next().unwrap_or_default());
            writeln!(err, "{}", e.to_json()).ok();
            return e.code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            writeln!(err, "{}", e.to_json()).ok();
            e.code
        }
    }
}
