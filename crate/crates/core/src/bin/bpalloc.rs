//! Command-line front end: single-instance allocation, admission control,
//! and batch simulation sweeps.
//!
//! Exit codes: 0 success, 1 input or solver error, 2 infeasible instance.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bpalloc::admission::{
    self, check_optimality_conditions, exhaustive_admission_no_relay, exhaustive_admission_relay,
    greedy_admission_no_relay, greedy_admission_relay, AdmissionResult,
};
use bpalloc::allocators::{self, Objective, Scheme};
use bpalloc::model::{check_feasibility, NetworkTopology};
use bpalloc::scenario::Scenario;
use bpalloc::simharness::{
    self, admission_probability, greedy_benchmark, run_sweep, ScenarioConfig, Sweep,
    SweepParameter,
};
use bpalloc::Error;

#[derive(Parser)]
#[command(name = "bpalloc", version, about = "Joint bandwidth and power allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one allocation instance from a scenario file.
    Allocate(AllocateArgs),
    /// Decide which users to admit when the band is too small.
    Admit(AdmitArgs),
    /// Run seeded Monte-Carlo sweeps and benchmarks.
    Simulate(SimulateArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Sum,
    Maxmin,
    Powermin,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Objective {
        match o {
            ObjectiveArg::Sum => Objective::SumCapacity,
            ObjectiveArg::Maxmin => Objective::MaxMin,
            ObjectiveArg::Powermin => Objective::PowerMin,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Obpa,
    Ebopa,
    Ebpa,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Obpa => Scheme::Obpa,
            SchemeArg::Ebopa => Scheme::Ebopa,
            SchemeArg::Ebpa => Scheme::Ebpa,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct AllocateArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "sum")]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value = "obpa")]
    scheme: SchemeArg,
    /// Require the scenario to be relayed (true) or direct (false).
    #[arg(long)]
    relay: Option<bool>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Greedy,
    Exhaustive,
    Both,
}

#[derive(Args)]
struct AdmitArgs {
    /// Scenario file (TOML); thresholds required.
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "greedy")]
    algorithm: AlgorithmArg,
    /// Require the scenario to be relayed (true) or direct (false).
    #[arg(long)]
    relay: Option<bool>,
    /// Print the greedy removal trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sweep,
    Admission,
    Benchmark,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config file (TOML); not used in benchmark mode.
    config: Option<PathBuf>,
    /// Sweep spec: "name=start:step:stop" or "name=v1,v2,...". Names:
    /// P_R, P_S, W, c (sweep/admission) or c0 (benchmark).
    #[arg(long)]
    sweep: String,
    #[arg(long, value_enum, default_value = "sweep")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "sum")]
    objective: ObjectiveArg,
    /// Schemes to compare (sweep mode).
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["obpa", "ebopa", "ebpa"])]
    schemes: Vec<SchemeArg>,
    /// Benchmark setup id (1-4), benchmark mode only.
    #[arg(long)]
    setup: Option<u8>,
    /// Override the config's run count.
    #[arg(long)]
    runs: Option<usize>,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread count (default: BPALLOC_WORKERS or all cores).
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Allocate(args) => cmd_allocate(&args),
        Command::Admit(args) => cmd_admit(&args),
        Command::Simulate(args) => cmd_simulate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InfeasibleInstance { .. } | Error::InfeasiblePower { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn check_relay_flag(flag: Option<bool>, scenario: &Scenario) -> Result<(), Error> {
    if let Some(want) = flag {
        if want != scenario.gains.is_relayed() {
            return Err(Error::InvalidInput(format!(
                "scenario is {} but --relay {want} was given",
                if scenario.gains.is_relayed() { "relayed" } else { "direct" }
            )));
        }
    }
    Ok(())
}

fn require_thresholds(scenario: &Scenario) -> Result<Vec<f64>, Error> {
    scenario
        .thresholds
        .clone()
        .ok_or_else(|| Error::InvalidInput("scenario has no c_min thresholds".into()))
}

// ---------------------------------------------------------------------------
// allocate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct UserRow {
    user: usize,
    source: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    relay: Option<usize>,
    power: f64,
    bandwidth: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    relay_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relay_bandwidth: Option<f64>,
    capacity: f64,
}

#[derive(Serialize)]
struct AllocateReport {
    objective: String,
    scheme: String,
    value: f64,
    feasible: bool,
    worst_constraint: String,
    worst_slack: f64,
    users: Vec<UserRow>,
}

fn cmd_allocate(args: &AllocateArgs) -> Result<(), Error> {
    let scenario = Scenario::load(&args.scenario)?;
    check_relay_flag(args.relay, &scenario)?;
    let objective: Objective = args.objective.into();
    let scheme: Scheme = args.scheme.into();
    let (allocation, value) = allocators::solve(
        &scenario.topology,
        &scenario.gains,
        scenario.thresholds.as_deref(),
        scheme,
        objective,
    )?;
    let caps = allocators::user_capacities(&scenario.topology, &scenario.gains, &allocation)?;
    let feas = check_feasibility(&scenario.topology, &allocation, 1e-8)?;
    let worst = feas.worst().expect("nonempty constraint report");

    let users = scenario
        .topology
        .users
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let s = &allocation.source_shares[i];
            let r = allocation.relay_shares.as_ref().map(|r| &r[i]);
            UserRow {
                user: u.id,
                source: u.source_id,
                relay: u.relay_id,
                power: s.power(),
                bandwidth: s.bandwidth(),
                relay_power: r.map(|r| r.power()),
                relay_bandwidth: r.map(|r| r.bandwidth()),
                capacity: caps[i],
            }
        })
        .collect();
    let report = AllocateReport {
        objective: simharness::objective_name(objective).to_string(),
        scheme: simharness::scheme_name(scheme).to_string(),
        value,
        feasible: feas.satisfied(),
        worst_constraint: worst.name.clone(),
        worst_slack: worst.slack,
        users,
    };
    let text = render_report(&report, args.format)?;
    write_output(args.out.as_deref(), &text)
}

fn render_report(report: &AllocateReport, format: FormatArg) -> Result<String, Error> {
    let relayed = report.users.iter().any(|u| u.relay.is_some());
    Ok(match format {
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| Error::Scenario(e.to_string()))?;
            s.push('\n');
            s
        }
        FormatArg::Csv | FormatArg::Table => {
            let sep = if format == FormatArg::Csv { "," } else { "\t" };
            let mut out = String::new();
            out.push_str(&format!(
                "objective{sep}{}\nscheme{sep}{}\nvalue{sep}{}\nfeasible{sep}{}\nworst_constraint{sep}{}\nworst_slack{sep}{}\n",
                report.objective,
                report.scheme,
                report.value,
                report.feasible,
                report.worst_constraint,
                report.worst_slack
            ));
            if relayed {
                out.push_str(&format!(
                    "user{sep}source{sep}relay{sep}power{sep}bandwidth{sep}relay_power{sep}relay_bandwidth{sep}capacity\n"
                ));
            } else {
                out.push_str(&format!("user{sep}source{sep}power{sep}bandwidth{sep}capacity\n"));
            }
            for u in &report.users {
                if relayed {
                    out.push_str(&format!(
                        "{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}\n",
                        u.user,
                        u.source,
                        u.relay.unwrap(),
                        u.power,
                        u.bandwidth,
                        u.relay_power.unwrap(),
                        u.relay_bandwidth.unwrap(),
                        u.capacity
                    ));
                } else {
                    out.push_str(&format!(
                        "{}{sep}{}{sep}{}{sep}{}{sep}{}\n",
                        u.user, u.source, u.power, u.bandwidth, u.capacity
                    ));
                }
            }
            out
        }
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// admit
// ---------------------------------------------------------------------------

fn print_admission(
    label: &str,
    result: &AdmissionResult,
    topology: &NetworkTopology,
    trace: bool,
) {
    let ids: Vec<String> = result
        .admitted
        .iter()
        .map(|&i| topology.users[i].id.to_string())
        .collect();
    println!(
        "{label}: admitted {{{}}} t_star {} oracle_calls {}",
        ids.join(","),
        result.t_star,
        result.oracle_calls
    );
    if trace {
        for step in &result.removal_trace {
            println!(
                "  removed user {} (G {} -> {})",
                topology.users[step.user].id, step.g_before, step.g_after
            );
        }
    }
}

fn cmd_admit(args: &AdmitArgs) -> Result<(), Error> {
    let scenario = Scenario::load(&args.scenario)?;
    check_relay_flag(args.relay, &scenario)?;
    let thresholds = require_thresholds(&scenario)?;
    let topology = &scenario.topology;
    let gains = &scenario.gains;
    let relayed = gains.is_relayed();

    let greedy = || {
        if relayed {
            greedy_admission_relay(topology, gains, &thresholds)
        } else {
            greedy_admission_no_relay(topology, gains, &thresholds)
        }
    };
    let exhaustive = || {
        if relayed {
            exhaustive_admission_relay(topology, gains, &thresholds)
        } else {
            exhaustive_admission_no_relay(topology, gains, &thresholds)
        }
    };

    match args.algorithm {
        AlgorithmArg::Greedy => {
            let r = greedy()?;
            print_admission("greedy", &r, topology, args.trace);
        }
        AlgorithmArg::Exhaustive => {
            let r = exhaustive()?;
            print_admission("exhaustive", &r, topology, args.trace);
        }
        AlgorithmArg::Both => {
            let mut g = greedy()?;
            let x = exhaustive()?;
            if !relayed {
                admission::mark_against_oracle(&mut g, &x, topology, gains, &thresholds)?;
            } else {
                g.optimal_flag = Some(g.admitted.len() == x.admitted.len());
            }
            print_admission("greedy", &g, topology, args.trace);
            print_admission("exhaustive", &x, topology, false);
            println!(
                "greedy_optimal {}",
                if g.optimal_flag == Some(true) { "yes" } else { "no" }
            );
            if !relayed {
                let rep = check_optimality_conditions(topology, gains, &thresholds)?;
                println!(
                    "conditions: equal_thresholds {} intersections_ok {} c1 {} c2 {} guaranteed {}",
                    rep.equal_thresholds,
                    rep.intersection_condition,
                    rep.c1.map_or("unknown".into(), |b| b.to_string()),
                    rep.c2,
                    rep.guaranteed
                );
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn parse_sweep(spec: &str) -> Result<(String, Vec<f64>), Error> {
    let bad = |msg: &str| Error::InvalidInput(format!("sweep spec '{spec}': {msg}"));
    let (name, rest) = spec
        .split_once('=')
        .ok_or_else(|| bad("expected name=..."))?;
    let values: Vec<f64> = if rest.contains(':') {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range form is start:step:stop"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
        let step: f64 = parts[1].parse().map_err(|_| bad("bad step"))?;
        let stop: f64 = parts[2].parse().map_err(|_| bad("bad stop"))?;
        if !(step > 0.0) || stop < start {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let mut v = Vec::new();
        let mut x = start;
        while x <= stop + 1e-9 * step {
            v.push(x);
            x += step;
        }
        v
    } else {
        rest.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("bad value")))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad("no values"));
    }
    Ok((name.to_string(), values))
}

fn sweep_parameter(name: &str) -> Result<SweepParameter, Error> {
    match name {
        "P_R" => Ok(SweepParameter::RelayPower),
        "P_S" => Ok(SweepParameter::SourcePower),
        "W" => Ok(SweepParameter::Bandwidth),
        "c" => Ok(SweepParameter::Threshold),
        _ => Err(Error::InvalidInput(format!(
            "unknown sweep parameter '{name}' (use P_R, P_S, W, or c)"
        ))),
    }
}

fn load_config(args: &SimulateArgs) -> Result<ScenarioConfig, Error> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("a config file is required".into()))?;
    let text = std::fs::read_to_string(path)?;
    let mut config: ScenarioConfig =
        toml::from_str(&text).map_err(|e| Error::Scenario(e.to_string()))?;
    if let Some(runs) = args.runs {
        config.runs = runs;
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn emit(args: &SimulateArgs, table: &str, manifest: Option<&str>) -> Result<(), Error> {
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("results.tsv"), table)?;
            if let Some(m) = manifest {
                std::fs::write(dir.join("manifest.toml"), m)?;
            }
            Ok(())
        }
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let workers = args.workers.or_else(|| {
        std::env::var("BPALLOC_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(k) = workers {
            b = b.num_threads(k);
        }
        b.build()
            .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?
    };
    let (name, values) = parse_sweep(&args.sweep)?;

    match args.mode {
        ModeArg::Sweep => {
            let config = load_config(args)?;
            let parameter = sweep_parameter(&name)?;
            let sweep = Sweep {
                parameter,
                values,
            };
            let schemes: Vec<Scheme> = args.schemes.iter().map(|&s| s.into()).collect();
            let table =
                pool.install(|| run_sweep(&config, &sweep, &schemes, args.objective.into()))?;
            emit(args, &table.to_tsv(), Some(&simharness::manifest(&config)?))
        }
        ModeArg::Admission => {
            let config = load_config(args)?;
            if sweep_parameter(&name)? != SweepParameter::Threshold {
                return Err(Error::InvalidInput(
                    "admission mode sweeps the threshold; use c=...".into(),
                ));
            }
            let points = pool.install(|| admission_probability(&config, &values))?;
            let mut out = String::from("threshold\tobpa\tebopa\tebpa\n");
            for p in points {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    p.threshold, p.obpa, p.ebopa, p.ebpa
                ));
            }
            emit(args, &out, Some(&simharness::manifest(&config)?))
        }
        ModeArg::Benchmark => {
            let setup = args
                .setup
                .ok_or_else(|| Error::InvalidInput("benchmark mode needs --setup".into()))?;
            if name != "c0" {
                return Err(Error::InvalidInput(
                    "benchmark mode sweeps the threshold floor; use c0=...".into(),
                ));
            }
            let runs = args.runs.unwrap_or(20);
            let seed = args.seed.unwrap_or(1);
            let rows = pool.install(|| greedy_benchmark(setup, &values, runs, seed))?;
            let mut out = String::from(
                "c0\tgreedy_admitted\texhaustive_admitted\tgreedy_calls\texhaustive_calls\ttime_ratio\n",
            );
            for r in rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    r.c0,
                    r.greedy_admitted,
                    r.exhaustive_admitted,
                    r.greedy_calls,
                    r.exhaustive_calls,
                    r.time_ratio
                ));
            }
            emit(args, &out, None)
        }
    }
}
