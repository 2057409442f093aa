//! `amapf`: solve, benchmark and validate anonymous MAPF instances.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/validation error,
//! 3 timeout.

mod bench;
mod document;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use amapf_core::graph::grid_to_graph;
use amapf_core::instance::{build_instance, Instance};
use amapf_core::movingai::{parse_map, parse_scenario};
use amapf_core::plan::validate;
use amapf_core::solver::{solve, Engine, SolveError, SolveOptions, SolveOutcome};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "amapf",
    about = "Makespan-optimal anonymous multi-agent path finding via maximum flow",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance built from a map and a scenario prefix.
    Solve(SolveArgs),
    /// Sweep scenario directories and emit one CSV row per run.
    Bench(BenchArgs),
    /// Check a solution document for conflicts and goal coverage.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Bulk,
    Baseline,
}

impl From<EngineArg> for Engine {
    fn from(arg: EngineArg) -> Engine {
        match arg {
            EngineArg::Bulk => Engine::Bulk,
            EngineArg::Baseline => Engine::Baseline,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Plain,
}

#[derive(Args)]
struct SolveArgs {
    /// MovingAI .map file.
    #[arg(long)]
    map: PathBuf,
    /// MovingAI .scen file; the first --agents entries form the instance.
    #[arg(long)]
    scen: PathBuf,
    /// Number of agents (scenario prefix length).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    agents: u32,
    #[arg(long, value_enum, default_value = "bulk")]
    engine: EngineArg,
    /// Wall-clock limit in seconds (fractions allowed); 0 disables it.
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,
    /// Probe exactly this horizon instead of searching for the optimum.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    t_override: Option<u32>,
    /// Write the solution document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory holding .map files.
    #[arg(long)]
    maps: PathBuf,
    /// Directory holding .scen files.
    #[arg(long)]
    scens: PathBuf,
    /// Comma-separated ascending agent counts.
    #[arg(long, default_value = "1,2,4,8,16,32,64,128,256,512,1000")]
    agent_schedule: String,
    /// Per-solve wall-clock limit in seconds (fractions allowed).
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,
    /// Comma-separated engines to run.
    #[arg(long, default_value = "bulk,baseline")]
    engines: String,
    /// Parallel solve jobs.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// MovingAI .map file the solution refers to.
    #[arg(long)]
    map: PathBuf,
    /// Solution document produced by `amapf solve`.
    #[arg(long)]
    solution: PathBuf,
    /// Optional scenario to cross-check the embedded instance against.
    #[arg(long)]
    scen: Option<PathBuf>,
    /// Agent count for the scenario cross-check.
    #[arg(long)]
    agents: Option<u32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if benign {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn read_instance(map: &PathBuf, scen: &PathBuf, agents: u32) -> Result<(Instance, String)> {
    let map_text = std::fs::read_to_string(map)
        .with_context(|| format!("reading map {}", map.display()))?;
    let grid = parse_map(&map_text).with_context(|| format!("parsing {}", map.display()))?;
    let scen_text = std::fs::read_to_string(scen)
        .with_context(|| format!("reading scenario {}", scen.display()))?;
    let entries =
        parse_scenario(&scen_text).with_context(|| format!("parsing {}", scen.display()))?;
    let instance = build_instance(&grid, &entries, agents as usize)
        .context("building the instance from the scenario prefix")?;
    let map_name = map
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("map")
        .to_string();
    Ok((instance, map_name))
}

fn timeout_of(seconds: f64) -> Option<Duration> {
    (seconds > 0.0).then(|| Duration::from_secs_f64(seconds))
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write;
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            if let Err(e) = std::io::stdout().write_all(payload.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let (instance, map_name) = read_instance(&args.map, &args.scen, args.agents)?;
    let options = SolveOptions {
        engine: args.engine.into(),
        timeout: timeout_of(args.timeout),
        t_override: args.t_override,
    };
    let outcome = match solve(&instance, &options) {
        Ok(outcome) => outcome,
        Err(failure) => {
            if matches!(failure.error, SolveError::Timeout { .. }) {
                eprintln!("error: {failure}");
                return Ok(ExitCode::from(EXIT_TIMEOUT));
            }
            bail!("{failure}");
        }
    };

    match outcome {
        SolveOutcome::Solved(solution) => {
            let horizon = solution
                .plans
                .iter()
                .map(|p| p.actions.len())
                .max()
                .unwrap_or(0) as u32;
            let report = validate(&instance, &solution.plans, horizon);
            if !report.ok {
                bail!(
                    "produced solution failed validation: {}",
                    report.first_failure.unwrap_or_default()
                );
            }
            let doc = document::solution_doc(&map_name, instance.graph(), &solution);
            let payload = match args.format {
                FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&doc)?),
                FormatArg::Plain => document::render_plain(&doc),
            };
            emit(&args.out, &payload)?;
            Ok(ExitCode::SUCCESS)
        }
        SolveOutcome::Infeasible { t, flow, stats } => {
            let doc = document::InfeasibleDoc {
                map: map_name,
                status: "infeasible".into(),
                t,
                flow,
                agents: instance.agent_count(),
                stats: document::stats_doc(&stats),
            };
            let payload = match args.format {
                FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&doc)?),
                FormatArg::Plain => format!(
                    "infeasible at T={t}: flow {flow} of {} agents\n",
                    instance.agent_count()
                ),
            };
            emit(&args.out, &payload)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let schedule: Vec<usize> = args
        .agent_schedule
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("bad agent count `{s}` in schedule"))
        })
        .collect::<Result<_>>()?;
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        bail!("agent schedule must be strictly ascending");
    }
    let engines: Vec<Engine> = args
        .engines
        .split(',')
        .map(|s| match s.trim() {
            "bulk" => Ok(Engine::Bulk),
            "baseline" => Ok(Engine::Baseline),
            other => Err(anyhow!("unknown engine `{other}`")),
        })
        .collect::<Result<_>>()?;

    let rows = bench::run_sweep(
        &args.maps,
        &args.scens,
        &schedule,
        &engines,
        Duration::from_secs_f64(args.timeout.max(0.001)),
        args.jobs as usize,
    )?;

    let mut csv = String::from(bench::CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    emit(&args.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let map_text = std::fs::read_to_string(&args.map)
        .with_context(|| format!("reading map {}", args.map.display()))?;
    let grid = parse_map(&map_text).with_context(|| format!("parsing {}", args.map.display()))?;
    let graph = std::sync::Arc::new(grid_to_graph(&grid));

    let doc_text = std::fs::read_to_string(&args.solution)
        .with_context(|| format!("reading solution {}", args.solution.display()))?;
    let doc: document::SolutionDoc =
        serde_json::from_str(&doc_text).context("solution document does not match the schema")?;

    let mut starts = Vec::with_capacity(doc.agents.len());
    let mut goals = Vec::with_capacity(doc.agents.len());
    for (i, agent) in doc.agents.iter().enumerate() {
        let [sx, sy] = agent.start;
        let [gx, gy] = agent.goal;
        starts.push(graph.vertex_at(sx, sy).ok_or_else(|| {
            anyhow!("agent {i}: start ({sx}, {sy}) is outside the map or blocked")
        })?);
        goals.push(graph.vertex_at(gx, gy).ok_or_else(|| {
            anyhow!("agent {i}: goal ({gx}, {gy}) is outside the map or blocked")
        })?);
    }
    let instance = Instance::new(std::sync::Arc::clone(&graph), starts, goals)
        .context("solution document does not embed a valid instance")?;

    if let Some(scen) = &args.scen {
        let agents = args
            .agents
            .ok_or_else(|| anyhow!("--scen requires --agents"))?;
        let scen_text = std::fs::read_to_string(scen)
            .with_context(|| format!("reading scenario {}", scen.display()))?;
        let entries =
            parse_scenario(&scen_text).with_context(|| format!("parsing {}", scen.display()))?;
        let expected = build_instance(&grid, &entries, agents as usize)
            .context("building the scenario instance")?;
        let sort = |v: &[u32]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        if sort(expected.starts()) != sort(instance.starts())
            || sort(expected.goals()) != sort(instance.goals())
        {
            bail!("solution agents do not match the scenario prefix");
        }
    }

    let plans: Vec<_> = doc
        .agents
        .iter()
        .enumerate()
        .map(|(i, agent)| document::plan_from_doc(&graph, agent, i))
        .collect::<Result<_>>()?;
    let horizon = doc
        .agents
        .iter()
        .map(|a| a.actions.len())
        .max()
        .unwrap_or(0) as u32;

    let report = validate(&instance, &plans, horizon);
    if report.ok {
        println!("valid: {} agents, makespan {}", plans.len(), doc.makespan);
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "invalid: {}",
            report.first_failure.clone().unwrap_or_default()
        );
        for c in &report.vertex_conflicts {
            let (x, y) = graph.cell_of(c.location.0);
            println!(
                "vertex conflict: t={} agents {:?} at ({x}, {y})",
                c.time, c.agents
            );
        }
        for c in &report.edge_conflicts {
            let (x, y) = graph.cell_of(c.location.0);
            let (x2, y2) = graph.cell_of(c.location.1.unwrap());
            println!(
                "edge conflict: t={} agents {:?} on ({x}, {y})-({x2}, {y2})",
                c.time, c.agents
            );
        }
        if !report.goal_coverage {
            println!("goal coverage: failed");
        }
        Ok(ExitCode::from(EXIT_INPUT))
    }
}
