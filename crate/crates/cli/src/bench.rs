//! Benchmark sweeps over MovingAI map/scenario directories.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::{Context, Result};

use amapf_core::instance::build_instance;
use amapf_core::movingai::{parse_map, parse_scenario, GridMap, ScenarioEntry};
use amapf_core::solver::{solve, Engine, SolveError, SolveOptions, SolveOutcome, SolveStats};

pub const CSV_HEADER: &str =
    "map,scenario,agents,engine,makespan,t_probes,expansions,generated,augmentations,estimator_ms,solve_ms,status";

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub map: String,
    pub scenario: String,
    pub agents: usize,
    pub engine: Engine,
    pub makespan: Option<u32>,
    pub t_probes: usize,
    pub expansions: u64,
    pub generated: u64,
    pub augmentations: u64,
    pub estimator_ms: f64,
    pub solve_ms: f64,
    pub status: &'static str,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.3},{:.3},{}",
            self.map,
            self.scenario,
            self.agents,
            self.engine.name(),
            self.makespan.map(|m| m.to_string()).unwrap_or_default(),
            self.t_probes,
            self.expansions,
            self.generated,
            self.augmentations,
            self.estimator_ms,
            self.solve_ms,
            self.status
        )
    }
}

struct Task {
    map_name: String,
    scenario: String,
    map: GridMap,
    entries: Vec<ScenarioEntry>,
    engine: Engine,
}

/// One scenario/engine pair: run the schedule ascending, stop the scenario
/// on its first timeout.
fn run_task(task: &Task, schedule: &[usize], timeout: Duration) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for &k in schedule {
        if k > task.entries.len() {
            break;
        }
        let row_base = |stats: &SolveStats| BenchRow {
            map: task.map_name.clone(),
            scenario: task.scenario.clone(),
            agents: k,
            engine: task.engine,
            makespan: None,
            t_probes: stats.per_t.len(),
            expansions: stats.expansions,
            generated: stats.generated,
            augmentations: stats.augmentations,
            estimator_ms: stats.estimator_time.as_secs_f64() * 1e3,
            solve_ms: stats.total_time.as_secs_f64() * 1e3,
            status: "error",
        };
        let instance = match build_instance(&task.map, &task.entries, k) {
            Ok(instance) => instance,
            Err(e) => {
                eprintln!(
                    "{}: k={k}: cannot build instance: {e}",
                    task.scenario
                );
                rows.push(row_base(&SolveStats::default()));
                break;
            }
        };
        let options = SolveOptions {
            engine: task.engine,
            timeout: Some(timeout),
            t_override: None,
        };
        match solve(&instance, &options) {
            Ok(SolveOutcome::Solved(solution)) => {
                let mut row = row_base(&solution.stats);
                row.makespan = Some(solution.makespan);
                row.status = "solved";
                rows.push(row);
            }
            Ok(SolveOutcome::Infeasible { stats, .. }) => {
                rows.push(row_base(&stats));
                break;
            }
            Err(failure) => {
                let mut row = row_base(&failure.stats);
                row.status = match failure.error {
                    SolveError::Timeout { .. } => "timeout",
                    _ => "error",
                };
                rows.push(row);
                break;
            }
        }
    }
    rows
}

/// Pair every `.scen` file with its map, run the schedule for each engine,
/// and return the rows in (scenario, engine) task order regardless of job
/// count. Per-file problems are logged and skipped.
pub fn run_sweep(
    maps_dir: &Path,
    scens_dir: &Path,
    schedule: &[usize],
    engines: &[Engine],
    timeout: Duration,
    jobs: usize,
) -> Result<Vec<BenchRow>> {
    let mut scen_files: Vec<PathBuf> = std::fs::read_dir(scens_dir)
        .with_context(|| format!("reading scenario directory {}", scens_dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "scen"))
        .collect();
    scen_files.sort();

    let mut tasks = Vec::new();
    for scen_path in &scen_files {
        let scenario = scen_path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("scenario")
            .to_string();
        let text = match std::fs::read_to_string(scen_path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("{}: {e}", scen_path.display());
                continue;
            }
        };
        let entries = match parse_scenario(&text) {
            Ok(entries) if !entries.is_empty() => entries,
            Ok(_) => {
                eprintln!("{}: empty scenario", scen_path.display());
                continue;
            }
            Err(e) => {
                eprintln!("{}: {e}", scen_path.display());
                continue;
            }
        };
        let map_file = maps_dir.join(&entries[0].map_name);
        let map_text = match std::fs::read_to_string(&map_file) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("{}: {e}", map_file.display());
                continue;
            }
        };
        let map = match parse_map(&map_text) {
            Ok(map) => map,
            Err(e) => {
                eprintln!("{}: {e}", map_file.display());
                continue;
            }
        };
        let map_name = map_file
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("map")
            .to_string();
        for &engine in engines {
            tasks.push(Task {
                map_name: map_name.clone(),
                scenario: scenario.clone(),
                map: map.clone(),
                entries: entries.clone(),
                engine,
            });
        }
    }

    let results: Vec<Mutex<Option<Vec<BenchRow>>>> =
        tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(tasks.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let rows = run_task(&tasks[i], schedule, timeout);
                *results[i].lock().unwrap() = Some(rows);
            });
        }
    });

    Ok(results
        .into_iter()
        .flat_map(|slot| slot.into_inner().unwrap().unwrap_or_default())
        .collect())
}
