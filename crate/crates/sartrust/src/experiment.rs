//! Runs the scenario × model × run grid.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sartrust_core::engine::{run_episode, run_episode_observed, EpisodeResult, Scenario, ScenarioName, SimConfig};
use sartrust_core::metrics::{
    aggregate_present, aggregate_runs, average_completion_time, task_success_rate, SummaryStats,
};
use sartrust_core::rng::stable_hash;
use sartrust_core::trust::TrustModelKind;

use crate::config::ExperimentConfig;
use crate::output::StepLogWriter;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed for run `run` of a cell. Cells hash independently, so adding a
/// model or scenario leaves every other cell's seeds untouched.
pub fn run_seed(base_seed: u64, scenario: ScenarioName, model: TrustModelKind, run: u32) -> u64 {
    let key = format!("{}/{}", scenario.label(), model.name());
    base_seed.wrapping_add(stable_hash(key.as_bytes())).wrapping_add(u64::from(run))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub scenario: ScenarioName,
    pub model: TrustModelKind,
    pub run: u32,
    pub seed: u64,
    /// `None` only when the episode aborted.
    pub tsr: Option<f64>,
    pub act: Option<f64>,
    pub completed: usize,
    pub total: usize,
    pub steps: u32,
    pub error: Option<String>,
}

impl RunRow {
    fn from_result(run: u32, result: &EpisodeResult) -> Self {
        let tsr = task_success_rate(result, result.total_tasks).ok();
        Self {
            scenario: result.scenario,
            model: result.model,
            run,
            seed: result.seed,
            tsr,
            act: average_completion_time(result),
            completed: result.completed_count(),
            total: result.total_tasks,
            steps: result.steps_used,
            error: None,
        }
    }

    fn failed(scenario: ScenarioName, model: TrustModelKind, run: u32, seed: u64, error: String) -> Self {
        Self { scenario, model, run, seed, tsr: None, act: None, completed: 0, total: 0, steps: 0, error: Some(error) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub scenario: ScenarioName,
    pub model: TrustModelKind,
    pub runs: usize,
    pub failed: usize,
    pub tsr: Option<SummaryStats>,
    /// Over runs with at least one completion; `n` is the effective count.
    pub act: Option<SummaryStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub scenario: ScenarioName,
    pub model: TrustModelKind,
    pub run: u32,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub version: &'static str,
    pub cells: Vec<CellSummary>,
    pub rows: Vec<RunRow>,
    pub wall_time: Duration,
}

impl ExperimentReport {
    pub fn failures(&self) -> Vec<RunFailure> {
        self.rows
            .iter()
            .filter_map(|r| {
                r.error.as_ref().map(|e| RunFailure {
                    scenario: r.scenario,
                    model: r.model,
                    run: r.run,
                    error: e.clone(),
                })
            })
            .collect()
    }
}

/// Groups rows by cell in first-seen order and aggregates each cell.
pub fn summarize_rows(rows: &[RunRow]) -> Vec<CellSummary> {
    let mut keys: Vec<(ScenarioName, TrustModelKind)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.scenario, r.model)) {
            keys.push((r.scenario, r.model));
        }
    }
    keys.into_iter()
        .map(|(scenario, model)| {
            let cell: Vec<&RunRow> = rows.iter().filter(|r| r.scenario == scenario && r.model == model).collect();
            let tsr: Vec<f64> = cell.iter().filter_map(|r| r.tsr).collect();
            CellSummary {
                scenario,
                model,
                runs: cell.len(),
                failed: cell.iter().filter(|r| r.error.is_some()).count(),
                tsr: aggregate_runs(&tsr).ok(),
                act: aggregate_present(cell.iter().map(|r| r.act)),
            }
        })
        .collect()
}

/// Called after each finished episode with (done, total).
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("cannot write step log {path}: {source}")]
    StepLog {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Executes every episode of the grid on `jobs` worker threads.
///
/// When `step_log_dir` is set each episode also writes its JSONL trace there.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    jobs: usize,
    step_log_dir: Option<&Path>,
    progress: Progress<'_>,
) -> Result<ExperimentReport, ExperimentError> {
    let started = Instant::now();
    let sim = cfg.sim_config();
    let mut grid = Vec::new();
    for &scenario in &cfg.scenarios {
        for &model in &cfg.models {
            for run in 0..cfg.runs_per_cell {
                grid.push((scenario, model, run));
            }
        }
    }
    if let Some(dir) = step_log_dir {
        std::fs::create_dir_all(dir).map_err(|source| ExperimentError::StepLog { path: dir.to_path_buf(), source })?;
    }

    let total = grid.len();
    let done = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let results: Vec<Result<RunRow, ExperimentError>> = pool.install(|| {
        grid.par_iter()
            .map(|&(scenario, model, run)| {
                let row = run_one(&sim, cfg.base_seed, scenario, model, run, step_log_dir);
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                row
            })
            .collect()
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| (r.scenario, r.model, r.run));

    Ok(ExperimentReport {
        config: cfg.clone(),
        version: VERSION,
        cells: summarize_rows(&rows),
        rows,
        wall_time: started.elapsed(),
    })
}

fn run_one(
    sim: &SimConfig,
    base_seed: u64,
    scenario: ScenarioName,
    model: TrustModelKind,
    run: u32,
    step_log_dir: Option<&Path>,
) -> Result<RunRow, ExperimentError> {
    let seed = run_seed(base_seed, scenario, model, run);
    let named = Scenario::named(scenario);
    let outcome = match step_log_dir {
        None => run_episode(&named, model, sim, seed),
        Some(dir) => {
            let path = dir.join(format!("{}_{}_{}.jsonl", scenario.label(), model.name(), run));
            let mut log = StepLogWriter::create(&path)
                .map_err(|source| ExperimentError::StepLog { path: path.clone(), source })?;
            let outcome = run_episode_observed(&named, model, sim, seed, &mut log);
            log.finish().map_err(|source| ExperimentError::StepLog { path, source })?;
            outcome
        }
    };
    Ok(match outcome {
        Ok(result) => RunRow::from_result(run, &result),
        Err(e) => RunRow::failed(scenario, model, run, seed, e.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            scenarios: vec![ScenarioName::Small],
            models: vec![TrustModelKind::Ect, TrustModelKind::NoTrust],
            runs_per_cell: 3,
            ..Default::default()
        }
    }

    #[test]
    fn seeds_are_cell_local() {
        let a = run_seed(7, ScenarioName::Small, TrustModelKind::Ect, 0);
        assert_eq!(run_seed(7, ScenarioName::Small, TrustModelKind::Ect, 2), a.wrapping_add(2));
        assert_ne!(a, run_seed(7, ScenarioName::Small, TrustModelKind::Monir, 0));
        assert_ne!(a, run_seed(7, ScenarioName::Large, TrustModelKind::Ect, 0));
    }

    #[test]
    fn rows_are_sorted_and_counted() {
        let report = run_experiment(&tiny(), 2, None, &|_, _| {}).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert_eq!(report.cells.len(), 2);
        // NoTrust sorts before Ect.
        assert_eq!(report.rows[0].model, TrustModelKind::NoTrust);
        assert!(report
            .rows
            .windows(2)
            .all(|w| (w[0].scenario, w[0].model, w[0].run) < (w[1].scenario, w[1].model, w[1].run)));
        assert!(report.cells.iter().all(|c| c.runs == 3 && c.failed == 0));
    }

    #[test]
    fn progress_reaches_total() {
        let last = AtomicUsize::new(0);
        run_experiment(&tiny(), 3, None, &|done, total| {
            assert!(done <= total);
            last.fetch_max(done, Ordering::Relaxed);
        })
        .unwrap();
        assert_eq!(last.into_inner(), 6);
    }

    #[test]
    fn failed_runs_are_flagged_not_fatal() {
        let rows = vec![
            RunRow::failed(ScenarioName::Small, TrustModelKind::Ect, 0, 1, "boom".into()),
            RunRow {
                scenario: ScenarioName::Small,
                model: TrustModelKind::Ect,
                run: 1,
                seed: 2,
                tsr: Some(0.4),
                act: None,
                completed: 0,
                total: 10,
                steps: 500,
                error: None,
            },
        ];
        let cells = summarize_rows(&rows);
        assert_eq!(cells[0].failed, 1);
        assert_eq!(cells[0].tsr.unwrap().n, 1);
        assert!(cells[0].act.is_none());
    }
}
