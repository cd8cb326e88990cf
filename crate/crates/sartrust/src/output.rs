//! Result files: `runs.csv`, `summary.json`, `timing.json` and optional
//! per-episode JSONL step logs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use sartrust_core::allocation::QTable;
use sartrust_core::engine::{StepObserver, StepRecord};

use crate::config::ExperimentConfig;
use crate::experiment::{summarize_rows, CellSummary, ExperimentReport, RunFailure, RunRow};

pub const RUNS_HEADER: [&str; 9] = ["scenario", "model", "run", "seed", "tsr", "act", "completed", "total", "steps"];

pub const RUNS_FILE: &str = "runs.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_FILE: &str = "timing.json";
pub const STEPS_DIR: &str = "steps";

/// Contents of `summary.json`. Free of timestamps so identical
/// experiments produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub version: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<RunFailure>,
}

impl Summary {
    pub fn from_report(report: &ExperimentReport) -> Self {
        Self {
            version: report.version.to_owned(),
            config: report.config.clone(),
            cells: report.cells.clone(),
            failures: report.failures(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Timing {
    wall_time_secs: f64,
    episodes: usize,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_runs_csv<W: Write>(out: W, rows: &[RunRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUNS_HEADER)?;
    for r in rows {
        w.write_record([
            r.scenario.label().to_owned(),
            r.model.name().to_owned(),
            r.run.to_string(),
            r.seed.to_string(),
            opt(r.tsr),
            opt(r.act),
            r.completed.to_string(),
            r.total.to_string(),
            r.steps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs_csv(path: &Path) -> anyhow::Result<Vec<RunRow>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let header = reader.headers()?.clone();
    if header.iter().ne(RUNS_HEADER) {
        bail!("{}: unexpected header `{}`", path.display(), header.iter().collect::<Vec<_>>().join(","));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let field = |k: usize| &record[k];
        let num = |k: usize| -> anyhow::Result<Option<f64>> {
            let s = field(k);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .with_context(|| format!("{}:{line}: bad `{}` value `{s}`", path.display(), RUNS_HEADER[k]))
        };
        let int = |k: usize| -> anyhow::Result<u64> {
            field(k)
                .parse()
                .with_context(|| format!("{}:{line}: bad `{}` value `{}`", path.display(), RUNS_HEADER[k], field(k)))
        };
        let tsr = num(4)?;
        rows.push(RunRow {
            scenario: field(0).parse().map_err(|e| anyhow::anyhow!("{}:{line}: {e}", path.display()))?,
            model: field(1).parse().map_err(|e| anyhow::anyhow!("{}:{line}: {e}", path.display()))?,
            run: int(2)? as u32,
            seed: int(3)?,
            tsr,
            act: num(5)?,
            completed: int(6)? as usize,
            total: int(7)? as usize,
            steps: int(8)? as u32,
            error: tsr.is_none().then(|| "aborted".to_owned()),
        });
    }
    Ok(rows)
}

/// Recomputes per-cell statistics from an existing `runs.csv`.
pub fn report_from_csv(path: &Path) -> anyhow::Result<Vec<CellSummary>> {
    Ok(summarize_rows(&read_runs_csv(path)?))
}

pub fn summary_json(summary: &Summary) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(summary)?;
    s.push('\n');
    Ok(s)
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).with_context(|| format!("cannot create {}", path.display()))
}

/// Writes `runs.csv`, `summary.json` and `timing.json` into `dir`.
pub fn emit_outputs(report: &ExperimentReport, dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let runs = dir.join(RUNS_FILE);
    write_runs_csv(create(&runs)?, &report.rows).with_context(|| format!("cannot write {}", runs.display()))?;

    let summary = dir.join(SUMMARY_FILE);
    let text = summary_json(&Summary::from_report(report))?;
    std::fs::write(&summary, text).with_context(|| format!("cannot write {}", summary.display()))?;

    let timing = dir.join(TIMING_FILE);
    let t = Timing { wall_time_secs: report.wall_time.as_secs_f64(), episodes: report.rows.len() };
    std::fs::write(&timing, serde_json::to_string_pretty(&t)? + "\n")
        .with_context(|| format!("cannot write {}", timing.display()))?;
    Ok(())
}

#[derive(Serialize)]
struct QTableDump<'a> {
    agent_id: u32,
    /// One row of action values per state.
    values: Vec<&'a [f64]>,
}

#[derive(Serialize)]
struct FinalLine<'a> {
    q_tables: Vec<QTableDump<'a>>,
}

/// Step observer that streams each step as one JSON line and closes
/// with the learned Q-tables.
#[derive(Debug)]
pub struct StepLogWriter {
    path: PathBuf,
    out: BufWriter<File>,
    error: Option<io::Error>,
}

impl StepLogWriter {
    pub fn create(path: &Path) -> io::Result<Self> {
        Ok(Self { path: path.to_path_buf(), out: BufWriter::new(File::create(path)?), error: None })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn write_line<T: Serialize>(&mut self, value: &T) {
        if self.error.is_some() {
            return;
        }
        let result = serde_json::to_writer(&mut self.out, value)
            .map_err(io::Error::from)
            .and_then(|()| self.out.write_all(b"\n"));
        if let Err(e) = result {
            self.error = Some(e);
        }
    }

    /// Flushes and reports the first write error, if any.
    pub fn finish(mut self) -> io::Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()
    }
}

impl StepObserver for StepLogWriter {
    fn on_step(&mut self, record: &StepRecord) {
        self.write_line(record);
    }

    fn on_finish(&mut self, q_tables: &[(u32, &QTable)]) {
        let dump = FinalLine {
            q_tables: q_tables
                .iter()
                .map(|&(agent_id, q)| QTableDump { agent_id, values: (0..q.n_states()).map(|s| q.row(s)).collect() })
                .collect(),
        };
        self.write_line(&dump);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sartrust_core::engine::ScenarioName;
    use sartrust_core::trust::TrustModelKind;

    fn row(run: u32, tsr: f64, act: Option<f64>) -> RunRow {
        RunRow {
            scenario: ScenarioName::Large,
            model: TrustModelKind::GuoYang,
            run,
            seed: 99 + u64::from(run),
            tsr: Some(tsr),
            act,
            completed: 3,
            total: 10,
            steps: 500,
            error: None,
        }
    }

    #[test]
    fn csv_header_is_exact() {
        let mut buf = Vec::new();
        write_runs_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "scenario,model,run,seed,tsr,act,completed,total,steps\n");
    }

    #[test]
    fn missing_act_is_an_empty_field() {
        let mut buf = Vec::new();
        write_runs_csv(&mut buf, &[row(0, 0.0, None)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "10H-10R,guo_yang,0,99,0,,3,10,500");
    }

    #[test]
    fn csv_round_trips_exactly() {
        let rows = vec![row(0, 0.1 + 0.2, Some(123.456_789_012_345)), row(1, 1.0 / 3.0, None)];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(RUNS_FILE);
        write_runs_csv(File::create(&path).unwrap(), &rows).unwrap();
        assert_eq!(read_runs_csv(&path).unwrap(), rows);
    }
}
