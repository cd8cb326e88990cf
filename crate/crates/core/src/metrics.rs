//! Task success rate, average completion time and run summaries.

use crate::engine::EpisodeResult;
use crate::error::{Error, Result};

/// Mean and sample standard deviation over `n` runs. `std` is 0 when `n == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Fraction of the episode's tasks that were completed.
pub fn task_success_rate(result: &EpisodeResult, total_tasks: usize) -> Result<f64> {
    if total_tasks == 0 {
        return Err(Error::Empty("task set"));
    }
    Ok(result.completed_count() as f64 / total_tasks as f64)
}

/// Mean completion step (seconds) over completed tasks, `None` if nothing was
/// completed.
pub fn average_completion_time(result: &EpisodeResult) -> Option<f64> {
    let (sum, n) =
        result.outcomes.iter().filter(|o| o.success).fold((0.0, 0usize), |(s, n), o| (s + f64::from(o.step), n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn aggregate_runs(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::Empty("run values"));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n == 1 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        libm::sqrt(ss / (n - 1) as f64)
    };
    Ok(SummaryStats { mean, std, n })
}

/// Aggregates the present values only; `n` is the effective count. `None` when
/// every value is absent.
pub fn aggregate_present(values: impl IntoIterator<Item = Option<f64>>) -> Option<SummaryStats> {
    let present: alloc::vec::Vec<f64> = values.into_iter().flatten().collect();
    aggregate_runs(&present).ok()
}
