//! Trust-aware task allocation.
//!
//! Two parts: a greedy matcher that hands pending POIs to idle agents by
//! trust and distance, and a per-agent tabular Q-learner that picks the
//! step-level action over a discretized (distance, trust) state.

use alloc::vec;
use alloc::vec::Vec;

use crate::environment::{AgentKind, AgentState, Poi, PoiStatus};
use crate::error::{Error, Result};
use crate::trust::TrustLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Action {
    MoveToPoi = 0,
    PerformTask = 1,
    Wait = 2,
}

impl Action {
    pub const ALL: [Self; 3] = [Self::MoveToPoi, Self::PerformTask, Self::Wait];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct QLearningConfig {
    pub learn_rate: f64,
    pub discount: f64,
    pub explore_rate: f64,
    pub n_distance_bins: usize,
    pub n_trust_bins: usize,
}

impl Default for QLearningConfig {
    fn default() -> Self {
        Self { learn_rate: 0.1, discount: 0.9, explore_rate: 0.1, n_distance_bins: 5, n_trust_bins: 5 }
    }
}

impl QLearningConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learn_rate > 0.0 && self.learn_rate <= 1.0) {
            return Err(Error::InvalidConfig { field: "learn_rate", reason: "must be in (0, 1]" });
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(Error::InvalidConfig { field: "discount", reason: "must be in [0, 1)" });
        }
        if !(0.0..=1.0).contains(&self.explore_rate) {
            return Err(Error::InvalidConfig { field: "explore_rate", reason: "must be in [0, 1]" });
        }
        if self.n_distance_bins == 0 || self.n_trust_bins == 0 {
            return Err(Error::InvalidConfig { field: "n_*_bins", reason: "must be >= 1" });
        }
        Ok(())
    }
}

/// Dense action-value table over `n_distance_bins * n_trust_bins` states.
/// Unvisited entries are 0.0.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_distance_bins: usize,
    n_trust_bins: usize,
    max_distance: f64,
    values: Vec<f64>,
}

impl QTable {
    /// `max_distance` is the top of the distance range, normally the arena
    /// diagonal. Larger distances fall in the last bin.
    pub fn new(n_distance_bins: usize, n_trust_bins: usize, max_distance: f64) -> Self {
        assert!(n_distance_bins > 0 && n_trust_bins > 0, "Q-table needs at least one bin per axis");
        Self {
            n_distance_bins,
            n_trust_bins,
            max_distance,
            values: vec![0.0; n_distance_bins * n_trust_bins * Action::ALL.len()],
        }
    }

    pub fn from_config(cfg: &QLearningConfig, max_distance: f64) -> Self {
        Self::new(cfg.n_distance_bins, cfg.n_trust_bins, max_distance)
    }

    pub fn n_states(&self) -> usize {
        self.n_distance_bins * self.n_trust_bins
    }

    pub fn n_trust_bins(&self) -> usize {
        self.n_trust_bins
    }

    pub fn get(&self, state: usize, action: Action) -> f64 {
        self.values[state * Action::ALL.len() + action.index()]
    }

    pub fn set(&mut self, state: usize, action: Action, value: f64) {
        self.values[state * Action::ALL.len() + action.index()] = value;
    }

    pub fn row(&self, state: usize) -> &[f64] {
        let n = Action::ALL.len();
        &self.values[state * n..(state + 1) * n]
    }

    pub fn max_value(&self, state: usize) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Highest-valued action, lowest index on ties.
    pub fn greedy_action(&self, state: usize) -> Action {
        let row = self.row(state);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = i;
            }
        }
        Action::ALL[best]
    }

    /// Flat `(state, action, value)` listing for logs.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Action, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (i / Action::ALL.len(), Action::ALL[i % Action::ALL.len()], v))
    }
}

fn bin(value: f64, top: f64, n: usize) -> usize {
    if !(value > 0.0) || !(top > 0.0) {
        return 0;
    }
    let b = (value / top * n as f64) as usize;
    b.min(n - 1)
}

/// Uniform bins over `[0, max_distance]` and `[0, 1]`; the top edges belong to
/// the last bin. Index is `distance_bin * n_trust_bins + trust_bin`.
pub fn discretize_state(distance: f64, trust: TrustLevel, table: &QTable) -> usize {
    let d = bin(distance, table.max_distance, table.n_distance_bins);
    let t = bin(trust.value(), 1.0, table.n_trust_bins);
    d * table.n_trust_bins + t
}

/// Epsilon-greedy choice. Explores iff `rng_draw < explore_rate`, picking
/// `tiebreak_rng mod 3`; otherwise the greedy action.
pub fn select_action(table: &QTable, state: usize, cfg: &QLearningConfig, rng_draw: f64, tiebreak_rng: u32) -> Action {
    if rng_draw < cfg.explore_rate {
        Action::ALL[tiebreak_rng as usize % Action::ALL.len()]
    } else {
        table.greedy_action(state)
    }
}

/// `Q(s,a) += lr * (r + discount * max_a' Q(s',a') - Q(s,a))`.
pub fn q_update(
    table: &mut QTable,
    state: usize,
    action: Action,
    reward: f64,
    next_state: usize,
    cfg: &QLearningConfig,
) {
    let old = table.get(state, action);
    let target = reward + cfg.discount * table.max_value(next_state);
    table.set(state, action, old + cfg.learn_rate * (target - old));
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RewardConfig {
    pub completion_reward: f64,
    pub step_cost: f64,
    pub failure_cost: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self { completion_reward: 1.0, step_cost: -0.01, failure_cost: -0.1 }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.completion_reward > 0.0 && 0.0 > self.step_cost) {
            return Err(Error::InvalidConfig {
                field: "completion_reward/step_cost",
                reason: "need completion_reward > 0 > step_cost",
            });
        }
        if !self.failure_cost.is_finite() {
            return Err(Error::InvalidConfig { field: "failure_cost", reason: "must be finite" });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardEvent {
    TaskCompleted,
    TaskFailed,
    StepElapsed,
}

pub fn compute_reward(event: RewardEvent, cfg: &RewardConfig) -> f64 {
    match event {
        RewardEvent::TaskCompleted => cfg.completion_reward,
        RewardEvent::TaskFailed => cfg.failure_cost,
        RewardEvent::StepElapsed => cfg.step_cost,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AllocationConfig {
    pub w_trust: f64,
    pub w_distance: f64,
    /// Fixed trust humans score with. Trust models only rate robots.
    pub human_trust: f64,
}

impl Default for AllocationConfig {
    fn default() -> Self {
        Self { w_trust: 0.5, w_distance: 0.5, human_trust: 0.5 }
    }
}

impl AllocationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_trust >= 0.0 && self.w_distance >= 0.0 && self.w_trust + self.w_distance > 0.0) {
            return Err(Error::InvalidConfig {
                field: "w_trust/w_distance",
                reason: "weights must be >= 0 with a positive sum",
            });
        }
        if !(0.0..=1.0).contains(&self.human_trust) {
            return Err(Error::InvalidConfig { field: "human_trust", reason: "must be in [0, 1]" });
        }
        Ok(())
    }
}

/// Greedy trust-and-distance matching.
///
/// Pending POIs are taken in order of decreasing complexity (ties by id). Each
/// goes to the free agent with the highest
/// `w_trust * trust + w_distance * (1 - distance / diagonal)`, ties to the
/// lower agent id. Agents that are busy or already hold a POI are skipped.
/// Humans score with `cfg.human_trust`; `trust_of` is only asked about robots.
pub fn assign_tasks<F>(
    agents: &[AgentState],
    pois: &[Poi],
    mut trust_of: F,
    cfg: &AllocationConfig,
    diagonal: f64,
) -> Vec<(u32, u32)>
where
    F: FnMut(u32) -> TrustLevel,
{
    let mut free: Vec<(&AgentState, f64)> = agents
        .iter()
        .filter(|a| a.assigned_poi.is_none() && !a.is_busy())
        .map(|a| {
            let t = match a.kind {
                AgentKind::Human => cfg.human_trust,
                _ => trust_of(a.id).value(),
            };
            (a, t)
        })
        .collect();
    free.sort_by_key(|(a, _)| a.id);

    let mut open: Vec<&Poi> = pois.iter().filter(|p| p.status == PoiStatus::Pending).collect();
    open.sort_by(|a, b| b.complexity.total_cmp(&a.complexity).then(a.id.cmp(&b.id)));

    let mut pairs = Vec::new();
    for poi in open {
        if free.is_empty() {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, (agent, trust)) in free.iter().enumerate() {
            let closeness = 1.0 - agent.position.distance(poi.position) / diagonal;
            let score = cfg.w_trust * trust + cfg.w_distance * closeness;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        if let Some((i, _)) = best {
            let (agent, _) = free.remove(i);
            pairs.push((agent.id, poi.id));
        }
    }
    pairs
}
