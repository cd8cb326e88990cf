//! One seeded episode.
//!
//! Each step runs, in order:
//!
//! 1. every human evaluator folds last step's robot outcomes into its own
//!    trust state (with Gaussian perception noise on the score);
//! 2. team trust per robot is the mean over evaluators;
//! 3. discovered pending POIs are assigned to free agents;
//! 4. every free agent picks an epsilon-greedy action from its own Q-table
//!    and executes it; busy agents finish their task when its work time
//!    elapses;
//! 5. rewards feed one Q-update per action.
//!
//! POIs are unknown until some agent senses them; discoveries are shared by
//! the whole team. The episode ends after `max_steps` or once every POI is
//! completed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::allocation::{
    assign_tasks, compute_reward, discretize_state, q_update, select_action, Action, AllocationConfig, QLearningConfig,
    QTable, RewardConfig, RewardEvent,
};
use crate::environment::{
    attempt_task, generate_environment, sense_pois, step_agent_motion, AgentKind, AgentState, EnvConfig, Environment,
    PoiStatus, Point, TaskOutcome, TerrainKind,
};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::trust::{
    ect_evaluate_performance, team_trust_aggregate, ModelConfigs, PerformanceObservation, TrustEstimator, TrustLevel,
    TrustModelKind,
};
use crate::EPISODE_STEP_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ScenarioName {
    #[cfg_attr(feature = "serde", serde(rename = "2H-2R"))]
    Small,
    #[cfg_attr(feature = "serde", serde(rename = "5H-5R"))]
    Medium,
    #[cfg_attr(feature = "serde", serde(rename = "10H-10R"))]
    Large,
}

impl ScenarioName {
    pub const ALL: [Self; 3] = [Self::Small, Self::Medium, Self::Large];

    pub const fn label(self) -> &'static str {
        match self {
            Self::Small => "2H-2R",
            Self::Medium => "5H-5R",
            Self::Large => "10H-10R",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.label() == s)
            .ok_or(Error::InvalidConfig { field: "scenarios", reason: "unknown scenario" })
    }
}

/// Team composition and terrain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub name: ScenarioName,
    pub n_humans: usize,
    pub n_robots: usize,
    pub terrain: TerrainKind,
    /// Fraction of robots that are UAVs, rounded up.
    pub robot_mix: f64,
}

impl Scenario {
    pub const fn named(name: ScenarioName) -> Self {
        let (n, terrain) = match name {
            ScenarioName::Small => (2, TerrainKind::Flat),
            ScenarioName::Medium => (5, TerrainKind::Rough),
            ScenarioName::Large => (10, TerrainKind::ObstacleDense),
        };
        Self { name, n_humans: n, n_robots: n, terrain, robot_mix: 0.5 }
    }

    pub fn with_robot_mix(self, robot_mix: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&robot_mix) {
            return Err(Error::InvalidConfig { field: "robot_mix", reason: "must be in [0, 1]" });
        }
        Ok(Self { robot_mix, ..self })
    }

    pub fn n_uavs(&self) -> usize {
        libm::ceil(self.n_robots as f64 * self.robot_mix) as usize
    }
}

/// Prior capability of a robot kind, seeding the ECT expectation.
pub const fn robot_capability(kind: AgentKind) -> f64 {
    match kind {
        AgentKind::Uav => 0.8,
        AgentKind::Ugv => 0.6,
        AgentKind::Human => 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EngineConfig {
    pub max_steps: u32,
    /// Std of the Gaussian noise each evaluator adds to an observed score.
    pub perception_noise: f64,
    /// On-site work time in seconds for a POI of complexity 1.0; scaled
    /// linearly by complexity and rounded up.
    pub task_work_time: f64,
    /// Half-width of the square around an idle agent from which its next
    /// search waypoint is drawn.
    pub search_radius: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self { max_steps: EPISODE_STEP_CAP, perception_noise: 0.05, task_work_time: 40.0, search_radius: 5.0 }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps > EPISODE_STEP_CAP {
            return Err(Error::InvalidConfig { field: "max_steps", reason: "must be <= 500" });
        }
        if !(self.perception_noise >= 0.0 && self.perception_noise.is_finite()) {
            return Err(Error::InvalidConfig { field: "perception_noise", reason: "must be finite and >= 0" });
        }
        if !(self.task_work_time >= 0.0 && self.task_work_time.is_finite()) {
            return Err(Error::InvalidConfig { field: "task_work_time", reason: "must be finite and >= 0" });
        }
        if !(self.search_radius > 0.0) {
            return Err(Error::InvalidConfig { field: "search_radius", reason: "must be > 0" });
        }
        Ok(())
    }

    fn work_steps(&self, complexity: f64) -> u32 {
        libm::ceil(self.task_work_time * complexity) as u32
    }
}

/// Every knob an episode reads.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimConfig {
    pub env: EnvConfig,
    pub models: ModelConfigs,
    pub q_learning: QLearningConfig,
    pub reward: RewardConfig,
    pub allocation: AllocationConfig,
    pub engine: EngineConfig,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.models.validate()?;
        self.q_learning.validate()?;
        self.reward.validate()?;
        self.allocation.validate()?;
        self.engine.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RobotTrustTrace {
    pub robot_id: u32,
    pub kind: AgentKind,
    /// `(step, team trust)` for every executed step.
    pub samples: Vec<(u32, TrustLevel)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub scenario: ScenarioName,
    pub model: TrustModelKind,
    pub seed: u64,
    pub total_tasks: usize,
    /// Every resolved attempt, successful or not, in resolution order.
    pub outcomes: Vec<TaskOutcome>,
    pub steps_used: u32,
    pub trust_trace: Vec<RobotTrustTrace>,
}

impl EpisodeResult {
    pub fn completed_count(&self) -> usize {
        self.outcomes.iter().filter(|o| o.success).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AgentSnapshot {
    pub id: u32,
    pub kind: AgentKind,
    pub position: Point,
    pub assigned_poi: Option<u32>,
    /// `None` while working on a task.
    pub action: Option<Action>,
    pub reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PoiSnapshot {
    pub id: u32,
    pub status: PoiStatus,
    pub discovered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RobotTrust {
    pub robot_id: u32,
    pub trust: TrustLevel,
}

/// Everything observable about one completed step.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StepRecord {
    pub step: u32,
    pub agents: Vec<AgentSnapshot>,
    pub pois: Vec<PoiSnapshot>,
    pub team_trust: Vec<RobotTrust>,
    pub outcomes: Vec<TaskOutcome>,
}

/// Receives per-step records and the final Q-tables.
pub trait StepObserver {
    fn on_step(&mut self, record: &StepRecord);

    fn on_finish(&mut self, _q_tables: &[(u32, &QTable)]) {}
}

/// `n_humans` humans, then ceil(`n_robots * robot_mix`) UAVs, then UGVs, ids
/// in that order, placed uniformly over the arena.
pub fn build_team<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R, env_cfg: &EnvConfig) -> Vec<AgentState> {
    let n_uavs = scenario.n_uavs().min(scenario.n_robots);
    let kinds = core::iter::repeat_n(AgentKind::Human, scenario.n_humans)
        .chain(core::iter::repeat_n(AgentKind::Uav, n_uavs))
        .chain(core::iter::repeat_n(AgentKind::Ugv, scenario.n_robots - n_uavs));
    kinds
        .enumerate()
        .map(|(id, kind)| {
            let p = Point::new(rng.random::<f64>() * env_cfg.width, rng.random::<f64>() * env_cfg.height);
            AgentState::new(id as u32, kind, p)
        })
        .collect()
}

pub fn run_episode(scenario: &Scenario, model: TrustModelKind, cfg: &SimConfig, seed: u64) -> Result<EpisodeResult> {
    Episode::new(scenario, model, cfg, seed)?.run(None)
}

pub fn run_episode_observed(
    scenario: &Scenario,
    model: TrustModelKind,
    cfg: &SimConfig,
    seed: u64,
    observer: &mut dyn StepObserver,
) -> Result<EpisodeResult> {
    Episode::new(scenario, model, cfg, seed)?.run(Some(observer))
}

#[derive(Debug)]
struct Mind {
    q: QTable,
    waypoint: Option<Point>,
    assigned_at: u32,
    /// State and action that started the task now in progress.
    started: Option<(usize, Action)>,
}

#[derive(Debug)]
struct Episode<'a> {
    scenario: Scenario,
    model: TrustModelKind,
    cfg: &'a SimConfig,
    seed: u64,
    env: Environment,
    agents: Vec<AgentState>,
    minds: Vec<Mind>,
    discovered: Vec<bool>,
    /// Agent ids of robots, in id order.
    robots: Vec<u32>,
    /// `evaluators[human][robot_slot]`.
    evaluators: Vec<Vec<TrustEstimator>>,
    team_trust: Vec<TrustLevel>,
    last_poi: Vec<Option<u32>>,
    policy_rng: ChaCha8Rng,
    task_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
}

impl<'a> Episode<'a> {
    fn new(scenario: &Scenario, model: TrustModelKind, cfg: &'a SimConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let streams = RngStream::new(seed);
        let mut env_rng = streams.env();
        let env = generate_environment(&mut env_rng, scenario.terrain, &cfg.env)?;
        let agents = build_team(scenario, &mut env_rng, &cfg.env);
        let diagonal = env.diagonal();
        let minds = agents
            .iter()
            .map(|_| Mind {
                q: QTable::from_config(&cfg.q_learning, diagonal),
                waypoint: None,
                assigned_at: 0,
                started: None,
            })
            .collect();
        let robots: Vec<u32> = agents.iter().filter(|a| a.kind.is_robot()).map(|a| a.id).collect();
        let complexity = scenario.terrain.complexity();
        let evaluators = (0..scenario.n_humans)
            .map(|_| {
                robots
                    .iter()
                    .map(|&r| {
                        let cap = robot_capability(agents[r as usize].kind);
                        TrustEstimator::new(model, &cfg.models, cap, complexity)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut episode = Self {
            scenario: *scenario,
            model,
            cfg,
            seed,
            discovered: vec![false; env.pois.len()],
            env,
            agents,
            minds,
            team_trust: vec![TrustLevel::NEUTRAL; robots.len()],
            last_poi: vec![None; robots.len()],
            robots,
            evaluators,
            policy_rng: streams.policy(),
            task_rng: streams.tasks(),
            noise_rng: streams.noise(),
        };
        for i in 0..episode.agents.len() {
            episode.sense(i);
        }
        episode.refresh_team_trust()?;
        Ok(episode)
    }

    fn run(mut self, mut observer: Option<&mut dyn StepObserver>) -> Result<EpisodeResult> {
        let mut outcomes = Vec::new();
        let mut last: Vec<TaskOutcome> = Vec::new();
        let mut traces: Vec<RobotTrustTrace> = self
            .robots
            .iter()
            .map(|&id| RobotTrustTrace { robot_id: id, kind: self.agents[id as usize].kind, samples: Vec::new() })
            .collect();
        let mut steps_used = 0;

        for step in 1..=self.cfg.engine.max_steps {
            if self.env.all_completed() {
                break;
            }
            steps_used = step;

            self.update_trust(&last)?;
            self.refresh_team_trust()?;
            for (trace, &t) in traces.iter_mut().zip(&self.team_trust) {
                trace.samples.push((step, t));
            }

            self.assign(step);

            let mut step_outcomes = Vec::new();
            let mut snapshots = Vec::new();
            for i in 0..self.agents.len() {
                let (action, reward) = self.act(i, step, &mut step_outcomes)?;
                if observer.is_some() {
                    let a = &self.agents[i];
                    snapshots.push(AgentSnapshot {
                        id: a.id,
                        kind: a.kind,
                        position: a.position,
                        assigned_poi: a.assigned_poi,
                        action,
                        reward,
                    });
                }
            }

            if let Some(obs) = observer.as_deref_mut() {
                obs.on_step(&StepRecord {
                    step,
                    agents: snapshots,
                    pois: self
                        .env
                        .pois
                        .iter()
                        .map(|p| PoiSnapshot { id: p.id, status: p.status, discovered: self.discovered[p.id as usize] })
                        .collect(),
                    team_trust: self
                        .robots
                        .iter()
                        .zip(&self.team_trust)
                        .map(|(&robot_id, &trust)| RobotTrust { robot_id, trust })
                        .collect(),
                    outcomes: step_outcomes.clone(),
                });
            }
            outcomes.extend_from_slice(&step_outcomes);
            last = step_outcomes;
        }

        if let Some(obs) = observer {
            let tables: Vec<(u32, &QTable)> = self.agents.iter().zip(&self.minds).map(|(a, m)| (a.id, &m.q)).collect();
            obs.on_finish(&tables);
        }

        Ok(EpisodeResult {
            scenario: self.scenario.name,
            model: self.model,
            seed: self.seed,
            total_tasks: self.env.pois.len(),
            outcomes,
            steps_used,
            trust_trace: traces,
        })
    }

    fn robot_slot(&self, agent_id: u32) -> Option<usize> {
        self.robots.binary_search(&agent_id).ok()
    }

    fn update_trust(&mut self, last: &[TaskOutcome]) -> Result<()> {
        let models = &self.cfg.models;
        let noise_std = self.cfg.engine.perception_noise;
        let stochastic = self.model == TrustModelKind::XuDudek && models.xu_dudek.stochastic;
        let mut observed = vec![false; self.robots.len()];
        for outcome in last {
            let Some(slot) = self.robot_slot(outcome.agent_id) else { continue };
            observed[slot] = true;
            let score = ect_evaluate_performance(outcome);
            let task_change = self.last_poi[slot].is_some_and(|p| p != outcome.poi_id);
            self.last_poi[slot] = Some(outcome.poi_id);
            for human in &mut self.evaluators {
                let est = &mut human[slot];
                let z: f64 = self.noise_rng.sample(StandardNormal);
                let seen = (score + noise_std * z).clamp(0.0, 1.0);
                let mut obs = PerformanceObservation::new(outcome.success, seen, est.last_score())?;
                obs.task_change = task_change;
                let draw = stochastic.then(|| self.noise_rng.sample(StandardNormal));
                est.observe(&obs, models, draw)?;
            }
        }
        for (slot, seen) in observed.into_iter().enumerate() {
            if !seen {
                for human in &mut self.evaluators {
                    human[slot].idle(models);
                }
            }
        }
        Ok(())
    }

    fn refresh_team_trust(&mut self) -> Result<()> {
        if self.evaluators.is_empty() {
            return Ok(());
        }
        let mut column = Vec::with_capacity(self.evaluators.len());
        for slot in 0..self.robots.len() {
            column.clear();
            column.extend(self.evaluators.iter().map(|h| h[slot].level()));
            self.team_trust[slot] = team_trust_aggregate(&column)?;
        }
        Ok(())
    }

    /// Trust an agent sees of itself: team trust for robots, the configured human trust otherwise.
    fn own_trust(&self, i: usize) -> TrustLevel {
        match self.robot_slot(self.agents[i].id) {
            Some(slot) => self.team_trust[slot],
            None => TrustLevel::new(self.cfg.allocation.human_trust),
        }
    }

    fn assign(&mut self, step: u32) {
        let known: Vec<_> = self
            .env
            .pois
            .iter()
            .filter(|p| p.status == PoiStatus::Pending && self.discovered[p.id as usize])
            .cloned()
            .collect();
        if known.is_empty() {
            return;
        }
        let pairs = assign_tasks(
            &self.agents,
            &known,
            |id| self.robot_slot(id).map_or(TrustLevel::NEUTRAL, |s| self.team_trust[s]),
            &self.cfg.allocation,
            self.env.diagonal(),
        );
        for (agent_id, poi_id) in pairs {
            self.agents[agent_id as usize].assigned_poi = Some(poi_id);
            self.env.pois[poi_id as usize].status = PoiStatus::Assigned;
            let mind = &mut self.minds[agent_id as usize];
            mind.assigned_at = step;
            mind.waypoint = None;
        }
    }

    /// Distance the Q-state is built from: the assigned POI, else the nearest
    /// visible pending one, else the far edge of the distance range.
    fn target_distance(&self, i: usize) -> f64 {
        let agent = &self.agents[i];
        if let Some(p) = agent.assigned_poi {
            return agent.position.distance(self.env.pois[p as usize].position);
        }
        match sense_pois(agent, &self.env).first() {
            Some(&p) => agent.position.distance(self.env.pois[p as usize].position),
            None => self.env.diagonal(),
        }
    }

    fn state(&self, i: usize) -> usize {
        discretize_state(self.target_distance(i), self.own_trust(i), &self.minds[i].q)
    }

    fn sense(&mut self, i: usize) {
        for id in sense_pois(&self.agents[i], &self.env) {
            self.discovered[id as usize] = true;
        }
    }

    fn resolve(&mut self, i: usize, step: u32) -> Result<TaskOutcome> {
        let poi_id =
            self.agents[i].assigned_poi.ok_or(Error::ContractViolation("busy agent without an assigned POI"))?;
        let draw: f64 = self.task_rng.random();
        let elapsed = step - self.minds[i].assigned_at;
        let outcome = attempt_task(
            &self.agents[i],
            &mut self.env.pois[poi_id as usize],
            self.env.terrain,
            &self.cfg.env.success,
            draw,
            step,
            elapsed,
        )?;
        let agent = &mut self.agents[i];
        agent.assigned_poi = None;
        agent.busy_until = None;
        Ok(outcome)
    }

    fn outcome_reward(&self, outcome: &TaskOutcome) -> f64 {
        let event = if outcome.success { RewardEvent::TaskCompleted } else { RewardEvent::TaskFailed };
        compute_reward(event, &self.cfg.reward)
    }

    /// One agent's turn. Returns the action taken (`None` while working) and
    /// the reward credited this step.
    fn act(&mut self, i: usize, step: u32, outcomes: &mut Vec<TaskOutcome>) -> Result<(Option<Action>, f64)> {
        let step_cost = compute_reward(RewardEvent::StepElapsed, &self.cfg.reward);

        if let Some(until) = self.agents[i].busy_until {
            if step < until {
                return Ok((None, 0.0));
            }
            let outcome = self.resolve(i, step)?;
            let reward = step_cost + self.outcome_reward(&outcome);
            outcomes.push(outcome);
            if let Some((s, a)) = self.minds[i].started.take() {
                let next = self.state(i);
                q_update(&mut self.minds[i].q, s, a, reward, next, &self.cfg.q_learning);
            }
            return Ok((None, reward));
        }

        let s = self.state(i);
        let draw: f64 = self.policy_rng.random();
        let tiebreak: u32 = self.policy_rng.random();
        let action = select_action(&self.minds[i].q, s, &self.cfg.q_learning, draw, tiebreak);
        let mut reward = step_cost;

        match action {
            Action::MoveToPoi => {
                let target = self.move_target(i);
                self.agents[i] = step_agent_motion(&self.agents[i], target, self.env.terrain);
                self.sense(i);
            }
            Action::PerformTask => {
                let in_range = self.agents[i]
                    .assigned_poi
                    .is_some_and(|p| self.agents[i].in_range(self.env.pois[p as usize].position));
                if in_range {
                    let poi = self.agents[i].assigned_poi.unwrap_or_default();
                    let work = self.cfg.engine.work_steps(self.env.pois[poi as usize].complexity);
                    if work == 0 {
                        let outcome = self.resolve(i, step)?;
                        reward += self.outcome_reward(&outcome);
                        outcomes.push(outcome);
                    } else {
                        self.agents[i].busy_until = Some(step + work);
                        self.minds[i].started = Some((s, action));
                        return Ok((Some(action), 0.0));
                    }
                }
            }
            Action::Wait => {}
        }

        let next = self.state(i);
        q_update(&mut self.minds[i].q, s, action, reward, next, &self.cfg.q_learning);
        Ok((Some(action), reward))
    }

    fn move_target(&mut self, i: usize) -> Point {
        let agent = &self.agents[i];
        if let Some(p) = agent.assigned_poi {
            return self.env.pois[p as usize].position;
        }
        if let Some(&p) = sense_pois(agent, &self.env).first() {
            return self.env.pois[p as usize].position;
        }
        let pos = agent.position;
        match self.minds[i].waypoint {
            Some(w) if w != pos => w,
            _ => {
                let r = self.cfg.engine.search_radius;
                let (x0, x1) = ((pos.x - r).max(0.0), (pos.x + r).min(self.env.width));
                let (y0, y1) = ((pos.y - r).max(0.0), (pos.y + r).min(self.env.height));
                let w = Point::new(
                    x0 + self.policy_rng.random::<f64>() * (x1 - x0),
                    y0 + self.policy_rng.random::<f64>() * (y1 - y0),
                );
                self.minds[i].waypoint = Some(w);
                w
            }
        }
    }
}
