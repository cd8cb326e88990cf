//! The search-and-rescue arena: POIs, terrain and agent kinematics.
//!
//! Positions are continuous meters inside a `width x height` rectangle. One
//! simulation step is one second.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::hypot(other.x - self.x, other.y - self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TerrainKind {
    Flat,
    Rough,
    ObstacleDense,
}

impl TerrainKind {
    /// Fraction of nominal speed an agent achieves.
    pub const fn speed_multiplier(self) -> f64 {
        match self {
            Self::Flat => 1.0,
            Self::Rough => 0.7,
            Self::ObstacleDense => 0.5,
        }
    }

    /// Factor applied to every task success probability.
    pub const fn success_modifier(self) -> f64 {
        match self {
            Self::Flat => 1.0,
            Self::Rough => 0.85,
            Self::ObstacleDense => 0.7,
        }
    }

    /// Environmental task complexity, fed to the ECT initial expectation.
    pub const fn complexity(self) -> f64 {
        match self {
            Self::Flat => 0.5,
            Self::Rough => 0.7,
            Self::ObstacleDense => 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PoiAttribute {
    Survivor,
    Hazard,
    Resource,
}

impl PoiAttribute {
    pub const ALL: [Self; 3] = [Self::Survivor, Self::Hazard, Self::Resource];

    pub const fn complexity(self) -> f64 {
        match self {
            Self::Survivor => 0.7,
            Self::Hazard => 0.9,
            Self::Resource => 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PoiStatus {
    Pending,
    Assigned,
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Poi {
    pub id: u32,
    pub position: Point,
    pub attribute: PoiAttribute,
    pub complexity: f64,
    pub status: PoiStatus,
    pub completion_step: Option<u32>,
}

impl Poi {
    pub fn new(id: u32, position: Point, attribute: PoiAttribute) -> Self {
        Self {
            id,
            position,
            attribute,
            complexity: attribute.complexity(),
            status: PoiStatus::Pending,
            completion_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub width: f64,
    pub height: f64,
    pub pois: Vec<Poi>,
    pub terrain: TerrainKind,
}

impl Environment {
    pub fn diagonal(&self) -> f64 {
        libm::hypot(self.width, self.height)
    }

    pub fn poi(&self, id: u32) -> Option<&Poi> {
        self.pois.iter().find(|p| p.id == id)
    }

    pub fn poi_mut(&mut self, id: u32) -> Option<&mut Poi> {
        self.pois.iter_mut().find(|p| p.id == id)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn all_completed(&self) -> bool {
        self.pois.iter().all(|p| p.status == PoiStatus::Completed)
    }
}

/// Base task success probability per attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct AttributeProbs {
    pub survivor: f64,
    pub hazard: f64,
    pub resource: f64,
}

impl AttributeProbs {
    pub const fn get(&self, attribute: PoiAttribute) -> f64 {
        match attribute {
            PoiAttribute::Survivor => self.survivor,
            PoiAttribute::Hazard => self.hazard,
            PoiAttribute::Resource => self.resource,
        }
    }

    const fn uniform(p: f64) -> Self {
        Self { survivor: p, hazard: p, resource: p }
    }
}

/// Base success probability by agent kind and POI attribute, before the
/// terrain modifier.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SuccessTable {
    pub human: AttributeProbs,
    pub uav: AttributeProbs,
    pub ugv: AttributeProbs,
}

impl Default for SuccessTable {
    fn default() -> Self {
        Self {
            human: AttributeProbs { survivor: 0.9, hazard: 0.5, resource: 0.7 },
            uav: AttributeProbs { survivor: 0.6, hazard: 0.7, resource: 0.8 },
            ugv: AttributeProbs { survivor: 0.7, hazard: 0.8, resource: 0.8 },
        }
    }
}

impl SuccessTable {
    /// Every attempt succeeds before the terrain modifier.
    pub const fn certain() -> Self {
        Self {
            human: AttributeProbs::uniform(1.0),
            uav: AttributeProbs::uniform(1.0),
            ugv: AttributeProbs::uniform(1.0),
        }
    }

    pub const fn base_prob(&self, kind: AgentKind, attribute: PoiAttribute) -> f64 {
        match kind {
            AgentKind::Human => self.human.get(attribute),
            AgentKind::Uav => self.uav.get(attribute),
            AgentKind::Ugv => self.ugv.get(attribute),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for probs in [self.human, self.uav, self.ugv] {
            for a in PoiAttribute::ALL {
                if !(0.0..=1.0).contains(&probs.get(a)) {
                    return Err(Error::InvalidConfig { field: "success", reason: "probabilities must be in [0, 1]" });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EnvConfig {
    pub width: f64,
    pub height: f64,
    pub num_pois: usize,
    /// Minimum distance between any two POIs.
    pub min_separation: f64,
    /// Rejection-sampling budget per POI.
    pub max_placement_attempts: u32,
    pub success: SuccessTable,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            width: 100.0,
            height: 100.0,
            num_pois: 10,
            min_separation: 1.0,
            max_placement_attempts: 10_000,
            success: SuccessTable::default(),
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite() && self.height > 0.0 && self.height.is_finite()) {
            return Err(Error::InvalidConfig { field: "width/height", reason: "must be finite and > 0" });
        }
        if !(self.min_separation >= 0.0) {
            return Err(Error::InvalidConfig { field: "min_separation", reason: "must be >= 0" });
        }
        if self.max_placement_attempts == 0 {
            return Err(Error::InvalidConfig { field: "max_placement_attempts", reason: "must be >= 1" });
        }
        self.success.validate()
    }

    pub fn diagonal(&self) -> f64 {
        libm::hypot(self.width, self.height)
    }
}

/// Places `cfg.num_pois` POIs uniformly over the arena with attributes drawn
/// uniformly, resampling positions closer than `min_separation` to an earlier
/// POI.
pub fn generate_environment<R: Rng + ?Sized>(
    rng: &mut R,
    terrain: TerrainKind,
    cfg: &EnvConfig,
) -> Result<Environment> {
    cfg.validate()?;
    let mut pois: Vec<Poi> = Vec::with_capacity(cfg.num_pois);
    for id in 0..cfg.num_pois {
        let mut attempts = 0;
        let position = loop {
            if attempts == cfg.max_placement_attempts {
                return Err(Error::PlacementFailed { placed: id, attempts });
            }
            attempts += 1;
            let p = Point::new(rng.random::<f64>() * cfg.width, rng.random::<f64>() * cfg.height);
            if pois.iter().all(|q| q.position.distance(p) >= cfg.min_separation) {
                break p;
            }
        };
        let attribute = PoiAttribute::ALL[rng.random_range(0..PoiAttribute::ALL.len())];
        pois.push(Poi::new(id as u32, position, attribute));
    }
    Ok(Environment { width: cfg.width, height: cfg.height, pois, terrain })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AgentKind {
    Human,
    Uav,
    Ugv,
}

impl AgentKind {
    pub const fn is_robot(self) -> bool {
        !matches!(self, Self::Human)
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::Human => "human",
            Self::Uav => "uav",
            Self::Ugv => "ugv",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Nominal `(speed m/s, sensing range m)` for an agent kind.
pub const fn agent_catalog(kind: AgentKind) -> (f64, f64) {
    match kind {
        AgentKind::Human => (1.0, 10.0),
        AgentKind::Uav => (2.0, 20.0),
        AgentKind::Ugv => (1.5, 15.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: u32,
    pub kind: AgentKind,
    pub position: Point,
    pub speed: f64,
    pub sensing_range: f64,
    pub assigned_poi: Option<u32>,
    /// Step at which the current task attempt resolves.
    pub busy_until: Option<u32>,
}

impl AgentState {
    pub fn new(id: u32, kind: AgentKind, position: Point) -> Self {
        let (speed, sensing_range) = agent_catalog(kind);
        Self { id, kind, position, speed, sensing_range, assigned_poi: None, busy_until: None }
    }

    pub fn is_busy(&self) -> bool {
        self.busy_until.is_some()
    }

    pub fn in_range(&self, p: Point) -> bool {
        self.position.distance(p) <= self.sensing_range
    }
}

/// Result of one task attempt by one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskOutcome {
    pub poi_id: u32,
    pub agent_id: u32,
    pub success: bool,
    /// Steps from assignment to resolution.
    pub elapsed_steps: u32,
    /// Episode step at which the attempt resolved.
    pub step: u32,
}

/// One second of straight-line motion toward `target`. Never overshoots;
/// arriving snaps exactly onto the target.
pub fn step_agent_motion(agent: &AgentState, target: Point, terrain: TerrainKind) -> AgentState {
    let reach = agent.speed * terrain.speed_multiplier();
    let remaining = agent.position.distance(target);
    let position = if remaining <= reach {
        target
    } else {
        let f = reach / remaining;
        Point::new(
            agent.position.x + (target.x - agent.position.x) * f,
            agent.position.y + (target.y - agent.position.y) * f,
        )
    };
    AgentState { position, ..agent.clone() }
}

/// Pending POIs within sensing range, nearest first, ties by id.
pub fn sense_pois(agent: &AgentState, env: &Environment) -> Vec<u32> {
    let mut seen: Vec<(f64, u32)> = env
        .pois
        .iter()
        .filter(|p| p.status == PoiStatus::Pending)
        .map(|p| (agent.position.distance(p.position), p.id))
        .filter(|&(d, _)| d <= agent.sensing_range)
        .collect();
    seen.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    seen.into_iter().map(|(_, id)| id).collect()
}

/// Resolves one attempt of `agent` on `poi`. Succeeds iff
/// `draw < base_prob * terrain.success_modifier`; on success the POI is
/// completed at `step`, otherwise it returns to pending.
pub fn attempt_task(
    agent: &AgentState,
    poi: &mut Poi,
    terrain: TerrainKind,
    table: &SuccessTable,
    draw: f64,
    step: u32,
    elapsed_steps: u32,
) -> Result<TaskOutcome> {
    if !agent.in_range(poi.position) {
        return Err(Error::ContractViolation("task attempted from outside sensing range"));
    }
    match poi.status {
        PoiStatus::Pending => {}
        PoiStatus::Assigned if agent.assigned_poi == Some(poi.id) => {}
        _ => return Err(Error::ContractViolation("task attempted on a POI not available to this agent")),
    }
    let p = table.base_prob(agent.kind, poi.attribute) * terrain.success_modifier();
    let success = draw < p;
    if success {
        poi.status = PoiStatus::Completed;
        poi.completion_step = Some(step);
    } else {
        poi.status = PoiStatus::Pending;
    }
    Ok(TaskOutcome { poi_id: poi.id, agent_id: agent.id, success, elapsed_steps, step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn agent_at(kind: AgentKind, x: f64, y: f64) -> AgentState {
        AgentState::new(0, kind, Point::new(x, y))
    }

    #[test]
    fn catalog_matches_published_attributes() {
        assert_eq!(agent_catalog(AgentKind::Human), (1.0, 10.0));
        assert_eq!(agent_catalog(AgentKind::Uav), (2.0, 20.0));
        assert_eq!(agent_catalog(AgentKind::Ugv), (1.5, 15.0));
    }

    #[test]
    fn generates_requested_pois_in_bounds() {
        let cfg = EnvConfig::default();
        let env = generate_environment(&mut RngStream::new(42).env(), TerrainKind::Flat, &cfg).unwrap();
        assert_eq!(env.pois.len(), 10);
        for p in &env.pois {
            assert!((0.0..100.0).contains(&p.position.x) && (0.0..100.0).contains(&p.position.y));
            assert_eq!(p.status, PoiStatus::Pending);
            assert_eq!(p.complexity, p.attribute.complexity());
        }
        for (i, a) in env.pois.iter().enumerate() {
            for b in &env.pois[i + 1..] {
                assert!(a.position.distance(b.position) >= 1.0);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = EnvConfig::default();
        let a = generate_environment(&mut RngStream::new(7).env(), TerrainKind::Rough, &cfg).unwrap();
        let b = generate_environment(&mut RngStream::new(7).env(), TerrainKind::Rough, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_and_zero_poi_configs() {
        let one = EnvConfig { num_pois: 1, ..Default::default() };
        let env = generate_environment(&mut RngStream::new(1).env(), TerrainKind::Flat, &one).unwrap();
        assert_eq!(env.pois.len(), 1);
        let none = EnvConfig { num_pois: 0, ..Default::default() };
        let env = generate_environment(&mut RngStream::new(1).env(), TerrainKind::Flat, &none).unwrap();
        assert!(env.pois.is_empty() && env.all_completed());
    }

    #[test]
    fn impossible_separation_is_reported() {
        let cfg = EnvConfig {
            width: 1.0,
            height: 1.0,
            num_pois: 3,
            min_separation: 5.0,
            max_placement_attempts: 50,
            ..Default::default()
        };
        let err = generate_environment(&mut RngStream::new(1).env(), TerrainKind::Flat, &cfg).unwrap_err();
        assert_eq!(err, Error::PlacementFailed { placed: 1, attempts: 50 });
    }

    #[test]
    fn motion_examples() {
        let uav = agent_at(AgentKind::Uav, 0.0, 0.0);
        let moved = step_agent_motion(&uav, Point::new(10.0, 0.0), TerrainKind::Flat);
        assert!((moved.position.x - 2.0).abs() < 1e-12);

        let ugv = agent_at(AgentKind::Ugv, 0.0, 0.0);
        let moved = step_agent_motion(&ugv, Point::new(0.0, 10.0), TerrainKind::Rough);
        assert!((moved.position.y - 1.05).abs() < 1e-12);

        let human = agent_at(AgentKind::Human, 3.0, 4.0);
        let target = Point::new(3.0, 4.5);
        assert_eq!(step_agent_motion(&human, target, TerrainKind::Flat).position, target);
    }

    #[test]
    fn sensing_examples() {
        let mut env = Environment {
            width: 100.0,
            height: 100.0,
            pois: alloc::vec![
                Poi::new(0, Point::new(0.0, 9.0), PoiAttribute::Survivor),
                Poi::new(1, Point::new(0.0, 10.001), PoiAttribute::Hazard),
                Poi::new(2, Point::new(9.0, 0.0), PoiAttribute::Resource),
                Poi::new(3, Point::new(3.0, 0.0), PoiAttribute::Resource),
            ],
            terrain: TerrainKind::Flat,
        };
        let human = agent_at(AgentKind::Human, 0.0, 0.0);
        assert_eq!(sense_pois(&human, &env), alloc::vec![3, 0, 2]);
        for p in &mut env.pois {
            p.status = PoiStatus::Completed;
        }
        assert!(sense_pois(&human, &env).is_empty());
    }

    #[test]
    fn attempt_examples() {
        let human = agent_at(AgentKind::Human, 0.0, 0.0);
        let table = SuccessTable::default();
        let fresh = || Poi::new(0, Point::new(1.0, 1.0), PoiAttribute::Survivor);

        let mut poi = fresh();
        let out = attempt_task(&human, &mut poi, TerrainKind::Flat, &table, 0.89, 12, 5).unwrap();
        assert!(out.success);
        assert_eq!(poi.status, PoiStatus::Completed);
        assert_eq!(poi.completion_step, Some(12));

        let mut poi = fresh();
        let out = attempt_task(&human, &mut poi, TerrainKind::Flat, &table, 0.90, 12, 5).unwrap();
        assert!(!out.success);
        assert_eq!(poi.status, PoiStatus::Pending);

        let certain = SuccessTable::certain();
        let mut poi = fresh();
        assert!(attempt_task(&human, &mut poi, TerrainKind::Flat, &certain, 0.999_999, 1, 1).unwrap().success);

        let never = SuccessTable { human: AttributeProbs::uniform(0.0), ..certain };
        let mut poi = fresh();
        assert!(!attempt_task(&human, &mut poi, TerrainKind::Flat, &never, 0.0, 1, 1).unwrap().success);
    }

    #[test]
    fn attempt_contract_violations() {
        let human = agent_at(AgentKind::Human, 0.0, 0.0);
        let table = SuccessTable::default();
        let mut far = Poi::new(0, Point::new(50.0, 50.0), PoiAttribute::Survivor);
        assert!(attempt_task(&human, &mut far, TerrainKind::Flat, &table, 0.0, 1, 1).is_err());

        let mut done = Poi::new(0, Point::new(1.0, 0.0), PoiAttribute::Survivor);
        done.status = PoiStatus::Completed;
        assert!(attempt_task(&human, &mut done, TerrainKind::Flat, &table, 0.0, 1, 1).is_err());

        let mut taken = Poi::new(0, Point::new(1.0, 0.0), PoiAttribute::Survivor);
        taken.status = PoiStatus::Assigned;
        assert!(attempt_task(&human, &mut taken, TerrainKind::Flat, &table, 0.0, 1, 1).is_err());
        let owner = AgentState { assigned_poi: Some(0), ..human };
        assert!(attempt_task(&owner, &mut taken, TerrainKind::Flat, &table, 0.0, 1, 1).is_ok());
    }
}
