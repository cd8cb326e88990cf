//! Trust models.
//!
//! Each model is a pure function from prior state and a performance
//! observation to new state. [`TrustEstimator`] wraps the per-model state so
//! the engine can hold one per (human evaluator, robot) pair without caring
//! which model is active.

use core::fmt;
use core::str::FromStr;

use crate::environment::TaskOutcome;
use crate::error::{check_unit, Error, Result};
use crate::EPISODE_STEP_CAP;

/// A trust value, always inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct TrustLevel(f64);

impl TrustLevel {
    pub const ZERO: Self = Self(0.0);
    pub const NEUTRAL: Self = Self(0.5);
    pub const FULL: Self = Self(1.0);

    /// Clamps into `[0, 1]`. NaN maps to zero.
    pub fn new(value: f64) -> Self {
        if value.is_nan() {
            Self(0.0)
        } else {
            Self(value.clamp(0.0, 1.0))
        }
    }

    pub const fn value(self) -> f64 {
        self.0
    }
}

impl From<TrustLevel> for f64 {
    fn from(t: TrustLevel) -> f64 {
        t.0
    }
}

/// What an evaluator saw of one robot task.
///
/// `success` is the binary outcome, `score` the continuous performance of this
/// task and `prev_score` that of the robot's previous task. `intervention` and
/// `task_change` only feed the Xu–Dudek intervention probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceObservation {
    pub success: bool,
    pub score: f64,
    pub prev_score: f64,
    pub intervention: bool,
    pub task_change: bool,
}

impl PerformanceObservation {
    pub fn new(success: bool, score: f64, prev_score: f64) -> Result<Self> {
        Ok(Self {
            success,
            score: check_unit("score", score)?,
            prev_score: check_unit("prev_score", prev_score)?,
            intervention: false,
            task_change: false,
        })
    }
}

// ---------------------------------------------------------------------------
// NoTrust

/// Baseline: trust never moves off neutral, so it cancels out of allocation.
pub fn no_trust(_obs: &PerformanceObservation) -> TrustLevel {
    TrustLevel::NEUTRAL
}

// ---------------------------------------------------------------------------
// Monir: step function over performance regions

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MonirConfig {
    /// Predictability threshold.
    pub f_p: f64,
    /// Dependability threshold.
    pub f_d: f64,
    /// Faith threshold.
    pub f_f: f64,
    /// Trust level held in the predictable region.
    pub epsilon: f64,
    /// Slope of the tanh ramp in the dependable region.
    pub slope: f64,
}

impl Default for MonirConfig {
    fn default() -> Self {
        Self { f_p: 0.3, f_d: 0.5, f_f: 0.9, epsilon: 0.1, slope: 1.0 }
    }
}

impl MonirConfig {
    pub fn new(f_p: f64, f_d: f64, f_f: f64, epsilon: f64, slope: f64) -> Result<Self> {
        let cfg = Self { f_p, f_d, f_f, epsilon, slope };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = 0.0 <= self.f_p && self.f_p < self.f_d && self.f_d < self.f_f && self.f_f <= 1.0;
        if !ordered {
            return Err(Error::InvalidConfig {
                field: "f_p/f_d/f_f",
                reason: "thresholds must satisfy 0 <= f_p < f_d < f_f <= 1",
            });
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig { field: "epsilon", reason: "must be in [0, 1]" });
        }
        if !(self.slope > 0.0) {
            return Err(Error::InvalidConfig { field: "slope", reason: "must be > 0" });
        }
        Ok(())
    }
}

pub fn monir_trust(score: f64, cfg: &MonirConfig) -> TrustLevel {
    let value = if score < cfg.f_p {
        0.0
    } else if score < cfg.f_d {
        cfg.epsilon
    } else if score < cfg.f_f {
        let delta = score - cfg.f_d;
        f64::min(1.0, cfg.epsilon + libm::tanh(cfg.slope * delta))
    } else {
        1.0
    };
    TrustLevel::new(value)
}

// ---------------------------------------------------------------------------
// Xu–Dudek: mean dynamics of the trust DBN

/// Weights of the Xu–Dudek trust dynamics (`w_tb`, `w_tp`, `w_td`, `sigma_t`)
/// and of the intervention observation (`w_ib`, `w_it`, `w_id`, `w_ie`).
///
/// The trust-change self-report observation of the original model has no
/// parametric form and is not simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct XuDudekConfig {
    pub w_tb: f64,
    pub w_tp: f64,
    pub w_td: f64,
    pub sigma_t: f64,
    pub w_ib: f64,
    pub w_it: f64,
    pub w_id: f64,
    pub w_ie: f64,
    /// Add `sigma_t`-scaled Gaussian noise to each update.
    pub stochastic: bool,
}

impl Default for XuDudekConfig {
    fn default() -> Self {
        Self {
            w_tb: 0.0,
            w_tp: 0.1,
            w_td: 0.05,
            sigma_t: 0.05,
            w_ib: 2.0,
            w_it: -4.0,
            w_id: -1.0,
            w_ie: 0.5,
            stochastic: false,
        }
    }
}

impl XuDudekConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_t >= 0.0) {
            return Err(Error::InvalidConfig { field: "sigma_t", reason: "must be >= 0" });
        }
        let weights = [self.w_tb, self.w_tp, self.w_td, self.w_ib, self.w_it, self.w_id, self.w_ie];
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig { field: "w_*", reason: "weights must be finite" });
        }
        Ok(())
    }
}

/// One step of the Gaussian trust dynamics. In deterministic mode this is the
/// mean; in stochastic mode `noise_draw` must carry a standard-normal sample.
pub fn xu_dudek_update(
    prev: TrustLevel,
    obs: &PerformanceObservation,
    cfg: &XuDudekConfig,
    noise_draw: Option<f64>,
) -> Result<TrustLevel> {
    let mean = prev.value() + cfg.w_tb + cfg.w_tp * obs.score + cfg.w_td * (obs.score - obs.prev_score);
    let value = if cfg.stochastic {
        let z = noise_draw.ok_or(Error::ContractViolation("stochastic Xu-Dudek update requires a noise draw"))?;
        mean + cfg.sigma_t * z
    } else {
        mean
    };
    Ok(TrustLevel::new(value))
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// Probability that the human intervenes given the current and previous trust.
/// Diagnostic only; allocation never reads it.
pub fn xu_dudek_intervention_prob(
    trust: TrustLevel,
    prev_trust: TrustLevel,
    obs: &PerformanceObservation,
    cfg: &XuDudekConfig,
) -> f64 {
    let change = if obs.task_change { 1.0 } else { 0.0 };
    sigmoid(cfg.w_ib + cfg.w_it * trust.value() + cfg.w_id * (trust.value() - prev_trust.value()) + cfg.w_ie * change)
}

// ---------------------------------------------------------------------------
// Guo–Yang: Beta-Bernoulli

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuoYangState {
    pub alpha: f64,
    pub beta: f64,
}

impl GuoYangState {
    pub fn prior(cfg: &GuoYangConfig) -> Self {
        Self { alpha: cfg.alpha0, beta: cfg.beta0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GuoYangConfig {
    /// Weight of a positive experience.
    pub w_s: f64,
    /// Weight of a negative experience.
    pub w_f: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl Default for GuoYangConfig {
    fn default() -> Self {
        Self { w_s: 1.0, w_f: 1.0, alpha0: 1.0, beta0: 1.0 }
    }
}

impl GuoYangConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("w_s", self.w_s), ("w_f", self.w_f), ("alpha0", self.alpha0), ("beta0", self.beta0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig { field, reason: "must be finite and > 0" });
            }
        }
        Ok(())
    }
}

/// Successes grow `alpha`, failures grow `beta`.
pub fn guo_yang_update(state: GuoYangState, success: bool, cfg: &GuoYangConfig) -> GuoYangState {
    if success {
        GuoYangState { alpha: state.alpha + cfg.w_s, ..state }
    } else {
        GuoYangState { beta: state.beta + cfg.w_f, ..state }
    }
}

/// Posterior mean of the Beta distribution.
pub fn guo_yang_predict(state: GuoYangState) -> TrustLevel {
    TrustLevel::new(state.alpha / (state.alpha + state.beta))
}

// ---------------------------------------------------------------------------
// Expectation-confirmation trust

/// Neutral initial trust given to every robot before any evidence.
pub const ECT_INITIAL_TRUST: TrustLevel = TrustLevel::NEUTRAL;

/// Weight of the newest performance in the expectation's moving average.
pub const ECT_EXPECTATION_SMOOTHING: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EctConfig {
    /// How far one confirmation can move trust.
    pub learn_rate: f64,
    /// Sensitivity of the tanh to the performance gap.
    pub scale: f64,
    /// Multiplicative shrinkage per evaluation period.
    pub decay: f64,
    /// Competence, ability and dependability weights.
    pub facet_weights: [f64; 3],
}

impl Default for EctConfig {
    fn default() -> Self {
        Self { learn_rate: 0.1, scale: 2.0, decay: 0.0, facet_weights: [1.0 / 3.0; 3] }
    }
}

impl EctConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learn_rate > 0.0 && self.learn_rate.is_finite()) {
            return Err(Error::InvalidConfig { field: "learn_rate", reason: "must be finite and > 0" });
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidConfig { field: "scale", reason: "must be finite and > 0" });
        }
        if !(0.0..1.0).contains(&self.decay) {
            return Err(Error::InvalidConfig { field: "decay", reason: "must be in [0, 1)" });
        }
        if self.facet_weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidConfig { field: "facet_weights", reason: "weights must be >= 0" });
        }
        let sum: f64 = self.facet_weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig { field: "facet_weights", reason: "weights must sum to 1" });
        }
        Ok(())
    }
}

/// Index into [`EctState::facets`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facet {
    Competence = 0,
    Ability = 1,
    Dependability = 2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EctState {
    pub trust: TrustLevel,
    pub expectation: f64,
    pub facets: [TrustLevel; 3],
    pub initial_trust: TrustLevel,
    pub initial_expectation: f64,
}

impl EctState {
    pub fn facet(&self, facet: Facet) -> TrustLevel {
        self.facets[facet as usize]
    }
}

pub fn ect_initialize(robot_capability: f64, task_complexity: f64, _cfg: &EctConfig) -> Result<EctState> {
    check_unit("robot_capability", robot_capability)?;
    check_unit("task_complexity", task_complexity)?;
    let expectation = (robot_capability - 0.3 * task_complexity).clamp(0.0, 1.0);
    Ok(EctState {
        trust: ECT_INITIAL_TRUST,
        expectation,
        facets: [ECT_INITIAL_TRUST; 3],
        initial_trust: ECT_INITIAL_TRUST,
        initial_expectation: expectation,
    })
}

/// Performance of one task: half for success, half for speed relative to the
/// episode cap.
pub fn ect_evaluate_performance(outcome: &TaskOutcome) -> f64 {
    let cap = f64::from(EPISODE_STEP_CAP);
    let elapsed = f64::from(outcome.elapsed_steps.min(EPISODE_STEP_CAP));
    let success = if outcome.success { 1.0 } else { 0.0 };
    0.5 * success + 0.5 * (1.0 - elapsed / cap)
}

/// Unclamped decay-form update of a single trust value. With `interacted`
/// false only the decay applies.
pub fn ect_raw_step(prev: f64, delta: f64, cfg: &EctConfig, interacted: bool) -> f64 {
    let kept = (1.0 - cfg.decay) * prev;
    if interacted {
        kept + cfg.learn_rate * libm::tanh(cfg.scale * delta)
    } else {
        kept
    }
}

pub fn ect_update(state: EctState, perf: f64, cfg: &EctConfig, interacted: bool) -> EctState {
    let delta = perf - state.expectation;
    let facets = state.facets.map(|f| TrustLevel::new(ect_raw_step(f.value(), delta, cfg, interacted)));
    let combined: f64 = facets.iter().zip(cfg.facet_weights).map(|(f, w)| w * f.value()).sum();
    let expectation = if interacted {
        (1.0 - ECT_EXPECTATION_SMOOTHING) * state.expectation + ECT_EXPECTATION_SMOOTHING * perf
    } else {
        state.expectation
    };
    EctState { trust: TrustLevel::new(combined), expectation: expectation.clamp(0.0, 1.0), facets, ..state }
}

// ---------------------------------------------------------------------------
// Team aggregation

pub fn team_trust_aggregate(member_trusts: &[TrustLevel]) -> Result<TrustLevel> {
    if member_trusts.is_empty() {
        return Err(Error::Empty("member trust list"));
    }
    let sum: f64 = member_trusts.iter().map(|t| t.value()).sum();
    Ok(TrustLevel::new(sum / member_trusts.len() as f64))
}

// ---------------------------------------------------------------------------
// Model selection and per-pair state

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TrustModelKind {
    NoTrust,
    Monir,
    XuDudek,
    GuoYang,
    Ect,
}

impl TrustModelKind {
    pub const ALL: [Self; 5] = [Self::NoTrust, Self::Monir, Self::XuDudek, Self::GuoYang, Self::Ect];

    pub const fn name(self) -> &'static str {
        match self {
            Self::NoTrust => "no_trust",
            Self::Monir => "monir",
            Self::XuDudek => "xu_dudek",
            Self::GuoYang => "guo_yang",
            Self::Ect => "ect",
        }
    }
}

impl fmt::Display for TrustModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrustModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(Error::InvalidConfig { field: "models", reason: "unknown trust model" })
    }
}

/// Configuration for every model, so one bundle can drive any of them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ModelConfigs {
    pub monir: MonirConfig,
    pub xu_dudek: XuDudekConfig,
    pub guo_yang: GuoYangConfig,
    pub ect: EctConfig,
}

impl ModelConfigs {
    pub fn validate(&self) -> Result<()> {
        self.monir.validate()?;
        self.xu_dudek.validate()?;
        self.guo_yang.validate()?;
        self.ect.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ModelState {
    NoTrust,
    Monir(TrustLevel),
    XuDudek(TrustLevel),
    GuoYang(GuoYangState),
    Ect(EctState),
}

/// One evaluator's running trust in one robot under the active model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustEstimator {
    state: ModelState,
    last_score: f64,
    intervention_prob: f64,
}

impl TrustEstimator {
    /// `robot_capability` and `task_complexity` seed the ECT expectation and
    /// are ignored by the other models.
    pub fn new(kind: TrustModelKind, cfgs: &ModelConfigs, robot_capability: f64, task_complexity: f64) -> Result<Self> {
        let state = match kind {
            TrustModelKind::NoTrust => ModelState::NoTrust,
            TrustModelKind::Monir => ModelState::Monir(TrustLevel::NEUTRAL),
            TrustModelKind::XuDudek => ModelState::XuDudek(TrustLevel::NEUTRAL),
            TrustModelKind::GuoYang => ModelState::GuoYang(GuoYangState::prior(&cfgs.guo_yang)),
            TrustModelKind::Ect => ModelState::Ect(ect_initialize(robot_capability, task_complexity, &cfgs.ect)?),
        };
        Ok(Self { state, last_score: 0.5, intervention_prob: 0.5 })
    }

    pub fn kind(&self) -> TrustModelKind {
        match self.state {
            ModelState::NoTrust => TrustModelKind::NoTrust,
            ModelState::Monir(_) => TrustModelKind::Monir,
            ModelState::XuDudek(_) => TrustModelKind::XuDudek,
            ModelState::GuoYang(_) => TrustModelKind::GuoYang,
            ModelState::Ect(_) => TrustModelKind::Ect,
        }
    }

    pub fn level(&self) -> TrustLevel {
        match self.state {
            ModelState::NoTrust => TrustLevel::NEUTRAL,
            ModelState::Monir(t) | ModelState::XuDudek(t) => t,
            ModelState::GuoYang(s) => guo_yang_predict(s),
            ModelState::Ect(s) => s.trust,
        }
    }

    /// Score of the last observed task, fed back as `prev_score`.
    pub fn last_score(&self) -> f64 {
        self.last_score
    }

    /// Latest Xu–Dudek intervention probability (0.5 for other models).
    pub fn intervention_prob(&self) -> f64 {
        self.intervention_prob
    }

    /// Folds in one task observation. `noise_draw` is only read by a
    /// stochastic Xu–Dudek model.
    pub fn observe(
        &mut self,
        obs: &PerformanceObservation,
        cfgs: &ModelConfigs,
        noise_draw: Option<f64>,
    ) -> Result<TrustLevel> {
        self.state = match self.state {
            ModelState::NoTrust => {
                no_trust(obs);
                ModelState::NoTrust
            }
            ModelState::Monir(_) => ModelState::Monir(monir_trust(obs.score, &cfgs.monir)),
            ModelState::XuDudek(prev) => {
                let next = xu_dudek_update(prev, obs, &cfgs.xu_dudek, noise_draw)?;
                self.intervention_prob = xu_dudek_intervention_prob(next, prev, obs, &cfgs.xu_dudek);
                ModelState::XuDudek(next)
            }
            ModelState::GuoYang(s) => ModelState::GuoYang(guo_yang_update(s, obs.success, &cfgs.guo_yang)),
            ModelState::Ect(s) => ModelState::Ect(ect_update(s, obs.score, &cfgs.ect, true)),
        };
        self.last_score = obs.score;
        Ok(self.level())
    }

    /// An evaluation period with no task from this robot. Only ECT reacts
    /// (decay); the other models hold their value.
    pub fn idle(&mut self, cfgs: &ModelConfigs) -> TrustLevel {
        if let ModelState::Ect(s) = self.state {
            self.state = ModelState::Ect(ect_update(s, s.expectation, &cfgs.ect, false));
        }
        self.level()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn obs(success: bool, score: f64, prev: f64) -> PerformanceObservation {
        PerformanceObservation::new(success, score, prev).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn trust_level_clamps() {
        assert_eq!(TrustLevel::new(-0.2).value(), 0.0);
        assert_eq!(TrustLevel::new(1.7).value(), 1.0);
        assert_eq!(TrustLevel::new(f64::NAN).value(), 0.0);
        assert_eq!(TrustLevel::new(0.25).value(), 0.25);
    }

    #[test]
    fn observation_rejects_out_of_range_scores() {
        assert!(PerformanceObservation::new(true, 1.2, 0.0).is_err());
        assert!(PerformanceObservation::new(true, 0.2, -0.1).is_err());
    }

    #[test]
    fn monir_examples() {
        let cfg = MonirConfig::default();
        assert_eq!(monir_trust(0.2, &cfg).value(), 0.0);
        assert_eq!(monir_trust(0.95, &cfg).value(), 1.0);
        // 0.1 + tanh(0.2), evaluated at 30 digits with mpmath.
        assert!(close(monir_trust(0.7, &cfg).value(), 0.297_375_320_224_904, 1e-14));
        assert_eq!(monir_trust(0.4, &cfg).value(), 0.1);
    }

    #[test]
    fn monir_branch_boundaries() {
        let cfg = MonirConfig::default();
        assert_eq!(monir_trust(0.3, &cfg).value(), 0.1);
        assert_eq!(monir_trust(0.5, &cfg).value(), 0.1);
        assert_eq!(monir_trust(0.9, &cfg).value(), 1.0);
        assert!(monir_trust(0.299_999_999, &cfg).value() == 0.0);
    }

    #[test]
    fn monir_config_validation() {
        assert!(MonirConfig::new(0.5, 0.3, 0.9, 0.1, 1.0).is_err());
        assert!(MonirConfig::new(0.3, 0.5, 0.5, 0.1, 1.0).is_err());
        assert!(MonirConfig::new(0.3, 0.5, 0.9, 0.1, 0.0).is_err());
        assert!(MonirConfig::new(0.3, 0.5, 0.9, 1.5, 1.0).is_err());
        assert!(MonirConfig::new(0.0, 0.5, 1.0, 0.0, 2.0).is_ok());
    }

    #[test]
    fn xu_dudek_examples() {
        let cfg = XuDudekConfig::default();
        let t = xu_dudek_update(TrustLevel::new(0.5), &obs(true, 1.0, 0.0), &cfg, None).unwrap();
        assert!(close(t.value(), 0.65, 1e-12));

        let zero = XuDudekConfig { w_tb: 0.0, w_tp: 0.0, w_td: 0.0, ..cfg };
        let t = xu_dudek_update(TrustLevel::new(0.5), &obs(true, 1.0, 0.0), &zero, None).unwrap();
        assert_eq!(t.value(), 0.5);

        let t = xu_dudek_update(TrustLevel::new(0.98), &obs(true, 1.0, 1.0), &cfg, None).unwrap();
        assert_eq!(t.value(), 1.0);
    }

    #[test]
    fn xu_dudek_stochastic_needs_noise() {
        let cfg = XuDudekConfig { stochastic: true, sigma_t: 0.1, ..Default::default() };
        let o = obs(true, 1.0, 0.0);
        assert!(matches!(xu_dudek_update(TrustLevel::NEUTRAL, &o, &cfg, None), Err(Error::ContractViolation(_))));
        let t = xu_dudek_update(TrustLevel::NEUTRAL, &o, &cfg, Some(-1.0)).unwrap();
        assert!(close(t.value(), 0.55, 1e-12));
    }

    #[test]
    fn xu_dudek_intervention_examples() {
        let zero = XuDudekConfig { w_ib: 0.0, w_it: 0.0, w_id: 0.0, w_ie: 0.0, ..Default::default() };
        let o = obs(true, 0.5, 0.5);
        let p = xu_dudek_intervention_prob(TrustLevel::FULL, TrustLevel::ZERO, &o, &zero);
        assert_eq!(p, 0.5);

        let floor = XuDudekConfig { w_ib: -50.0, ..zero };
        assert!(xu_dudek_intervention_prob(TrustLevel::NEUTRAL, TrustLevel::NEUTRAL, &o, &floor) < 1e-20);

        let two = XuDudekConfig { w_ib: 1.0, w_it: 1.0, ..zero };
        let p = xu_dudek_intervention_prob(TrustLevel::FULL, TrustLevel::FULL, &o, &two);
        // 1 / (1 + e^-2), evaluated at 30 digits with mpmath.
        assert!(close(p, 0.880_797_077_977_882_4, 1e-15));
    }

    #[test]
    fn guo_yang_examples() {
        let cfg = GuoYangConfig::default();
        let prior = GuoYangState::prior(&cfg);
        assert_eq!(guo_yang_update(prior, true, &cfg), GuoYangState { alpha: 2.0, beta: 1.0 });
        assert_eq!(guo_yang_update(prior, false, &cfg), GuoYangState { alpha: 1.0, beta: 2.0 });
        let s = [true, true, true, false].into_iter().fold(prior, |s, ok| guo_yang_update(s, ok, &cfg));
        assert_eq!(s, GuoYangState { alpha: 4.0, beta: 2.0 });

        assert_eq!(guo_yang_predict(prior).value(), 0.5);
        assert!(close(guo_yang_predict(s).value(), 2.0 / 3.0, 1e-15));
        assert!(close(guo_yang_predict(GuoYangState { alpha: 2.0, beta: 1.0 }).value(), 2.0 / 3.0, 1e-15));
    }

    #[test]
    fn guo_yang_rejects_nonpositive_config() {
        assert!(GuoYangConfig { w_f: 0.0, ..Default::default() }.validate().is_err());
        assert!(GuoYangConfig { alpha0: -1.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn ect_initialize_examples() {
        let cfg = EctConfig::default();
        let s = ect_initialize(0.8, 0.5, &cfg).unwrap();
        assert!(close(s.expectation, 0.65, 1e-12));
        assert_eq!(s.trust.value(), 0.5);
        assert_eq!(s.facets, [TrustLevel::NEUTRAL; 3]);
        assert_eq!(ect_initialize(0.0, 1.0, &cfg).unwrap().expectation, 0.0);
        assert_eq!(ect_initialize(1.0, 0.0, &cfg).unwrap().expectation, 1.0);
        assert!(ect_initialize(1.1, 0.0, &cfg).is_err());
        assert!(ect_initialize(0.5, -0.1, &cfg).is_err());
    }

    #[test]
    fn ect_performance_examples() {
        let out = |success, elapsed_steps| TaskOutcome {
            poi_id: 0,
            agent_id: 0,
            success,
            elapsed_steps,
            step: elapsed_steps,
        };
        assert_eq!(ect_evaluate_performance(&out(true, 0)), 1.0);
        assert_eq!(ect_evaluate_performance(&out(false, 500)), 0.0);
        assert_eq!(ect_evaluate_performance(&out(true, 250)), 0.75);
    }

    fn ect_state(trust: f64, expectation: f64) -> EctState {
        let t = TrustLevel::new(trust);
        EctState { trust: t, expectation, facets: [t; 3], initial_trust: t, initial_expectation: expectation }
    }

    #[test]
    fn ect_update_examples() {
        let cfg = EctConfig::default();
        let s = ect_update(ect_state(0.5, 0.4), 0.4, &cfg, true);
        assert!(close(s.trust.value(), 0.5, 1e-15));

        let s = ect_update(ect_state(0.5, 0.5), 1.0, &cfg, true);
        // 0.5 + 0.1 tanh(1), evaluated at 30 digits with mpmath.
        assert!(close(s.trust.value(), 0.576_159_415_595_576_5, 1e-12));
        assert!(close(s.expectation, 0.55, 1e-12));

        let decaying = EctConfig { decay: 0.01, ..cfg };
        let s = ect_update(ect_state(0.5, 0.5), 0.5, &decaying, false);
        assert!(close(s.trust.value(), 0.495, 1e-12));
        assert_eq!(s.expectation, 0.5);
    }

    #[test]
    fn ect_facets_follow_weights() {
        let cfg = EctConfig { facet_weights: [0.5, 0.25, 0.25], ..Default::default() };
        let mut s = ect_state(0.5, 0.5);
        s.facets = [TrustLevel::new(0.2), TrustLevel::new(0.6), TrustLevel::new(1.0)];
        let next = ect_update(s, 0.5, &cfg, true);
        assert!(close(next.trust.value(), 0.5 * 0.2 + 0.25 * 0.6 + 0.25 * 1.0, 1e-12));
        assert_eq!(next.facet(Facet::Dependability).value(), 1.0);
    }

    #[test]
    fn ect_config_validation() {
        assert!(EctConfig { decay: 1.0, ..Default::default() }.validate().is_err());
        assert!(EctConfig { facet_weights: [0.5, 0.5, 0.5], ..Default::default() }.validate().is_err());
        assert!(EctConfig { learn_rate: 0.0, ..Default::default() }.validate().is_err());
        assert!(EctConfig::default().validate().is_ok());
    }

    #[test]
    fn team_aggregate_examples() {
        let t = |v: &[f64]| v.iter().map(|&x| TrustLevel::new(x)).collect::<Vec<_>>();
        assert!(close(team_trust_aggregate(&t(&[0.4, 0.6])).unwrap().value(), 0.5, 1e-15));
        assert_eq!(team_trust_aggregate(&t(&[0.7])).unwrap().value(), 0.7);
        assert_eq!(team_trust_aggregate(&t(&[0.0, 1.0, 0.5, 0.5])).unwrap().value(), 0.5);
        assert_eq!(team_trust_aggregate(&[]), Err(Error::Empty("member trust list")));
    }

    #[test]
    fn no_trust_is_constant() {
        let cfgs = ModelConfigs::default();
        let mut est = TrustEstimator::new(TrustModelKind::NoTrust, &cfgs, 0.8, 0.5).unwrap();
        assert_eq!(no_trust(&obs(true, 1.0, 0.0)).value(), 0.5);
        assert_eq!(no_trust(&obs(false, 0.0, 1.0)).value(), 0.5);
        for i in 0..100 {
            let o = obs(i % 3 == 0, (i as f64) / 100.0, 0.5);
            assert_eq!(est.observe(&o, &cfgs, None).unwrap().value(), 0.5);
        }
    }

    #[test]
    fn model_names_round_trip() {
        for k in TrustModelKind::ALL {
            assert_eq!(k.name().parse::<TrustModelKind>().unwrap(), k);
        }
        assert!("foo".parse::<TrustModelKind>().is_err());
    }

    #[test]
    fn estimator_idle_only_moves_ect() {
        let mut cfgs = ModelConfigs::default();
        cfgs.ect.decay = 0.1;
        for kind in TrustModelKind::ALL {
            let mut est = TrustEstimator::new(kind, &cfgs, 0.8, 0.5).unwrap();
            let before = est.level();
            let after = est.idle(&cfgs);
            if kind == TrustModelKind::Ect {
                assert!(close(after.value(), 0.45, 1e-12));
            } else {
                assert_eq!(before, after);
            }
        }
    }
}
