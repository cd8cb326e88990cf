use std::collections::HashSet;

use sartrust_core::engine::*;
use sartrust_core::environment::{PoiStatus, SuccessTable, TerrainKind};
use sartrust_core::trust::TrustModelKind;
use sartrust_core::EPISODE_STEP_CAP;

#[derive(Default)]
struct Recorder {
    steps: Vec<StepRecord>,
}

impl StepObserver for Recorder {
    fn on_step(&mut self, record: &StepRecord) {
        self.steps.push(record.clone());
    }
}

fn small() -> Scenario {
    Scenario::named(ScenarioName::Small)
}

#[test]
fn same_seed_same_episode() {
    let cfg = SimConfig::default();
    for model in TrustModelKind::ALL {
        let a = run_episode(&small(), model, &cfg, 42).unwrap();
        let b = run_episode(&small(), model, &cfg, 42).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}

#[test]
fn seeds_change_the_world() {
    let cfg = SimConfig::default();
    let a = run_episode(&small(), TrustModelKind::Ect, &cfg, 1).unwrap();
    let b = run_episode(&small(), TrustModelKind::Ect, &cfg, 2).unwrap();
    assert_ne!(format!("{:?}", a.outcomes), format!("{:?}", b.outcomes));
}

#[test]
fn episodes_respect_the_step_cap_and_trust_bounds() {
    let cfg = SimConfig::default();
    for name in ScenarioName::ALL {
        for model in TrustModelKind::ALL {
            for seed in 0..4 {
                let r = run_episode(&Scenario::named(name), model, &cfg, seed).unwrap();
                assert!(r.steps_used <= EPISODE_STEP_CAP);
                assert!(r.completed_count() <= r.total_tasks);
                for trace in &r.trust_trace {
                    for (_, t) in &trace.samples {
                        assert!((0.0..=1.0).contains(&t.value()));
                        if model == TrustModelKind::NoTrust {
                            assert_eq!(t.value(), 0.5);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn completed_pois_are_never_attempted_again() {
    let cfg = SimConfig::default();
    for seed in 0..8 {
        let r = run_episode(&Scenario::named(ScenarioName::Medium), TrustModelKind::GuoYang, &cfg, seed).unwrap();
        let mut done = HashSet::new();
        for o in &r.outcomes {
            assert!(!done.contains(&o.poi_id), "poi {} retried after success", o.poi_id);
            if o.success {
                done.insert(o.poi_id);
            }
        }
    }
}

#[test]
fn agents_stay_on_the_map() {
    let cfg = SimConfig::default();
    let mut rec = Recorder::default();
    run_episode_observed(&Scenario::named(ScenarioName::Large), TrustModelKind::XuDudek, &cfg, 9, &mut rec).unwrap();
    assert!(!rec.steps.is_empty());
    for s in &rec.steps {
        for a in &s.agents {
            assert!((0.0..=cfg.env.width).contains(&a.position.x));
            assert!((0.0..=cfg.env.height).contains(&a.position.y));
        }
        let completed = s.pois.iter().filter(|p| p.status == PoiStatus::Completed).count();
        assert!(completed <= s.pois.len());
    }
}

#[test]
fn certain_success_golden() {
    let mut cfg = SimConfig::default();
    cfg.env.success = SuccessTable::certain();
    let mut scenario = Scenario::named(ScenarioName::Large);
    scenario.terrain = TerrainKind::Flat;
    let r = run_episode(&scenario, TrustModelKind::NoTrust, &cfg, 2024).unwrap();
    assert_eq!(r.completed_count(), r.total_tasks);
    assert!(r.outcomes.iter().all(|o| o.success));
    assert_eq!(r.steps_used, GOLDEN_STEPS);
}

const GOLDEN_STEPS: u32 = 423;
