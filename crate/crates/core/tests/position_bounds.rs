//! The always/strongly position bounds quantify over one strategy at a time.
//! The per-step optimum may reach 1 at every step of a prefix through
//! different strategies, so only the per-strategy form is asserted here.

use num_traits::One;

use syncmdp::bounds::{attach_bounds, BoundKind};
use syncmdp::oracle::{enumerate_pure_strategies, max_mass_at_step};
use syncmdp::rational::ratio;
use syncmdp::{decide, parse_model, Limits, SyncMode, WinMode};

const MODEL: &str = r#"{
  "states": ["q0", "q1", "q2"],
  "actions": ["a", "b"],
  "transitions": [
    {"from": "q0", "action": "a", "to": "q2", "prob": "1"},
    {"from": "q0", "action": "b", "to": "q0", "prob": "1"},
    {"from": "q1", "action": "a", "to": "q0", "prob": "1"},
    {"from": "q1", "action": "b", "to": "q1", "prob": "1/3"},
    {"from": "q1", "action": "b", "to": "q2", "prob": "2/3"},
    {"from": "q2", "action": "a", "to": "q0", "prob": "2/3"},
    {"from": "q2", "action": "a", "to": "q2", "prob": "1/3"},
    {"from": "q2", "action": "b", "to": "q0", "prob": "1/4"},
    {"from": "q2", "action": "b", "to": "q1", "prob": "1/2"},
    {"from": "q2", "action": "b", "to": "q2", "prob": "1/4"}
  ],
  "initial": {"q1": "1"},
  "targets": {"goal": ["q1", "q2"]}
}"#;

#[test]
fn per_step_optimum_reaches_one_while_every_strategy_dips() {
    let model = parse_model(MODEL).unwrap();
    let m = &model.mdp;
    let t = model.target("goal").unwrap();
    let s0 = model.initial.support();
    let lim = Limits::default();

    let v = decide(m, SyncMode::Always, WinMode::Sure, t, &s0, &lim).unwrap();
    assert!(!v.answer);
    let v = attach_bounds(v, m, &model.initial, &lim);
    let ceiling = v
        .bounds
        .iter()
        .find(|b| b.kind == BoundKind::EpsAlways)
        .and_then(|b| b.ceiling())
        .unwrap();

    let n = m.num_states();
    let profile = max_mass_at_step(m, t, &model.initial, n);
    assert!(profile.values.iter().all(|x| x.is_one()));

    let mut best = None;
    let count = enumerate_pure_strategies(m, &model.initial, n, 1_000_000, |_, tr| {
        let low = (0..=n).map(|i| tr.mass_at(i, t)).min().unwrap();
        assert!(low <= ceiling);
        if best.as_ref().is_none_or(|b| low > *b) {
            best = Some(low);
        }
    })
    .unwrap();
    assert_eq!(count, 76);
    assert_eq!(best, Some(ratio(5, 6)));
}
