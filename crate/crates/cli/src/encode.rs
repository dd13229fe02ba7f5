//! JSON encodings of engine values, with states by name.

use serde_json::{json, Value};
use syncmdp::mdp::product_with_counter;
use syncmdp::verdict::{AdvVerdictDetail, Certificate, LimitRoute};
use syncmdp::{Mdp, SupportSet, Verdict};

pub fn set(m: &Mdp, s: &SupportSet) -> Value {
    json!(m.set_names(s))
}

pub fn certificate(m: &Mdp, c: &Certificate) -> Value {
    match c {
        Certificate::SureEventually { k } => json!({"kind": "sure-eventually", "k": k}),
        Certificate::SureWeakly { set: s, k, r } => {
            json!({"kind": "sure-weakly", "set": set(m, s), "k": k, "r": r})
        }
        Certificate::LimitSureEventually {
            k,
            r,
            repeating,
            route,
            failing_states,
        } => {
            let route = match route {
                LimitRoute::Sure { k } => json!({"kind": "sure", "k": k}),
                LimitRoute::Phase { phase, region } => {
                    let prod = product_with_counter(m, *r);
                    json!({"kind": "phase", "phase": phase, "region": set(&prod, region)})
                }
                LimitRoute::None => Value::Null,
            };
            json!({
                "kind": "limit-sure-eventually",
                "k": k,
                "r": r,
                "repeating": set(m, repeating),
                "route": route,
                "failing-states": set(m, failing_states),
            })
        }
        Certificate::AlmostSureWeakly { subset } => {
            json!({"kind": "almost-sure-weakly", "subset": set(m, subset)})
        }
        Certificate::AlmostSureEventually { sure, weakly } => json!({
            "kind": "almost-sure-eventually",
            "sure-k": sure,
            "weakly-subset": weakly.as_ref().map(|s| set(m, s)),
        }),
        Certificate::Always { safety_region } => {
            json!({"kind": "always", "safety-region": set(m, safety_region)})
        }
        Certificate::Strongly {
            safety_region,
            reach_region,
        } => json!({
            "kind": "strongly",
            "safety-region": set(m, safety_region),
            "reach-region": set(m, reach_region),
        }),
    }
}

pub fn detail(d: &AdvVerdictDetail) -> Value {
    let mut out = json!({
        "condition1": d.condition1,
        "condition2": d.condition2,
        "failing-index1": d.failing_index1,
        "failing-index2": d.failing_index2,
        "loop-start": d.loop_start,
        "period": d.period,
        "switch-point": d.switch_point,
    });
    if let Some(g) = d.graph_test {
        out["graph-test"] = json!(g);
    }
    out
}

pub fn verdict(m: &Mdp, v: &Verdict) -> crate::report::QueryReport {
    crate::report::QueryReport {
        mode: v.query.sync.name().to_string(),
        win: v.query.win.name().to_string(),
        answer: v.answer,
        certificate: v.certificate.as_ref().map(|c| certificate(m, c)),
        detail: v.detail.as_ref().map(detail),
        bounds: v.bounds.iter().map(|b| b.to_json()).collect(),
        strategy: v.strategy.as_ref().map(|s| s.to_json(m)),
    }
}
