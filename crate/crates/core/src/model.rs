//! JSON model documents: an MDP, an initial distribution and named target sets.
//!
//! ```json
//! {"states": ["q0", "q1"], "actions": ["a"],
//!  "transitions": [{"from": "q0", "action": "a", "to": "q1", "prob": "1/2"}, ...],
//!  "initial": {"q0": "1"},
//!  "targets": {"goal": ["q1"]}}
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::mdp::{Dist, Mdp, ModelError};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::support::SupportSet;

/// A parsed model document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub mdp: Mdp,
    pub initial: Dist,
    /// Named target sets in declaration order.
    pub targets: Vec<(String, SupportSet)>,
}

impl Model {
    pub fn target(&self, name: &str) -> Option<&SupportSet> {
        self.targets.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn target_names(&self) -> Vec<&str> {
        self.targets.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        let m = &self.mdp;
        let mut transitions = Vec::new();
        for q in m.states() {
            for a in m.actions() {
                for (q2, p) in m.delta(q, a).iter() {
                    transitions.push(RawTransition {
                        from: m.state_name(q).to_string(),
                        action: m.action_name(a).to_string(),
                        to: m.state_name(q2).to_string(),
                        prob: format_rational(p),
                    });
                }
            }
        }
        let doc = RawModelOut {
            states: m.state_names().to_vec(),
            actions: m.action_names().to_vec(),
            transitions,
            initial: self
                .initial
                .iter()
                .map(|(q, p)| (m.state_name(q).to_string(), format_rational(p)))
                .collect(),
            targets: self
                .targets
                .iter()
                .map(|(name, set)| (name.clone(), m.set_names(set)))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }
}

#[derive(Deserialize, Serialize)]
struct RawTransition {
    from: String,
    action: String,
    to: String,
    prob: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    states: Vec<String>,
    actions: Vec<String>,
    transitions: Vec<RawTransition>,
    initial: Pairs<String>,
    #[serde(default)]
    targets: Pairs<Vec<String>>,
}

#[derive(Serialize)]
struct RawModelOut {
    states: Vec<String>,
    actions: Vec<String>,
    transitions: Vec<RawTransition>,
    initial: OrderedMap<String>,
    targets: OrderedMap<Vec<String>>,
}

/// A JSON object kept as its list of entries, so that repeated keys are
/// visible and declaration order survives.
struct Pairs<T>(Vec<(String, T)>);

impl<T> Default for Pairs<T> {
    fn default() -> Self {
        Pairs(Vec::new())
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Pairs<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairsVisitor<T>(std::marker::PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for PairsVisitor<T> {
            type Value = Pairs<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut entries = Vec::new();
                while let Some(entry) = map.next_entry()? {
                    entries.push(entry);
                }
                Ok(Pairs(entries))
            }
        }
        deserializer.deserialize_map(PairsVisitor(std::marker::PhantomData))
    }
}

struct OrderedMap<T>(Vec<(String, T)>);

impl<T: Serialize> Serialize for OrderedMap<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl FromIterator<(String, String)> for OrderedMap<String> {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        OrderedMap(iter.into_iter().collect())
    }
}

impl FromIterator<(String, Vec<String>)> for OrderedMap<Vec<String>> {
    fn from_iter<I: IntoIterator<Item = (String, Vec<String>)>>(iter: I) -> Self {
        OrderedMap(iter.into_iter().collect())
    }
}

fn prob(location: String, text: &str) -> Result<Rational, ModelError> {
    parse_rational(text).ok_or(ModelError::MalformedRational {
        location,
        text: text.to_string(),
    })
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let raw: RawModel =
        serde_json::from_str(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
    build(raw)
}

fn build(raw: RawModel) -> Result<Model, ModelError> {
    if raw.states.is_empty() {
        return Err(ModelError::Invalid("\"states\" is empty".into()));
    }
    if raw.actions.is_empty() {
        return Err(ModelError::Invalid("\"actions\" is empty".into()));
    }
    let n = raw.states.len();
    let index = |names: &[String], what: &str| -> Result<BTreeMap<String, usize>, ModelError> {
        let mut map = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if map.insert(name.clone(), i).is_some() {
                return Err(ModelError::Duplicate {
                    location: format!("{what}[{i}]"),
                    name: name.clone(),
                });
            }
        }
        Ok(map)
    };
    let states = index(&raw.states, "states")?;
    let actions = index(&raw.actions, "actions")?;
    let state = |location: String, name: &str| {
        states.get(name).copied().ok_or(ModelError::UnknownState {
            location,
            name: name.to_string(),
        })
    };

    let k = raw.actions.len();
    let mut table: Vec<Vec<Option<Vec<Rational>>>> = vec![vec![None; k]; n];
    let mut seen = BTreeMap::new();
    for (i, t) in raw.transitions.iter().enumerate() {
        let loc = |field: &str| format!("transitions[{i}].{field}");
        let q = state(loc("from"), &t.from)?;
        let a = actions
            .get(&t.action)
            .copied()
            .ok_or(ModelError::UnknownAction {
                location: loc("action"),
                name: t.action.clone(),
            })?;
        let q2 = state(loc("to"), &t.to)?;
        let p = prob(loc("prob"), &t.prob)?;
        if seen.insert((q, a, q2), i).is_some() {
            return Err(ModelError::Duplicate {
                location: format!("transitions[{i}]"),
                name: format!("{} --{}--> {}", t.from, t.action, t.to),
            });
        }
        table[q][a].get_or_insert_with(|| vec![Rational::zero(); n])[q2] = p;
    }
    let mut delta = Vec::with_capacity(n);
    for (q, row) in table.into_iter().enumerate() {
        let mut dists = Vec::with_capacity(k);
        for (a, dense) in row.into_iter().enumerate() {
            let dense = dense.ok_or_else(|| ModelError::MissingTransition {
                state: raw.states[q].clone(),
                action: raw.actions[a].clone(),
            })?;
            let d = Dist::from_dense(dense).map_err(|e| {
                relocate(e, || {
                    format!(
                        "transitions from {:?} on {:?}",
                        raw.states[q], raw.actions[a]
                    )
                })
            })?;
            dists.push(d);
        }
        delta.push(dists);
    }
    let mdp = Mdp::new(raw.states.clone(), raw.actions.clone(), delta)?;

    let mut initial = vec![Rational::zero(); n];
    let mut seen_initial = vec![false; n];
    for (name, text) in &raw.initial.0 {
        let q = state(format!("initial.{name}"), name)?;
        if std::mem::replace(&mut seen_initial[q], true) {
            return Err(ModelError::Duplicate {
                location: "initial".into(),
                name: name.clone(),
            });
        }
        initial[q] = prob(format!("initial.{name}"), text)?;
    }
    let initial = Dist::from_dense(initial).map_err(|e| relocate(e, || "initial".into()))?;

    let mut targets: Vec<(String, SupportSet)> = Vec::new();
    for (name, members) in raw.targets.0 {
        if targets.iter().any(|(n, _)| *n == name) {
            return Err(ModelError::Duplicate {
                location: "targets".into(),
                name,
            });
        }
        let mut set = SupportSet::empty(n);
        for (j, member) in members.iter().enumerate() {
            let q = state(format!("targets.{name}[{j}]"), member)?;
            if set.contains(q) {
                return Err(ModelError::Duplicate {
                    location: format!("targets.{name}[{j}]"),
                    name: member.clone(),
                });
            }
            set.insert(q);
        }
        targets.push((name, set));
    }
    Ok(Model {
        mdp,
        initial,
        targets,
    })
}

fn relocate(err: ModelError, location: impl FnOnce() -> String) -> ModelError {
    match err {
        ModelError::NotNormalized { sum, .. } => ModelError::NotNormalized {
            location: location(),
            sum,
        },
        other => other,
    }
}
