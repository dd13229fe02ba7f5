//! Finite-memory strategies and the one-step distribution kernel.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::mdp::{ActionId, Dist, Mdp, StateId};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy tables do not match the model: {0}")]
    Shape(String),
    #[error("action distribution at memory {memory}, state {state} sums to {sum}")]
    NotNormalized {
        memory: usize,
        state: StateId,
        sum: String,
    },
    #[error("memory update from {memory} depends on the state; use a joint simulation")]
    MemoryDiverges { memory: usize },
}

/// A distribution over actions; strictly positive entries sorted by action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionDist(Vec<(ActionId, Rational)>);

impl ActionDist {
    pub fn dirac(a: ActionId) -> Self {
        ActionDist(vec![(a, Rational::one())])
    }

    pub fn uniform_over(actions: &[ActionId]) -> Self {
        assert!(!actions.is_empty());
        let p = Rational::new(1.into(), actions.len().into());
        let mut entries: Vec<_> = actions.iter().map(|a| (*a, p.clone())).collect();
        entries.sort_by_key(|(a, _)| *a);
        entries.dedup_by_key(|(a, _)| *a);
        assert_eq!(entries.len(), actions.len(), "repeated action");
        ActionDist(entries)
    }

    pub fn from_pairs(mut entries: Vec<(ActionId, Rational)>) -> Self {
        entries.retain(|(_, p)| p.is_positive());
        entries.sort_by_key(|(a, _)| *a);
        ActionDist(entries)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ActionId, &Rational)> + '_ {
        self.0.iter().map(|(a, p)| (*a, p))
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.0.iter().map(|(a, _)| *a)
    }

    pub fn total(&self) -> Rational {
        self.0.iter().map(|(_, p)| p).sum()
    }
}

/// A strategy with memory `0..memory_size`.
///
/// In state `q` with memory `m` the strategy draws an action from
/// `choice(m, q)`; afterwards the memory becomes `update(m, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySpec {
    label: String,
    num_states: usize,
    num_actions: usize,
    initial_memory: usize,
    choice: Vec<Vec<ActionDist>>,
    update: Vec<Vec<usize>>,
}

impl StrategySpec {
    pub fn new(
        label: impl Into<String>,
        m: &Mdp,
        initial_memory: usize,
        choice: Vec<Vec<ActionDist>>,
        update: Vec<Vec<usize>>,
    ) -> Result<Self, StrategyError> {
        let size = choice.len();
        if size == 0 || update.len() != size || initial_memory >= size {
            return Err(StrategyError::Shape(format!(
                "{size} choice rows, {} update rows, initial memory {initial_memory}",
                update.len()
            )));
        }
        for (mem, (row, next)) in choice.iter().zip(&update).enumerate() {
            if row.len() != m.num_states() || next.len() != m.num_states() {
                return Err(StrategyError::Shape(format!(
                    "memory {mem} covers {} states, model has {}",
                    row.len(),
                    m.num_states()
                )));
            }
            if let Some(bad) = next.iter().find(|&&j| j >= size) {
                return Err(StrategyError::Shape(format!(
                    "memory {mem} updates to {bad}"
                )));
            }
            for (q, d) in row.iter().enumerate() {
                if d.actions().any(|a| a >= m.num_actions()) {
                    return Err(StrategyError::Shape(format!("unknown action at state {q}")));
                }
                if !d.total().is_one() {
                    return Err(StrategyError::NotNormalized {
                        memory: mem,
                        state: q,
                        sum: format_rational(&d.total()),
                    });
                }
            }
        }
        Ok(Self {
            label: label.into(),
            num_states: m.num_states(),
            num_actions: m.num_actions(),
            initial_memory,
            choice,
            update,
        })
    }

    /// σ_u: every action uniformly at random, no memory.
    pub fn uniform(m: &Mdp) -> Self {
        let all: Vec<ActionId> = m.actions().collect();
        Self::memoryless(
            "uniform",
            m,
            vec![ActionDist::uniform_over(&all); m.num_states()],
        )
    }

    pub fn memoryless(label: impl Into<String>, m: &Mdp, choice: Vec<ActionDist>) -> Self {
        Self::new(label, m, 0, vec![choice], vec![vec![0; m.num_states()]])
            .expect("well-formed memoryless strategy")
    }

    /// A strategy whose memory is the step counter, saturating at `len - 1`:
    /// from step `len - 1` on it keeps playing `f(len - 1, q)`.
    pub fn step_counter<F>(label: impl Into<String>, m: &Mdp, len: usize, mut f: F) -> Self
    where
        F: FnMut(usize, StateId) -> ActionDist,
    {
        assert!(len >= 1);
        let choice = (0..len)
            .map(|step| m.states().map(|q| f(step, q)).collect())
            .collect();
        let update = (0..len)
            .map(|step| vec![(step + 1).min(len - 1); m.num_states()])
            .collect();
        Self::new(label, m, 0, choice, update).expect("well-formed step-counter strategy")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn memory_size(&self) -> usize {
        self.choice.len()
    }

    pub fn initial_memory(&self) -> usize {
        self.initial_memory
    }

    pub fn choice(&self, memory: usize, q: StateId) -> &ActionDist {
        &self.choice[memory][q]
    }

    pub fn next_memory(&self, memory: usize, q: StateId) -> usize {
        self.update[memory][q]
    }

    /// Whether every choice lies within the given per-state action sets
    /// (`σ ⊆ σ'` when `allowed` lists the support of `σ'`).
    pub fn plays_within(&self, allowed: impl Fn(usize, StateId, ActionId) -> bool) -> bool {
        self.choice.iter().enumerate().all(|(mem, row)| {
            row.iter()
                .enumerate()
                .all(|(q, d)| d.actions().all(|a| allowed(mem, q, a)))
        })
    }

    pub fn to_json(&self, m: &Mdp) -> Value {
        let memory: Vec<Value> = (0..self.memory_size())
            .map(|mem| {
                let choices: serde_json::Map<String, Value> = m
                    .states()
                    .map(|q| {
                        let d: serde_json::Map<String, Value> = self.choice[mem][q]
                            .iter()
                            .map(|(a, p)| (m.action_name(a).to_string(), json!(format_rational(p))))
                            .collect();
                        (m.state_name(q).to_string(), Value::Object(d))
                    })
                    .collect();
                let next: serde_json::Map<String, Value> = m
                    .states()
                    .map(|q| (m.state_name(q).to_string(), json!(self.update[mem][q])))
                    .collect();
                json!({"memory": mem, "choice": choices, "next": next})
            })
            .collect();
        json!({
            "label": self.label,
            "initial-memory": self.initial_memory,
            "memory": memory,
        })
    }

    fn check_model(&self, m: &Mdp) {
        assert_eq!(
            self.num_states,
            m.num_states(),
            "strategy built for another model"
        );
        assert_eq!(
            self.num_actions,
            m.num_actions(),
            "strategy built for another model"
        );
    }
}

/// One step of the distribution sequence for a strategy whose memory is
/// shared by all paths (step counters, countdowns, memoryless strategies).
///
/// Returns the exact image of `d` and the next memory. Fails if the memory
/// update at `memory` differs between states of `Supp(d)`; such strategies
/// need [`JointDist`].
pub fn step(
    m: &Mdp,
    d: &Dist,
    s: &StrategySpec,
    memory: usize,
) -> Result<(Dist, usize), StrategyError> {
    s.check_model(m);
    let mut next_mem = None;
    for (q, _) in d.iter() {
        let j = s.next_memory(memory, q);
        if *next_mem.get_or_insert(j) != j {
            return Err(StrategyError::MemoryDiverges { memory });
        }
    }
    let mut dense = vec![Rational::zero(); m.num_states()];
    for (q, p) in d.iter() {
        push_mass(m, s.choice(memory, q), q, p, |q2, mass| dense[q2] += mass);
    }
    let next_mem = next_mem.unwrap_or_else(|| s.next_memory(memory, 0));
    Ok((Dist::from_dense_unchecked(dense), next_mem))
}

fn push_mass(
    m: &Mdp,
    choice: &ActionDist,
    q: StateId,
    p: &Rational,
    mut add: impl FnMut(StateId, Rational),
) {
    for (a, pa) in choice.iter() {
        let w = p * pa;
        for (q2, pt) in m.delta(q, a).iter() {
            add(q2, &w * pt);
        }
    }
}

/// Joint distribution over (memory, state) pairs, for strategies whose
/// memory depends on the path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDist {
    width: usize,
    mass: BTreeMap<(usize, StateId), Rational>,
}

impl JointDist {
    pub fn start(d0: &Dist, s: &StrategySpec) -> Self {
        Self {
            width: d0.width(),
            mass: d0
                .iter()
                .map(|(q, p)| ((s.initial_memory(), q), p.clone()))
                .collect(),
        }
    }

    pub fn step(&self, m: &Mdp, s: &StrategySpec) -> Self {
        s.check_model(m);
        let mut mass: BTreeMap<(usize, StateId), Rational> = BTreeMap::new();
        for (&(mem, q), p) in &self.mass {
            let next_mem = s.next_memory(mem, q);
            push_mass(m, s.choice(mem, q), q, p, |q2, w| {
                *mass.entry((next_mem, q2)).or_insert_with(Rational::zero) += w;
            });
        }
        Self {
            width: self.width,
            mass,
        }
    }

    /// Marginal distribution over states.
    pub fn states(&self) -> Dist {
        let mut dense = vec![Rational::zero(); self.width];
        for (&(_, q), p) in &self.mass {
            dense[q] += p;
        }
        Dist::from_dense_unchecked(dense)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::rational::ratio;

    #[test]
    fn uniform_step_on_figure2() {
        let m = corpus::figure2().mdp;
        let s = StrategySpec::uniform(&m);
        let (d1, mem) = step(&m, &Dist::dirac(4, 0), &s, 0).unwrap();
        assert_eq!(mem, 0);
        assert_eq!(
            d1,
            Dist::from_pairs(4, [(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap()
        );
    }

    #[test]
    fn absorbing_state_is_a_fixed_point() {
        let m = corpus::figure2().mdp;
        let q3 = Dist::dirac(4, 3);
        for a in m.actions() {
            let s = StrategySpec::memoryless("pure", &m, vec![ActionDist::dirac(a); 4]);
            assert_eq!(step(&m, &q3, &s, 0).unwrap().0, q3);
        }
    }

    #[test]
    fn figure3_q2_returns_to_q0() {
        let m = corpus::figure3().mdp;
        let s = StrategySpec::step_counter("b-then-a", &m, 2, |i, _| ActionDist::dirac(1 - i));
        let (d, mem) = step(&m, &Dist::dirac(3, 2), &s, 0).unwrap();
        assert_eq!(d, Dist::dirac(3, 0));
        assert_eq!(mem, 1);
    }

    #[test]
    fn step_mass_is_exact() {
        let m = corpus::figure3().mdp;
        let s = StrategySpec::uniform(&m);
        let mut d = Dist::dirac(3, 0);
        for _ in 0..12 {
            d = step(&m, &d, &s, 0).unwrap().0;
            assert!(d.total().is_one());
        }
    }

    #[test]
    fn rejects_bad_tables() {
        let m = corpus::figure2().mdp;
        let half = ActionDist::from_pairs(vec![(0, ratio(1, 2))]);
        let err = StrategySpec::new("x", &m, 0, vec![vec![half; 4]], vec![vec![0; 4]]);
        assert!(matches!(err, Err(StrategyError::NotNormalized { .. })));
        let err = StrategySpec::new(
            "x",
            &m,
            1,
            vec![vec![ActionDist::dirac(0); 4]],
            vec![vec![0; 4]],
        );
        assert!(matches!(err, Err(StrategyError::Shape(_))));
    }

    #[test]
    fn path_dependent_memory_needs_joint_simulation() {
        let m = corpus::figure2().mdp;
        // remember whether the previous state was q0
        let choice = vec![vec![ActionDist::dirac(0); 4], vec![ActionDist::dirac(1); 4]];
        let update = vec![vec![1, 0, 0, 0], vec![1, 0, 0, 0]];
        let s = StrategySpec::new("x", &m, 0, choice, update).unwrap();
        let d1 = Dist::from_pairs(4, [(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        assert!(matches!(
            step(&m, &d1, &s, 0),
            Err(StrategyError::MemoryDiverges { .. })
        ));
        let joint = JointDist::start(&Dist::dirac(4, 0), &s)
            .step(&m, &s)
            .step(&m, &s);
        // q1 entered from q0 plays b
        assert_eq!(joint.states().mass(2), ratio(1, 2));
        let j3 = joint.step(&m, &s);
        assert_eq!(j3.states().mass(2), ratio(1, 4));
        assert!(j3.states().total().is_one());
    }
}
