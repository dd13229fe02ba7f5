//! Brute-force ground truth: exact simulation, per-step optimal mass by
//! backward induction, and exhaustive pure-strategy enumeration.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::limits::GuardError;
use crate::mdp::{ActionId, Dist, Mdp, StateId};
use crate::rational::{format_rational, Rational};
use crate::strategy::{ActionDist, JointDist, StrategySpec};
use crate::support::SupportSet;

/// The distributions `d_0 … d_H` of one strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub dists: Vec<Dist>,
    pub strategy: String,
    pub horizon: usize,
}

impl Trace {
    pub fn mass_at(&self, i: usize, t: &SupportSet) -> Rational {
        self.dists[i].mass_of(t)
    }

    pub fn to_json(&self, m: &Mdp) -> Value {
        let steps: Vec<Value> = self
            .dists
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mass: serde_json::Map<String, Value> = d
                    .iter()
                    .map(|(q, p)| (m.state_name(q).to_string(), json!(format_rational(p))))
                    .collect();
                json!({"step": i, "mass": mass})
            })
            .collect();
        Value::Array(steps)
    }
}

pub fn simulate(m: &Mdp, s: &StrategySpec, d0: &Dist, h: usize) -> Trace {
    let mut joint = JointDist::start(d0, s);
    let mut dists = Vec::with_capacity(h + 1);
    dists.push(joint.states());
    for _ in 0..h {
        joint = joint.step(m, s);
        dists.push(joint.states());
    }
    Trace {
        dists,
        strategy: s.label().to_string(),
        horizon: h,
    }
}

/// `v_i = sup_σ d_i(T)` for `i = 0 … H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxMassProfile {
    pub values: Vec<Rational>,
}

fn bellman_max(m: &Mdp, w: &[Rational], keep: Option<&SupportSet>) -> Vec<Rational> {
    m.states()
        .map(|q| {
            if keep.is_some_and(|k| k.contains(q)) {
                return Rational::one();
            }
            m.actions()
                .map(|a| {
                    m.delta(q, a)
                        .iter()
                        .map(|(q2, p)| p * &w[q2])
                        .sum::<Rational>()
                })
                .max()
                .expect("at least one action")
        })
        .collect()
}

fn indicator(m: &Mdp, t: &SupportSet) -> Vec<Rational> {
    m.states()
        .map(|q| {
            if t.contains(q) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

fn weigh(d0: &Dist, w: &[Rational]) -> Rational {
    d0.iter().map(|(q, p)| p * &w[q]).sum()
}

/// Exact per-step optimum. `w_i(q)` is the best probability of sitting in
/// `T` exactly `i` steps after `q`; it satisfies
/// `w_i(q) = max_a Σ δ(q,a)(q')·w_{i-1}(q')` with `w_0 = [T]`.
pub fn max_mass_at_step(m: &Mdp, t: &SupportSet, d0: &Dist, h: usize) -> MaxMassProfile {
    let mut w = indicator(m, t);
    let mut values = vec![weigh(d0, &w)];
    for _ in 0..h {
        w = bellman_max(m, &w, None);
        values.push(weigh(d0, &w));
    }
    MaxMassProfile { values }
}

/// `r_H(q)`: the best probability of visiting `T` within `H` steps from `q`.
pub fn max_reach_within(m: &Mdp, t: &SupportSet, h: usize) -> Vec<Rational> {
    let mut r = indicator(m, t);
    for _ in 0..h {
        r = bellman_max(m, &r, Some(t));
    }
    r
}

/// One node of a pure strategy tree: the action played after the history
/// ending here, and the subtree for each successor.
#[derive(Debug)]
struct Node {
    action: Option<ActionId>,
    children: Vec<(StateId, Rc<Node>)>,
}

/// A history-dependent pure strategy, defined on the histories it reaches
/// up to its horizon.
#[derive(Debug, Clone)]
pub struct PureStrategy {
    roots: Vec<(StateId, Rc<Node>)>,
    horizon: usize,
}

impl PureStrategy {
    /// The finite-memory form: one memory cell per history, plus a sink
    /// for histories the strategy never reaches.
    pub fn to_spec(&self, m: &Mdp, label: impl Into<String>) -> StrategySpec {
        let mut choice: Vec<Vec<ActionDist>> = Vec::new();
        let mut update: Vec<Vec<usize>> = Vec::new();
        let sink = 0;
        choice.push(vec![ActionDist::dirac(0); m.num_states()]);
        update.push(vec![sink; m.num_states()]);
        fn add(
            m: &Mdp,
            children: &[(StateId, Rc<Node>)],
            choice: &mut Vec<Vec<ActionDist>>,
            update: &mut Vec<Vec<usize>>,
        ) -> usize {
            let id = choice.len();
            choice.push(vec![ActionDist::dirac(0); m.num_states()]);
            update.push(vec![0; m.num_states()]);
            for (q, node) in children {
                if let Some(a) = node.action {
                    choice[id][*q] = ActionDist::dirac(a);
                }
                let child = add(m, &node.children, choice, update);
                update[id][*q] = child;
            }
            id
        }
        let root = add(m, &self.roots, &mut choice, &mut update);
        StrategySpec::new(label, m, root, choice, update).expect("well-formed tree strategy")
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

type Branch = (Rc<Node>, Rc<Vec<Vec<Rational>>>);

/// Actions at `q` with pairwise distinct successor distributions.
fn distinct_actions(m: &Mdp, q: StateId) -> Vec<ActionId> {
    let mut out: Vec<ActionId> = Vec::new();
    for a in m.actions() {
        if out.iter().all(|&b| m.delta(q, b) != m.delta(q, a)) {
            out.push(a);
        }
    }
    out
}

/// Number of pure strategies that differ on some reachable history of
/// length below `h`, from each state.
fn strategy_counts(m: &Mdp, h: usize) -> Vec<Vec<BigUint>> {
    let mut counts = vec![vec![BigUint::one(); m.num_states()]];
    for d in 1..=h {
        let row = m
            .states()
            .map(|q| {
                distinct_actions(m, q)
                    .into_iter()
                    .map(|a| {
                        m.post(q, a)
                            .iter()
                            .map(|q2| counts[d - 1][q2].clone())
                            .product::<BigUint>()
                    })
                    .sum()
            })
            .collect();
        counts.push(row);
    }
    counts
}

/// Number of strategies `enumerate_pure_strategies` would produce.
pub fn pure_strategy_count(m: &Mdp, d0: &Dist, h: usize) -> BigUint {
    let counts = strategy_counts(m, h);
    d0.iter().map(|(q, _)| counts[h][q].clone()).product()
}

/// Calls `f` over every combination of one entry per list.
fn for_each_combination<T>(lists: &[&[T]], mut f: impl FnMut(&[&T])) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut pick: Vec<&T> = lists.iter().map(|l| &l[0]).collect();
    loop {
        f(&pick);
        let mut k = lists.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                pick[k] = &lists[k][idx[k]];
                break;
            }
            idx[k] = 0;
            pick[k] = &lists[k][0];
        }
    }
}

fn weighted_sum(
    n: usize,
    parts: &[(&Rational, &Vec<Vec<Rational>>)],
    len: usize,
) -> Vec<Vec<Rational>> {
    (0..len)
        .map(|j| {
            let mut row = vec![Rational::zero(); n];
            for (w, trace) in parts {
                for (q, p) in trace[j].iter().enumerate() {
                    if !p.is_zero() {
                        row[q] += *w * p;
                    }
                }
            }
            row
        })
        .collect()
}

/// Every history-dependent pure strategy up to horizon `h` with its exact
/// trace from `d0`.
///
/// Fails without producing anything when `strategies × (h + 1)` exceeds
/// `budget`. Actions with identical distributions at a state count once.
pub fn enumerate_pure_strategies(
    m: &Mdp,
    d0: &Dist,
    h: usize,
    budget: u64,
    mut visit: impl FnMut(&PureStrategy, &Trace),
) -> Result<u64, GuardError> {
    let total = pure_strategy_count(m, d0, h);
    let needed = &total * BigUint::from(h + 1);
    if needed > BigUint::from(budget) {
        return Err(GuardError::EnumerationBudget {
            needed: needed.to_string(),
            budget,
        });
    }
    let n = m.num_states();
    let mut memo: HashMap<(StateId, usize), Rc<Vec<Branch>>> = HashMap::new();
    fn branches(
        m: &Mdp,
        q: StateId,
        d: usize,
        memo: &mut HashMap<(StateId, usize), Rc<Vec<Branch>>>,
    ) -> Rc<Vec<Branch>> {
        if let Some(b) = memo.get(&(q, d)) {
            return b.clone();
        }
        let n = m.num_states();
        let mut here = vec![Rational::zero(); n];
        here[q] = Rational::one();
        let mut out: Vec<Branch> = Vec::new();
        if d == 0 {
            let leaf = Rc::new(Node {
                action: None,
                children: Vec::new(),
            });
            out.push((leaf, Rc::new(vec![here])));
        } else {
            for a in distinct_actions(m, q) {
                let succ: Vec<(StateId, Rational)> = m
                    .delta(q, a)
                    .iter()
                    .map(|(q2, p)| (q2, p.clone()))
                    .collect();
                let lists: Vec<Rc<Vec<Branch>>> = succ
                    .iter()
                    .map(|(q2, _)| branches(m, *q2, d - 1, memo))
                    .collect();
                let slices: Vec<&[Branch]> = lists.iter().map(|l| l.as_slice()).collect();
                for_each_combination(&slices, |pick| {
                    let parts: Vec<(&Rational, &Vec<Vec<Rational>>)> = succ
                        .iter()
                        .zip(pick)
                        .map(|((_, p), (_, tr))| (p, tr.as_ref()))
                        .collect();
                    let mut trace = vec![here.clone()];
                    trace.extend(weighted_sum(n, &parts, d));
                    let children = succ
                        .iter()
                        .zip(pick)
                        .map(|((q2, _), (node, _))| (*q2, node.clone()))
                        .collect();
                    let node = Rc::new(Node {
                        action: Some(a),
                        children,
                    });
                    out.push((node, Rc::new(trace)));
                });
            }
        }
        let out = Rc::new(out);
        memo.insert((q, d), out.clone());
        out
    }

    let init: Vec<(StateId, Rational)> = d0.iter().map(|(q, p)| (q, p.clone())).collect();
    let lists: Vec<Rc<Vec<Branch>>> = init
        .iter()
        .map(|(q, _)| branches(m, *q, h, &mut memo))
        .collect();
    let slices: Vec<&[Branch]> = lists.iter().map(|l| l.as_slice()).collect();
    let mut produced = 0u64;
    for_each_combination(&slices, |pick| {
        let parts: Vec<(&Rational, &Vec<Vec<Rational>>)> = init
            .iter()
            .zip(pick)
            .map(|((_, p), (_, tr))| (p, tr.as_ref()))
            .collect();
        let dists = weighted_sum(n, &parts, h + 1)
            .into_iter()
            .map(crate::mdp::Dist::from_dense_unchecked)
            .collect();
        let strategy = PureStrategy {
            roots: init
                .iter()
                .zip(pick)
                .map(|((q, _), (node, _))| (*q, node.clone()))
                .collect(),
            horizon: h,
        };
        produced += 1;
        let trace = Trace {
            dists,
            strategy: format!("pure-{produced}"),
            horizon: h,
        };
        visit(&strategy, &trace);
    });
    debug_assert_eq!(BigUint::from(produced), total);
    Ok(produced)
}

/// Positions `i` with `d_i(T) > threshold` (or `≥` when not strict).
pub fn count_synchronized_positions(
    trace: &Trace,
    t: &SupportSet,
    threshold: &Rational,
    strict: bool,
) -> (usize, Vec<usize>) {
    let positions: Vec<usize> = trace
        .dists
        .iter()
        .enumerate()
        .filter(|(_, d)| {
            let mass = d.mass_of(t);
            if strict {
                mass > *threshold
            } else {
                mass >= *threshold
            }
        })
        .map(|(i, _)| i)
        .collect();
    (positions.len(), positions)
}

/// Default verification depth `max(50, 4·(ℓ+p))`.
pub fn default_horizon(lasso_closure: usize) -> usize {
    50usize.max(lasso_closure.saturating_mul(4))
}

/// `1 − x` as a float, for reporting gaps.
pub fn gap_f64(x: &Rational) -> f64 {
    (Rational::one() - x).to_f64().unwrap_or(f64::NAN)
}
