//! Fixpoint algorithms over supports.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::limits::GuardError;
use crate::mdp::{ActionId, Mdp, StateId};
use crate::support::SupportSet;

/// `Pre(Y)`: states with an action whose successors all lie in `Y`.
pub fn pre(m: &Mdp, y: &SupportSet) -> SupportSet {
    let mut out = m.empty_set();
    for q in m.states() {
        if m.actions().any(|a| m.post(q, a).is_subset(y)) {
            out.insert(q);
        }
    }
    out
}

/// `APre(Y, X)`: states with an action that stays in `Y` and hits `X` with
/// positive probability.
pub fn apre(m: &Mdp, y: &SupportSet, x: &SupportSet) -> SupportSet {
    let mut out = m.empty_set();
    for q in m.states() {
        if m.actions().any(|a| {
            let post = m.post(q, a);
            post.is_subset(y) && post.intersects(x)
        }) {
            out.insert(q);
        }
    }
    out
}

/// The ultimately periodic sequence `Pre⁰(T), Pre¹(T), …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreLasso {
    /// `Pre⁰(T) … Pre^{k+r-1}(T)`, pairwise distinct.
    pub supports: Vec<SupportSet>,
    /// First index of the repeating support.
    pub k: usize,
    /// Distance to its recurrence: `Pre^k(T) = Pre^{k+r}(T)`.
    pub r: usize,
}

impl PreLasso {
    /// `Pre^i(T)` for any `i`, folded into the periodic part.
    pub fn at(&self, i: usize) -> &SupportSet {
        &self.supports[fold_index(i, self.k, self.r)]
    }

    /// `R = Pre^k(T)`.
    pub fn repeating(&self) -> &SupportSet {
        &self.supports[self.k]
    }

    /// Smallest index whose support contains `set`.
    pub fn first_containing(&self, set: &SupportSet) -> Option<usize> {
        self.supports.iter().position(|s| set.is_subset(s))
    }
}

pub(crate) fn fold_index(i: usize, start: usize, period: usize) -> usize {
    if i < start {
        i
    } else {
        start + (i - start) % period
    }
}

/// Iterates a set map until the first repetition. Shared by the predecessor
/// and successor lassos.
pub(crate) fn close_lasso(
    first: SupportSet,
    limit: usize,
    stage: &'static str,
    mut next: impl FnMut(&SupportSet) -> SupportSet,
) -> Result<(Vec<SupportSet>, usize, usize), GuardError> {
    let mut seen: HashMap<SupportSet, usize> = HashMap::new();
    let mut supports = Vec::new();
    let mut current = first;
    loop {
        if let Some(&start) = seen.get(&current) {
            let period = supports.len() - start;
            return Ok((supports, start, period));
        }
        if supports.len() >= limit {
            return Err(GuardError::LassoTooLong { stage, limit });
        }
        seen.insert(current.clone(), supports.len());
        let following = next(&current);
        supports.push(current);
        current = following;
    }
}

pub fn pre_lasso(m: &Mdp, t: &SupportSet) -> PreLasso {
    pre_lasso_capped(m, t, usize::MAX).expect("uncapped lasso")
}

pub fn pre_lasso_capped(m: &Mdp, t: &SupportSet, limit: usize) -> Result<PreLasso, GuardError> {
    let (supports, k, r) = close_lasso(t.clone(), limit, "predecessor lasso", |y| pre(m, y))?;
    Ok(PreLasso { supports, k, r })
}

/// Largest `S ⊆ T` with `S ⊆ Pre(S)`: the sure winning region of `□T`.
pub fn sure_safety_region(m: &Mdp, t: &SupportSet) -> SupportSet {
    let mut y = t.clone();
    loop {
        let next = t.intersection(&pre(m, &y));
        if next == y {
            return y;
        }
        y = next;
    }
}

/// Least fixpoint of `X ↦ S ∪ Pre(X)`: the sure winning region of `◇S`.
pub fn sure_reach_region(m: &Mdp, s: &SupportSet) -> SupportSet {
    let mut x = s.clone();
    loop {
        let next = s.union(&pre(m, &x));
        if next == x {
            return x;
        }
        x = next;
    }
}

/// `νY. μX. T ∪ APre(Y, X)`: the almost-sure winning region of `◇T`.
pub fn almost_sure_reach_region(m: &Mdp, t: &SupportSet) -> SupportSet {
    let mut y = m.all_states();
    loop {
        let mut x = m.empty_set();
        loop {
            let next = t.union(&apre(m, &y, &x));
            if next == x {
                break;
            }
            x = next;
        }
        if x == y {
            return y;
        }
        y = x;
    }
}

/// `A_S(q)`: actions at `q` whose successors all lie in `S`.
pub fn actions_within(m: &Mdp, q: StateId, s: &SupportSet) -> Vec<ActionId> {
    m.actions().filter(|&a| m.post(q, a).is_subset(s)).collect()
}

/// Closedness and strong connectivity of `(S, E_S)`, checked directly.
pub fn is_end_component(m: &Mdp, s: &SupportSet) -> bool {
    if s.is_empty() || s.iter().any(|q| actions_within(m, q, s).is_empty()) {
        return false;
    }
    let start = s.iter().next().unwrap();
    let reach = |forward: bool| {
        let mut seen = SupportSet::singleton(m.num_states(), start);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in s.iter() {
                let (from, to) = if forward { (u, v) } else { (v, u) };
                if !seen.contains(v) && internal_edge(m, s, from, to) {
                    seen.insert(v);
                    stack.push(v);
                }
            }
        }
        seen
    };
    reach(true) == *s && reach(false) == *s
}

fn internal_edge(m: &Mdp, s: &SupportSet, from: StateId, to: StateId) -> bool {
    actions_within(m, from, s)
        .into_iter()
        .any(|a| m.post(from, a).contains(to))
}

/// Maximal end components of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcDecomposition {
    /// Disjoint components, ordered by smallest member.
    pub components: Vec<SupportSet>,
    /// `Ε`, the union of all components.
    pub union: SupportSet,
    component_of: Vec<Option<usize>>,
    internal_actions: Vec<Vec<ActionId>>,
}

impl EcDecomposition {
    pub fn component_of(&self, q: StateId) -> Option<usize> {
        self.component_of[q]
    }

    /// `A_{Ε(q)}(q)`; empty for states outside `Ε`.
    pub fn internal_actions(&self, q: StateId) -> &[ActionId] {
        &self.internal_actions[q]
    }
}

/// Maximal end components by iterated SCC refinement: drop states without
/// an action staying in the candidate, split the candidate into SCCs of
/// the remaining internal edges, repeat until every candidate is stable.
pub fn mec_decomposition(m: &Mdp) -> EcDecomposition {
    let mut pending = vec![m.all_states()];
    let mut components = Vec::new();
    while let Some(mut candidate) = pending.pop() {
        loop {
            let stuck: Vec<StateId> = candidate
                .iter()
                .filter(|&q| actions_within(m, q, &candidate).is_empty())
                .collect();
            if stuck.is_empty() {
                break;
            }
            for q in stuck {
                candidate.remove(q);
            }
        }
        if candidate.is_empty() {
            continue;
        }
        let sccs = internal_sccs(m, &candidate);
        if sccs.len() == 1 {
            components.push(candidate);
        } else {
            pending.extend(sccs);
        }
    }
    components.sort_by_key(|c| c.iter().next());
    let mut union = m.empty_set();
    let mut component_of = vec![None; m.num_states()];
    let mut internal_actions = vec![Vec::new(); m.num_states()];
    for (i, c) in components.iter().enumerate() {
        union.union_with(c);
        for q in c.iter() {
            component_of[q] = Some(i);
            internal_actions[q] = actions_within(m, q, c);
        }
    }
    EcDecomposition {
        components,
        union,
        component_of,
        internal_actions,
    }
}

fn internal_sccs(m: &Mdp, s: &SupportSet) -> Vec<SupportSet> {
    let members = s.to_vec();
    let mut graph = DiGraph::<StateId, ()>::new();
    let nodes: HashMap<StateId, _> = members.iter().map(|&q| (q, graph.add_node(q))).collect();
    for &q in &members {
        for a in actions_within(m, q, s) {
            for q2 in m.post(q, a).iter() {
                graph.update_edge(nodes[&q], nodes[&q2], ());
            }
        }
    }
    tarjan_scc(&graph)
        .into_iter()
        .map(|scc| SupportSet::from_states(m.num_states(), scc.into_iter().map(|ix| graph[ix])))
        .collect()
}
