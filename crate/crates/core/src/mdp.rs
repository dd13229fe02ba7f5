//! Markov decision processes with exact transition probabilities.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};
use crate::support::SupportSet;

pub type StateId = usize;
pub type ActionId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{location}: malformed rational {text:?}")]
    MalformedRational { location: String, text: String },
    #[error("{location}: distribution sums to {sum}")]
    NotNormalized { location: String, sum: String },
    #[error("{location}: unknown state {name:?}")]
    UnknownState { location: String, name: String },
    #[error("{location}: unknown action {name:?}")]
    UnknownAction { location: String, name: String },
    #[error("{location}: duplicate name {name:?}")]
    Duplicate { location: String, name: String },
    #[error("no transition given for state {state:?} and action {action:?}")]
    MissingTransition { state: String, action: String },
    #[error("{0}")]
    Invalid(String),
    #[error("malformed model document: {0}")]
    Syntax(String),
}

/// A probability distribution over `width` states. Only strictly positive
/// masses are stored, sorted by state.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dist {
    width: usize,
    mass: Vec<(StateId, Rational)>,
}

impl Dist {
    pub fn dirac(width: usize, state: StateId) -> Self {
        assert!(state < width);
        Self {
            width,
            mass: vec![(state, Rational::one())],
        }
    }

    /// Uniform distribution over a nonempty support.
    pub fn uniform(support: &SupportSet) -> Self {
        let k = support.len();
        assert!(k > 0, "uniform distribution over an empty set");
        let p = Rational::new(1.into(), k.into());
        Self {
            width: support.width(),
            mass: support.iter().map(|q| (q, p.clone())).collect(),
        }
    }

    /// Builds a distribution from possibly repeated `(state, mass)` pairs.
    /// Masses must be nonnegative and add up to exactly one.
    pub fn from_pairs<I>(width: usize, pairs: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (StateId, Rational)>,
    {
        let mut dense = vec![Rational::zero(); width];
        for (q, p) in pairs {
            if q >= width {
                return Err(ModelError::Invalid(format!("state index {q} out of range")));
            }
            if p.is_negative() {
                return Err(ModelError::Invalid(format!(
                    "negative probability {} on state {q}",
                    format_rational(&p)
                )));
            }
            dense[q] += p;
        }
        Self::from_dense(dense)
    }

    /// Builds a distribution from a dense mass vector that must sum to one.
    pub fn from_dense(dense: Vec<Rational>) -> Result<Self, ModelError> {
        let sum: Rational = dense.iter().sum();
        if !sum.is_one() {
            return Err(ModelError::NotNormalized {
                location: "distribution".into(),
                sum: format_rational(&sum),
            });
        }
        if let Some(q) = dense.iter().position(|p| p.is_negative()) {
            return Err(ModelError::Invalid(format!(
                "negative probability on state {q}"
            )));
        }
        Ok(Self::from_dense_unchecked(dense))
    }

    pub(crate) fn from_dense_unchecked(dense: Vec<Rational>) -> Self {
        let width = dense.len();
        let mass = dense
            .into_iter()
            .enumerate()
            .filter(|(_, p)| p.is_positive())
            .collect();
        Self { width, mass }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn mass(&self, state: StateId) -> Rational {
        self.mass
            .binary_search_by_key(&state, |(q, _)| *q)
            .map(|i| self.mass[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Total mass `d(T)` on a set of states.
    pub fn mass_of(&self, set: &SupportSet) -> Rational {
        self.mass
            .iter()
            .filter(|(q, _)| set.contains(*q))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn total(&self) -> Rational {
        self.mass.iter().map(|(_, p)| p).sum()
    }

    pub fn support(&self) -> SupportSet {
        SupportSet::from_states(self.width, self.mass.iter().map(|(q, _)| *q))
    }

    /// Strictly positive entries in ascending state order.
    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Rational)> + '_ {
        self.mass.iter().map(|(q, p)| (*q, p))
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut dense = vec![Rational::zero(); self.width];
        for (q, p) in &self.mass {
            dense[*q] = p.clone();
        }
        dense
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.mass.iter().map(|(q, p)| (q, format_rational(p))))
            .finish()
    }
}

/// A finite MDP `(Q, A, δ)` whose transition function is total.
#[derive(Clone, PartialEq, Eq)]
pub struct Mdp {
    states: Vec<String>,
    actions: Vec<String>,
    delta: Vec<Vec<Dist>>,
    post: Vec<Vec<SupportSet>>,
}

impl Mdp {
    /// `delta[q][a]` is the successor distribution of state `q` under action `a`.
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        delta: Vec<Vec<Dist>>,
    ) -> Result<Self, ModelError> {
        let n = states.len();
        if n == 0 {
            return Err(ModelError::Invalid("model has no states".into()));
        }
        if actions.is_empty() {
            return Err(ModelError::Invalid("model has no actions".into()));
        }
        check_unique("states", &states)?;
        check_unique("actions", &actions)?;
        if delta.len() != n {
            return Err(ModelError::Invalid(format!(
                "transition table has {} rows for {n} states",
                delta.len()
            )));
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != actions.len() {
                return Err(ModelError::Invalid(format!(
                    "state {:?} has {} distributions for {} actions",
                    states[q],
                    row.len(),
                    actions.len()
                )));
            }
            for (a, d) in row.iter().enumerate() {
                if d.width() != n || !d.total().is_one() {
                    return Err(ModelError::NotNormalized {
                        location: format!("delta({}, {})", states[q], actions[a]),
                        sum: format_rational(&d.total()),
                    });
                }
            }
        }
        let post = delta
            .iter()
            .map(|row| row.iter().map(Dist::support).collect())
            .collect();
        Ok(Self {
            states,
            actions,
            delta,
            post,
        })
    }

    /// Builds a model with generated names `q0, q1, …` and `a, b, …`.
    /// `table[q][a]` lists the `(successor, probability)` pairs.
    pub fn from_table(table: Vec<Vec<Vec<(StateId, Rational)>>>) -> Result<Self, ModelError> {
        let n = table.len();
        let k = table.first().map_or(0, Vec::len);
        let states = (0..n).map(|q| format!("q{q}")).collect();
        let actions = (0..k).map(default_action_name).collect();
        let delta = table
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|pairs| Dist::from_pairs(n, pairs))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(states, actions, delta)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a]
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_index(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|s| s == name)
    }

    pub fn delta(&self, q: StateId, a: ActionId) -> &Dist {
        &self.delta[q][a]
    }

    /// `Supp(δ(q, a))`.
    pub fn post(&self, q: StateId, a: ActionId) -> &SupportSet {
        &self.post[q][a]
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    pub fn actions(&self) -> std::ops::Range<ActionId> {
        0..self.num_actions()
    }

    pub fn empty_set(&self) -> SupportSet {
        SupportSet::empty(self.num_states())
    }

    pub fn all_states(&self) -> SupportSet {
        SupportSet::full(self.num_states())
    }

    pub fn is_markov_chain(&self) -> bool {
        self.num_actions() == 1
    }

    /// Successors reachable in one step under some action.
    pub fn successors(&self, set: &SupportSet) -> SupportSet {
        let mut next = self.empty_set();
        for q in set.iter() {
            for a in self.actions() {
                next.union_with(self.post(q, a));
            }
        }
        next
    }

    pub fn set_names(&self, set: &SupportSet) -> Vec<String> {
        set.iter().map(|q| self.states[q].clone()).collect()
    }
}

impl fmt::Debug for Mdp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mdp")
            .field("states", &self.states)
            .field("actions", &self.actions)
            .finish_non_exhaustive()
    }
}

pub(crate) fn default_action_name(a: usize) -> String {
    if a < 26 {
        ((b'a' + a as u8) as char).to_string()
    } else {
        format!("a{a}")
    }
}

fn check_unique(what: &str, names: &[String]) -> Result<(), ModelError> {
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(ModelError::Duplicate {
                location: format!("{what}[{i}]"),
                name: name.clone(),
            });
        }
    }
    Ok(())
}

/// α: the smallest strictly positive transition probability.
pub fn min_positive_probability(m: &Mdp) -> Rational {
    m.delta
        .iter()
        .flatten()
        .flat_map(|d| d.iter().map(|(_, p)| p))
        .min()
        .cloned()
        .expect("every distribution has a nonempty support")
}

/// α₀: the smallest positive initial probability, optionally restricted to a
/// sub-support `restrict ⊆ Supp(d0)`.
pub fn min_initial_probability(
    d0: &Dist,
    restrict: Option<&SupportSet>,
) -> Result<Rational, ModelError> {
    let support = d0.support();
    let over = match restrict {
        Some(r) => {
            if !r.is_subset(&support) {
                return Err(ModelError::Invalid(
                    "restriction is not contained in the support of the initial distribution"
                        .into(),
                ));
            }
            if r.is_empty() {
                return Err(ModelError::Invalid("restriction is empty".into()));
            }
            r.clone()
        }
        None => support,
    };
    Ok(over
        .iter()
        .map(|q| d0.mass(q))
        .min()
        .expect("nonempty support"))
}

/// The product `M × [r]` tracking the step count modulo `r`.
///
/// State `⟨q, i⟩` has index `q·r + i`; every step decrements the counter
/// modulo `r`.
pub fn product_with_counter(m: &Mdp, r: usize) -> Mdp {
    assert!(r >= 1, "counter modulus must be positive");
    let n = m.num_states() * r;
    let mut states = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for q in m.states() {
        for i in 0..r {
            states.push(format!("{}@{i}", m.state_name(q)));
            let j = (i + r - 1) % r;
            let row = m
                .actions()
                .map(|a| {
                    let mass = m
                        .delta(q, a)
                        .iter()
                        .map(|(q2, p)| (product_state(q2, j, r), p.clone()))
                        .collect();
                    Dist { width: n, mass }
                })
                .collect();
            delta.push(row);
        }
    }
    Mdp::new(states, m.action_names().to_vec(), delta).expect("product of a valid model")
}

pub fn product_state(q: StateId, counter: usize, r: usize) -> StateId {
    q * r + counter
}

/// `S × {t}` inside `M × [r]`.
pub fn lift_set(set: &SupportSet, t: usize, r: usize) -> SupportSet {
    SupportSet::from_states(set.width() * r, set.iter().map(|q| product_state(q, t, r)))
}

/// `d × {t}` inside `M × [r]`.
pub fn lift_dist(d: &Dist, t: usize, r: usize) -> Dist {
    Dist {
        width: d.width() * r,
        mass: d
            .iter()
            .map(|(q, p)| (product_state(q, t, r), p.clone()))
            .collect(),
    }
}

/// Sums out the counter of a distribution over `M × [r]`.
pub fn project_dist(d: &Dist, r: usize) -> Dist {
    let mut dense = vec![Rational::zero(); d.width() / r];
    for (s, p) in d.iter() {
        dense[s / r] += p;
    }
    Dist::from_dense_unchecked(dense)
}
