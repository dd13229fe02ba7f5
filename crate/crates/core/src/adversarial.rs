//! Positive and bounded winning, decided on the support lasso of the
//! uniform strategy.

use crate::limits::{GuardError, Limits};
use crate::mdp::Mdp;
use crate::region::{close_lasso, fold_index, mec_decomposition, EcDecomposition};
use crate::strategy::{ActionDist, StrategySpec};
use crate::support::SupportSet;
use crate::verdict::{AdvVerdictDetail, ModeQuery, SyncMode, Verdict, WinMode};

/// Supports `S_0 = Supp(d0), S_1, …` under `σ_u`, closed at the first repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportLasso {
    /// `S_0 … S_{ℓ+p-1}`, pairwise distinct.
    pub supports: Vec<SupportSet>,
    pub loop_start: usize,
    pub period: usize,
}

impl SupportLasso {
    pub fn at(&self, i: usize) -> &SupportSet {
        &self.supports[fold_index(i, self.loop_start, self.period)]
    }

    /// `S_ℓ … S_{ℓ+p-1}`.
    pub fn loop_supports(&self) -> &[SupportSet] {
        &self.supports[self.loop_start..]
    }

    /// `ℓ + p`.
    pub fn closure(&self) -> usize {
        self.loop_start + self.period
    }
}

pub fn support_lasso(m: &Mdp, s0: &SupportSet) -> SupportLasso {
    support_lasso_capped(m, s0, usize::MAX).expect("uncapped lasso")
}

pub fn support_lasso_capped(
    m: &Mdp,
    s0: &SupportSet,
    limit: usize,
) -> Result<SupportLasso, GuardError> {
    assert!(!s0.is_empty(), "initial support must be nonempty");
    let (supports, loop_start, period) =
        close_lasso(s0.clone(), limit, "support lasso", |s| m.successors(s))?;
    Ok(SupportLasso {
        supports,
        loop_start,
        period,
    })
}

/// The freezing switch index `ℓ + p`.
pub fn switch_point(_m: &Mdp, lasso: &SupportLasso) -> usize {
    lasso.closure()
}

/// Uniform over all actions until the switch; afterwards uniform over the
/// end-component actions inside `Ε` and over all actions elsewhere.
pub fn freezing_strategy(m: &Mdp, lasso: &SupportLasso, ec: &EcDecomposition) -> StrategySpec {
    let switch = switch_point(m, lasso);
    let all: Vec<_> = m.actions().collect();
    let uniform = ActionDist::uniform_over(&all);
    let frozen: Vec<ActionDist> = m
        .states()
        .map(|q| match ec.internal_actions(q) {
            [] => uniform.clone(),
            inside => ActionDist::uniform_over(inside),
        })
        .collect();
    StrategySpec::step_counter(format!("freezing-{switch}"), m, switch + 1, |step, q| {
        if step < switch {
            uniform.clone()
        } else {
            frozen[q].clone()
        }
    })
}

/// Boolean `n × n` matrix stored as one row set per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    pub rows: Vec<SupportSet>,
}

impl BoolMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|q| SupportSet::singleton(n, q)).collect(),
        }
    }

    /// `M(q, q') = 1` iff some action moves `q` to `q'`.
    pub fn of_model(m: &Mdp) -> Self {
        Self {
            rows: m
                .states()
                .map(|q| m.successors(&SupportSet::singleton(m.num_states(), q)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &BoolMatrix) -> BoolMatrix {
        let n = self.rows.len();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = SupportSet::empty(n);
                for k in row.iter() {
                    out.union_with(&other.rows[k]);
                }
                out
            })
            .collect();
        BoolMatrix { rows }
    }

    /// Union of the rows indexed by `set`.
    pub fn image(&self, set: &SupportSet) -> SupportSet {
        let mut out = SupportSet::empty(self.rows.len());
        for q in set.iter() {
            out.union_with(&self.rows[q]);
        }
        out
    }
}

/// `M^i` by successive squaring.
pub fn matrix_power_witness(m: &Mdp, i: u64) -> BoolMatrix {
    let mut result = BoolMatrix::identity(m.num_states());
    let mut square = BoolMatrix::of_model(m);
    let mut e = i;
    while e > 0 {
        if e & 1 == 1 {
            result = result.mul(&square);
        }
        e >>= 1;
        if e > 0 {
            square = square.mul(&square);
        }
    }
    result
}

fn detail(
    m: &Mdp,
    lasso: &SupportLasso,
    t: &SupportSet,
    ec: &EcDecomposition,
    graph_test: Option<bool>,
) -> AdvVerdictDetail {
    let inside = t.intersection(&ec.union);
    let failing_index1 = lasso.supports.iter().position(|s| !s.intersects(t));
    let failing_index2 = lasso
        .loop_supports()
        .iter()
        .position(|s| !s.intersects(&inside))
        .map(|j| lasso.loop_start + j);
    AdvVerdictDetail {
        condition1: failing_index1.is_none(),
        condition2: failing_index2.is_none(),
        failing_index1,
        failing_index2,
        loop_start: lasso.loop_start,
        period: lasso.period,
        switch_point: switch_point(m, lasso),
        graph_test,
    }
}

/// Some state of `T` is reachable from `s0` and reaches itself again.
pub fn reachable_self_loop_test(m: &Mdp, lasso: &SupportLasso, t: &SupportSet) -> bool {
    let mut reachable = m.empty_set();
    for s in &lasso.supports {
        reachable.union_with(s);
    }
    t.intersection(&reachable).iter().any(|q| {
        let start = SupportSet::singleton(m.num_states(), q);
        let mut seen = m.empty_set();
        let mut frontier = m.successors(&start);
        while !frontier.is_subset(&seen) {
            seen.union_with(&frontier);
            frontier = m.successors(&seen);
        }
        seen.contains(q)
    })
}

pub fn decide_positive(
    m: &Mdp,
    mode: SyncMode,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
) -> Result<Verdict, GuardError> {
    let q = ModeQuery::new(mode, WinMode::Positive, t.clone(), s0.clone());
    let lasso = support_lasso_capped(m, s0, limits.max_lasso)?;
    let ec = mec_decomposition(m);
    let graph_test = (mode == SyncMode::Weakly).then(|| reachable_self_loop_test(m, &lasso, t));
    let detail = detail(m, &lasso, t, &ec, graph_test);
    let answer = match mode {
        SyncMode::Eventually => lasso.supports.iter().any(|s| s.intersects(t)),
        SyncMode::Always => detail.condition1,
        SyncMode::Weakly => lasso.loop_supports().iter().any(|s| s.intersects(t)),
        SyncMode::Strongly => lasso.loop_supports().iter().all(|s| s.intersects(t)),
    };
    let mut v = Verdict::new(&q, answer);
    v.detail = Some(detail);
    if answer {
        v = v.with_strategy(StrategySpec::uniform(m));
    }
    Ok(v)
}

pub fn decide_bounded(
    m: &Mdp,
    mode: SyncMode,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
) -> Result<Verdict, GuardError> {
    let q = ModeQuery::new(mode, WinMode::Bounded, t.clone(), s0.clone());
    let lasso = support_lasso_capped(m, s0, limits.max_lasso)?;
    let ec = mec_decomposition(m);
    let detail = detail(m, &lasso, t, &ec, None);
    let inside = t.intersection(&ec.union);
    let answer = match mode {
        SyncMode::Eventually => lasso.supports.iter().any(|s| s.intersects(t)),
        SyncMode::Weakly => lasso.supports.iter().any(|s| s.intersects(&inside)),
        SyncMode::Strongly => detail.condition2,
        SyncMode::Always => detail.condition1 && detail.condition2,
    };
    let mut v = Verdict::new(&q, answer);
    if answer {
        v = v.with_strategy(match mode {
            SyncMode::Eventually => StrategySpec::uniform(m),
            _ => freezing_strategy(m, &lasso, &ec),
        });
    }
    v.detail = Some(detail);
    Ok(v)
}
