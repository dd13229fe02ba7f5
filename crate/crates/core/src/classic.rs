//! Sure, almost-sure and limit-sure winning for the four synchronizing modes.

use std::collections::HashMap;

use crate::limits::{GuardError, Limits};
use crate::mdp::{lift_set, product_with_counter, ActionId, Mdp, StateId};
use crate::region::{
    actions_within, almost_sure_reach_region, apre, pre, pre_lasso_capped, sure_reach_region,
    sure_safety_region, PreLasso,
};
use crate::strategy::{ActionDist, StrategySpec};
use crate::support::SupportSet;
use crate::verdict::{Certificate, LimitRoute, ModeQuery, SyncMode, Verdict, WinMode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("initial support is not contained in Pre^{k}(T)")]
    NotInPre { k: usize },
}

fn query(mode: SyncMode, win: WinMode, t: &SupportSet, s0: &SupportSet) -> ModeQuery {
    ModeQuery::new(mode, win, t.clone(), s0.clone())
}

pub fn decide_sure(
    m: &Mdp,
    mode: SyncMode,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
) -> Result<Verdict, GuardError> {
    let q = query(mode, WinMode::Sure, t, s0);
    Ok(match mode {
        SyncMode::Eventually => {
            let lasso = pre_lasso_capped(m, t, limits.max_lasso)?;
            match lasso.first_containing(s0) {
                Some(k) => Verdict::new(&q, true)
                    .with_certificate(Certificate::SureEventually { k })
                    .with_strategy(countdown_strategy(m, &lasso, k, false)),
                None => Verdict::new(&q, false),
            }
        }
        SyncMode::Weakly => match sure_weakly_witness(m, t, s0, limits)? {
            Some((set, k, r, lasso)) => Verdict::new(&q, true)
                .with_certificate(Certificate::SureWeakly {
                    set: set.clone(),
                    k,
                    r,
                })
                .with_strategy(cycling_strategy(m, &lasso, k, r)),
            None => Verdict::new(&q, false),
        },
        SyncMode::Always => {
            let safe = sure_safety_region(m, t);
            let answer = s0.is_subset(&safe);
            let mut v = Verdict::new(&q, answer).with_certificate(Certificate::Always {
                safety_region: safe.clone(),
            });
            if answer {
                v = v.with_strategy(safety_strategy(m, &safe, &safe));
            }
            v
        }
        SyncMode::Strongly => {
            let safe = sure_safety_region(m, t);
            let reach = sure_reach_region(m, &safe);
            let answer = s0.is_subset(&reach);
            let mut v = Verdict::new(&q, answer).with_certificate(Certificate::Strongly {
                safety_region: safe.clone(),
                reach_region: reach.clone(),
            });
            if answer {
                v = v.with_strategy(safety_strategy(m, &safe, &reach));
            }
            v
        }
    })
}

pub fn decide_almost_sure(
    m: &Mdp,
    mode: SyncMode,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
) -> Result<Verdict, GuardError> {
    let q = query(mode, WinMode::AlmostSure, t, s0);
    Ok(match mode {
        SyncMode::Eventually => {
            let sure = pre_lasso_capped(m, t, limits.max_lasso)?.first_containing(s0);
            let weakly = if sure.is_some() {
                None
            } else {
                almost_sure_weakly_subset(m, t, s0, limits)?
            };
            let answer = sure.is_some() || weakly.is_some();
            Verdict::new(&q, answer)
                .with_certificate(Certificate::AlmostSureEventually { sure, weakly })
        }
        SyncMode::Weakly => match almost_sure_weakly_subset(m, t, s0, limits)? {
            Some(subset) => {
                Verdict::new(&q, true).with_certificate(Certificate::AlmostSureWeakly { subset })
            }
            None => Verdict::new(&q, false),
        },
        SyncMode::Always => relabel(decide_sure(m, mode, t, s0, limits)?, WinMode::AlmostSure),
        SyncMode::Strongly => {
            let safe = sure_safety_region(m, t);
            let reach = almost_sure_reach_region(m, &safe);
            let answer = s0.is_subset(&reach);
            let mut v = Verdict::new(&q, answer).with_certificate(Certificate::Strongly {
                safety_region: safe.clone(),
                reach_region: reach.clone(),
            });
            if answer {
                v = v.with_strategy(almost_sure_reach_strategy(m, &safe, &reach));
            }
            v
        }
    })
}

pub fn decide_limit_sure(
    m: &Mdp,
    mode: SyncMode,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
) -> Result<Verdict, GuardError> {
    match mode {
        SyncMode::Eventually => {
            let q = query(mode, WinMode::LimitSure, t, s0);
            let (answer, cert) = limit_sure_eventually(m, t, s0, limits, true)?;
            let mut v = Verdict::new(&q, answer);
            if let Certificate::LimitSureEventually {
                route: LimitRoute::Sure { k },
                ..
            } = &cert
            {
                let lasso = pre_lasso_capped(m, t, limits.max_lasso)?;
                v = v.with_strategy(countdown_strategy(m, &lasso, *k, false));
            }
            Ok(v.with_certificate(cert))
        }
        _ => Ok(relabel(
            decide_almost_sure(m, mode, t, s0, limits)?,
            WinMode::LimitSure,
        )),
    }
}

fn relabel(mut v: Verdict, win: WinMode) -> Verdict {
    v.query.win = win;
    v
}

/// Limit-sure eventually synchronizing from support `s0` into `t`.
///
/// Returns the answer with its certificate. When `find_failing` is set and
/// the answer is no, the certificate lists the initial states that fail on
/// their own.
pub fn limit_sure_eventually(
    m: &Mdp,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
    find_failing: bool,
) -> Result<(bool, Certificate), GuardError> {
    let lasso = pre_lasso_capped(m, t, limits.max_lasso)?;
    let oracle = PhaseOracle::new(m, &lasso);
    let route = oracle.route(s0);
    let answer = !matches!(route, LimitRoute::None);
    let mut failing_states = m.empty_set();
    if !answer && find_failing {
        for q in s0.iter() {
            let single = SupportSet::singleton(m.num_states(), q);
            if matches!(oracle.route(&single), LimitRoute::None) {
                failing_states.insert(q);
            }
        }
    }
    Ok((
        answer,
        Certificate::LimitSureEventually {
            k: lasso.k,
            r: lasso.r,
            repeating: lasso.repeating().clone(),
            route,
            failing_states,
        },
    ))
}

/// Both routes of the limit-sure eventually characterization for one target.
struct PhaseOracle<'a> {
    lasso: &'a PreLasso,
    region: SupportSet,
}

impl<'a> PhaseOracle<'a> {
    fn new(m: &Mdp, lasso: &'a PreLasso) -> Self {
        let r = lasso.r;
        let product = product_with_counter(m, r);
        let region = almost_sure_reach_region(&product, &lift_set(lasso.repeating(), 0, r));
        Self { lasso, region }
    }

    fn route(&self, s0: &SupportSet) -> LimitRoute {
        if let Some(k) = self.lasso.first_containing(s0) {
            return LimitRoute::Sure { k };
        }
        let r = self.lasso.r;
        (0..r)
            .find(|&phase| lift_set(s0, phase, r).is_subset(&self.region))
            .map_or(LimitRoute::None, |phase| LimitRoute::Phase {
                phase,
                region: self.region.clone(),
            })
    }
}

fn limit_sure_eventually_answer(
    m: &Mdp,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
) -> Result<bool, GuardError> {
    Ok(limit_sure_eventually(m, t, s0, limits, false)?.0)
}

/// Searches `T' ⊆ T` (largest first) with `s0 ∈ win_lim^event(T')` and
/// `T' ∈ win_lim^event(Pre(T'))`.
pub fn almost_sure_weakly_subset(
    m: &Mdp,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
) -> Result<Option<SupportSet>, GuardError> {
    if t.len() > limits.max_subset_width {
        return Err(GuardError::SubsetSearchTooWide {
            stage: "almost-sure weakly subset search",
            width: t.len(),
            limit: limits.max_subset_width,
        });
    }
    let mut memo: HashMap<(SupportSet, SupportSet), bool> = HashMap::new();
    let mut lim = |target: &SupportSet, from: &SupportSet| -> Result<bool, GuardError> {
        let key = (target.clone(), from.clone());
        if let Some(&v) = memo.get(&key) {
            return Ok(v);
        }
        let v = limit_sure_eventually_answer(m, target, from, limits)?;
        memo.insert(key, v);
        Ok(v)
    };
    for candidate in t.subsets_by_decreasing_size() {
        if candidate.is_empty() {
            continue;
        }
        if lim(&candidate, s0)? && lim(&pre(m, &candidate), &candidate)? {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// The largest `S ⊆ T` with `S ⊆ Pre^r(S)` for some `r ≥ 1`, if
/// `s0 ⊆ Pre^k(S)` for some `k`. Valid sets are closed under union, so the
/// first valid subset in decreasing size is the maximum.
fn sure_weakly_witness(
    m: &Mdp,
    t: &SupportSet,
    s0: &SupportSet,
    limits: &Limits,
) -> Result<Option<(SupportSet, usize, usize, PreLasso)>, GuardError> {
    if t.len() > limits.max_subset_width {
        return Err(GuardError::SubsetSearchTooWide {
            stage: "sure weakly subset search",
            width: t.len(),
            limit: limits.max_subset_width,
        });
    }
    for candidate in t.subsets_by_decreasing_size() {
        if candidate.is_empty() {
            continue;
        }
        let lasso = pre_lasso_capped(m, &candidate, limits.max_lasso)?;
        let horizon = lasso.k + lasso.r;
        let Some(r) = (1..=horizon).find(|&j| candidate.is_subset(lasso.at(j))) else {
            continue;
        };
        return Ok(lasso.first_containing(s0).map(|k| (candidate, k, r, lasso)));
    }
    Ok(None)
}

/// First action at `q` whose successors all lie in `into`.
fn action_into(m: &Mdp, q: StateId, into: &SupportSet) -> Option<ActionId> {
    m.actions().find(|&a| m.post(q, a).is_subset(into))
}

/// Counts down from `k`: with `j` steps left, a state in `Pre^j(T)` plays
/// the first action into `Pre^{j-1}(T)`. With `k = 0` the strategy plays the
/// first action everywhere.
pub fn synthesize_sure_eventually_strategy(
    m: &Mdp,
    t: &SupportSet,
    s0: &SupportSet,
    k: usize,
) -> Result<StrategySpec, SynthesisError> {
    let lasso = crate::region::pre_lasso(m, t);
    if !s0.is_subset(lasso.at(k)) {
        return Err(SynthesisError::NotInPre { k });
    }
    Ok(countdown_strategy(m, &lasso, k, false))
}

fn countdown_choice(m: &Mdp, lasso: &PreLasso, q: StateId, level: usize) -> ActionDist {
    let a = if level == 0 || !lasso.at(level).contains(q) {
        0
    } else {
        action_into(m, q, lasso.at(level - 1)).expect("Pre^j(T) has an action into Pre^{j-1}(T)")
    };
    ActionDist::dirac(a)
}

fn countdown_strategy(m: &Mdp, lasso: &PreLasso, k: usize, _cycle: bool) -> StrategySpec {
    StrategySpec::step_counter(format!("countdown-{k}"), m, k + 1, |step, q| {
        countdown_choice(m, lasso, q, k - step)
    })
}

/// Reaches `S` in `k` steps, then returns to `S` every `r` steps.
/// `lasso` is the predecessor lasso of `S`.
fn cycling_strategy(m: &Mdp, lasso: &PreLasso, k: usize, r: usize) -> StrategySpec {
    let size = k + r;
    let level = |mem: usize| if mem <= k { k - mem } else { r - (mem - k) };
    let choice = (0..size)
        .map(|mem| {
            let j = match level(mem) {
                0 => r,
                j => j,
            };
            m.states()
                .map(|q| countdown_choice(m, lasso, q, j))
                .collect()
        })
        .collect();
    let update = (0..size)
        .map(|mem| vec![if mem + 1 == size { k } else { mem + 1 }; m.num_states()])
        .collect();
    StrategySpec::new(format!("cycle-{k}-{r}"), m, 0, choice, update)
        .expect("well-formed cycling strategy")
}

/// Memoryless: inside `safe` stay inside; elsewhere in `reach` descend the
/// attractor layers towards `safe`.
fn safety_strategy(m: &Mdp, safe: &SupportSet, reach: &SupportSet) -> StrategySpec {
    let mut choice = vec![ActionDist::dirac(0); m.num_states()];
    for q in safe.iter() {
        choice[q] = ActionDist::dirac(actions_within(m, q, safe)[0]);
    }
    let mut layer = safe.clone();
    while !reach.is_subset(&layer) {
        let next = layer.union(&pre(m, &layer)).intersection(reach);
        for q in next.difference(&layer).iter() {
            choice[q] = ActionDist::dirac(action_into(m, q, &layer).expect("attractor layer"));
        }
        if next == layer {
            break;
        }
        layer = next;
    }
    StrategySpec::memoryless("sure-safety", m, choice)
}

/// Memoryless almost-sure strategy for `◇safe` that then stays in `safe`.
/// Outside `safe` it follows the layers of the inner least fixpoint.
fn almost_sure_reach_strategy(m: &Mdp, safe: &SupportSet, region: &SupportSet) -> StrategySpec {
    let mut choice = vec![ActionDist::dirac(0); m.num_states()];
    for q in safe.iter() {
        choice[q] = ActionDist::dirac(actions_within(m, q, safe)[0]);
    }
    let mut x = safe.clone();
    loop {
        let next = safe.union(&apre(m, region, &x));
        for q in next.difference(&x).iter() {
            let a = m
                .actions()
                .find(|&a| m.post(q, a).is_subset(region) && m.post(q, a).intersects(&x))
                .expect("layer of the almost-sure region");
            choice[q] = ActionDist::dirac(a);
        }
        if next == x {
            break;
        }
        x = next;
    }
    StrategySpec::memoryless("almost-sure-reach", m, choice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::mdp::Dist;
    use crate::oracle::simulate;
    use num_traits::One;

    fn set(m: &Mdp, names: &[&str]) -> SupportSet {
        SupportSet::from_states(
            m.num_states(),
            names.iter().map(|n| m.state_index(n).unwrap()),
        )
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn sure_eventually_examples() {
        let m = corpus::figure2().mdp;
        let v = decide_sure(
            &m,
            SyncMode::Eventually,
            &set(&m, &["q2"]),
            &set(&m, &["q0"]),
            &lim(),
        )
        .unwrap();
        assert!(!v.answer);

        let m4 = corpus::figure4().mdp;
        let t = set(&m4, &["q2", "q3"]);
        let v = decide_sure(&m4, SyncMode::Eventually, &t, &set(&m4, &["q1"]), &lim()).unwrap();
        assert!(v.answer);
        assert_eq!(v.certificate, Some(Certificate::SureEventually { k: 1 }));

        let v = decide_sure(
            &m,
            SyncMode::Always,
            &m.all_states(),
            &set(&m, &["q0"]),
            &lim(),
        )
        .unwrap();
        assert!(v.answer);
    }

    #[test]
    fn almost_sure_examples() {
        let m3 = corpus::figure3().mdp;
        let v = decide_almost_sure(
            &m3,
            SyncMode::Weakly,
            &set(&m3, &["q2"]),
            &set(&m3, &["q0"]),
            &lim(),
        )
        .unwrap();
        assert!(v.answer);
        assert_eq!(
            v.certificate,
            Some(Certificate::AlmostSureWeakly {
                subset: set(&m3, &["q2"])
            })
        );

        let m = corpus::figure2().mdp;
        let v = decide_almost_sure(
            &m,
            SyncMode::Eventually,
            &set(&m, &["q2"]),
            &set(&m, &["q0"]),
            &lim(),
        )
        .unwrap();
        assert!(!v.answer);

        let v = decide_almost_sure(
            &m,
            SyncMode::Weakly,
            &m.empty_set(),
            &set(&m, &["q0"]),
            &lim(),
        )
        .unwrap();
        assert!(!v.answer);
    }

    #[test]
    fn limit_sure_examples() {
        let m = corpus::figure2().mdp;
        let v = decide_limit_sure(
            &m,
            SyncMode::Eventually,
            &set(&m, &["q2"]),
            &set(&m, &["q0"]),
            &lim(),
        )
        .unwrap();
        assert!(v.answer);
        match v.certificate {
            Some(Certificate::LimitSureEventually {
                k,
                r,
                repeating,
                route: LimitRoute::Phase { phase: 0, .. },
                ..
            }) => {
                assert_eq!((k, r), (1, 1));
                assert_eq!(repeating, set(&m, &["q1"]));
            }
            other => panic!("unexpected certificate {other:?}"),
        }

        let m4 = corpus::figure4().mdp;
        let v = decide_limit_sure(
            &m4,
            SyncMode::Eventually,
            &set(&m4, &["q2", "q3"]),
            &set(&m4, &["q1", "q3"]),
            &lim(),
        )
        .unwrap();
        assert!(!v.answer);
        match v.certificate {
            Some(Certificate::LimitSureEventually {
                route: LimitRoute::None,
                failing_states,
                ..
            }) => assert!(failing_states.is_empty()),
            other => panic!("unexpected certificate {other:?}"),
        }

        let q3 = set(&m, &["q3"]);
        for mode in SyncMode::ALL {
            for decide in [decide_sure, decide_almost_sure, decide_limit_sure] {
                assert!(decide(&m, mode, &q3, &q3, &lim()).unwrap().answer, "{mode}");
            }
        }
    }

    #[test]
    fn countdown_strategy_synchronizes() {
        let m4 = corpus::figure4().mdp;
        let t = set(&m4, &["q2", "q3"]);
        let s = synthesize_sure_eventually_strategy(&m4, &t, &set(&m4, &["q1"]), 1).unwrap();
        let trace = simulate(&m4, &s, &Dist::dirac(5, 1), 1);
        assert!(trace.dists[1].mass_of(&t).is_one());

        let m = corpus::figure2().mdp;
        let q1 = set(&m, &["q1"]);
        let s = synthesize_sure_eventually_strategy(&m, &q1, &q1, 0).unwrap();
        assert!(simulate(&m, &s, &Dist::dirac(4, 1), 0).dists[0]
            .mass_of(&q1)
            .is_one());
        let s = synthesize_sure_eventually_strategy(&m, &q1, &q1, 1).unwrap();
        assert_eq!(s.choice(0, 1), &ActionDist::dirac(0));
        let trace = simulate(&m, &s, &Dist::dirac(4, 1), 1);
        assert!(trace.dists.iter().all(|d| d.mass_of(&q1).is_one()));

        assert!(synthesize_sure_eventually_strategy(&m, &q1, &set(&m, &["q0"]), 1).is_err());
    }

    #[test]
    fn sure_weakly_certificate_rechecks() {
        let m4 = corpus::figure4().mdp;
        let t = set(&m4, &["q2", "q3"]);
        let s0 = set(&m4, &["q0"]);
        let v = decide_sure(&m4, SyncMode::Weakly, &t, &set(&m4, &["q1"]), &lim()).unwrap();
        let Some(Certificate::SureWeakly { set: s, k, r }) = v.certificate.clone() else {
            panic!("expected a sure-weakly certificate, got {v:?}");
        };
        assert!(s.is_subset(&t) && r >= 1);
        let lasso = crate::region::pre_lasso(&m4, &s);
        assert!(s.is_subset(lasso.at(r)));
        assert!(set(&m4, &["q1"]).is_subset(lasso.at(k)));
        let trace = simulate(&m4, v.strategy.as_ref().unwrap(), &Dist::dirac(5, 1), 12);
        let hits = trace
            .dists
            .iter()
            .filter(|d| d.mass_of(&t).is_one())
            .count();
        assert!(hits >= 5);
        // from q0 the two halves are out of phase forever
        assert!(
            !decide_sure(&m4, SyncMode::Weakly, &t, &s0, &lim())
                .unwrap()
                .answer
        );
    }

    #[test]
    fn subset_search_guard() {
        let m = corpus::figure2().mdp;
        let tight = Limits {
            max_subset_width: 1,
            ..Limits::default()
        };
        let t = set(&m, &["q1", "q2"]);
        let err = decide_almost_sure(&m, SyncMode::Weakly, &t, &set(&m, &["q0"]), &tight);
        assert!(matches!(err, Err(GuardError::SubsetSearchTooWide { .. })));
    }
}
