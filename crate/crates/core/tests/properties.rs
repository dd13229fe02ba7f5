//! Property tests over seeded random models.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

use syncmdp::adversarial::{freezing_strategy, support_lasso};
use syncmdp::bounds::{compute_bound, BoundKind};
use syncmdp::classic::{almost_sure_weakly_subset, limit_sure_eventually};
use syncmdp::corpus::{random_instance, Instance, RandomShape};
use syncmdp::mdp::{
    lift_dist, min_positive_probability, product_with_counter, project_dist, Dist, Mdp,
};
use syncmdp::oracle::{max_mass_at_step, simulate};
use syncmdp::rational::{ratio, Rational};
use syncmdp::region::{
    almost_sure_reach_region, apre, is_end_component, mec_decomposition, pre, pre_lasso,
    sure_reach_region, sure_safety_region,
};
use syncmdp::verdict::{Certificate, LimitRoute};
use syncmdp::{decide, parse_model, Limits, StrategySpec, SupportSet, SyncMode, WinMode};

fn instance(seed: u64) -> Instance {
    random_instance(seed, RandomShape::default())
}

fn mask(m: &Mdp, bits: u64) -> SupportSet {
    SupportSet::from_mask(m.num_states(), bits & ((1 << m.num_states()) - 1))
}

/// The same model with states renamed by `perm` (new index of old state).
fn permuted(m: &Mdp, perm: &[usize]) -> Mdp {
    let n = m.num_states();
    let mut names = vec![String::new(); n];
    let mut delta = vec![Vec::new(); n];
    for q in m.states() {
        names[perm[q]] = m.state_name(q).to_string();
        delta[perm[q]] = m
            .actions()
            .map(|a| {
                Dist::from_pairs(n, m.delta(q, a).iter().map(|(q2, p)| (perm[q2], p.clone())))
                    .unwrap()
            })
            .collect();
    }
    Mdp::new(names, m.action_names().to_vec(), delta).unwrap()
}

fn permute_set(s: &SupportSet, perm: &[usize]) -> SupportSet {
    SupportSet::from_states(s.width(), s.iter().map(|q| perm[q]))
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut x = seed | 1;
    for i in (1..n).rev() {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        perm.swap(i, (x % (i as u64 + 1)) as usize);
    }
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn apre_with_full_x_is_pre(seed in any::<u64>(), y in any::<u64>()) {
        let m = instance(seed).model.mdp;
        let y = mask(&m, y);
        prop_assert_eq!(apre(&m, &y, &m.all_states()), pre(&m, &y));
    }

    #[test]
    fn predecessor_operators_are_monotone(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let m = instance(seed).model.mdp;
        let small = mask(&m, a & b);
        let large = mask(&m, a);
        let x = mask(&m, b);
        prop_assert!(pre(&m, &small).is_subset(&pre(&m, &large)));
        prop_assert!(apre(&m, &small, &x).is_subset(&apre(&m, &large, &x)));
        prop_assert!(apre(&m, &large, &small).is_subset(&apre(&m, &large, &x.union(&small))));
    }

    #[test]
    fn pre_lasso_is_periodic(seed in any::<u64>(), t in any::<u64>()) {
        let m = instance(seed).model.mdp;
        let t = mask(&m, t);
        let lasso = pre_lasso(&m, &t);
        prop_assert!(lasso.k + lasso.r <= 1 << m.num_states());
        let mut y = t.clone();
        for i in 0..lasso.k + 3 * lasso.r {
            prop_assert_eq!(&y, lasso.at(i));
            y = pre(&m, &y);
        }
    }

    #[test]
    fn safety_region_is_the_largest_closed_subset(seed in any::<u64>(), t in any::<u64>()) {
        let m = instance(seed).model.mdp;
        let t = mask(&m, t);
        let s = sure_safety_region(&m, &t);
        prop_assert!(s.is_subset(&t));
        prop_assert!(s.is_subset(&pre(&m, &s)));
        for q in t.difference(&s).iter() {
            let mut bigger = s.clone();
            bigger.insert(q);
            prop_assert!(!bigger.is_subset(&pre(&m, &bigger)));
        }
    }

    #[test]
    fn regions_do_not_depend_on_state_order(seed in any::<u64>(), t in any::<u64>(), p in any::<u64>()) {
        let m = instance(seed).model.mdp;
        let t = mask(&m, t);
        let perm = permutation(m.num_states(), p);
        let pm = permuted(&m, &perm);
        let pt = permute_set(&t, &perm);
        prop_assert_eq!(permute_set(&pre(&m, &t), &perm), pre(&pm, &pt));
        prop_assert_eq!(permute_set(&sure_safety_region(&m, &t), &perm), sure_safety_region(&pm, &pt));
        prop_assert_eq!(permute_set(&sure_reach_region(&m, &t), &perm), sure_reach_region(&pm, &pt));
        prop_assert_eq!(
            permute_set(&almost_sure_reach_region(&m, &t), &perm),
            almost_sure_reach_region(&pm, &pt)
        );
        let mut a: Vec<SupportSet> = mec_decomposition(&m)
            .components
            .iter()
            .map(|c| permute_set(c, &perm))
            .collect();
        let mut b = mec_decomposition(&pm).components;
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn end_components_are_maximal_and_disjoint(seed in any::<u64>()) {
        let m = instance(seed).model.mdp;
        let ec = mec_decomposition(&m);
        let mut union = m.empty_set();
        for c in &ec.components {
            prop_assert!(is_end_component(&m, c));
            prop_assert!(!union.intersects(c));
            union.union_with(c);
            for q in c.iter() {
                for &a in ec.internal_actions(q) {
                    prop_assert!(m.post(q, a).is_subset(c));
                }
            }
        }
        prop_assert_eq!(&union, &ec.union);
        for (i, c) in ec.components.iter().enumerate() {
            for d in &ec.components[i + 1..] {
                prop_assert!(!is_end_component(&m, &c.union(d)));
            }
            for q in m.states().filter(|q| !ec.union.contains(*q)) {
                let mut bigger = c.clone();
                bigger.insert(q);
                prop_assert!(!is_end_component(&m, &bigger));
            }
        }
    }

    #[test]
    fn product_commutes_with_simulation(seed in any::<u64>(), r in 1usize..4, phase in 0usize..4) {
        let inst = instance(seed);
        let m = &inst.model.mdp;
        let phase = phase % r;
        let prod = product_with_counter(m, r);
        prop_assert_eq!(min_positive_probability(&prod), min_positive_probability(m));
        let base = simulate(m, &StrategySpec::uniform(m), &inst.model.initial, 8);
        let lifted = simulate(
            &prod,
            &StrategySpec::uniform(&prod),
            &lift_dist(&inst.model.initial, phase, r),
            8,
        );
        for (d, e) in base.dists.iter().zip(&lifted.dists) {
            prop_assert_eq!(d, &project_dist(e, r));
            prop_assert!(d.total().is_one());
        }
    }

    #[test]
    fn model_documents_round_trip(seed in any::<u64>()) {
        let model = instance(seed).model;
        let text = model.to_json();
        let again = parse_model(&text).unwrap();
        prop_assert_eq!(&again, &model);
        prop_assert_eq!(again.to_json(), text);
    }

    #[test]
    fn optimum_dominates_the_uniform_strategy(seed in any::<u64>()) {
        let inst = instance(seed);
        let m = &inst.model.mdp;
        let v = max_mass_at_step(m, &inst.target, &inst.model.initial, 20);
        let tr = simulate(m, &StrategySpec::uniform(m), &inst.model.initial, 20);
        for i in 0..=20 {
            prop_assert!(tr.mass_at(i, &inst.target) <= v.values[i]);
            prop_assert!(v.values[i] <= Rational::one());
        }
    }

    #[test]
    fn positive_verdicts_match_uniform_simulation(seed in any::<u64>()) {
        let inst = instance(seed);
        let m = &inst.model.mdp;
        let s0 = inst.model.initial.support();
        let lasso = support_lasso(m, &s0);
        let (l, p) = (lasso.loop_start, lasso.period);
        let lim = Limits::default();
        for d0 in [inst.model.initial.clone(), Dist::uniform(&s0)] {
            let tr = simulate(m, &StrategySpec::uniform(m), &d0, l + 2 * p);
            let hit = |i: usize| !tr.mass_at(i, &inst.target).is_zero();
            let always = (0..=l + 2 * p).all(hit);
            let weakly = (l..l + p).any(hit);
            let v = decide(m, SyncMode::Always, WinMode::Positive, &inst.target, &s0, &lim).unwrap();
            prop_assert_eq!(v.answer, always);
            let v = decide(m, SyncMode::Weakly, WinMode::Positive, &inst.target, &s0, &lim).unwrap();
            prop_assert_eq!(v.answer, weakly);
        }
    }

    #[test]
    fn freezing_refines_uniform(seed in any::<u64>()) {
        let inst = instance(seed);
        let m = &inst.model.mdp;
        let s0 = inst.model.initial.support();
        let lasso = support_lasso(m, &s0);
        let ec = mec_decomposition(m);
        let f = freezing_strategy(m, &lasso, &ec);
        let h = lasso.closure() + 12;
        let tf = simulate(m, &f, &inst.model.initial, h);
        let tu = simulate(m, &StrategySpec::uniform(m), &inst.model.initial, h);
        for i in 0..=h {
            let (sf, su) = (tf.dists[i].support(), tu.dists[i].support());
            prop_assert!(sf.is_subset(&su));
            if i >= lasso.closure() {
                prop_assert_eq!(sf.intersection(&ec.union), su.intersection(&ec.union));
            }
        }
    }

    #[test]
    fn certificates_recheck(seed in any::<u64>()) {
        let inst = instance(seed);
        let m = &inst.model.mdp;
        let t = &inst.target;
        let s0 = inst.model.initial.support();
        let lim = Limits::default();
        let v = decide(m, SyncMode::Weakly, WinMode::Sure, t, &s0, &lim).unwrap();
        if let Some(Certificate::SureWeakly { set, k, r }) = &v.certificate {
            prop_assert!(set.is_subset(t) && *r >= 1);
            let lasso = pre_lasso(m, set);
            prop_assert!(set.is_subset(lasso.at(*r)));
            prop_assert!(s0.is_subset(lasso.at(*k)));
        }
        if let Some(sub) = almost_sure_weakly_subset(m, t, &s0, &lim).unwrap() {
            prop_assert!(!sub.is_empty() && sub.is_subset(t));
            prop_assert!(limit_sure_eventually(m, &sub, &s0, &lim, false).unwrap().0);
            prop_assert!(limit_sure_eventually(m, &pre(m, &sub), &sub, &lim, false).unwrap().0);
        }
        let (yes, cert) = limit_sure_eventually(m, t, &s0, &lim, false).unwrap();
        if let Certificate::LimitSureEventually { route: LimitRoute::Phase { phase, region }, k, r, repeating, .. } = cert {
            prop_assert!(yes && phase < r);
            let lasso = pre_lasso(m, t);
            prop_assert_eq!(&repeating, lasso.at(k));
            prop_assert_eq!(region, almost_sure_reach_region(
                &product_with_counter(m, r),
                &syncmdp::mdp::lift_set(&repeating, 0, r),
            ));
        }
    }

    #[test]
    fn sure_witnesses_synchronize(seed in any::<u64>()) {
        let inst = instance(seed);
        let m = &inst.model.mdp;
        let t = &inst.target;
        let d0 = &inst.model.initial;
        let s0 = d0.support();
        let lim = Limits::default();
        let n = m.num_states();
        let h = 3 * n + 8;
        let v = decide(m, SyncMode::Eventually, WinMode::Sure, t, &s0, &lim).unwrap();
        if let Some(Certificate::SureEventually { k }) = v.certificate {
            let tr = simulate(m, v.strategy.as_ref().unwrap(), d0, k);
            prop_assert!(tr.mass_at(k, t).is_one());
        }
        let v = decide(m, SyncMode::Always, WinMode::Sure, t, &s0, &lim).unwrap();
        if v.answer {
            let tr = simulate(m, v.strategy.as_ref().unwrap(), d0, h);
            prop_assert!((0..=h).all(|i| tr.mass_at(i, t).is_one()));
        }
        let v = decide(m, SyncMode::Strongly, WinMode::Sure, t, &s0, &lim).unwrap();
        if v.answer {
            let tr = simulate(m, v.strategy.as_ref().unwrap(), d0, h);
            prop_assert!((n..=h).all(|i| tr.mass_at(i, t).is_one()));
        }
        let v = decide(m, SyncMode::Weakly, WinMode::Sure, t, &s0, &lim).unwrap();
        if let Some(Certificate::SureWeakly { k, r, .. }) = v.certificate {
            let tr = simulate(m, v.strategy.as_ref().unwrap(), d0, k + 3 * r);
            for j in 0..=3 {
                prop_assert!(tr.mass_at(k + j * r, t).is_one());
            }
        }
        let v = decide(m, SyncMode::Strongly, WinMode::AlmostSure, t, &s0, &lim).unwrap();
        if v.answer {
            let tr = simulate(m, v.strategy.as_ref().unwrap(), d0, 240);
            let late = tr.mass_at(240, t);
            prop_assert!(late >= tr.mass_at(120, t));
            prop_assert!(Rational::one() - late < ratio(1, 100));
        }
    }

    #[test]
    fn bound_formulas_are_monotone(
        n in 2usize..6,
        a in 1usize..3,
        num in 1i64..4,
        num0 in 1i64..4,
    ) {
        let alpha = ratio(num, 4);
        let alpha_up = ratio(num + 1, 4);
        let alpha0 = ratio(num0, 4);
        let alpha0_up = ratio(num0 + 1, 4);
        for kind in [
            BoundKind::EpsEventually,
            BoundKind::EpsWeakly,
            BoundKind::EpsAlways,
            BoundKind::EpsStrongly,
            BoundKind::EpsAdversarial,
            BoundKind::Lemma1Reach,
        ] {
            let at = |n: usize, al: &Rational, al0: &Rational| {
                compute_bound(kind, n, a, al, al0, None).unwrap().exact().unwrap().clone()
            };
            let base = at(n, &alpha, &alpha0);
            prop_assert!(base > Rational::zero());
            prop_assert!(at(n, &alpha_up, &alpha0) >= base);
            prop_assert!(at(n, &alpha, &alpha0_up) >= base);
            prop_assert!(at(n + 1, &alpha, &alpha0) <= base);
        }
        let e = compute_bound(BoundKind::EpsEventually, n, a, &alpha, &alpha0, None).unwrap();
        let w = compute_bound(BoundKind::EpsWeakly, n, a, &alpha, &alpha0, None).unwrap();
        prop_assert!(w.exact().unwrap() <= e.exact().unwrap());
        prop_assert!(e.exact().unwrap() <= &alpha0);
        let nw = compute_bound(BoundKind::NWeakly, n, a, &alpha, &alpha0, None).unwrap();
        prop_assert_eq!(nw.count().unwrap(), &(BigUint::one() << n));
    }
}
