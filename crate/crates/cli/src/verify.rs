//! Oracle cross-checks of every verdict, bound and region for one target.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use syncmdp::adversarial::{matrix_power_witness, support_lasso_capped};
use syncmdp::bounds::{compute_bound_capped, BoundCert, BoundKind};
use syncmdp::mdp::min_positive_probability;
use syncmdp::oracle::{
    count_synchronized_positions, default_horizon, enumerate_pure_strategies, gap_f64,
    max_mass_at_step, max_reach_within, pure_strategy_count, simulate, Trace,
};
use syncmdp::rational::{format_rational, log10, pow, ratio};
use syncmdp::region::almost_sure_reach_region;
use syncmdp::{Limits, Model, Rational, StrategySpec, SupportSet, Verdict, WinMode};

use crate::analyze::{self, table};
use crate::error::CliError;
use crate::gate;
use crate::report::{CheckResult, Report, Status, REPORT_VERSION};
use crate::witness;

pub struct VerifyOptions {
    pub horizon: Option<usize>,
    pub limits: Limits,
}

/// First trace over the cap, and a summary of what was searched.
type CountOutcome = (Option<(usize, Vec<usize>, String)>, String);

struct Ctx<'a> {
    model: &'a Model,
    t: &'a SupportSet,
    limits: &'a Limits,
    profile: Vec<Rational>,
    verdicts: &'a [Verdict],
    counted: RefCell<HashMap<(Rational, bool), CountOutcome>>,
}

pub fn verify(model: &Model, target_name: &str, opts: &VerifyOptions) -> Result<Report, CliError> {
    let t = analyze::target(model, target_name)?;
    let summary = analyze::summary(model, Some((target_name, &t)), &opts.limits)?;
    let vs = analyze::verdicts(model, &t, None, &opts.limits)?;
    let horizon = opts
        .horizon
        .unwrap_or_else(|| default_horizon(summary.lasso.loop_start + summary.lasso.period));
    let m = &model.mdp;
    let d0 = &model.initial;
    let ctx = Ctx {
        model,
        t: &t,
        limits: &opts.limits,
        profile: max_mass_at_step(m, &t, d0, horizon).values,
        verdicts: &vs,
        counted: RefCell::new(HashMap::new()),
    };

    let bad = gate::violations(&table(&vs));
    let mut oracle = vec![{
        let c = CheckResult::new("consistency gate", Status::of(bad.is_empty()));
        if bad.is_empty() {
            c
        } else {
            c.note(bad.join("; "))
        }
    }];
    oracle.extend(witness::checks(m, d0, &t, &vs, horizon));
    oracle.push(witness::dominated(m, d0, &t, &vs, &ctx.profile));
    for v in vs
        .iter()
        .filter(|v| !v.answer && !v.query.win.is_adversarial())
    {
        for b in &v.bounds {
            oracle.extend(bound_checks(&ctx, v, b));
        }
    }
    oracle.push(region_check(&ctx, horizon.max(200)));
    oracle.push(lasso_check(&ctx)?);
    Ok(Report {
        report_version: REPORT_VERSION,
        command: "verify".into(),
        model: summary,
        matrix: Vec::new(),
        queries: Vec::new(),
        oracle,
        regions: None,
    })
}

fn with_bound(mut c: CheckResult, b: &BoundCert) -> CheckResult {
    c.epsilon = b.exact().map(format_rational);
    c.epsilon_log10 = b.log10.is_finite().then_some(b.log10);
    c
}

fn observed(mut c: CheckResult, x: &Rational) -> CheckResult {
    c.observed = Some(format_rational(x));
    c.gap = Some(gap_f64(x));
    c
}

fn bound_checks(ctx: &Ctx, v: &Verdict, b: &BoundCert) -> Vec<CheckResult> {
    let m = &ctx.model.mdp;
    let n = m.num_states();
    let name = format!("bound {} {} {}", v.query.win, v.query.sync, b.kind);
    let profile = &ctx.profile;
    let prefix = &profile[..=n.min(profile.len() - 1)];
    match b.kind {
        BoundKind::Lemma2Step => {
            let bad = profile.iter().enumerate().position(|(i, vi)| {
                compute_bound_capped(
                    b.kind,
                    n,
                    b.inputs.a_count,
                    &b.inputs.alpha,
                    &b.inputs.alpha0,
                    Some(i),
                    ctx.limits.bound_bits_cap,
                )
                .ok()
                .and_then(|c| c.ceiling())
                .is_some_and(|c| *vi > c)
            });
            let best = profile.iter().max().unwrap();
            vec![with_bound(
                observed(
                    CheckResult::new(name, Status::of(bad.is_none())).at(bad),
                    best,
                ),
                b,
            )
            .note("v_i <= 1 - a0*a^i for every i")]
        }
        BoundKind::EpsEventually | BoundKind::Lemma1Reach => {
            let best = profile.iter().max().unwrap();
            let c = match b.ceiling() {
                Some(ceiling) => {
                    let bad = profile.iter().position(|vi| *vi > ceiling);
                    CheckResult::new(name, Status::of(bad.is_none())).at(bad)
                }
                None => CheckResult::new(name, Status::Skipped).note("bound too large to evaluate"),
            };
            vec![with_bound(observed(c, best), b)]
        }
        BoundKind::EpsAlways | BoundKind::EpsStrongly => {
            let low = prefix.iter().min().unwrap();
            let Some(ceiling) = b.ceiling() else {
                return vec![with_bound(
                    CheckResult::new(name, Status::Skipped).note("bound too large to evaluate"),
                    b,
                )];
            };
            let ok = *low <= ceiling;
            let c = with_bound(
                observed(CheckResult::new(name.clone(), Status::of(ok)), low),
                b,
            )
            .note(format!("min over i <= {n} of v_i"));
            let mut out = vec![c];
            if !ok {
                out.push(per_strategy(
                    ctx,
                    &name,
                    b.kind != BoundKind::EpsAlways,
                    |x| *x <= ceiling,
                ));
            }
            out
        }
        BoundKind::GapStrongly => {
            let i0 = prefix.iter().position(|vi| !vi.is_one());
            let c = CheckResult::new(name.clone(), Status::of(i0.is_some())).note(match i0 {
                Some(i) => format!("v_{i} < 1"),
                None => format!("v_i = 1 for every i <= {n}"),
            });
            let mut out = vec![c];
            if i0.is_none() {
                out.push(per_strategy(ctx, &name, true, |x| !x.is_one()));
            }
            out
        }
        BoundKind::NWeakly => vec![weakly_count(ctx, v, &name)],
        _ => Vec::new(),
    }
}

/// Largest depth up to `h` whose full enumeration fits the budget.
fn enumeration_depth(ctx: &Ctx, h: usize) -> Option<usize> {
    let m = &ctx.model.mdp;
    let budget = BigUint::from(ctx.limits.enumeration_budget);
    (1..=h)
        .take_while(|&d| {
            pure_strategy_count(m, &ctx.model.initial, d) * BigUint::from(d + 1) <= budget
        })
        .last()
}

/// The position bounds read per strategy: every pure strategy has a step
/// `i <= n` satisfying `below`, and with `windows` no `n` later consecutive
/// steps without one.
fn per_strategy(
    ctx: &Ctx,
    name: &str,
    windows: bool,
    below: impl Fn(&Rational) -> bool,
) -> CheckResult {
    let m = &ctx.model.mdp;
    let n = m.num_states();
    let name = format!("{name} per-strategy");
    let deepest = if windows { 2 * n } else { n };
    let Some(depth) = enumeration_depth(ctx, deepest).filter(|&d| d >= n) else {
        return CheckResult::new(name, Status::Skipped).note("enumeration budget exceeded");
    };
    let mut bad: Option<(usize, String)> = None;
    let res = enumerate_pure_strategies(
        m,
        &ctx.model.initial,
        depth,
        ctx.limits.enumeration_budget,
        |_, tr| {
            if bad.is_some() {
                return;
            }
            let hits: Vec<bool> = (0..=depth).map(|i| below(&tr.mass_at(i, ctx.t))).collect();
            let first = hits[..=n].iter().any(|&p| p);
            let window = if windows {
                (1..=depth + 1 - n).find(|&s| !hits[s..s + n].iter().any(|&p| p))
            } else {
                None
            };
            if !first {
                bad = Some((0, tr.strategy.clone()));
            } else if let Some(s) = window {
                bad = Some((s, tr.strategy.clone()));
            }
        },
    );
    match res {
        Err(_) => CheckResult::new(name, Status::Skipped).note("enumeration budget exceeded"),
        Ok(count) => match bad {
            None => CheckResult::new(name, Status::Pass)
                .note(format!("{count} pure strategies to depth {depth}")),
            Some((i, s)) => CheckResult::new(name, Status::Fail).at(Some(i)).note(s),
        },
    }
}

/// At most `2^n` steps above the weakly threshold, for every pure strategy
/// within budget and every witness strategy.
fn weakly_count(ctx: &Ctx, v: &Verdict, name: &str) -> CheckResult {
    let m = &ctx.model.mdp;
    let n = m.num_states();
    let cap = 1usize << n.min(usize::BITS as usize - 1);
    let (threshold, strict) = if v.query.win == WinMode::Sure {
        (Rational::one(), false)
    } else {
        match v
            .bounds
            .iter()
            .find(|b| b.kind == BoundKind::EpsWeakly)
            .and_then(|b| b.ceiling())
        {
            Some(c) => (c, true),
            None => {
                return CheckResult::new(name, Status::Skipped).note("weakly threshold unavailable")
            }
        }
    };
    let key = (threshold, strict);
    if !ctx.counted.borrow().contains_key(&key) {
        let outcome = count_positions(ctx, &key.0, strict, cap);
        ctx.counted.borrow_mut().insert(key.clone(), outcome);
    }
    let (worst, note) = ctx.counted.borrow()[&key].clone();
    match worst {
        None => CheckResult::new(name, Status::Pass).note(note),
        Some((count, at, s)) => CheckResult::new(name, Status::Fail)
            .at(at.get(cap).copied())
            .note(format!("{s}: {count} positions > 2^{n}")),
    }
}

fn count_positions(ctx: &Ctx, threshold: &Rational, strict: bool, cap: usize) -> CountOutcome {
    let m = &ctx.model.mdp;
    let d0 = &ctx.model.initial;
    let h = ctx.profile.len() - 1;
    let mut worst: Option<(usize, Vec<usize>, String)> = None;
    let mut look = |tr: &Trace| {
        let (count, at) = count_synchronized_positions(tr, ctx.t, threshold, strict);
        if count > cap && worst.is_none() {
            worst = Some((count, at, tr.strategy.clone()));
        }
    };
    let mut witnesses = vec![StrategySpec::uniform(m)];
    for s in ctx.verdicts.iter().filter_map(|v| v.strategy.as_ref()) {
        if !witnesses.contains(s) {
            witnesses.push(s.clone());
        }
    }
    for s in &witnesses {
        look(&simulate(m, s, d0, h));
    }
    let depth = enumeration_depth(ctx, h);
    let enumerated = depth.and_then(|d| {
        enumerate_pure_strategies(m, d0, d, ctx.limits.enumeration_budget, |_, tr| look(tr))
            .ok()
            .map(|k| (k, d))
    });
    let note = match enumerated {
        Some((k, d)) => format!(
            "{} witnesses, {k} pure strategies to depth {d}",
            witnesses.len()
        ),
        None => format!("{} witnesses, enumeration budget exceeded", witnesses.len()),
    };
    (worst, note)
}

/// States in the almost-sure reach region reach the target within `h` with
/// probability above `1 - 2^-20`; states outside stay at most `1 - a^n`.
fn region_check(ctx: &Ctx, h: usize) -> CheckResult {
    let m = &ctx.model.mdp;
    let n = m.num_states();
    let region = almost_sure_reach_region(m, ctx.t);
    let reach = max_reach_within(m, ctx.t, h);
    let tolerance = pow(&ratio(1, 2), &BigUint::from(20u32));
    let outside = compute_bound_capped(
        BoundKind::Lemma1Reach,
        n,
        m.num_actions(),
        &min_positive_probability(m),
        &Rational::one(),
        None,
        ctx.limits.bound_bits_cap,
    )
    .ok()
    .and_then(|b| b.ceiling());
    let bad = m.states().find(|&q| {
        if region.contains(q) {
            Rational::one() - &reach[q] >= tolerance
        } else {
            outside.as_ref().is_some_and(|c| reach[q] > *c)
        }
    });
    let mut c = CheckResult::new(
        format!("region almost-sure-reach (H = {h})"),
        Status::of(bad.is_none()),
    )
    .at(bad)
    .note(format!("region {:?}", m.set_names(&region)));
    c.epsilon_log10 = Some(log10(&tolerance));
    c
}

fn lasso_check(ctx: &Ctx) -> Result<CheckResult, CliError> {
    let m = &ctx.model.mdp;
    let d0 = &ctx.model.initial;
    let s0 = d0.support();
    let lasso = support_lasso_capped(m, &s0, ctx.limits.max_lasso)?;
    let (l, p) = (lasso.loop_start, lasso.period);
    let trace = simulate(m, &StrategySpec::uniform(m), d0, l + 2 * p);
    let bad = (0..=l + 2 * p).find(|&i| {
        let d = &trace.dists[i];
        &d.support() != lasso.at(i)
            || d.total() != Rational::one()
            || d.total().is_zero()
            || (i <= l + p && &matrix_power_witness(m, i as u64).image(&s0) != lasso.at(i))
    });
    Ok(
        CheckResult::new("support lasso integrity", Status::of(bad.is_none()))
            .at(bad)
            .note(format!("loop start {l}, period {p}")),
    )
}
