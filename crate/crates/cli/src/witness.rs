//! Simulation checks of the strategies attached to yes verdicts.

use num_traits::{One, Zero};
use syncmdp::bounds::BoundKind;
use syncmdp::oracle::{simulate, Trace};
use syncmdp::rational::format_rational;
use syncmdp::verdict::{Certificate, LimitRoute};
use syncmdp::{Dist, Mdp, Rational, SupportSet, SyncMode, Verdict, WinMode};

use crate::report::{CheckResult, Status};

fn first_failure(
    range: impl IntoIterator<Item = usize>,
    ok: impl Fn(usize) -> bool,
) -> Option<usize> {
    range.into_iter().find(|&i| !ok(i))
}

fn result(name: String, bad: Option<usize>) -> CheckResult {
    CheckResult::new(name, Status::of(bad.is_none())).at(bad)
}

/// Windows of `len` steps starting at `from` that fit below `h`; reports the
/// start of the first window with no step satisfying `ok`.
fn windows(from: usize, len: usize, h: usize, ok: impl Fn(usize) -> bool) -> Option<usize> {
    (from..)
        .take_while(|s| s + len <= h + 1)
        .find(|&s| !(s..s + len).any(&ok))
}

fn sure_step(v: &Verdict) -> Option<usize> {
    match &v.certificate {
        Some(Certificate::SureEventually { k }) => Some(*k),
        Some(Certificate::LimitSureEventually {
            route: LimitRoute::Sure { k },
            ..
        }) => Some(*k),
        _ => None,
    }
}

/// One check per verdict that carries a strategy.
pub fn checks(
    m: &Mdp,
    d0: &Dist,
    t: &SupportSet,
    verdicts: &[Verdict],
    horizon: usize,
) -> Vec<CheckResult> {
    let n = m.num_states();
    let mut out = Vec::new();
    for v in verdicts {
        let Some(strategy) = &v.strategy else {
            continue;
        };
        let (sync, win) = (v.query.sync, v.query.win);
        let name = format!("witness {win} {sync}");
        let detail = v.detail.as_ref();
        let settle = n + n * n;
        let h = match (win, detail) {
            (WinMode::Bounded, Some(d)) if sync != SyncMode::Eventually => {
                horizon.max(d.switch_point + 3 * settle)
            }
            _ => horizon.max(sure_step(v).unwrap_or(0)),
        };
        let tr: Trace = simulate(m, strategy, d0, h);
        let mass = |i: usize| tr.mass_at(i, t);
        let full = |i: usize| mass(i).is_one();
        let some = |i: usize| !mass(i).is_zero();
        let check = match (win, sync) {
            (_, SyncMode::Eventually) if sure_step(v).is_some() => {
                let k = sure_step(v).unwrap();
                result(name, first_failure([k], full)).note(format!("d_{k}(T) = 1"))
            }
            (WinMode::Sure, SyncMode::Weakly) => match &v.certificate {
                Some(Certificate::SureWeakly { k, r, .. }) => {
                    let (k, r) = (*k, *r);
                    result(name, first_failure((k..=h).step_by(r), full))
                        .note(format!("d_i(T) = 1 at i = {k} + j*{r}"))
                }
                _ => CheckResult::new(name, Status::Skipped).note("no certificate"),
            },
            (WinMode::Sure | WinMode::AlmostSure | WinMode::LimitSure, SyncMode::Always) => {
                result(name, first_failure(0..=h, full)).note(format!("d_i(T) = 1 for i <= {h}"))
            }
            (WinMode::Sure, SyncMode::Strongly) => result(name, first_failure(n..=h, full))
                .note(format!("d_i(T) = 1 for {n} <= i <= {h}")),
            (WinMode::AlmostSure | WinMode::LimitSure, SyncMode::Strongly) => {
                match &v.certificate {
                    Some(Certificate::Strongly { safety_region, .. }) => {
                        let held = |i: usize| tr.mass_at(i, safety_region);
                        let bad = first_failure(1..=h, |i| held(i) >= held(i - 1));
                        let mut c =
                            result(name, bad).note("mass in the safety region never decreases");
                        c.observed = Some(format_rational(&held(h)));
                        c.gap = Some(syncmdp::oracle::gap_f64(&held(h)));
                        c
                    }
                    _ => CheckResult::new(name, Status::Skipped).note("no certificate"),
                }
            }
            (WinMode::Positive | WinMode::Bounded, SyncMode::Eventually) => {
                let closure = detail.map_or(h, |d| d.loop_start + d.period);
                let hit = (0..=closure.min(h)).find(|&i| some(i));
                CheckResult::new(name, Status::of(hit.is_some()))
                    .note(format!("d_i(T) > 0 for some i <= {closure}"))
            }
            (WinMode::Positive, _) => {
                let d = detail.expect("adversarial verdicts carry a detail");
                let (l, p) = (d.loop_start, d.period);
                let bad = match sync {
                    SyncMode::Always => first_failure(0..=h, some),
                    SyncMode::Strongly => first_failure(l..=h, some),
                    _ => windows(l, p, h, some),
                };
                result(name, bad).note("d_i(T) > 0 under the uniform strategy")
            }
            (WinMode::Bounded, _) => {
                let d = detail.expect("adversarial verdicts carry a detail");
                let eps = v
                    .bounds
                    .iter()
                    .find(|b| b.kind == BoundKind::EpsAdversarial)
                    .and_then(|b| b.exact().cloned());
                match eps {
                    None => {
                        CheckResult::new(name, Status::Skipped).note("bound too large to evaluate")
                    }
                    Some(eps) => {
                        let start = d.switch_point + settle;
                        let above = |i: usize| mass(i) >= eps;
                        let bad = match sync {
                            SyncMode::Strongly => first_failure(start..=h, above),
                            SyncMode::Always => {
                                first_failure(0..start, some).or(first_failure(start..=h, above))
                            }
                            _ => windows(start, n, h, above),
                        };
                        let mut c =
                            result(name, bad).note(format!("d_i(T) >= eps from step {start}"));
                        c.epsilon = Some(format_rational(&eps));
                        c.epsilon_log10 = Some(syncmdp::rational::log10(&eps));
                        c
                    }
                }
            }
            _ => CheckResult::new(name, Status::Skipped).note("no simulation check for this mode"),
        };
        out.push(check);
    }
    out
}

/// `d_i(T) ≤ v_i` for every witness trace up to the profile length.
pub fn dominated(
    m: &Mdp,
    d0: &Dist,
    t: &SupportSet,
    verdicts: &[Verdict],
    profile: &[Rational],
) -> CheckResult {
    let h = profile.len() - 1;
    let mut bad = None;
    let mut strategies = 0;
    let mut seen = Vec::new();
    for s in verdicts.iter().filter_map(|v| v.strategy.as_ref()) {
        if seen.contains(&s) {
            continue;
        }
        seen.push(s);
        strategies += 1;
        let tr = simulate(m, s, d0, h);
        if let Some(i) = (0..=h).find(|&i| tr.mass_at(i, t) > profile[i]) {
            bad = Some(bad.map_or(i, |b: usize| b.min(i)));
        }
    }
    result("optimum dominates witnesses".into(), bad)
        .note(format!("{strategies} strategies, H = {h}"))
}
