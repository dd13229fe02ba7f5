//! Closed-form isolation bounds and step counts, evaluated exactly.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Value};
use thiserror::Error;

use crate::limits::Limits;
use crate::mdp::{min_initial_probability, min_positive_probability, Dist, Mdp};
use crate::rational::{format_rational, int, log10, pow, Rational};
use crate::region::almost_sure_reach_region;
use crate::verdict::{Certificate, SyncMode, Verdict, WinMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    EpsEventually,
    EpsWeakly,
    NWeakly,
    EpsAlways,
    EpsStrongly,
    GapStrongly,
    EpsAdversarial,
    NAdversarial,
    Lemma1Reach,
    Lemma2Step,
}

impl BoundKind {
    pub const ALL: [BoundKind; 10] = [
        BoundKind::EpsEventually,
        BoundKind::EpsWeakly,
        BoundKind::NWeakly,
        BoundKind::EpsAlways,
        BoundKind::EpsStrongly,
        BoundKind::GapStrongly,
        BoundKind::EpsAdversarial,
        BoundKind::NAdversarial,
        BoundKind::Lemma1Reach,
        BoundKind::Lemma2Step,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::EpsEventually => "eps_eventually",
            BoundKind::EpsWeakly => "eps_weakly",
            BoundKind::NWeakly => "N_weakly",
            BoundKind::EpsAlways => "eps_always",
            BoundKind::EpsStrongly => "eps_strongly",
            BoundKind::GapStrongly => "gap_strongly",
            BoundKind::EpsAdversarial => "eps_adversarial",
            BoundKind::NAdversarial => "N_adversarial",
            BoundKind::Lemma1Reach => "lemma1_reach",
            BoundKind::Lemma2Step => "lemma2_step",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            BoundKind::EpsEventually => "a0 * a^((n+1)*2^n)",
            BoundKind::EpsWeakly => "a0 * a^((n+2)*4^n) / n^(2^n+1)",
            BoundKind::NWeakly => "2^n",
            BoundKind::EpsAlways => "a0 * a^n / n",
            BoundKind::EpsStrongly => "a0 * a^(2n) / n^2",
            BoundKind::GapStrongly => "(i0 <= n, gap <= n)",
            BoundKind::EpsAdversarial => "a0 * (a/|A|)^(n+n^2)",
            BoundKind::NAdversarial => "n + n^2",
            BoundKind::Lemma1Reach => "a0 * a^n",
            BoundKind::Lemma2Step => "a0 * a^i",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundValue {
    Exact(Rational),
    /// The exact value would exceed the bit-size cap.
    FormulaOnly,
    Count(BigUint),
    /// First position and largest gap between consecutive positions.
    Pair {
        first: usize,
        gap: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundInputs {
    pub n: usize,
    pub a_count: usize,
    pub alpha: Rational,
    pub alpha0: Rational,
    pub i: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCert {
    pub kind: BoundKind,
    pub value: BoundValue,
    pub log10: f64,
    pub inputs: BoundInputs,
}

impl Eq for BoundCert {}

impl BoundCert {
    pub fn exact(&self) -> Option<&Rational> {
        match &self.value {
            BoundValue::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn count(&self) -> Option<&BigUint> {
        match &self.value {
            BoundValue::Count(c) => Some(c),
            _ => None,
        }
    }

    /// `1 − ε` for exact ε kinds.
    pub fn ceiling(&self) -> Option<Rational> {
        self.exact().map(|e| Rational::one() - e)
    }

    pub fn to_json(&self) -> Value {
        let exact = match &self.value {
            BoundValue::Exact(v) => json!(format_rational(v)),
            BoundValue::Count(c) => json!(c.to_string()),
            _ => Value::Null,
        };
        let mut inputs = json!({
            "n": self.inputs.n,
            "actions": self.inputs.a_count,
            "alpha": format_rational(&self.inputs.alpha),
            "alpha0": format_rational(&self.inputs.alpha0),
        });
        if let Some(i) = self.inputs.i {
            inputs["i"] = json!(i);
        }
        let mut out = json!({
            "kind": self.kind.name(),
            "formula": self.kind.formula(),
            "exact": exact,
            "log10": if self.log10.is_finite() { json!(self.log10) } else { Value::Null },
            "inputs": inputs,
        });
        if let BoundValue::Pair { first, gap } = self.value {
            out["pair"] = json!([first, gap]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("{kind}: {reason}")]
    OutOfRange { kind: BoundKind, reason: String },
    #[error("{kind} is not defined for n = 1")]
    SingleState { kind: BoundKind },
}

fn big(v: usize) -> BigUint {
    BigUint::from(v)
}

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

/// Rough bit size of `base^exp`, used only to decide whether to expand.
fn power_bits(base: &Rational, exp: &BigUint) -> Option<u64> {
    if base.is_one() {
        return Some(0);
    }
    let per = base.numer().bits() + base.denom().bits();
    exp.to_u64()?.checked_mul(per)
}

fn log10_big(v: &BigUint) -> f64 {
    log10(&Rational::from_integer(v.clone().into()))
}

/// Evaluates `kind` on the given parameters.
///
/// Values whose estimated bit size exceeds `cap_bits` come back as
/// [`BoundValue::FormulaOnly`] with only the base-10 logarithm.
pub fn compute_bound_capped(
    kind: BoundKind,
    n: usize,
    a_count: usize,
    alpha: &Rational,
    alpha0: &Rational,
    i: Option<usize>,
    cap_bits: u64,
) -> Result<BoundCert, BoundError> {
    let range = |reason: &str| BoundError::OutOfRange {
        kind,
        reason: reason.to_string(),
    };
    if n == 0 {
        return Err(range("n must be at least 1"));
    }
    if a_count == 0 {
        return Err(range("|A| must be at least 1"));
    }
    if !alpha.is_positive() || *alpha > Rational::one() {
        return Err(range("alpha must lie in (0, 1]"));
    }
    if !alpha0.is_positive() || *alpha0 > Rational::one() {
        return Err(range("alpha0 must lie in (0, 1]"));
    }
    if kind == BoundKind::Lemma2Step && i.is_none() {
        return Err(range("lemma2_step needs a step index"));
    }
    if kind == BoundKind::EpsWeakly && n == 1 {
        return Err(BoundError::SingleState { kind });
    }
    let inputs = BoundInputs {
        n,
        a_count,
        alpha: alpha.clone(),
        alpha0: alpha0.clone(),
        i: if kind == BoundKind::Lemma2Step {
            i
        } else {
            None
        },
    };
    let cert = |value: BoundValue, log10: f64| BoundCert {
        kind,
        value,
        log10,
        inputs: inputs.clone(),
    };
    let count = |c: BigUint| {
        let l = log10_big(&c);
        cert(BoundValue::Count(c), l)
    };

    // α0 · base^exp / divisor
    let scaled = |base: &Rational, exp: BigUint, divisor: BigUint| {
        let log = log10(alpha0) + exp.to_f64().unwrap_or(f64::INFINITY) * log10(base)
            - log10_big(&divisor);
        let bits = power_bits(base, &exp).and_then(|b| b.checked_add(divisor.bits()));
        match bits {
            Some(b) if b <= cap_bits => {
                let v = alpha0 * pow(base, &exp) / Rational::from_integer(divisor.into());
                cert(BoundValue::Exact(v), log)
            }
            _ => cert(BoundValue::FormulaOnly, log),
        }
    };

    let nn = big(n);
    Ok(match kind {
        BoundKind::EpsEventually => scaled(alpha, big(n + 1) * pow2(n), BigUint::one()),
        BoundKind::EpsWeakly => {
            let exp = big(n + 2) * (BigUint::one() << (2 * n));
            let div_exp = pow2(n) + BigUint::one();
            match div_exp.to_u32() {
                Some(e) if (e as u64) * nn.bits() <= cap_bits => scaled(alpha, exp, nn.pow(e)),
                _ => {
                    let log = log10(alpha0) + exp.to_f64().unwrap_or(f64::INFINITY) * log10(alpha)
                        - div_exp.to_f64().unwrap_or(f64::INFINITY) * (n as f64).log10();
                    cert(BoundValue::FormulaOnly, log)
                }
            }
        }
        BoundKind::NWeakly => count(pow2(n)),
        BoundKind::EpsAlways => scaled(alpha, nn.clone(), nn),
        BoundKind::EpsStrongly => scaled(alpha, big(2 * n), big(n * n)),
        BoundKind::GapStrongly => cert(BoundValue::Pair { first: n, gap: n }, f64::NAN),
        BoundKind::EpsAdversarial => {
            let base = alpha / int(a_count as i64);
            scaled(&base, big(n + n * n), BigUint::one())
        }
        BoundKind::NAdversarial => count(big(n + n * n)),
        BoundKind::Lemma1Reach => scaled(alpha, nn, BigUint::one()),
        BoundKind::Lemma2Step => scaled(alpha, big(i.unwrap()), BigUint::one()),
    })
}

/// [`compute_bound_capped`] with the default bit-size cap.
pub fn compute_bound(
    kind: BoundKind,
    n: usize,
    a_count: usize,
    alpha: &Rational,
    alpha0: &Rational,
    i: Option<usize>,
) -> Result<BoundCert, BoundError> {
    compute_bound_capped(
        kind,
        n,
        a_count,
        alpha,
        alpha0,
        i,
        Limits::default().bound_bits_cap,
    )
}

/// Attaches the bounds that match a verdict.
///
/// `d0` must have the query's initial support; otherwise the verdict is
/// returned unchanged.
pub fn attach_bounds(mut v: Verdict, m: &Mdp, d0: &Dist, limits: &Limits) -> Verdict {
    if d0.support() != v.query.initial {
        return v;
    }
    let n = m.num_states();
    let a_count = m.num_actions();
    let alpha = min_positive_probability(m);
    let alpha0 = min_initial_probability(d0, None).expect("nonempty support");
    let mk = |kind: BoundKind, alpha0: &Rational, i: Option<usize>| {
        compute_bound_capped(kind, n, a_count, &alpha, alpha0, i, limits.bound_bits_cap).ok()
    };
    let outside_reach = || {
        !v.query
            .initial
            .is_subset(&almost_sure_reach_region(m, &v.query.target))
    };
    let mut out: Vec<Option<BoundCert>> = Vec::new();
    use SyncMode::*;
    use WinMode::*;
    match (v.query.win, v.query.sync, v.answer) {
        (Sure, Eventually, false) => out.push(mk(BoundKind::Lemma2Step, &alpha0, Some(n))),
        (Sure, Weakly, false) => out.push(mk(BoundKind::NWeakly, &alpha0, None)),
        (AlmostSure, Eventually, false) => {
            out.push(mk(BoundKind::Lemma2Step, &alpha0, Some(n)));
            out.push(mk(BoundKind::EpsWeakly, &alpha0, None));
            out.push(mk(BoundKind::NWeakly, &alpha0, None));
        }
        (LimitSure, Eventually, false) => {
            let refined = match &v.certificate {
                Some(Certificate::LimitSureEventually { failing_states, .. }) => {
                    failing_states.iter().map(|q| d0.mass(q)).max()
                }
                _ => None,
            };
            out.push(mk(
                BoundKind::EpsEventually,
                refined.as_ref().unwrap_or(&alpha0),
                None,
            ));
            if outside_reach() {
                out.push(mk(BoundKind::Lemma1Reach, &alpha0, None));
            }
        }
        (AlmostSure | LimitSure, Weakly, false) => {
            out.push(mk(BoundKind::EpsWeakly, &alpha0, None));
            out.push(mk(BoundKind::NWeakly, &alpha0, None));
        }
        (Sure | AlmostSure | LimitSure, Always, false) => {
            out.push(mk(BoundKind::EpsAlways, &alpha0, None))
        }
        (Sure, Strongly, false) => out.push(mk(BoundKind::GapStrongly, &alpha0, None)),
        (AlmostSure | LimitSure, Strongly, false) => {
            out.push(mk(BoundKind::EpsStrongly, &alpha0, None));
            out.push(mk(BoundKind::GapStrongly, &alpha0, None));
            if outside_reach() {
                out.push(mk(BoundKind::Lemma1Reach, &alpha0, None));
            }
        }
        (Bounded, _, true) => {
            out.push(mk(BoundKind::EpsAdversarial, &alpha0, None));
            out.push(mk(BoundKind::NAdversarial, &alpha0, None));
        }
        _ => {}
    }
    v.bounds.extend(out.into_iter().flatten());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn half() -> Rational {
        ratio(1, 2)
    }

    fn value(kind: BoundKind, n: usize, a: usize, alpha: Rational, alpha0: Rational) -> Rational {
        compute_bound(kind, n, a, &alpha, &alpha0, None)
            .unwrap()
            .exact()
            .unwrap()
            .clone()
    }

    #[test]
    fn worked_values() {
        assert_eq!(
            value(BoundKind::EpsAlways, 4, 2, half(), int(1)),
            ratio(1, 64)
        );
        let e = value(BoundKind::EpsEventually, 4, 2, half(), int(1));
        assert_eq!(e, pow(&half(), &big(80)));
        let e = value(BoundKind::EpsEventually, 5, 1, half(), half());
        assert_eq!(e, pow(&half(), &big(193)));
        let e = value(BoundKind::EpsAdversarial, 3, 2, half(), int(1));
        assert_eq!(e, pow(&ratio(1, 4), &big(12)));
        let b = compute_bound(BoundKind::Lemma2Step, 4, 2, &half(), &int(1), Some(0)).unwrap();
        assert_eq!(b.ceiling().unwrap(), int(0));
        let w = value(BoundKind::EpsWeakly, 2, 1, half(), int(1));
        assert_eq!(w, pow(&half(), &big(64)) / int(32));
    }

    #[test]
    fn counts_and_pairs() {
        let c = compute_bound(BoundKind::NWeakly, 5, 1, &half(), &int(1), None).unwrap();
        assert_eq!(c.count().unwrap(), &big(32));
        let c = compute_bound(BoundKind::NAdversarial, 3, 1, &half(), &int(1), None).unwrap();
        assert_eq!(c.count().unwrap(), &big(12));
        let g = compute_bound(BoundKind::GapStrongly, 3, 1, &half(), &int(1), None).unwrap();
        assert_eq!(g.value, BoundValue::Pair { first: 3, gap: 3 });
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(compute_bound(BoundKind::EpsAlways, 0, 1, &half(), &int(1), None).is_err());
        assert!(compute_bound(BoundKind::EpsAlways, 2, 1, &int(0), &int(1), None).is_err());
        assert!(compute_bound(BoundKind::EpsAlways, 2, 1, &half(), &int(2), None).is_err());
        assert!(compute_bound(BoundKind::Lemma2Step, 2, 1, &half(), &int(1), None).is_err());
        assert_eq!(
            compute_bound(BoundKind::EpsWeakly, 1, 1, &half(), &int(1), None),
            Err(BoundError::SingleState {
                kind: BoundKind::EpsWeakly
            })
        );
    }

    #[test]
    fn formula_only_past_cap() {
        let b = compute_bound_capped(BoundKind::EpsWeakly, 12, 2, &half(), &int(1), None, 1 << 16)
            .unwrap();
        assert_eq!(b.value, BoundValue::FormulaOnly);
        let expected = -(14.0 * 4f64.powi(12)) * 2f64.log10() - 4097.0 * 12f64.log10();
        assert!((b.log10 - expected).abs() < 1e-6 * expected.abs());
        let small = compute_bound(BoundKind::EpsWeakly, 3, 2, &half(), &int(1), None).unwrap();
        let exact_log = log10(small.exact().unwrap());
        assert!((small.log10 - exact_log).abs() < 1e-9);
    }

    #[test]
    fn deterministic_alpha_one() {
        assert_eq!(
            value(BoundKind::EpsEventually, 6, 1, int(1), ratio(1, 3)),
            ratio(1, 3)
        );
    }
}
