//! Exact rational helpers on top of `num-rational`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact, always-reduced probability value.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a decimal `"p/q"` or `"p"` string. Signs, spaces and zero
/// denominators are rejected.
pub fn parse_rational(text: &str) -> Option<Rational> {
    fn digits(s: &str) -> Option<BigInt> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    }
    match text.split_once('/') {
        None => digits(text).map(Rational::from_integer),
        Some((p, q)) => {
            let p = digits(p)?;
            let q = digits(q)?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn pow(base: &Rational, exp: &BigUint) -> Rational {
    let mut result = Rational::one();
    let mut square = base.clone();
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            result *= &square;
        }
        if i + 1 < bits {
            square = &square * &square;
        }
    }
    result
}

/// Base-10 logarithm of a positive rational, accurate even when the value
/// is far outside the `f64` range.
pub fn log10(r: &Rational) -> f64 {
    assert!(r.is_positive(), "log10 of non-positive rational");
    log10_big(r.numer().magnitude()) - log10_big(r.denom().magnitude())
}

fn log10_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).log10();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}
