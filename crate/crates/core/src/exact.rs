//! Helpers for exact rational arithmetic.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number (always reduced, positive denominator).
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"`, `"-n"` or `"n/d"`; `None` on malformed input or zero denominator.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Parses an exact rational, falling back to the exact binary value of a decimal literal.
pub fn parse_rational_or_decimal(text: &str) -> Option<Rational> {
    if let Some(r) = parse_rational(text) {
        return Some(r);
    }
    let v: f64 = text.trim().parse().ok()?;
    Rational::from_float(v)
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_positive_integer(r: &Rational) -> bool {
    r.is_integer() && r.is_positive()
}

/// Simplest rational (smallest denominator, then smallest magnitude) in the open interval `(lo, hi)`.
///
/// Walks the Stern–Brocot tree through the continued-fraction expansion of the endpoints.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Option<Rational> {
    if lo >= hi {
        return None;
    }
    if lo.is_negative() && hi.is_positive() {
        return Some(Rational::zero());
    }
    if !hi.is_positive() {
        return simplest_between(&-hi, &-lo).map(|r| -r);
    }
    Some(simplest_nonneg(lo, Some(hi)))
}

// lo >= 0, hi = None means +infinity; interval is open on both sides.
fn simplest_nonneg(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let fl = lo.floor();
    let next = &fl + Rational::one();
    match hi {
        None => return next,
        Some(h) if &next < h => return next,
        _ => {}
    }
    let hi = hi.expect("bounded");
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    // x = fl + 1/y with y in (1/hi_frac, 1/lo_frac)
    let y_lo = hi_frac.recip();
    let y_hi = if lo_frac.is_zero() {
        None
    } else {
        Some(lo_frac.recip())
    };
    let y = simplest_nonneg(&y_lo, y_hi.as_ref());
    fl + y.recip()
}

/// Least common multiple of the denominators of a rational slice.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Bracket for Euler's number: partial sum of `1/k!` and the tail bound `2/(n+1)!`.
pub fn euler_enclosure(terms: u32) -> (Rational, Rational) {
    let mut sum = Rational::zero();
    let mut fact = BigInt::one();
    for k in 0..=terms {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        sum += Rational::new(BigInt::one(), fact.clone());
    }
    let tail = Rational::new(BigInt::from(2), fact * BigInt::from(terms + 1));
    let hi = &sum + tail;
    (sum, hi)
}

/// Rational bracket `[lo, hi]` with `lo² ≤ v_lo`, `hi² ≥ v_hi` and `hi - lo ≤ width` (for nonnegative inputs).
pub fn sqrt_enclosure(v_lo: &Rational, v_hi: &Rational, width: &Rational) -> (Rational, Rational) {
    let lower = sqrt_bound(v_lo, width, false);
    let upper = sqrt_bound(v_hi, width, true);
    (lower, upper)
}

fn sqrt_bound(v: &Rational, width: &Rational, upper: bool) -> Rational {
    let mut lo = Rational::zero();
    let mut hi = if v > &Rational::one() {
        v.clone()
    } else {
        Rational::one()
    };
    let half = ratio(1, 2);
    let tol = width * &half;
    while &hi - &lo > tol {
        let mid = (&lo + &hi) * &half;
        if &mid * &mid <= *v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if upper {
        hi
    } else {
        lo
    }
}

/// Largest power of two not exceeding `|r|`-style precision steps: `2^-bits`.
pub fn pow2_inv(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}
