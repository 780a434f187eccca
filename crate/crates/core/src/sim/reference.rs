//! Closed-form solutions used as oracles for the base constructions.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::curves;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReferenceError {
    #[error("unknown reference curve '{0}'")]
    Unknown(String),
    #[error("time must be nonnegative")]
    NegativeTime,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceCurve {
    /// `0 -> X` at rate `a`, `X -> 0` at rate `b`: `(a/b)(1 - e^{-bt})`.
    Rational { a: f64, b: f64 },
    /// `0 -> X` (rate 1), `2X -> X` (rate 2): `(1/sqrt 2) tanh(sqrt 2 t)`.
    InvSqrt2,
    /// `k (1 - e^{-t})`.
    XRelax { k: f64 },
    /// `e^{1-e^{-t}} - 1`.
    YTranscendental,
}

impl fmt::Display for ReferenceCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceCurve::Rational { a, b } => write!(f, "rational({a},{b})"),
            ReferenceCurve::InvSqrt2 => write!(f, "inv_sqrt2"),
            ReferenceCurve::XRelax { k } if *k == 1.0 => write!(f, "x_relax"),
            ReferenceCurve::XRelax { k } => write!(f, "x_relax({k})"),
            ReferenceCurve::YTranscendental => write!(f, "y_transcendental"),
        }
    }
}

fn args(s: &str, name: &str) -> Option<Vec<String>> {
    let rest = s.strip_prefix(name)?.trim();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(|p| p.trim().to_string()).collect())
}

fn number(s: &str) -> Result<f64, ReferenceError> {
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| ReferenceError::InvalidParameters(s.into()))?;
        let d: f64 = d.trim().parse().map_err(|_| ReferenceError::InvalidParameters(s.into()))?;
        return Ok(n / d);
    }
    s.parse().map_err(|_| ReferenceError::InvalidParameters(s.into()))
}

impl FromStr for ReferenceCurve {
    type Err = ReferenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "inv_sqrt2" => return Ok(ReferenceCurve::InvSqrt2),
            "x_relax" => return Ok(ReferenceCurve::XRelax { k: 1.0 }),
            "y_transcendental" => return Ok(ReferenceCurve::YTranscendental),
            _ => {}
        }
        if let Some(a) = args(s, "rational") {
            if a.len() != 2 {
                return Err(ReferenceError::InvalidParameters(s.into()));
            }
            let (a, b) = (number(&a[0])?, number(&a[1])?);
            if !(a > 0.0 && b > 0.0) {
                return Err(ReferenceError::InvalidParameters(s.into()));
            }
            return Ok(ReferenceCurve::Rational { a, b });
        }
        if let Some(a) = args(s, "x_relax") {
            if a.len() != 1 {
                return Err(ReferenceError::InvalidParameters(s.into()));
            }
            return Ok(ReferenceCurve::XRelax { k: number(&a[0])? });
        }
        Err(ReferenceError::Unknown(s.to_string()))
    }
}

/// Evaluates a reference curve at `t >= 0`.
pub fn reference_solution<T: Scalar>(curve: &ReferenceCurve, t: T) -> Result<T, ReferenceError> {
    if !(t >= T::zero()) {
        return Err(ReferenceError::NegativeTime);
    }
    let one = T::one();
    Ok(match *curve {
        ReferenceCurve::Rational { a, b } => {
            let (a, b) = (T::lit(a), T::lit(b));
            a / b * (one - (-b * t).exp())
        }
        ReferenceCurve::InvSqrt2 => {
            let s = T::SQRT_2();
            let d = (-(s + s) * t).exp();
            (one - d) / (one + d) / s
        }
        ReferenceCurve::XRelax { k } => T::lit(k) * (one - (-t).exp()),
        ReferenceCurve::YTranscendental => curves::y(t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_values() {
        let r = ReferenceCurve::Rational { a: 1.0, b: 2.0 };
        assert!((reference_solution(&r, 1.0f64).unwrap() - 0.432332).abs() < 1e-6);
        assert!((reference_solution(&ReferenceCurve::InvSqrt2, 1.0f64).unwrap() - 0.6281835).abs() < 1e-7);
        assert_eq!(reference_solution(&ReferenceCurve::XRelax { k: 1.0 }, 0.0f64).unwrap(), 0.0);
        assert_eq!(
            reference_solution(&ReferenceCurve::YTranscendental, 0.0f64).unwrap(),
            0.0
        );
    }

    #[test]
    fn inv_sqrt2_solves_riccati() {
        // x' = 1 - 2x^2
        let h = 1e-5;
        for k in 0..40 {
            let t = 0.1 * k as f64 + 0.05;
            let x = |t| reference_solution(&ReferenceCurve::InvSqrt2, t).unwrap();
            let d = (x(t + h) - x(t - h)) / (2.0 * h);
            assert!((d - (1.0 - 2.0 * x(t) * x(t))).abs() < 1e-8);
        }
    }

    #[test]
    fn names_round_trip() {
        for s in ["rational(3,2)", "inv_sqrt2", "x_relax", "x_relax(0.5)", "y_transcendental"] {
            let c: ReferenceCurve = s.parse().unwrap();
            assert_eq!(c.to_string().parse::<ReferenceCurve>().unwrap(), c);
        }
        assert_eq!(
            "rational(7/1, 5)".parse::<ReferenceCurve>().unwrap(),
            ReferenceCurve::Rational { a: 7.0, b: 5.0 }
        );
        assert!(matches!("sine".parse::<ReferenceCurve>(), Err(ReferenceError::Unknown(_))));
        assert!("rational(1)".parse::<ReferenceCurve>().is_err());
        assert_eq!(
            reference_solution(&ReferenceCurve::InvSqrt2, -1.0f64),
            Err(ReferenceError::NegativeTime)
        );
    }
}
