//! What a program claims its designated species converges to, with exact
//! rational enclosures of arbitrary precision.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::CompileError;
use crate::exact::{euler_enclosure, format_rational, pow2_inv, ratio, sqrt_enclosure, to_f64};
use crate::poly::{refine_root, IntPolynomial, Interval};

const MAX_BITS: u32 = 512;

/// Magnitude `|α|` computed by a program.
#[derive(Debug, Clone, PartialEq)]
pub enum ClaimedLimit {
    Rational(BigRational),
    /// The unique root of `poly` in `interval`.
    PolyRoot { poly: IntPolynomial, interval: Interval },
    Sum(Box<ClaimedLimit>, Box<ClaimedLimit>),
    Product(Box<ClaimedLimit>, Box<ClaimedLimit>),
    Reciprocal(Box<ClaimedLimit>),
    /// `a - b` with `a >= b`.
    Difference(Box<ClaimedLimit>, Box<ClaimedLimit>),
    /// `(e - 1 + sqrt((e-1)^2 + 4)) / 2`.
    Transcendental,
}

/// Closed rational bracket `[lo, hi]`.
pub type Enclosure = (BigRational, BigRational);

fn transcendental_enclosure(bits: u32) -> Enclosure {
    let target = pow2_inv(bits + 3);
    let mut terms = 4;
    let (elo, ehi) = loop {
        let (lo, hi) = euler_enclosure(terms);
        if &hi - &lo <= target {
            break (lo, hi);
        }
        terms += 4;
    };
    let one = BigRational::one();
    let (mlo, mhi) = (&elo - &one, &ehi - &one);
    let four = BigRational::from_integer(4.into());
    let (slo, shi) = sqrt_enclosure(&(&mlo * &mlo + &four), &(&mhi * &mhi + &four), &target);
    let half = ratio(1, 2);
    ((mlo + slo) * &half, (mhi + shi) * half)
}

impl ClaimedLimit {
    pub fn zero() -> Self {
        ClaimedLimit::Rational(BigRational::zero())
    }

    /// Bracket whose width shrinks as `bits` grows; not necessarily below `2^-bits`
    /// for compound values.
    pub fn enclosure(&self, bits: u32) -> Result<Enclosure, CompileError> {
        let bits = bits.min(MAX_BITS);
        Ok(match self {
            ClaimedLimit::Rational(r) => (r.clone(), r.clone()),
            ClaimedLimit::PolyRoot { poly, interval } => {
                if poly.sign_at(interval.hi()) == 0 {
                    let hi = interval.hi().clone();
                    return Ok((hi.clone(), hi));
                }
                let iv = refine_root(poly, interval, &pow2_inv(bits))?;
                (iv.lo().clone().max(BigRational::zero()), iv.hi().clone())
            }
            ClaimedLimit::Sum(a, b) => {
                let (alo, ahi) = a.enclosure(bits + 1)?;
                let (blo, bhi) = b.enclosure(bits + 1)?;
                (alo + blo, ahi + bhi)
            }
            ClaimedLimit::Difference(a, b) => {
                let (alo, ahi) = a.enclosure(bits + 1)?;
                let (blo, bhi) = b.enclosure(bits + 1)?;
                ((alo - bhi).max(BigRational::zero()), (ahi - blo).max(BigRational::zero()))
            }
            ClaimedLimit::Product(a, b) => {
                let (alo, ahi) = a.enclosure(bits + 2)?;
                let (blo, bhi) = b.enclosure(bits + 2)?;
                let c = [&alo * &blo, &alo * &bhi, &ahi * &blo, &ahi * &bhi];
                let lo = c.iter().min().unwrap().clone();
                let hi = c.iter().max().unwrap().clone();
                (lo, hi)
            }
            ClaimedLimit::Reciprocal(a) => {
                let mut b = bits + 2;
                loop {
                    let (lo, hi) = a.enclosure(b)?;
                    if lo.is_positive() {
                        break (hi.recip(), lo.recip());
                    }
                    if b >= MAX_BITS {
                        return Err(CompileError::DivisionByZero);
                    }
                    b = (b * 2).min(MAX_BITS);
                }
            }
            ClaimedLimit::Transcendental => transcendental_enclosure(bits),
        })
    }

    /// Bracket of width at most `width`.
    pub fn enclosure_within(&self, width: &BigRational) -> Result<Enclosure, CompileError> {
        let mut bits = 16;
        loop {
            let (lo, hi) = self.enclosure(bits)?;
            if &(&hi - &lo) <= width {
                return Ok((lo, hi));
            }
            if bits >= MAX_BITS {
                return Err(CompileError::PrecisionExhausted);
            }
            bits = (bits * 2).min(MAX_BITS);
        }
    }

    /// Double-precision value, from a bracket of width `2^-60`.
    pub fn value_f64(&self) -> f64 {
        match self.enclosure_within(&pow2_inv(60)) {
            Ok((lo, hi)) => to_f64(&((lo + hi) * ratio(1, 2))),
            Err(_) => f64::NAN,
        }
    }

    /// Exact value when it is rational by construction.
    pub fn exact_value(&self) -> Option<BigRational> {
        match self {
            ClaimedLimit::Rational(r) => Some(r.clone()),
            ClaimedLimit::PolyRoot { poly, interval } => {
                (poly.sign_at(interval.hi()) == 0).then(|| interval.hi().clone())
            }
            ClaimedLimit::Sum(a, b) => Some(a.exact_value()? + b.exact_value()?),
            ClaimedLimit::Difference(a, b) => Some(a.exact_value()? - b.exact_value()?),
            ClaimedLimit::Product(a, b) => Some(a.exact_value()? * b.exact_value()?),
            ClaimedLimit::Reciprocal(a) => {
                let v = a.exact_value()?;
                (!v.is_zero()).then(|| v.recip())
            }
            ClaimedLimit::Transcendental => None,
        }
    }

    /// True when the value is known to be zero.
    pub fn is_known_zero(&self) -> bool {
        match self {
            ClaimedLimit::Product(a, b) => a.is_known_zero() || b.is_known_zero(),
            ClaimedLimit::Sum(a, b) => a.is_known_zero() && b.is_known_zero(),
            ClaimedLimit::Difference(a, b) if a == b => true,
            _ => self.exact_value().is_some_and(|v| v.is_zero()),
        }
    }

    /// Exact comparison: structural identity, exact rational values, then
    /// bracket refinement. Fails when brackets still overlap at full precision.
    pub fn compare(&self, other: &Self) -> Result<Ordering, CompileError> {
        if self == other {
            return Ok(Ordering::Equal);
        }
        if let (Some(a), Some(b)) = (self.exact_value(), other.exact_value()) {
            return Ok(a.cmp(&b));
        }
        // a rational against a root of a polynomial it satisfies
        for (x, y) in [(self, other), (other, self)] {
            if let (Some(r), ClaimedLimit::PolyRoot { poly, interval }) = (x.exact_value(), y) {
                if interval.contains(&r) && poly.sign_at(&r) == 0 {
                    return Ok(Ordering::Equal);
                }
            }
        }
        let mut bits = 16;
        loop {
            let (alo, ahi) = self.enclosure(bits)?;
            let (blo, bhi) = other.enclosure(bits)?;
            if ahi < blo {
                return Ok(Ordering::Less);
            }
            if alo > bhi {
                return Ok(Ordering::Greater);
            }
            if bits >= MAX_BITS {
                return Err(CompileError::OrderingUndecidable {
                    left: self.to_string(),
                    right: other.to_string(),
                });
            }
            bits = (bits * 2).min(MAX_BITS);
        }
    }
}

impl fmt::Display for ClaimedLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimedLimit::Rational(r) => write!(f, "{}", format_rational(r)),
            ClaimedLimit::PolyRoot { poly, interval } => write!(f, "root({poly}, {interval})"),
            ClaimedLimit::Sum(a, b) => write!(f, "({a} + {b})"),
            ClaimedLimit::Difference(a, b) => write!(f, "({a} - {b})"),
            ClaimedLimit::Product(a, b) => write!(f, "({a} * {b})"),
            ClaimedLimit::Reciprocal(a) => write!(f, "1/{a}"),
            ClaimedLimit::Transcendental => write!(f, "(e - 1 + sqrt((e - 1)^2 + 4))/2"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn sqrt2() -> ClaimedLimit {
        ClaimedLimit::PolyRoot {
            poly: IntPolynomial::from_i64(&[-2, 0, 1]),
            interval: Interval::new(int(1), int(2)).unwrap(),
        }
    }

    #[test]
    fn sqrt2_brackets() {
        let (lo, hi) = sqrt2().enclosure_within(&pow2_inv(40)).unwrap();
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!((sqrt2().value_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn compound_values() {
        let one = ClaimedLimit::Rational(int(1));
        let s = sqrt2();
        let v = ClaimedLimit::Product(
            Box::new(ClaimedLimit::Sum(Box::new(one.clone()), Box::new(ClaimedLimit::Reciprocal(Box::new(s.clone()))))),
            Box::new(s.clone()),
        );
        assert!((v.value_f64() - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        let d = ClaimedLimit::Difference(Box::new(s.clone()), Box::new(one.clone()));
        assert!((d.value_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(d.exact_value(), None);
        assert_eq!(v.compare(&ClaimedLimit::Rational(int(2))).unwrap(), Ordering::Greater);
    }

    #[test]
    fn transcendental_value() {
        let e = std::f64::consts::E;
        let want = (e - 1.0 + ((e - 1.0).powi(2) + 4.0).sqrt()) / 2.0;
        let (lo, hi) = ClaimedLimit::Transcendental.enclosure_within(&pow2_inv(50)).unwrap();
        assert!(to_f64(&lo) <= want + 1e-15 && to_f64(&hi) >= want - 1e-15);
        assert!((ClaimedLimit::Transcendental.value_f64() - want).abs() < 1e-15);
    }

    #[test]
    fn comparisons() {
        let half = ClaimedLimit::Rational(ratio(1, 2));
        assert_eq!(half.compare(&ClaimedLimit::Rational(ratio(2, 4))).unwrap(), Ordering::Equal);
        assert_eq!(sqrt2().compare(&sqrt2()).unwrap(), Ordering::Equal);
        assert_eq!(sqrt2().compare(&half).unwrap(), Ordering::Greater);
        let two_root = ClaimedLimit::PolyRoot {
            poly: IntPolynomial::from_i64(&[-2, 1]),
            interval: Interval::new(int(1), int(3)).unwrap(),
        };
        assert_eq!(two_root.exact_value(), None);
        assert_eq!(ClaimedLimit::Rational(int(2)).compare(&two_root).unwrap(), Ordering::Equal);
        // sqrt2 * sqrt2 == 2 is not decidable from brackets
        let sq = ClaimedLimit::Product(Box::new(sqrt2()), Box::new(sqrt2()));
        assert!(matches!(
            sq.compare(&ClaimedLimit::Rational(int(2))),
            Err(CompileError::OrderingUndecidable { .. })
        ));
    }

    #[test]
    fn display() {
        let d = ClaimedLimit::Difference(Box::new(sqrt2()), Box::new(ClaimedLimit::Rational(int(1))));
        assert_eq!(d.to_string(), "(root(x^2 - 2, (1, 2]) - 1)");
    }
}
