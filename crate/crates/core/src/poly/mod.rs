//! Exact univariate polynomials over integers and rationals, plus real-root isolation.

mod roots;
mod text;

pub use roots::{
    cauchy_bound, count_roots, isolate_positive_roots, isolate_real_roots, refine_root,
    sturm_sequence, Interval, SturmSequence,
};
pub use text::parse_polynomial;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact::denominator_lcm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("interval endpoint {0} is a root")]
    EndpointIsRoot(String),
    #[error("polynomial vanishes at the origin")]
    ZeroAtOrigin,
    #[error("invalid interval: lower bound {lo} is not below upper bound {hi}")]
    InvalidInterval { lo: String, hi: String },
    #[error("refinement width must be positive")]
    NonPositiveWidth,
    #[error("interval isolates {count} roots, expected exactly one")]
    NotIsolating { count: usize },
    #[error("polynomial syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

/// Coefficient ring for [`Poly`].
pub trait Coefficient: Clone + Num + Neg<Output = Self> + FromPrimitive + Debug {}

impl<T: Clone + Num + Neg<Output = T> + FromPrimitive + Debug> Coefficient for T {}

/// Dense univariate polynomial, coefficients stored lowest degree first.
///
/// The leading coefficient is never zero; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

/// Integer-coefficient polynomial.
pub type IntPolynomial = Poly<BigInt>;
/// Rational-coefficient polynomial.
pub type RatPolynomial = Poly<BigRational>;

impl<T: Coefficient> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn evaluate(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * T::from_usize(k).expect("degree fits"))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// `P(-x)`.
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
            .collect();
        Self::new(coeffs)
    }

    /// Nonzero coefficients as `(degree, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &T)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

impl<T: Coefficient + ToPrimitive> Poly<T> {
    /// Horner evaluation in floating point.
    pub fn evaluate_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl<T: Coefficient> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Coefficient> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Coefficient> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Coefficient> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl IntPolynomial {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    /// Sign of `P(x)` as -1, 0 or 1.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        let v = self.evaluate_rational(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn to_rational(&self) -> RatPolynomial {
        Poly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Gcd of the coefficients (nonnegative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides out the content; the sign of the leading coefficient is kept.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Poly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let g = self.to_rational().gcd(&self.derivative().to_rational());
        g.degree() == Some(0)
    }

    /// `P / gcd(P, P')` made primitive, with the sign of the leading coefficient preserved.
    pub fn squarefree_part(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let p = self.to_rational();
        let g = p.gcd(&self.derivative().to_rational());
        let (q, r) = p.div_rem(&g);
        debug_assert!(r.is_zero());
        let mut out = q.to_primitive_integer();
        if out.leading().map(Signed::is_negative) != self.leading().map(Signed::is_negative) {
            out = -&out;
        }
        Ok(out)
    }

    /// `q^n · P(x + p/q)` for `s = p/q` in lowest terms and `n = deg P`.
    ///
    /// The result has integer coefficients and its roots are those of `P` shifted by `-s`.
    pub fn shift_and_scale(&self, s: &BigRational) -> Self {
        let Some(n) = self.degree() else {
            return Self::zero();
        };
        let p = s.numer().clone();
        let q = s.denom().clone();
        // (q x + p)
        let linear = Poly::new(vec![p, q.clone()]);
        let mut acc = Self::zero();
        let mut power = Self::constant(BigInt::one());
        for k in 0..=n {
            let c = &self.coeffs[k];
            if !c.is_zero() {
                let factor = c * num_traits::pow(q.clone(), n - k);
                acc = &acc + &power.scale(&factor);
            }
            power = &power * &linear;
        }
        acc
    }
}

impl RatPolynomial {
    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d_deg = divisor.degree().expect("division by zero polynomial");
        let d_lead = divisor.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        let Some(deg) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if deg < d_deg {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); deg - d_deg + 1];
        for k in (0..=deg - d_deg).rev() {
            let c = &rem[k + d_deg] / &d_lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(d_deg);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(lead) => a.scale(&lead.recip()),
            None => a,
        }
    }

    /// Positive multiple with coprime integer coefficients.
    pub fn to_primitive_integer(&self) -> IntPolynomial {
        let lcm = denominator_lcm(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        Poly::new(ints).primitive_part()
    }
}
