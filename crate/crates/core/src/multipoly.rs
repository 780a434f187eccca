//! Sparse multivariate polynomials with rational coefficients.
//!
//! Used for the symbolic mass-action vector field and its Jacobian.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::format_rational;
use crate::poly::RatPolynomial;
use crate::scalar::Scalar;

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    /// The variable with index `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self::monomial(nvars, exps, BigRational::one())
    }

    pub fn monomial(nvars: usize, exps: Monomial, c: BigRational) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Adds `c · y^exps` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, exps: Monomial, c: BigRational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut d = m.clone();
            d[i] -= 1;
            out.add_term(d, c * BigRational::from_integer(m[i].into()));
        }
        out
    }

    pub fn evaluate<T: Scalar>(&self, point: &[T]) -> T {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut term = T::from_rational(c);
            for (y, &e) in point.iter().zip(m) {
                if e > 0 {
                    term = term * y.powi(e as i32);
                }
            }
            acc = acc + term;
        }
        acc
    }

    pub fn evaluate_exact(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (y, &e) in point.iter().zip(m) {
                if e > 0 {
                    term *= num_traits::pow(y.clone(), e as usize);
                }
            }
            acc += term;
        }
        acc
    }

    /// Variables that occur with a positive exponent in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m[i] > 0))
            .collect()
    }

    /// `true` when every negative term contains variable `i`, i.e. the
    /// polynomial has the shape `q(y) - y_i·r(y)` with `q`, `r` nonnegative.
    pub fn is_kinetic_in(&self, i: usize) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| !c.is_negative() || m[i] > 0)
    }

    /// Univariate view when only variable `i` occurs.
    pub fn to_univariate(&self, i: usize) -> Option<RatPolynomial> {
        let mut coeffs: Vec<BigRational> = Vec::new();
        for (m, c) in &self.terms {
            if m.iter().enumerate().any(|(j, &e)| j != i && e > 0) {
                return None;
            }
            let k = m[i] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigRational::zero());
            }
            coeffs[k] += c;
        }
        Some(RatPolynomial::new(coeffs))
    }

    /// Human-readable form using the given variable names, highest-degree terms first.
    pub fn format_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (j, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[j].to_string()),
                    _ => factors.push(format!("{}^{}", names[j], e)),
                }
            }
            if factors.is_empty() {
                out.push_str(&format_rational(&mag));
            } else {
                if !mag.is_one() {
                    let _ = write!(out, "{}*", format_rational(&mag));
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn arithmetic_and_derivatives() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let one = MultiPoly::constant(2, int(1));
        // 1 - x*y
        let f = one.sub(&x.mul(&y));
        assert_eq!(f.partial(1), x.scale(&int(-1)));
        assert_eq!(f.partial(0), y.scale(&int(-1)));
        assert_eq!(f.evaluate(&[2.0f64, 0.25]), 0.5);
        assert_eq!(f.evaluate_exact(&[int(2), ratio(1, 4)]), ratio(1, 2));
        assert!(f.is_kinetic_in(1));
        assert!(f.is_kinetic_in(0));
        assert!(!x.sub(&y).is_kinetic_in(0));
        assert!(f.sub(&f).is_zero());
        assert_eq!(f.format_with(&["x", "y"]), "-x*y + 1");
        assert_eq!(f.support(), vec![0, 1]);
    }

    #[test]
    fn univariate_view() {
        let x = MultiPoly::var(1, 0);
        let f = MultiPoly::constant(1, int(2)).sub(&x.mul(&x));
        assert_eq!(f.to_univariate(0), Some(RatPolynomial::new(vec![int(2), int(0), int(-1)])));
        let g = MultiPoly::var(2, 1);
        assert_eq!(g.to_univariate(0), None);
    }
}
