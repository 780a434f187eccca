//! Base constructions: rationals, smallest positive roots, algebraic numbers
//! and the transcendental fixture.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{add, ClaimedLimit, CompileError, Sign, SignedProgram};
use crate::exact::{int, simplest_between};
use crate::model::{Crn, Reaction, Species};
use crate::poly::{count_roots, isolate_positive_roots, refine_root, IntPolynomial, Interval};

/// `0 ->{|a|} X`, `X ->{b} 0`, so that `x(t) = (|a|/b)(1 - e^{-bt})`. `a = 0`
/// gives the network with no reactions.
pub fn compile_rational(a: &BigInt, b: &BigInt) -> Result<SignedProgram, CompileError> {
    if !b.is_positive() {
        return Err(CompileError::NonPositiveDenominator);
    }
    let mag = a.abs();
    let mut builder = Crn::builder().species("X")?;
    let sign = match a.sign() {
        num_bigint::Sign::Minus => Sign::Negative,
        num_bigint::Sign::NoSign => Sign::Zero,
        num_bigint::Sign::Plus => Sign::Positive,
    };
    if sign != Sign::Zero {
        builder = builder
            .reaction(&[], &[("X", 1)], BigRational::from_integer(mag.clone()))?
            .reaction(&[("X", 1)], &[], BigRational::from_integer(b.clone()))?;
    }
    let limit = ClaimedLimit::Rational(BigRational::new(mag, b.clone()));
    SignedProgram::from_parts(builder.build()?, 0, sign, limit, 1)
}

/// [`compile_rational`] for a rational value in lowest terms.
pub fn compile_rational_value(r: &BigRational) -> Result<SignedProgram, CompileError> {
    compile_rational(r.numer(), r.denom())
}

/// Single-species network with `x' = p(x)` (sign-normalized so `p(0) > 0`),
/// converging from 0 to the smallest positive root.
pub fn compile_poly_root(p: &IntPolynomial) -> Result<SignedProgram, CompileError> {
    if p.is_zero() {
        return Err(CompileError::Poly(crate::poly::PolyError::ZeroPolynomial));
    }
    if p.coeff(0).is_zero() {
        return Err(CompileError::Poly(crate::poly::PolyError::ZeroAtOrigin));
    }
    if !p.is_squarefree() {
        return Err(CompileError::Poly(crate::poly::PolyError::NotSquarefree));
    }
    let p = if p.coeff(0).is_negative() { -p } else { p.clone() };
    let roots = isolate_positive_roots(&p)?;
    let first = roots.into_iter().next().ok_or(CompileError::NoPositiveRoot)?;
    let mut reactions = Vec::new();
    for (k, c) in p.terms() {
        let k = u32::try_from(k).map_err(|_| CompileError::DegreeTooLarge)?;
        let (products, rate) = if c.is_positive() {
            (k + 1, c.clone())
        } else {
            (k - 1, -c)
        };
        reactions.push(Reaction::new(vec![k], vec![products], BigRational::from_integer(rate))?);
    }
    let crn = Crn::new(vec![Species::new("X")?], reactions)?;
    let limit = ClaimedLimit::PolyRoot {
        poly: p,
        interval: first,
    };
    SignedProgram::from_parts(crn, 0, Sign::Positive, limit, 1)
}

/// Program for the unique root of `p` inside `target`.
///
/// Non-smallest positive roots are reached by shifting past a rational `r`
/// between the root and its predecessor and adding `r` back; negative roots
/// compile their magnitude from `p(-x)` with sign `-1`.
pub fn compile_algebraic(p: &IntPolynomial, target: &Interval) -> Result<SignedProgram, CompileError> {
    let s = p.squarefree_part()?;
    if s.degree() == Some(0) {
        return Err(CompileError::RootCount(0));
    }
    if target.contains(&BigRational::zero()) {
        return Err(CompileError::TargetContainsZero);
    }
    let count = count_roots(&s, target)?;
    if count != 1 {
        return Err(CompileError::RootCount(count));
    }
    let (mut q, iv, sign) = if target.hi().is_negative() {
        (s.reflect(), target.negated(), Sign::Negative)
    } else {
        (s, target.clone(), Sign::Positive)
    };
    // drop the root at 0; squarefree means at most one factor of x
    if q.coeff(0).is_zero() {
        q = IntPolynomial::new(q.coeffs()[1..].to_vec());
    }
    let below = if iv.lo().is_positive() {
        count_roots(&q, &Interval::new(BigRational::zero(), iv.lo().clone())?)?
    } else {
        0
    };
    let mut program = if below == 0 {
        compile_poly_root(&q)?
    } else {
        let roots = isolate_positive_roots(&q)?;
        let (mut beta, mut alpha) = (roots[below - 1].clone(), roots[below].clone());
        while beta.hi() >= alpha.lo() {
            beta = refine_root(&q, &beta, &(beta.width() / int(2)))?;
            alpha = refine_root(&q, &alpha, &(alpha.width() / int(2)))?;
        }
        let r = simplest_between(beta.hi(), alpha.lo()).expect("nonempty gap");
        let shifted = q.shift_and_scale(&r);
        let rest = compile_poly_root(&shifted)?;
        add(&compile_rational_value(&r)?, &rest)?
    };
    program.set_sign(sign);
    Ok(program)
}

/// Three-species network whose `U` converges to `(e - 1 + sqrt((e-1)^2 + 4)) / 2`.
pub fn transcendental_construction() -> SignedProgram {
    let one = || BigRational::one();
    let crn = Crn::builder()
        .species("X")
        .and_then(|b| b.species("U"))
        .and_then(|b| b.species("V"))
        .and_then(|b| b.reaction(&[], &[("X", 1)], one()))
        .and_then(|b| b.reaction(&[("X", 1)], &[], one()))
        .and_then(|b| b.reaction(&[("U", 1)], &[("U", 2)], one()))
        .and_then(|b| b.reaction(&[], &[("U", 1)], one()))
        .and_then(|b| b.reaction(&[("X", 1), ("U", 1)], &[("X", 1)], one()))
        .and_then(|b| b.reaction(&[("V", 1)], &[("V", 2)], one()))
        .and_then(|b| b.reaction(&[("X", 1)], &[("X", 1), ("V", 1)], one()))
        .and_then(|b| b.reaction(&[("X", 1), ("V", 1)], &[("X", 1)], one()))
        .and_then(|b| b.reaction(&[("U", 1), ("V", 1)], &[], one()))
        .and_then(|b| b.build())
        .expect("fixed construction");
    SignedProgram::from_parts(crn, 1, Sign::Positive, ClaimedLimit::Transcendental, 1)
        .expect("fixed construction")
}
