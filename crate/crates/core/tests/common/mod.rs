#![allow(dead_code)]

use crnreal::compiler::{
    add, compile_expression, compile_poly_root, compile_rational, multiply, parse_expression, reciprocal,
    speed_up, subtract_stage, transcendental_construction,
};
use crnreal::exact::{int, ratio};
use crnreal::poly::IntPolynomial;
use crnreal::sim::integrate_from_zero;
use crnreal::stability::{find_fixed_point, DEFAULT_MARGIN};
use crnreal::{Rational, SignedProgram};
use num_traits::Zero;

/// Test seed, overridable with `CRNREALC_SEED`.
pub fn seed() -> u64 {
    std::env::var("CRNREALC_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x5eed_2024)
}

pub fn rational(a: i64, b: i64) -> SignedProgram {
    compile_rational(&a.into(), &b.into()).unwrap()
}

pub fn expr(s: &str) -> SignedProgram {
    compile_expression(&parse_expression(s).unwrap()).unwrap()
}

pub fn poly_root(coeffs: &[i64]) -> SignedProgram {
    compile_poly_root(&IntPolynomial::from_i64(coeffs)).unwrap()
}

/// Every construction the compiler can emit, by name.
pub fn catalog() -> Vec<(&'static str, SignedProgram)> {
    let sqrt2 = poly_root(&[2, 0, -1]);
    let half = rational(1, 2);
    vec![
        ("rational 1/2", half.clone()),
        ("rational 3/2", rational(3, 2)),
        ("rational 7/5", rational(7, 5)),
        ("zero", rational(0, 1)),
        ("sqrt 2", sqrt2.clone()),
        ("1/sqrt 2", poly_root(&[1, 0, -2])),
        ("cube root 2", poly_root(&[2, 0, 0, -1])),
        ("add", add(&sqrt2, &half).unwrap()),
        ("multiply", multiply(&sqrt2, &half).unwrap()),
        ("reciprocal", reciprocal(&sqrt2).unwrap()),
        ("subtract stage", subtract_stage(&sqrt2, &rational(1, 1)).unwrap()),
        ("sqrt 2 - 1", expr("sqrt(2) - 1")),
        ("(1 + 1/sqrt 2) sqrt 2", expr("(1 + 1/sqrt(2)) * sqrt(2)")),
        ("shifted root 2", expr("root(x^2 - 3*x + 2, 3/2, 5/2)")),
        ("sped sqrt 2", speed_up(&sqrt2, 3).unwrap()),
        ("transcendental", transcendental_construction()),
    ]
}

/// Simulate to t = 50 and polish with Newton.
pub fn reachable_fixed_point(p: &SignedProgram) -> Vec<f64> {
    let traj = integrate_from_zero(p.crn(), 50.0f64).unwrap();
    find_fixed_point(p.crn(), traj.final_state(), 1e-12).unwrap()
}

pub fn margin() -> f64 {
    DEFAULT_MARGIN
}

/// Exact bisection for a sign change of `p` on `[lo, hi]`, to width `width`.
pub fn bisect(p: &[i64], lo: Rational, hi: Rational, width: &Rational) -> (Rational, Rational) {
    let eval = |x: &Rational| {
        p.iter()
            .rev()
            .fold(Rational::zero(), |acc, &c| acc * x + int(c))
    };
    let (mut lo, mut hi) = (lo, hi);
    let slo = eval(&lo) > Rational::zero();
    assert_ne!(slo, eval(&hi) > Rational::zero(), "no sign change");
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) * ratio(1, 2);
        let v = eval(&mid);
        if v.is_zero() {
            return (mid.clone(), mid);
        }
        if (v > Rational::zero()) == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

pub fn to_f64(r: &Rational) -> f64 {
    crnreal::exact::to_f64(r)
}

/// Pairs two spectra up greedily; returns the largest distance or `None` on a size mismatch.
pub fn spectrum_distance(a: &[num_complex::Complex<f64>], b: &[num_complex::Complex<f64>]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut rest: Vec<_> = b.to_vec();
    let mut worst = 0.0f64;
    for x in a {
        let (i, d) = rest
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())?;
        worst = worst.max(d);
        rest.swap_remove(i);
    }
    Some(worst)
}
