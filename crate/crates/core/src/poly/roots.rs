//! Sturm sequences and exact real-root isolation by bisection.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{IntPolynomial, PolyError};
use crate::exact::{format_rational, ratio};

/// Half-open rational interval `(lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self, PolyError> {
        if lo >= hi {
            return Err(PolyError::InvalidInterval {
                lo: format_rational(&lo),
                hi: format_rational(&hi),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) * ratio(1, 2)
    }

    /// Membership in `(lo, hi]`.
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo < x && x <= &self.hi
    }

    /// `(-hi, -lo]` as an interval; the endpoints swap roles.
    pub fn negated(&self) -> Self {
        Self {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn shifted(&self, by: &BigRational) -> Self {
        Self {
            lo: &self.lo + by,
            hi: &self.hi + by,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [format_rational(&self.lo), format_rational(&self.hi)].serialize(s)
    }
}

/// Canonical Sturm chain of a squarefree polynomial.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    chain: Vec<IntPolynomial>,
}

impl SturmSequence {
    pub fn new(p: &IntPolynomial) -> Result<Self, PolyError> {
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if !p.is_squarefree() {
            return Err(PolyError::NotSquarefree);
        }
        let mut chain = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(d);
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let (_, r) = chain[n - 2].to_rational().div_rem(&chain[n - 1].to_rational());
            if r.is_zero() {
                break;
            }
            // positive rescaling keeps every sign intact
            chain.push(-&r.to_primitive_integer());
        }
        Ok(Self { chain })
    }

    pub fn polys(&self) -> &[IntPolynomial] {
        &self.chain
    }

    /// Number of sign changes along the chain at `x`, zeros skipped.
    pub fn variations_at(&self, x: &BigRational) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    /// Distinct roots in `(lo, hi]`; valid even when an endpoint is a root.
    pub fn count_half_open(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }
}

pub fn sturm_sequence(p: &IntPolynomial) -> Result<Vec<IntPolynomial>, PolyError> {
    SturmSequence::new(p).map(|s| s.chain)
}

/// Distinct real roots of a squarefree `p` in `(lo, hi]`; endpoints must not be roots.
pub fn count_roots(p: &IntPolynomial, iv: &Interval) -> Result<usize, PolyError> {
    let seq = SturmSequence::new(p)?;
    for end in [iv.lo(), iv.hi()] {
        if p.sign_at(end) == 0 {
            return Err(PolyError::EndpointIsRoot(format_rational(end)));
        }
    }
    Ok(seq.count_half_open(iv.lo(), iv.hi()))
}

/// `1 + max|c_k| / |c_n|`, a strict upper bound on root magnitudes.
pub fn cauchy_bound(p: &IntPolynomial) -> BigRational {
    let Some(lead) = p.leading() else {
        return BigRational::one();
    };
    let lead = lead.abs();
    let n = p.coeffs().len() - 1;
    let max = p.coeffs()[..n]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(Zero::zero);
    BigRational::one() + BigRational::new(max, lead)
}

/// Pick a split point inside `(lo, hi)` that is not a root, preferring the midpoint.
fn split_point(p: &IntPolynomial, lo: &BigRational, hi: &BigRational) -> BigRational {
    let width = hi - lo;
    let mut k: i64 = 2;
    loop {
        // midpoint first, then 1/3, 2/3, 1/4, ...
        for j in 1..k {
            let candidate = lo + &width * ratio(j, k);
            if p.sign_at(&candidate) != 0 {
                return candidate;
            }
        }
        k += 1;
    }
}

fn isolate_in(
    seq: &SturmSequence,
    p: &IntPolynomial,
    lo: BigRational,
    hi: BigRational,
    max_width: &BigRational,
) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((lo, hi)) = stack.pop() {
        let count = seq.count_half_open(&lo, &hi);
        if count == 0 {
            continue;
        }
        if count == 1 && &(&hi - &lo) <= max_width {
            out.push(Interval { lo, hi });
            continue;
        }
        let mid = split_point(p, &lo, &hi);
        // push the right half first so the left half is processed first
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Isolating intervals for every positive root, ascending, each of width at most 1/2.
///
/// Endpoints are never roots, so the intervals can be refined with exact sign tests.
pub fn isolate_positive_roots(p: &IntPolynomial) -> Result<Vec<Interval>, PolyError> {
    let seq = SturmSequence::new(p)?;
    if p.sign_at(&BigRational::zero()) == 0 {
        return Err(PolyError::ZeroAtOrigin);
    }
    let bound = cauchy_bound(p);
    Ok(isolate_in(&seq, p, BigRational::zero(), bound, &ratio(1, 2)))
}

/// Isolating intervals for every real root, ascending. Zero may be a root.
pub fn isolate_real_roots(p: &IntPolynomial) -> Result<Vec<Interval>, PolyError> {
    let seq = SturmSequence::new(p)?;
    let bound = cauchy_bound(p);
    // the bound itself is never a root, so (-bound, bound] covers everything
    Ok(isolate_in(&seq, p, -bound.clone(), bound, &ratio(1, 2)))
}

/// Bisection on an isolating interval until its width is at most `width`.
pub fn refine_root(
    p: &IntPolynomial,
    iv: &Interval,
    width: &BigRational,
) -> Result<Interval, PolyError> {
    if !width.is_positive() {
        return Err(PolyError::NonPositiveWidth);
    }
    let seq = SturmSequence::new(p)?;
    let count = seq.count_half_open(iv.lo(), iv.hi());
    if count != 1 {
        return Err(PolyError::NotIsolating { count });
    }
    let mut lo = iv.lo.clone();
    let mut hi = iv.hi.clone();
    let half = ratio(1, 2);
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) * &half;
        match p.sign_at(&mid) {
            0 => {
                // exact rational root: shrink symmetrically around it
                let quarter = width * ratio(1, 4);
                let new_lo = (&mid - &quarter).max(lo.clone());
                let new_hi = (&mid + &quarter).min(hi.clone());
                return Interval::new(new_lo, new_hi);
            }
            _ => {
                if seq.count_half_open(&lo, &mid) == 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
    }
    Interval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, to_f64};

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    fn iv(lo: BigRational, hi: BigRational) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn sturm_chains() {
        let chain = sturm_sequence(&ip(&[-2, 0, 1])).unwrap();
        assert_eq!(chain, vec![ip(&[-2, 0, 1]), ip(&[0, 2]), ip(&[1])]);
        let chain = sturm_sequence(&ip(&[3, 2])).unwrap();
        assert_eq!(chain, vec![ip(&[3, 2]), ip(&[2])]);
        let chain = sturm_sequence(&ip(&[1, 0, 1])).unwrap();
        assert!(chain.last().unwrap().leading().unwrap().is_negative());
        assert_eq!(chain.last().unwrap().degree(), Some(0));
        assert_eq!(sturm_sequence(&ip(&[1, -2, 1])), Err(PolyError::NotSquarefree));
    }

    #[test]
    fn root_counts() {
        let p = ip(&[-2, 0, 1]);
        assert_eq!(count_roots(&p, &iv(int(0), int(2))).unwrap(), 1);
        assert_eq!(count_roots(&p, &iv(int(-2), int(2))).unwrap(), 2);
        assert_eq!(count_roots(&ip(&[1, 0, 1]), &iv(int(-10), int(10))).unwrap(), 0);
        assert!(matches!(
            count_roots(&ip(&[-1, 1]), &iv(int(0), int(1))),
            Err(PolyError::EndpointIsRoot(_))
        ));
    }

    #[test]
    fn positive_isolation() {
        let roots = isolate_positive_roots(&ip(&[-2, 0, 1])).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].width() <= ratio(1, 2));
        let r = to_f64(roots[0].lo())..=to_f64(roots[0].hi());
        assert!(r.contains(&2f64.sqrt()));

        // (x^2-2)(x^2-3) = x^4 - 5x^2 + 6
        let roots = isolate_positive_roots(&ip(&[6, 0, -5, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].contains(&BigRational::from_float(2f64.sqrt()).unwrap()));
        assert!(roots[1].contains(&BigRational::from_float(3f64.sqrt()).unwrap()));
        assert!(roots[0].hi() <= roots[1].lo());

        assert!(isolate_positive_roots(&ip(&[1, 1])).unwrap().is_empty());
        assert_eq!(isolate_positive_roots(&ip(&[0, 1])), Err(PolyError::ZeroAtOrigin));
    }

    #[test]
    fn rational_roots_never_land_on_endpoints() {
        // roots 1/2, 1, 3/2, 2
        let p = &(&ip(&[-2, 1]) * &ip(&[-1, 1])) * &(&ip(&[-1, 2]) * &ip(&[-3, 2]));
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 4);
        for r in &roots {
            assert_ne!(p.sign_at(r.lo()), 0);
            assert_ne!(p.sign_at(r.hi()), 0);
        }
    }

    #[test]
    fn refinement() {
        let p = ip(&[-2, 0, 1]);
        let narrow = refine_root(&p, &iv(int(1), int(2)), &ratio(1, 1024)).unwrap();
        assert!(narrow.width() <= ratio(1, 1024));
        assert!(to_f64(narrow.lo()) < 2f64.sqrt() && 2f64.sqrt() <= to_f64(narrow.hi()));

        let already = iv(ratio(141, 100), ratio(142, 100));
        assert_eq!(refine_root(&p, &already, &ratio(1, 10)).unwrap(), already);

        assert_eq!(
            refine_root(&p, &iv(int(1), int(2)), &int(0)),
            Err(PolyError::NonPositiveWidth)
        );
        assert_eq!(
            refine_root(&p, &iv(int(-2), int(2)), &ratio(1, 8)),
            Err(PolyError::NotIsolating { count: 2 })
        );
        // exact rational root
        let q = ip(&[-1, 2]);
        let r = refine_root(&q, &iv(int(0), int(1)), &ratio(1, 100)).unwrap();
        assert!(r.contains(&ratio(1, 2)));
    }
}
