//! Jacobians, fixed points, eigenvalues and the exponential-stability verdict.

mod eigen;
mod jacobian;
mod linalg;
mod newton;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::SignedProgram;
use crate::model::Crn;
use crate::scalar::Scalar;

pub use eigen::eigenvalues;
pub use jacobian::{jacobian_at, symbolic_jacobian, SymbolicJacobian};
pub use linalg::Matrix;
pub use newton::{find_fixed_point, MAX_NEWTON_ITERATIONS};

pub const DEFAULT_MARGIN: f64 = 1e-9;
pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("state has {got} entries, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,
    #[error("Newton iteration stalled after {iterations} iterations with residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("fixed point has negative coordinate {species} = {value:e}")]
    NegativeCoordinate { species: String, value: f64 },
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("margin must be positive")]
    NonPositiveMargin,
    #[error("program is not a composition")]
    NotAComposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ExponentiallyStable,
    Unstable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport<T> {
    pub species: Vec<String>,
    pub fixed_point: Vec<T>,
    /// `max |f_i(z)|`.
    pub residual: T,
    /// Sorted by real part; serialized as `[re, im]` pairs.
    pub eigenvalues: Vec<Complex<T>>,
    pub max_real_part: T,
    pub margin: T,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl<T: Scalar> StabilityReport<T> {
    pub fn is_stable(&self) -> bool {
        self.verdict == Verdict::ExponentiallyStable
    }
}

/// Classifies `z` by the eigenvalues of the Jacobian there. A state that is not
/// a fixed point to within the residual tolerance is reported inconclusive.
pub fn check_exponential_stability<T: Scalar>(
    crn: &Crn,
    z: &[T],
    margin: T,
) -> Result<StabilityReport<T>, StabilityError> {
    if !(margin > T::zero()) {
        return Err(StabilityError::NonPositiveMargin);
    }
    let f = crn.vector_field(z).map_err(|_| StabilityError::Dimension {
        expected: crn.num_species(),
        got: z.len(),
    })?;
    let residual = f.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let eigenvalues = eigenvalues(&jacobian_at(crn, z)?)?;
    let max_real_part = eigenvalues
        .iter()
        .map(|e| e.re)
        .fold(T::neg_infinity(), T::max);
    let scale = z.iter().fold(T::one(), |m, x| m.max(x.abs()));
    let mut note = None;
    let verdict = if !(residual <= T::lit(DEFAULT_RESIDUAL_TOLERANCE) * scale) {
        note = Some(format!("not a fixed point: residual {:e}", residual.to_f64_lossy()));
        Verdict::Inconclusive
    } else if eigenvalues.is_empty() || max_real_part < -margin {
        Verdict::ExponentiallyStable
    } else if max_real_part > margin {
        Verdict::Unstable
    } else {
        note = Some("eigenvalue on the imaginary axis within the margin".into());
        Verdict::Inconclusive
    };
    Ok(StabilityReport {
        species: crn.species_names().iter().map(|s| s.to_string()).collect(),
        fixed_point: z.to_vec(),
        residual,
        eigenvalues,
        max_real_part,
        margin,
        verdict,
        note,
    })
}

/// True when, under the composition's species layout, each operand's rows of
/// the symbolic Jacobian vanish outside the operand's own block (recursively).
pub fn verify_block_structure(program: &SignedProgram) -> Result<bool, StabilityError> {
    let c = program.composition().ok_or(StabilityError::NotAComposition)?;
    let jac = SymbolicJacobian::new(program.crn());
    let n = jac.dim();
    for block in &c.blocks {
        if !jac.is_zero_block(block.clone(), 0..block.start) || !jac.is_zero_block(block.clone(), block.end..n) {
            return Ok(false);
        }
    }
    for op in &c.operands {
        if op.composition().is_some() && !verify_block_structure(op)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn rational(a: i64, b: i64) -> Crn {
        Crn::builder()
            .reaction(&[], &[("X", 1)], int(a))
            .unwrap()
            .reaction(&[("X", 1)], &[], int(b))
            .unwrap()
            .build()
            .unwrap()
    }

    fn inv_sqrt2() -> Crn {
        Crn::builder()
            .reaction(&[], &[("X", 1)], int(1))
            .unwrap()
            .reaction(&[("X", 2)], &[("X", 1)], int(2))
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn rational_jacobian_and_fixed_point() {
        let crn = rational(1, 2);
        let j = symbolic_jacobian(&crn);
        assert_eq!(j.to_strings(), vec![vec!["-2".to_string()]]);
        let z = find_fixed_point(&crn, &[0.4f64], 1e-12).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-12);
        let r = check_exponential_stability(&crn, &z, DEFAULT_MARGIN).unwrap();
        assert_eq!(r.verdict, Verdict::ExponentiallyStable);
        assert!((r.eigenvalues[0].re + 2.0).abs() < 1e-12);
    }

    #[test]
    fn inv_sqrt2_derivative() {
        let crn = inv_sqrt2();
        let z = find_fixed_point(&crn, &[0.6f64], 1e-13).unwrap();
        assert!((z[0] - 0.5f64.sqrt()).abs() < 1e-12);
        let m = jacobian_at(&crn, &z).unwrap();
        assert!((m[(0, 0)] + 4.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_state_gives_constant_terms() {
        let crn = Crn::builder()
            .reaction(&[("X", 1)], &[("Y", 1)], int(3))
            .unwrap()
            .reaction(&[("X", 1), ("Y", 1)], &[], int(1))
            .unwrap()
            .build()
            .unwrap();
        let m = jacobian_at(&crn, &[0.0f64, 0.0]).unwrap();
        assert_eq!(m.to_rows(), vec![vec![-3.0, 0.0], vec![3.0, 0.0]]);
        let empty = Crn::builder().species("A").unwrap().species("B").unwrap().build().unwrap();
        assert_eq!(jacobian_at(&empty, &[1.0f64, 2.0]).unwrap(), Matrix::zeros(2, 2));
        assert!(matches!(jacobian_at(&crn, &[1.0f64]), Err(StabilityError::Dimension { .. })));
    }

    #[test]
    fn zero_eigenvalue_is_inconclusive() {
        // x' = x^2 has a degenerate fixed point at 0
        let crn = Crn::builder()
            .reaction(&[("X", 2)], &[("X", 3)], int(1))
            .unwrap()
            .build()
            .unwrap();
        let r = check_exponential_stability(&crn, &[0.0f64], DEFAULT_MARGIN).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn growth_is_unstable() {
        // x' = x - x^2 at 0
        let crn = Crn::builder()
            .reaction(&[("X", 1)], &[("X", 2)], int(1))
            .unwrap()
            .reaction(&[("X", 2)], &[("X", 1)], int(1))
            .unwrap()
            .build()
            .unwrap();
        let r = check_exponential_stability(&crn, &[0.0f64], DEFAULT_MARGIN).unwrap();
        assert_eq!(r.verdict, Verdict::Unstable);
        let r = check_exponential_stability(&crn, &[1.0f64], DEFAULT_MARGIN).unwrap();
        assert_eq!(r.verdict, Verdict::ExponentiallyStable);
    }

    #[test]
    fn non_fixed_point_is_inconclusive() {
        let r = check_exponential_stability(&rational(1, 1), &[0.2f64], DEFAULT_MARGIN).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.note.unwrap().contains("residual"));
        assert_eq!(
            check_exponential_stability(&rational(1, 1), &[1.0f64], 0.0).unwrap_err(),
            StabilityError::NonPositiveMargin
        );
    }

    #[test]
    fn newton_errors() {
        let crn = rational(1, 1);
        assert_eq!(find_fixed_point(&crn, &[0.0f64], 0.0).unwrap_err(), StabilityError::NonPositiveTolerance);
        // x' = 1 + x^2 has no real fixed point
        let none = Crn::builder()
            .reaction(&[], &[("X", 1)], int(1))
            .unwrap()
            .reaction(&[("X", 2)], &[("X", 3)], int(1))
            .unwrap()
            .build()
            .unwrap();
        assert!(matches!(find_fixed_point(&none, &[0.5f64], 1e-10), Err(StabilityError::NoConvergence { .. })));
        // x' = 1/2 - ... converging to a negative root
        let neg = Crn::builder()
            .reaction(&[("X", 1)], &[("X", 2)], ratio(1, 1))
            .unwrap()
            .reaction(&[], &[("X", 1)], int(1))
            .unwrap()
            .build()
            .unwrap();
        assert!(matches!(
            find_fixed_point(&neg, &[-0.5f64], 1e-10),
            Err(StabilityError::NegativeCoordinate { .. })
        ));
    }

    #[test]
    fn block_structure() {
        use crate::compiler::{add, compile_expression, compile_rational, parse_expression, Composition, ClaimedLimit, Sign};
        let r = |a: i64, b: i64| compile_rational(&a.into(), &b.into()).unwrap();
        assert!(verify_block_structure(&add(&r(1, 2), &r(1, 3)).unwrap()).unwrap());
        let m = compile_expression(&parse_expression("sqrt(2) * (1/2 + sqrt(3))").unwrap()).unwrap();
        assert!(verify_block_structure(&m).unwrap());
        assert_eq!(verify_block_structure(&r(1, 2)).unwrap_err(), StabilityError::NotAComposition);

        // U feeds back into X
        let good = add(&r(1, 1), &r(1, 1)).unwrap();
        let crn = good
            .crn()
            .extended(Crn::builder().reaction(&[("U", 1)], &[("U", 1), ("X", 1)], int(1)).unwrap())
            .unwrap();
        let bad = SignedProgram::from_parts(crn, 2, Sign::Positive, ClaimedLimit::Rational(int(2)), 1)
            .unwrap()
            .with_composition(Composition::clone(good.composition().unwrap()));
        assert!(!verify_block_structure(&bad).unwrap());
    }

    #[test]
    fn report_json_pairs() {
        let crn = rational(1, 2);
        let r = check_exponential_stability(&crn, &[0.5f64], DEFAULT_MARGIN).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["eigenvalues"][0], serde_json::json!([-2.0, 0.0]));
        assert_eq!(v["verdict"], "exponentially_stable");
        let back: StabilityReport<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
