use super::{jacobian::SymbolicJacobian, Matrix, StabilityError};
use crate::model::Crn;
use crate::scalar::Scalar;

pub const MAX_NEWTON_ITERATIONS: usize = 100;

fn norm_inf<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Least-squares step `(J^T J + mu I)^{-1} J^T (-r)` for singular Jacobians.
fn regularized_step<T: Scalar>(j: &Matrix<T>, r: &[T]) -> Option<Vec<T>> {
    let jt = j.transpose();
    let mut a = jt.matmul(j).ok()?;
    let mu = T::lit(1e-10) * a.norm_inf().max(T::one());
    for i in 0..a.rows() {
        a[(i, i)] = a[(i, i)] + mu;
    }
    let neg: Vec<T> = r.iter().map(|&x| -x).collect();
    a.solve(&jt.mul_vec(&neg))
}

/// Damped Newton iteration for `f(z) = 0` from `guess`. Each step is halved
/// until the residual decreases.
pub fn find_fixed_point<T: Scalar>(crn: &Crn, guess: &[T], tol: T) -> Result<Vec<T>, StabilityError> {
    if !(tol > T::zero()) {
        return Err(StabilityError::NonPositiveTolerance);
    }
    crn.check_state(guess).map_err(|_| StabilityError::Dimension {
        expected: crn.num_species(),
        got: guess.len(),
    })?;
    let jac = SymbolicJacobian::new(crn);
    let mut z = guess.to_vec();
    let mut f = crn.vector_field(&z).expect("dimension checked");
    let mut res = norm_inf(&f);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if res <= tol {
            return accept(crn, z, tol);
        }
        let j = jac.evaluate(&z)?;
        let neg: Vec<T> = f.iter().map(|&x| -x).collect();
        let step = match j.solve(&neg) {
            Some(s) if s.iter().all(|x| x.is_finite()) => s,
            _ => regularized_step(&j, &f).ok_or(StabilityError::NoConvergence {
                iterations: 0,
                residual: res.to_f64_lossy(),
            })?,
        };
        let mut lambda = T::one();
        let mut improved = false;
        for _ in 0..60 {
            let trial: Vec<T> = z.iter().zip(&step).map(|(&a, &d)| a + lambda * d).collect();
            let ft = crn.vector_field(&trial).expect("dimension checked");
            let rt = norm_inf(&ft);
            if rt < res {
                z = trial;
                f = ft;
                res = rt;
                improved = true;
                break;
            }
            lambda = lambda / T::lit(2.0);
        }
        if !improved {
            break;
        }
    }
    if res <= tol {
        return accept(crn, z, tol);
    }
    Err(StabilityError::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        residual: res.to_f64_lossy(),
    })
}

fn accept<T: Scalar>(crn: &Crn, mut z: Vec<T>, tol: T) -> Result<Vec<T>, StabilityError> {
    let slack = tol.max(T::epsilon());
    if let Some(i) = z.iter().position(|&v| v < -slack) {
        return Err(StabilityError::NegativeCoordinate {
            species: crn.species_names()[i].to_string(),
            value: z[i].to_f64_lossy(),
        });
    }
    if z.iter().any(|&v| v < T::zero()) {
        let clamped: Vec<T> = z.iter().map(|&v| v.max(T::zero())).collect();
        let f = crn.vector_field(&clamped).expect("dimension checked");
        if norm_inf(&f) <= tol {
            z = clamped;
        }
    }
    Ok(z)
}
