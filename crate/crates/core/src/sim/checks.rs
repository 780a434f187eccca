//! Integrality is a property of the network; boundedness and the `2^{-t}`
//! convergence bound are checked on sampled trajectories.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{curves, Trajectory};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("target must be a nonnegative finite number")]
    InvalidTarget,
    #[error("trajectory must cover [0, 1], it ends at {0}")]
    TooShort(f64),
    #[error("unknown species '{0}'")]
    UnknownSpecies(String),
    #[error("trajectory does not have the transcendental shape: {0}")]
    WrongShape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSample<T> {
    pub t: T,
    pub x: T,
    pub error: T,
    pub bound: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport<T> {
    pub target: T,
    /// Samples with `t >= 1`.
    pub samples: Vec<ConvergenceSample<T>>,
    pub pass: bool,
    pub first_failure: Option<T>,
    pub beta_observed: T,
    pub empirical_gamma: Option<T>,
}

/// Least-squares decay rate of `errors` over `window`, ignoring values at or
/// below `floor`. Returns the negated slope of `ln(error)` against `t`.
pub fn fit_decay_rate<T: Scalar>(times: &[T], errors: &[T], window: (T, T), floor: T) -> Option<T> {
    let pts: Vec<(T, T)> = times
        .iter()
        .zip(errors)
        .filter(|(&t, &e)| t >= window.0 && t <= window.1 && e > floor && e.is_finite())
        .map(|(&t, &e)| (t, e.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = T::from_usize(pts.len())?;
    let mt = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let (sxy, sxx) = pts.iter().fold((T::zero(), T::zero()), |(sxy, sxx), &(t, y)| {
        (sxy + (t - mt) * (y - my), sxx + (t - mt) * (t - mt))
    });
    if sxx <= T::zero() {
        return None;
    }
    let gamma = -(sxy / sxx);
    gamma.is_finite().then_some(gamma)
}

/// Checks `|x(t) - target| <= 2^{-t}` at every sample with `t >= 1`.
pub fn check_convergence<T: Scalar>(
    traj: &Trajectory<T>,
    designated: &str,
    target: T,
) -> Result<ConvergenceReport<T>, CheckError> {
    if !(target.is_finite() && target >= T::zero()) {
        return Err(CheckError::InvalidTarget);
    }
    let idx = traj
        .species_index(designated)
        .ok_or_else(|| CheckError::UnknownSpecies(designated.to_string()))?;
    let t_end = traj.final_time();
    if t_end < T::one() {
        return Err(CheckError::TooShort(t_end.to_f64_lossy()));
    }
    let two = T::lit(2.0);
    let mut samples = Vec::new();
    let mut first_failure = None;
    for (&t, state) in traj.times().iter().zip(traj.states()) {
        if t < T::one() {
            continue;
        }
        let x = state[idx];
        let error = (x - target).abs();
        let bound = two.powf(-t);
        if !(error <= bound) && first_failure.is_none() {
            first_failure = Some(t);
        }
        samples.push(ConvergenceSample { t, x, error, bound });
    }
    let times: Vec<T> = samples.iter().map(|s| s.t).collect();
    let errors: Vec<T> = samples.iter().map(|s| s.error).collect();
    let third = t_end / T::lit(3.0);
    let empirical_gamma = fit_decay_rate(&times, &errors, (third, third + third), T::zero());
    Ok(ConvergenceReport {
        target,
        samples,
        pass: first_failure.is_none(),
        first_failure,
        beta_observed: check_boundedness(traj),
        empirical_gamma,
    })
}

/// Largest concentration over all species and samples.
pub fn check_boundedness<T: Scalar>(traj: &Trajectory<T>) -> T {
    traj.states()
        .iter()
        .flat_map(|s| s.iter().copied())
        .fold(T::zero(), |m, v| m.max(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranscendentalBounds<T> {
    pub tolerance: T,
    /// `max |(u - v)(t) - (e^{1-e^{-t}} - 1)|`.
    pub identity_error: T,
    /// `max (u_hat(t) - u(t))`, negative when the lower bound holds strictly.
    pub lower_excess: T,
    /// `max (u(t) - r1(t))`.
    pub upper_excess: T,
    /// `min (u(t) - r2(t))`.
    pub min_gap_r2: T,
    pub final_time: T,
    pub final_u: T,
    pub limit: T,
    pub pass: bool,
}

/// Evaluates the sandwich `u_hat - eps <= u <= r1 + eps`, the gap
/// `u - r2 >= sqrt 2 - 1 - eps` and the `u - v` identity at every sample.
pub fn transcendental_bounds_report<T: Scalar>(
    traj: &Trajectory<T>,
    tolerance: T,
) -> Result<TranscendentalBounds<T>, CheckError> {
    let find = |name: &str| {
        traj.species_index(name)
            .ok_or_else(|| CheckError::WrongShape(format!("missing species {name}")))
    };
    if traj.species().len() != 3 {
        return Err(CheckError::WrongShape(format!(
            "expected 3 species, found {}",
            traj.species().len()
        )));
    }
    let (iu, iv) = (find("U")?, find("V")?);
    find("X")?;
    let mut identity_error = T::zero();
    let mut lower_excess = T::neg_infinity();
    let mut upper_excess = T::neg_infinity();
    let mut min_gap_r2 = T::infinity();
    for (&t, s) in traj.times().iter().zip(traj.states()) {
        let (u, v) = (s[iu], s[iv]);
        identity_error = identity_error.max((u - v - curves::y(t)).abs());
        lower_excess = lower_excess.max(curves::u_hat(t) - u);
        upper_excess = upper_excess.max(u - curves::r1(t));
        min_gap_r2 = min_gap_r2.min(u - curves::r2(t));
    }
    let pass = identity_error < tolerance
        && lower_excess <= tolerance
        && upper_excess <= tolerance
        && min_gap_r2 >= T::SQRT_2() - T::one() - tolerance;
    Ok(TranscendentalBounds {
        tolerance,
        identity_error,
        lower_excess,
        upper_excess,
        min_gap_r2,
        final_time: traj.final_time(),
        final_u: traj.final_state()[iu],
        limit: curves::limit(),
        pass,
    })
}

/// [`transcendental_bounds_report`] with tolerance `1e-6`, reduced to its verdict.
pub fn check_transcendental_bounds<T: Scalar>(traj: &Trajectory<T>) -> Result<bool, CheckError> {
    Ok(transcendental_bounds_report(traj, T::lit(1e-6))?.pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::model::Crn;
    use crate::sim::integrate_from_zero;

    fn relax(a: i64, b: i64) -> Crn {
        Crn::builder()
            .reaction(&[], &[("X", 1)], int(a))
            .unwrap()
            .reaction(&[("X", 1)], &[], int(b))
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn unit_relaxation_meets_bound() {
        let traj = integrate_from_zero(&relax(1, 1), 20.0f64).unwrap();
        let r = check_convergence(&traj, "X", 1.0).unwrap();
        assert!(r.pass);
        assert!(r.first_failure.is_none());
        let g = r.empirical_gamma.unwrap();
        assert!((g - 1.0).abs() < 1e-3, "gamma {g}");
        assert!((r.beta_observed - 1.0).abs() < 1e-8);
        assert!(r.samples.iter().all(|s| s.t >= 1.0));
    }

    #[test]
    fn slow_relaxation_fails() {
        // rate 1/2 decays slower than 2^{-t}
        let crn = Crn::builder()
            .reaction(&[], &[("X", 1)], ratio(1, 2))
            .unwrap()
            .reaction(&[("X", 1)], &[], ratio(1, 2))
            .unwrap()
            .build()
            .unwrap();
        let traj = integrate_from_zero(&crn, 20.0f64).unwrap();
        let r = check_convergence(&traj, "X", 1.0).unwrap();
        assert!(!r.pass);
        let t = r.first_failure.unwrap();
        // e^{-t/2} > 2^{-t} for every t > 0, so the first checked sample fails
        assert!((t - 1.0).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        let traj = integrate_from_zero(&relax(1, 1), 2.0f64).unwrap();
        assert_eq!(check_convergence(&traj, "X", -1.0).unwrap_err(), CheckError::InvalidTarget);
        assert_eq!(check_convergence(&traj, "X", f64::NAN).unwrap_err(), CheckError::InvalidTarget);
        assert!(matches!(check_convergence(&traj, "Q", 1.0), Err(CheckError::UnknownSpecies(_))));
        let short = integrate_from_zero(&relax(1, 1), 0.5f64).unwrap();
        assert!(matches!(check_convergence(&short, "X", 1.0), Err(CheckError::TooShort(_))));
        assert!(matches!(check_transcendental_bounds(&traj), Err(CheckError::WrongShape(_))));
    }

    #[test]
    fn boundedness_of_rational() {
        let traj = integrate_from_zero(&relax(3, 2), 20.0f64).unwrap();
        assert!((check_boundedness(&traj) - 1.5).abs() < 1e-8);
        let empty = integrate_from_zero(&Crn::builder().species("X").unwrap().build().unwrap(), 1.0f64).unwrap();
        assert_eq!(check_boundedness(&empty), 0.0);
    }

    #[test]
    fn fit_recovers_rate() {
        let times: Vec<f64> = (0..100).map(|k| k as f64 * 0.2).collect();
        let errors: Vec<f64> = times.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let g = fit_decay_rate(&times, &errors, (5.0, 15.0), 0.0).unwrap();
        assert!((g - 0.7).abs() < 1e-12);
        assert!(fit_decay_rate(&times, &errors, (50.0, 60.0), 0.0).is_none());
    }
}
