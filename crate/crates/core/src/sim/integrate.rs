//! Dormand–Prince 5(4) with step capping onto a regular sampling grid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Crn, ModelError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("end time must be positive and finite")]
    InvalidEndTime,
    #[error("tolerances and sampling interval must be positive")]
    InvalidTolerance,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("step size underflow at t = {time}")]
    StepUnderflow { time: f64 },
    #[error("unbounded: species {species} reached {value} at t = {time}")]
    Unbounded { time: f64, species: String, value: f64 },
    #[error("step budget exhausted at t = {time}")]
    TooManySteps { time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Samples are forced at every multiple of this interval.
    pub sample_interval: T,
    pub max_steps: usize,
    /// Any concentration above this marks the run unbounded.
    pub divergence_cap: T,
    /// Step results in `[-negative_tolerance, 0)` are clamped to zero; below that the step is rejected.
    pub negative_tolerance: T,
}

impl<T: Scalar> Default for IntegratorOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            sample_interval: T::lit(0.1),
            max_steps: 5_000_000,
            divergence_cap: T::lit(1e9),
            negative_tolerance: T::lit(1e-12),
        }
    }
}

impl<T: Scalar> IntegratorOptions<T> {
    pub fn with_tolerances(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub negativity_rejections: usize,
    pub clamped: usize,
    pub rhs_evaluations: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// Sampled solution; times strictly increase from 0 and every state is nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    species: Vec<String>,
    times: Vec<T>,
    states: Vec<Vec<T>>,
    stats: IntegratorStats,
}

impl<T: Scalar> Trajectory<T> {
    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<T>] {
        &self.states
    }

    pub fn stats(&self) -> &IntegratorStats {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("nonempty trajectory")
    }

    pub fn final_state(&self) -> &[T] {
        self.states.last().expect("nonempty trajectory")
    }

    /// Time series of one species.
    pub fn series(&self, species: usize) -> Vec<T> {
        self.states.iter().map(|s| s[species]).collect()
    }

    /// Index of the sample within `eps` of `t`.
    pub fn sample_index(&self, t: T, eps: T) -> Option<usize> {
        let i = self.times.partition_point(|&s| s < t - eps);
        (i < self.times.len() && (self.times[i] - t).abs() <= eps).then_some(i)
    }

    /// Value of a species at a sampled time.
    pub fn value_at(&self, species: usize, t: T) -> Option<T> {
        self.sample_index(t, T::lit(1e-9) * (T::one() + t.abs()))
            .map(|i| self.states[i][species])
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a, T> {
    crn: &'a Crn,
    k: [Vec<T>; 7],
    tmp: Vec<T>,
    evaluations: usize,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    fn new(crn: &'a Crn) -> Self {
        let n = crn.num_species();
        Self {
            crn,
            k: std::array::from_fn(|_| vec![T::zero(); n]),
            tmp: vec![T::zero(); n],
            evaluations: 0,
        }
    }

    fn eval_first(&mut self, y: &[T]) {
        self.crn.vector_field_into(y, &mut self.k[0]);
        self.evaluations += 1;
    }

    /// One trial step from `y` (with `k[0] = f(y)`); writes the 5th-order result
    /// into `out` and the error estimate into `err`. `k[6]` ends up as `f(out)`.
    fn step(&mut self, y: &[T], h: T, out: &mut [T], err: &mut [T]) {
        for s in 1..7 {
            for i in 0..y.len() {
                let mut acc = T::zero();
                for j in 0..s {
                    if A[s][j] != 0.0 {
                        acc = acc + T::lit(A[s][j]) * self.k[j][i];
                    }
                }
                self.tmp[i] = y[i] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(s);
            let _ = head;
            self.crn.vector_field_into(&self.tmp, &mut tail[0]);
            self.evaluations += 1;
        }
        // the last stage was evaluated at the 5th-order solution (FSAL)
        out.copy_from_slice(&self.tmp);
        for i in 0..y.len() {
            let mut acc = T::zero();
            for (j, e) in E.iter().enumerate() {
                if *e != 0.0 {
                    acc = acc + T::lit(*e) * self.k[j][i];
                }
            }
            err[i] = h * acc;
        }
    }
}

/// Integrates the mass-action system from `x0` over `[0, t_end]`.
pub fn integrate<T: Scalar>(
    crn: &Crn,
    x0: &[T],
    t_end: T,
    options: &IntegratorOptions<T>,
) -> Result<Trajectory<T>, SimError> {
    crn.check_state(x0)?;
    if !(t_end.is_finite() && t_end > T::zero()) {
        return Err(SimError::InvalidEndTime);
    }
    let positive = |v: T| v.is_finite() && v > T::zero();
    if !(positive(options.rel_tol) && positive(options.abs_tol) && positive(options.sample_interval)) {
        return Err(SimError::InvalidTolerance);
    }
    let n = x0.len();
    let names: Vec<String> = crn.species_names().iter().map(|s| s.to_string()).collect();
    let mut stats = IntegratorStats {
        rel_tol: options.rel_tol.to_f64_lossy(),
        abs_tol: options.abs_tol.to_f64_lossy(),
        ..IntegratorStats::default()
    };
    let mut times = vec![T::zero()];
    let mut states = vec![x0.to_vec()];

    let mut stepper = Stepper::new(crn);
    let mut y = x0.to_vec();
    let mut y_new = vec![T::zero(); n];
    let mut err = vec![T::zero(); n];
    stepper.eval_first(&y);

    let mut t = T::zero();
    let mut h = options.sample_interval.min(T::lit(1e-3));
    let mut grid_index = 1usize;
    let grid_point = |g: usize| (T::from_usize(g).expect("grid index") * options.sample_interval).min(t_end);
    let fifth = T::lit(0.2);
    let safety = T::lit(0.9);

    while t < t_end {
        if stats.accepted + stats.rejected >= options.max_steps {
            return Err(SimError::TooManySteps { time: t.to_f64_lossy() });
        }
        let target = grid_point(grid_index);
        let remaining = target - t;
        let landing = h >= remaining * (T::one() - T::lit(1e-12));
        let h_try = if landing { remaining } else { h };

        stepper.step(&y, h_try, &mut y_new, &mut err);
        let mut norm = T::zero();
        for i in 0..n {
            let scale = options.abs_tol + options.rel_tol * y[i].abs().max(y_new[i].abs());
            let r = err[i] / scale;
            norm = norm + r * r;
        }
        norm = if n > 0 {
            (norm / T::from_usize(n).expect("n")).sqrt()
        } else {
            T::zero()
        };

        if !norm.is_finite() || norm > T::one() {
            stats.rejected += 1;
            let shrink = if norm.is_finite() {
                (safety * norm.powf(-fifth)).max(T::lit(0.2))
            } else {
                T::lit(0.2)
            };
            h = h_try * shrink;
            if h < T::lit(1e-14) * t.max(T::one()) {
                return Err(SimError::StepUnderflow { time: t.to_f64_lossy() });
            }
            continue;
        }

        if y_new.iter().any(|&v| v < -options.negative_tolerance) {
            stats.rejected += 1;
            stats.negativity_rejections += 1;
            h = h_try * T::lit(0.5);
            if h < T::lit(1e-14) * t.max(T::one()) {
                return Err(SimError::StepUnderflow { time: t.to_f64_lossy() });
            }
            continue;
        }
        let mut clamped = false;
        for v in y_new.iter_mut() {
            if *v < T::zero() {
                *v = T::zero();
                clamped = true;
            }
        }
        if let Some(i) = y_new
            .iter()
            .position(|&v| !v.is_finite() || v > options.divergence_cap)
        {
            return Err(SimError::Unbounded {
                time: (t + h_try).to_f64_lossy(),
                species: names[i].clone(),
                value: y_new[i].to_f64_lossy(),
            });
        }

        stats.accepted += 1;
        t = if landing { target } else { t + h_try };
        std::mem::swap(&mut y, &mut y_new);
        if clamped {
            stats.clamped += 1;
            stepper.eval_first(&y);
        } else {
            let (first, rest) = stepper.k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
        }
        times.push(t);
        states.push(y.clone());
        if landing {
            grid_index += 1;
        }

        let grow = if norm == T::zero() {
            T::lit(5.0)
        } else {
            (safety * norm.powf(-fifth)).min(T::lit(5.0)).max(T::lit(0.2))
        };
        let proposal = h_try * grow;
        h = if landing { proposal.max(h) } else { proposal };
    }
    stats.rhs_evaluations = stepper.evaluations;
    Ok(Trajectory {
        species: names,
        times,
        states,
        stats,
    })
}

/// [`integrate`] from the all-zero state with default options.
pub fn integrate_from_zero<T: Scalar>(crn: &Crn, t_end: T) -> Result<Trajectory<T>, SimError> {
    let x0 = vec![T::zero(); crn.num_species()];
    integrate(crn, &x0, t_end, &IntegratorOptions::default())
}

/// Fixed-step Dormand–Prince solution at `t_end` (no error control, no clamping).
pub fn fixed_step_solve<T: Scalar>(crn: &Crn, x0: &[T], t_end: T, steps: usize) -> Vec<T> {
    let n = x0.len();
    let h = t_end / T::from_usize(steps).expect("steps");
    let mut stepper = Stepper::new(crn);
    let mut y = x0.to_vec();
    let mut y_new = vec![T::zero(); n];
    let mut err = vec![T::zero(); n];
    for _ in 0..steps {
        stepper.eval_first(&y);
        stepper.step(&y, h, &mut y_new, &mut err);
        std::mem::swap(&mut y, &mut y_new);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::sim::reference::{reference_solution, ReferenceCurve};

    fn rational_crn(a: i64, b: i64) -> Crn {
        Crn::builder()
            .reaction(&[], &[("X", 1)], int(a))
            .unwrap()
            .reaction(&[("X", 1)], &[], int(b))
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn tableau_is_consistent() {
        const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
        for (s, row) in A.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            assert!((sum - C[s]).abs() < 1e-14, "row {s}");
        }
        assert!(E.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn rational_closed_form() {
        let crn = rational_crn(1, 2);
        let traj = integrate_from_zero(&crn, 20.0f64).unwrap();
        let curve = ReferenceCurve::Rational { a: 1.0, b: 2.0 };
        let worst = traj
            .times()
            .iter()
            .zip(traj.series(0))
            .map(|(&t, x)| (x - reference_solution(&curve, t).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "sup error {worst}");
    }

    #[test]
    fn samples_every_tenth() {
        let crn = rational_crn(1, 1);
        let traj = integrate_from_zero(&crn, 5.0f64).unwrap();
        for w in traj.times().windows(2) {
            assert!(w[1] > w[0]);
            assert!(w[1] - w[0] <= 0.1 + 1e-12);
        }
        assert_eq!(traj.final_time(), 5.0);
        assert!(traj.value_at(0, 2.5).is_some());
    }

    #[test]
    fn fixed_step_order() {
        // halving the step of a fifth-order method cuts the error by about 32
        let crn = rational_crn(1, 2);
        let exact = reference_solution(&ReferenceCurve::Rational { a: 1.0, b: 2.0 }, 4.0).unwrap();
        let coarse = (fixed_step_solve(&crn, &[0.0f64], 4.0, 8)[0] - exact).abs();
        let fine = (fixed_step_solve(&crn, &[0.0f64], 4.0, 16)[0] - exact).abs();
        assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn empty_network_stays_at_zero() {
        let crn = Crn::builder().species("X").unwrap().build().unwrap();
        let traj = integrate_from_zero(&crn, 1.0f64).unwrap();
        assert!(traj.states().iter().all(|s| s[0] == 0.0));
        assert!(traj.len() >= 11);
        assert_eq!(traj.final_time(), 1.0);
    }

    #[test]
    fn divergence_is_reported() {
        // 0 -> X, 2X -> 3X blows up in finite time
        let crn = Crn::builder()
            .reaction(&[], &[("X", 1)], int(1))
            .unwrap()
            .reaction(&[("X", 2)], &[("X", 3)], int(1))
            .unwrap()
            .build()
            .unwrap();
        let err = integrate_from_zero(&crn, 10.0f64).unwrap_err();
        assert!(matches!(err, SimError::Unbounded { .. }), "{err:?}");
    }

    #[test]
    fn bad_arguments() {
        let crn = rational_crn(1, 1);
        assert_eq!(integrate_from_zero(&crn, 0.0f64).unwrap_err(), SimError::InvalidEndTime);
        let opts = IntegratorOptions::with_tolerances(0.0f64, 1e-12);
        assert_eq!(integrate(&crn, &[0.0], 1.0, &opts).unwrap_err(), SimError::InvalidTolerance);
        assert!(matches!(
            integrate(&crn, &[0.0, 0.0], 1.0, &IntegratorOptions::default()).unwrap_err(),
            SimError::Model(_)
        ));
    }

    #[test]
    fn single_precision_runs() {
        let crn = rational_crn(1, 2);
        let opts = IntegratorOptions::with_tolerances(1e-5f32, 1e-7);
        let traj = integrate(&crn, &[0.0f32], 5.0, &opts).unwrap();
        assert!((traj.final_state()[0] - 0.5).abs() < 1e-4);
    }
}
