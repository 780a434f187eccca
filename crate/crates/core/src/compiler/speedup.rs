//! Uniform rate scaling and the measured choice of a scaling factor that
//! meets the `2^{-t}` bound from `t = 1`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{CompileError, SignedProgram};
use crate::sim::{check_convergence, fit_decay_rate, integrate_from_zero};

/// Multiplies every rate constant by `factor`, so `y'(t) = y(factor · t)`.
/// Recorded operands are scaled too.
pub fn speed_up(p: &SignedProgram, factor: u64) -> Result<SignedProgram, CompileError> {
    if factor == 0 {
        return Err(CompileError::InvalidSpeedup);
    }
    let mut out = p.clone();
    if factor == 1 {
        return Ok(out);
    }
    let f = BigRational::from_integer(factor.into());
    out.replace_crn(p.crn().with_scaled_rates(&f));
    out.set_speedup(p.speedup() * factor);
    if let Some(c) = out.composition_mut() {
        for op in c.operands.iter_mut() {
            *op = speed_up(op, factor)?;
        }
    }
    Ok(out)
}

/// `max(ceil(tau / tau_hat), ceil(gamma_hat / gamma))`.
pub fn choose_speedup_factor(tau: f64, gamma: f64, tau_hat: f64, gamma_hat: f64) -> Result<u64, CompileError> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    if !(ok(tau) && ok(gamma) && ok(tau_hat) && ok(gamma_hat)) {
        return Err(CompileError::InvalidSpeedup);
    }
    let a = (tau / tau_hat).ceil().max((gamma_hat / gamma).ceil()).max(1.0);
    if a > u64::MAX as f64 {
        return Err(CompileError::InvalidSpeedup);
    }
    Ok(a as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedupOptions {
    /// Length of the measurement run.
    pub measure_t_end: f64,
    /// Window for the least-squares decay fit.
    pub fit_window: (f64, f64),
    /// Errors at or below this are treated as integrator noise.
    pub noise_floor: f64,
    /// The fitted rate is multiplied by this before use.
    pub gamma_safety: f64,
    pub certify_t_end: f64,
    pub max_factor: u64,
}

impl Default for SpeedupOptions {
    fn default() -> Self {
        Self {
            measure_t_end: 30.0,
            fit_window: (5.0, 15.0),
            noise_floor: 1e-8,
            gamma_safety: 0.9,
            certify_t_end: 20.0,
            max_factor: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupCertificate {
    pub target: f64,
    pub measured_tau: f64,
    pub measured_gamma: Option<f64>,
    pub initial_factor: u64,
    pub factor: u64,
    pub certified: bool,
}

/// Measures `(tau, gamma)` with `|x(t) - |α|| <= e^{-gamma t}` for `t >= tau`,
/// picks the factor for `(1, ln 2)` and confirms it by re-simulation,
/// increasing the factor until the check passes.
pub fn auto_speed_up(
    p: &SignedProgram,
    opts: &SpeedupOptions,
) -> Result<(SignedProgram, SpeedupCertificate), CompileError> {
    let target = p.limit().value_f64();
    let traj = integrate_from_zero(p.crn(), opts.measure_t_end)?;
    let x = traj.series(p.designated());
    let errors: Vec<f64> = x.iter().map(|v| (v - target).abs()).collect();
    let times = traj.times();
    let (w0, w1) = opts.fit_window;
    let measured_gamma = fit_decay_rate(times, &errors, (w0, w1), opts.noise_floor)
        .or_else(|| fit_decay_rate(times, &errors, (1.0, w0), opts.noise_floor))
        .filter(|g| *g > 0.0);
    let ln2 = std::f64::consts::LN_2;
    let gamma = measured_gamma.map_or(ln2, |g| g * opts.gamma_safety);
    // last sample where the bound is visible above the noise and violated
    let visible = 10.0 * opts.noise_floor;
    let tau = times
        .iter()
        .zip(&errors)
        .filter(|(&t, &e)| {
            let bound = (-gamma * t).exp();
            bound >= visible && e > bound
        })
        .map(|(&t, _)| t)
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let initial = choose_speedup_factor(tau, gamma, 1.0, ln2)?.min(opts.max_factor);
    let mut factor = initial;
    loop {
        let candidate = speed_up(p, factor)?;
        let traj = integrate_from_zero(candidate.crn(), opts.certify_t_end)?;
        let report = check_convergence(&traj, candidate.designated_name(), target)?;
        if report.pass {
            let cert = SpeedupCertificate {
                target,
                measured_tau: tau,
                measured_gamma,
                initial_factor: initial,
                factor,
                certified: true,
            };
            return Ok((candidate, cert));
        }
        if factor >= opts.max_factor {
            return Err(CompileError::NotCertified { max_factor: opts.max_factor });
        }
        factor += 1;
    }
}
