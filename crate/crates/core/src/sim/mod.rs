//! Mass-action integration from the all-zero state and the checks for
//! integrality, boundedness and real-time convergence.

mod checks;
pub mod curves;
mod export;
mod integrate;
mod reference;

pub use checks::{
    check_boundedness, check_convergence, check_transcendental_bounds, fit_decay_rate,
    transcendental_bounds_report, CheckError, ConvergenceReport,
    ConvergenceSample, TranscendentalBounds,
};
pub use export::{trajectory_to_csv, trajectory_to_json};
pub use integrate::{integrate, integrate_from_zero, IntegratorOptions, IntegratorStats, SimError, Trajectory};
pub use reference::{reference_solution, ReferenceCurve, ReferenceError};

pub use integrate::fixed_step_solve;
