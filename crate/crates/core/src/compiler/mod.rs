//! Synthesis of integral networks computing real numbers.

mod base;
mod combinators;
mod expr;
mod limit;
mod program;
mod speedup;

use thiserror::Error;

use crate::model::ModelError;
use crate::poly::PolyError;
use crate::sim::{CheckError, SimError};

pub use base::{compile_algebraic, compile_poly_root, compile_rational, compile_rational_value, transcendental_construction};
pub use combinators::{add, multiply, negate, reciprocal, signed_add, subtract, subtract_stage};
pub use expr::{compile_expression, parse_expression, Expr};
pub use limit::{ClaimedLimit, Enclosure};
pub use program::{Composition, CompositionKind, ProgramManifest, Sign, SignedProgram};
pub use speedup::{auto_speed_up, choose_speedup_factor, speed_up, SpeedupCertificate, SpeedupOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("denominator must be positive")]
    NonPositiveDenominator,
    #[error("polynomial has no positive root")]
    NoPositiveRoot,
    #[error("target interval contains 0")]
    TargetContainsZero,
    #[error("target interval must contain exactly one root, found {0}")]
    RootCount(usize),
    #[error("polynomial degree too large")]
    DegreeTooLarge,
    #[error("operand must be nonnegative")]
    NegativeOperand,
    #[error("reciprocal of zero")]
    DivisionByZero,
    #[error("subtraction needs the first magnitude to be at least the second")]
    WrongOrder,
    #[error("cannot order {left} and {right} at the available precision")]
    OrderingUndecidable { left: String, right: String },
    #[error("precision limit reached")]
    PrecisionExhausted,
    #[error("speed-up factor must be a positive integer")]
    InvalidSpeedup,
    #[error("no factor up to {max_factor} meets the convergence bound")]
    NotCertified { max_factor: u64 },
    #[error("designated species index {0} out of range")]
    BadDesignated(usize),
    #[error("network is not integral ({0} non-integer rates)")]
    NotIntegral(usize),
    #[error("sign must be zero exactly when the limit is zero")]
    SignMismatch,
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Check(#[from] CheckError),
}
