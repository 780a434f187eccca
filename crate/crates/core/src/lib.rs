//! Compile real numbers into integral chemical reaction networks, simulate
//! their mass-action dynamics and certify convergence and stability.
//!
//! Numeric code is generic over [`scalar::Scalar`] (`f32` or `f64`); exact
//! arithmetic uses big rationals. The aliases below fix the common choices.

pub mod compiler;
pub mod exact;
pub mod model;
pub mod multipoly;
pub mod parser;
pub mod poly;
pub mod scalar;
pub mod sim;
pub mod stability;

pub use compiler::{ClaimedLimit, CompileError, Expr, Sign, SignedProgram};
pub use model::{Crn, CrnBuilder, ModelError, Reaction, Species};
pub use parser::{format_crn, parse_crn, ParseError};
pub use scalar::Scalar;

pub type Rational = exact::Rational;
pub type IntPolynomial = poly::IntPolynomial;
pub type RatPolynomial = poly::RatPolynomial;
pub type State64 = model::State<f64>;
pub type State32 = model::State<f32>;
pub type Trajectory64 = sim::Trajectory<f64>;
pub type Trajectory32 = sim::Trajectory<f32>;
pub type ConvergenceReport64 = sim::ConvergenceReport<f64>;
pub type StabilityReport64 = stability::StabilityReport<f64>;
pub type Matrix64 = stability::Matrix<f64>;
