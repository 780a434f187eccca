use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{ClaimedLimit, CompileError};
use crate::model::Crn;
use crate::parser::{format_crn, format_reaction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match self.as_i8() * other.as_i8() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionKind {
    Add,
    Multiply,
    Reciprocal,
    /// First stage of subtraction: `Y -> 1/(a - b)`.
    SubtractStage,
}

/// How a composite program was assembled. Species are laid out as the
/// operands' blocks in order, then the fresh species.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub kind: CompositionKind,
    pub operands: Vec<SignedProgram>,
    pub blocks: Vec<Range<usize>>,
    pub fresh: usize,
}

/// A network together with its designated output, the sign of the computed
/// number and the claimed magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedProgram {
    crn: Crn,
    designated: usize,
    sign: Sign,
    limit: ClaimedLimit,
    speedup: u64,
    composition: Option<Box<Composition>>,
}

impl SignedProgram {
    /// Checks that the designated species exists, that the network is
    /// integral and that `sign` is zero exactly when the limit is.
    pub fn from_parts(
        crn: Crn,
        designated: usize,
        sign: Sign,
        limit: ClaimedLimit,
        speedup: u64,
    ) -> Result<Self, CompileError> {
        if designated >= crn.num_species() {
            return Err(CompileError::BadDesignated(designated));
        }
        let report = crn.validate_integral();
        if !report.is_integral() {
            return Err(CompileError::NotIntegral(report.violations.len()));
        }
        if (sign == Sign::Zero) != limit.is_known_zero() {
            return Err(CompileError::SignMismatch);
        }
        if speedup == 0 {
            return Err(CompileError::InvalidSpeedup);
        }
        Ok(Self {
            crn,
            designated,
            sign,
            limit,
            speedup,
            composition: None,
        })
    }

    pub(crate) fn with_composition(mut self, c: Composition) -> Self {
        self.composition = Some(Box::new(c));
        self
    }

    pub fn crn(&self) -> &Crn {
        &self.crn
    }

    pub fn designated(&self) -> usize {
        self.designated
    }

    pub fn designated_name(&self) -> &str {
        self.crn.species()[self.designated].as_str()
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn limit(&self) -> &ClaimedLimit {
        &self.limit
    }

    pub fn speedup(&self) -> u64 {
        self.speedup
    }

    pub fn composition(&self) -> Option<&Composition> {
        self.composition.as_deref()
    }

    /// The signed number computed, in double precision.
    pub fn value_f64(&self) -> f64 {
        f64::from(self.sign.as_i8()) * self.limit.value_f64()
    }

    pub(crate) fn set_sign(&mut self, sign: Sign) {
        self.sign = sign;
    }

    pub(crate) fn replace_crn(&mut self, crn: Crn) {
        self.crn = crn;
    }

    pub(crate) fn set_speedup(&mut self, s: u64) {
        self.speedup = s;
    }

    pub(crate) fn composition_mut(&mut self) -> Option<&mut Composition> {
        self.composition.as_deref_mut()
    }

    /// Network text with the designated species recorded.
    pub fn to_crn_text(&self) -> String {
        format_crn(&self.crn, Some(self.designated))
    }

    pub fn manifest(&self) -> ProgramManifest {
        ProgramManifest {
            species: self.crn.species_names().iter().map(|s| s.to_string()).collect(),
            reactions: self
                .crn
                .reactions()
                .iter()
                .map(|r| format_reaction(&self.crn, r))
                .collect(),
            designated: self.designated_name().to_string(),
            sign: self.sign.as_i8(),
            claimed_limit: self.limit.to_string(),
            claimed_value: self.limit.value_f64(),
            speedup: self.speedup,
            composition: self.composition().map(|c| c.kind),
            integral: self.crn.validate_integral().is_integral(),
        }
    }
}

/// JSON description of a compiled program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramManifest {
    pub species: Vec<String>,
    pub reactions: Vec<String>,
    pub designated: String,
    pub sign: i8,
    pub claimed_limit: String,
    pub claimed_value: f64,
    pub speedup: u64,
    pub composition: Option<CompositionKind>,
    pub integral: bool,
}
