use std::ops::Range;

use num_rational::BigRational;
use serde::Serialize;

use super::{Matrix, StabilityError};
use crate::model::Crn;
use crate::multipoly::MultiPoly;
use crate::scalar::Scalar;

/// Exact partial derivatives `d f_i / d y_j` of the mass-action vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicJacobian {
    species: Vec<String>,
    entries: Vec<Vec<MultiPoly>>,
}

impl SymbolicJacobian {
    pub fn new(crn: &Crn) -> Self {
        let field = crn.symbolic_vector_field();
        let n = crn.num_species();
        let entries = field
            .iter()
            .map(|fi| (0..n).map(|j| fi.partial(j)).collect())
            .collect();
        Self {
            species: crn.species_names().iter().map(|s| s.to_string()).collect(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<MultiPoly>] {
        &self.entries
    }

    pub fn evaluate<T: Scalar>(&self, state: &[T]) -> Result<Matrix<T>, StabilityError> {
        let n = self.dim();
        if state.len() != n {
            return Err(StabilityError::Dimension {
                expected: n,
                got: state.len(),
            });
        }
        let data = self
            .entries
            .iter()
            .flat_map(|row| row.iter().map(|p| p.evaluate(state)))
            .collect();
        Matrix::new(n, n, data)
    }

    pub fn evaluate_exact(&self, state: &[BigRational]) -> Result<Vec<Vec<BigRational>>, StabilityError> {
        if state.len() != self.dim() {
            return Err(StabilityError::Dimension {
                expected: self.dim(),
                got: state.len(),
            });
        }
        Ok(self
            .entries
            .iter()
            .map(|row| row.iter().map(|p| p.evaluate_exact(state)).collect())
            .collect())
    }

    /// True when every entry in the given block is the zero polynomial.
    pub fn is_zero_block(&self, rows: Range<usize>, cols: Range<usize>) -> bool {
        rows.into_iter()
            .all(|i| cols.clone().all(|j| self.entries[i][j].is_zero()))
    }

    /// Entries formatted with species names, for display.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        let names: Vec<&str> = self.species.iter().map(String::as_str).collect();
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.format_with(&names)).collect())
            .collect()
    }
}

impl Serialize for SymbolicJacobian {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            species: &'a [String],
            entries: Vec<Vec<String>>,
        }
        View {
            species: &self.species,
            entries: self.to_strings(),
        }
        .serialize(s)
    }
}

pub fn symbolic_jacobian(crn: &Crn) -> SymbolicJacobian {
    SymbolicJacobian::new(crn)
}

pub fn jacobian_at<T: Scalar>(crn: &Crn, state: &[T]) -> Result<Matrix<T>, StabilityError> {
    SymbolicJacobian::new(crn).evaluate(state)
}
