//! Hermitian observables used as reward operators.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{ComplexMatrix, HERMITIAN_TOL};

/// A Hermitian matrix; Hermiticity (within [`HERMITIAN_TOL`]) is checked at
/// construction so downstream code can rely on real expectation values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for Observable {
    type Error = crate::error::Error;

    fn try_from(matrix: ComplexMatrix) -> Result<Self> {
        Observable::new(matrix)
    }
}

impl From<Observable> for ComplexMatrix {
    fn from(obs: Observable) -> Self {
        obs.matrix
    }
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.ensure_hermitian(HERMITIAN_TOL)?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }
}
