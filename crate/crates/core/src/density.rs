//! Density matrices with the validity checks the simulator relies on.

use crate::error::{Error, Result};
use crate::linalg::{outer, CMatrix, C64};

/// Hermitian, unit-trace, positive-semidefinite (to tolerance) operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-9) and positivity
    /// (minimum eigenvalue >= -1e-8).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_ev = matrix.min_eigenvalue()?;
        if min_ev < -1e-8 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// |index><index| on `num_qubits` qubits.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(Error::InvalidValue(format!("basis index {index} out of range")));
        }
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[index] = C64::new(1.0, 0.0);
        Self::new(outer(&v, &v))
    }

    pub fn from_pure(state: &[C64]) -> Result<Self> {
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("state norm {norm} != 1")));
        }
        Self::new(outer(state, state))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = CMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_is_valid() {
        let rho = DensityMatrix::basis_state(2, 3).unwrap();
        assert_eq!(rho.dim(), 4);
        assert!((rho.matrix()[(3, 3)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_trace_violation() {
        let m = CMatrix::identity(2);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let m = CMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }
}
