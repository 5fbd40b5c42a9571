//! Pauli strings and their dense matrices. Qubit 0 is the leftmost tensor
//! factor throughout the crate, so "ZI" means Z on qubit 0.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        let (a, b, c, d) = match self {
            Pauli::I => (ONE, ZERO, ZERO, ONE),
            Pauli::X => (ZERO, ONE, ONE, ZERO),
            Pauli::Y => (ZERO, -crate::linalg::I, crate::linalg::I, ZERO),
            Pauli::Z => (ONE, ZERO, ZERO, -ONE),
        };
        CMatrix::from_vec(2, 2, vec![a, b, c, d]).unwrap()
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidValue(format!("unknown Pauli '{other}'"))),
        }
    }

    /// Eigenvectors as columns: column 0 for eigenvalue +1, column 1 for -1.
    /// For I both columns carry eigenvalue +1.
    pub fn eigenbasis(self) -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Pauli::I | Pauli::Z => CMatrix::identity(2),
            Pauli::X => CMatrix::from_real(2, 2, &[h, h, h, -h]).unwrap(),
            Pauli::Y => CMatrix::from_vec(
                2,
                2,
                vec![
                    C64::new(h, 0.0),
                    C64::new(h, 0.0),
                    C64::new(0.0, h),
                    C64::new(0.0, -h),
                ],
            )
            .unwrap(),
        }
    }
}

/// Fixed-length word over {I, X, Y, Z}, one factor per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn parse(s: &str) -> Result<Self> {
        let ops: Result<Vec<Pauli>> = s.chars().map(Pauli::from_char).collect();
        Ok(Self(ops?))
    }

    pub fn num_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Dense 2^n x 2^n matrix, qubit 0 as the leftmost Kronecker factor.
    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::identity(1);
        for p in &self.0 {
            m = m.kron(&p.matrix());
        }
        m
    }

    /// Eigenvalue (+1/-1) of the computational-basis-rotated outcome for a
    /// basis index after rotating into this string's eigenbasis: each qubit
    /// with a non-identity factor contributes its bit's parity.
    pub fn outcome_sign(&self, basis_index: usize) -> i8 {
        let n = self.0.len();
        let mut sign = 1i8;
        for (q, p) in self.0.iter().enumerate() {
            if *p == Pauli::I {
                continue;
            }
            let bit = (basis_index >> (n - 1 - q)) & 1;
            if bit == 1 {
                sign = -sign;
            }
        }
        sign
    }

    /// Unitary rotating this string's eigenbasis to the computational basis.
    pub fn basis_rotation(&self) -> CMatrix {
        let mut m = CMatrix::identity(1);
        for p in &self.0 {
            m = m.kron(&p.eigenbasis());
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{:?}", p)?;
        }
        Ok(())
    }
}
