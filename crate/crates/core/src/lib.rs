//! Desk-scale simulator for a trapped-ion VQE with zero-noise extrapolation:
//! pulse-level noisy Molmer-Sorensen and single-qubit gates (Lindblad
//! dynamics on a truncated Fock space), circuit-level noise scaling by time
//! stretching and gate-identity insertion, shot sampling with the per-sample
//! energy estimator, Richardson extrapolation, and the strategies that
//! combine extrapolation with a 1-D variational optimization.

pub mod circuit;
pub mod density;
pub mod error;
pub mod experiment;
pub mod folding;
pub mod hamiltonian;
pub mod linalg;
pub mod pauli;
pub mod pulse;
pub mod richardson;
pub mod sampling;
pub mod vqe;

pub use circuit::{build_uccsd_ansatz, Circuit, GateKind, GateOp};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use hamiltonian::Hamiltonian;
pub use linalg::{CMatrix, C64};
pub use pauli::{Pauli, PauliString};
