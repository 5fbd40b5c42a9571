//! Gate-level circuit representation and the single-parameter UCCSD ansatz.
//!
//! Ideal unitaries here are the noiseless targets; the pulse simulator
//! produces the noisy channel counterparts. Conventions: qubit 0 is the
//! leftmost tensor factor, R(phi, theta) = exp(-i theta/2 (cos phi X + sin
//! phi Y)), MS = exp(-i pi/4 XX) and MSInverse its adjoint.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::pauli::Pauli;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// Pauli X, implemented on hardware as a square pulse R(0, pi).
    X,
    /// Virtual z-rotation; exact by construction.
    RzVirtual,
    /// Single-qubit rotation about an equatorial axis.
    R,
    /// Fully entangling XX(pi/2) interaction.
    Ms,
    /// The inverse interaction (-XX), an ion-dependent pi phase shift.
    MsInverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    /// Rotation angle (radians) for RzVirtual and R.
    pub angle: f64,
    /// Rotation axis (radians) for R and the MS family.
    pub axis: f64,
    /// Pulse-duration stretch factor; 1.0 is the calibrated gate.
    pub stretch: f64,
}

impl GateOp {
    pub fn x(target: usize) -> Self {
        Self { kind: GateKind::X, targets: vec![target], angle: std::f64::consts::PI, axis: 0.0, stretch: 1.0 }
    }

    pub fn rz(angle: f64, target: usize) -> Self {
        Self { kind: GateKind::RzVirtual, targets: vec![target], angle, axis: 0.0, stretch: 1.0 }
    }

    pub fn r(axis: f64, angle: f64, target: usize) -> Self {
        Self { kind: GateKind::R, targets: vec![target], angle, axis, stretch: 1.0 }
    }

    pub fn ms(a: usize, b: usize) -> Self {
        Self { kind: GateKind::Ms, targets: vec![a, b], angle: std::f64::consts::FRAC_PI_2, axis: 0.0, stretch: 1.0 }
    }

    pub fn ms_inverse(a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::MsInverse,
            targets: vec![a, b],
            angle: -std::f64::consts::FRAC_PI_2,
            axis: std::f64::consts::PI,
            stretch: 1.0,
        }
    }

    pub fn with_stretch(mut self, stretch: f64) -> Self {
        self.stretch = stretch;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let want = match self.kind {
            GateKind::X | GateKind::RzVirtual | GateKind::R => 1,
            GateKind::Ms | GateKind::MsInverse => 2,
        };
        if self.targets.len() != want {
            return Err(Error::InvalidValue(format!(
                "{:?} takes {want} target(s), got {}",
                self.kind,
                self.targets.len()
            )));
        }
        if want == 2 && self.targets[0] == self.targets[1] {
            return Err(Error::InvalidValue("two-qubit gate targets must be distinct".into()));
        }
        if self.stretch.is_nan() || self.stretch <= 0.0 {
            return Err(Error::InvalidValue(format!("stretch {} must be positive", self.stretch)));
        }
        if !self.angle.is_finite() || !self.axis.is_finite() {
            return Err(Error::InvalidValue("gate angles must be finite".into()));
        }
        Ok(())
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.kind, GateKind::Ms | GateKind::MsInverse)
    }

    /// Ideal unitary on the gate's own qubits (2x2 or 4x4).
    pub fn local_unitary(&self) -> CMatrix {
        match self.kind {
            GateKind::X => Pauli::X.matrix(),
            GateKind::RzVirtual => {
                let (s, c) = (self.angle / 2.0).sin_cos();
                CMatrix::from_vec(
                    2,
                    2,
                    vec![C64::new(c, -s), ZERO, ZERO, C64::new(c, s)],
                )
                .unwrap()
            }
            GateKind::R => rotation_unitary(self.axis, self.angle),
            GateKind::Ms | GateKind::MsInverse => {
                let (s, c) = (self.angle / 2.0).sin_cos();
                // exp(-i theta/2 sigma_phi (x) sigma_phi)
                let sp = sigma_phi(self.axis);
                let ss = sp.kron(&sp);
                CMatrix::identity(4)
                    .scale(C64::new(c, 0.0))
                    .sub(&ss.scale(C64::new(0.0, s)))
            }
        }
    }
}

pub fn sigma_phi(phi: f64) -> CMatrix {
    let (s, c) = phi.sin_cos();
    Pauli::X
        .matrix()
        .scale(C64::new(c, 0.0))
        .add(&Pauli::Y.matrix().scale(C64::new(s, 0.0)))
}

/// exp(-i theta/2 sigma_phi) on one qubit.
pub fn rotation_unitary(phi: f64, theta: f64) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    CMatrix::identity(2)
        .scale(C64::new(c, 0.0))
        .sub(&sigma_phi(phi).scale(C64::new(0.0, s)))
}

/// Ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<GateOp>) -> Result<Self> {
        for g in &gates {
            g.validate()?;
            if let Some(&t) = g.targets.iter().find(|&&t| t >= num_qubits) {
                return Err(Error::InvalidValue(format!(
                    "target {t} out of range for {num_qubits} qubits"
                )));
            }
        }
        Ok(Self { num_qubits, gates })
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Gate unitary embedded on the full register.
    pub fn embedded_unitary(&self, gate: &GateOp) -> CMatrix {
        let local = gate.local_unitary();
        match gate.targets.as_slice() {
            [t] => {
                let mut m = CMatrix::identity(1);
                for q in 0..self.num_qubits {
                    m = if q == *t { m.kron(&local) } else { m.kron(&CMatrix::identity(2)) };
                }
                m
            }
            [a, b] => {
                assert_eq!(self.num_qubits, 2, "two-qubit embedding beyond 2 qubits unsupported");
                if (*a, *b) == (0, 1) {
                    local
                } else {
                    let swap = CMatrix::from_real(
                        4,
                        4,
                        &[
                            1.0, 0.0, 0.0, 0.0, //
                            0.0, 0.0, 1.0, 0.0, //
                            0.0, 1.0, 0.0, 0.0, //
                            0.0, 0.0, 0.0, 1.0,
                        ],
                    )
                    .unwrap();
                    swap.mul(&local).mul(&swap)
                }
            }
            _ => unreachable!(),
        }
    }

    /// Product of ideal gate unitaries, applied left (first gate) to right.
    pub fn unitary(&self) -> CMatrix {
        let dim = 1 << self.num_qubits;
        let mut u = CMatrix::identity(dim);
        for g in &self.gates {
            u = self.embedded_unitary(g).mul(&u);
        }
        u
    }

    /// Noiseless action on |0...0>.
    pub fn statevector(&self) -> Vec<C64> {
        let dim = 1 << self.num_qubits;
        let mut v = vec![ZERO; dim];
        v[0] = ONE;
        for g in &self.gates {
            v = self.embedded_unitary(g).mul_vec(&v);
        }
        v
    }
}

/// The two-qubit UCCSD ansatz: X on both qubits, an MS gate, the
/// parameterized virtual z-rotation on qubit 1, and the inverse MS gate.
/// Measurement is not a gate; the estimator handles it.
pub fn build_uccsd_ansatz(theta: f64) -> Result<Circuit> {
    if !theta.is_finite() {
        return Err(Error::InvalidValue(format!("theta {theta} must be finite")));
    }
    Circuit::new(
        2,
        vec![
            GateOp::x(0),
            GateOp::x(1),
            GateOp::ms(0, 1),
            GateOp::rz(theta, 1),
            GateOp::ms_inverse(0, 1),
        ],
    )
}
