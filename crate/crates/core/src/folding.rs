//! Noise-scaling transforms: the four gate-identity insertion methods on
//! the fixed ansatz shape, the scale-factor law c(i) = (X/2) i + 1, and
//! pulse time stretching. Folding is defined only for the recognized ansatz
//! shape; the insertion points are positional, so an arbitrary-circuit
//! folder would silently mis-fold.

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::pulse::MsPulseParams;
use serde::{Deserialize, Serialize};

/// How circuit noise is scaled between extrapolation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldMethod {
    /// Continuous pulse stretching; the scale factor is c_tau, not Eq-7.
    TimeStretch,
    /// (MS^dag MS)^i between the first MS and the Rz.
    MsBefore,
    /// (MS^dag MS)^i between the Rz and the closing MS^dag.
    MsAfter,
    /// Both of the above.
    MsBeforeAndAfter,
    /// (MS)^{4i} after the first MS and (MS^dag)^{4i} before measurement.
    MsFour,
}

impl FoldMethod {
    /// Two-qubit gates added per fold.
    pub fn gates_per_fold(self) -> Option<usize> {
        match self {
            FoldMethod::TimeStretch => None,
            FoldMethod::MsBefore | FoldMethod::MsAfter => Some(2),
            FoldMethod::MsBeforeAndAfter => Some(4),
            FoldMethod::MsFour => Some(8),
        }
    }

    pub fn is_gate_insertion(self) -> bool {
        self.gates_per_fold().is_some()
    }

    pub fn name(self) -> &'static str {
        match self {
            FoldMethod::TimeStretch => "time_stretch",
            FoldMethod::MsBefore => "ms_before",
            FoldMethod::MsAfter => "ms_after",
            FoldMethod::MsBeforeAndAfter => "ms_before_and_after",
            FoldMethod::MsFour => "ms_four",
        }
    }
}

impl std::str::FromStr for FoldMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time_stretch" => Ok(FoldMethod::TimeStretch),
            "ms_before" => Ok(FoldMethod::MsBefore),
            "ms_after" => Ok(FoldMethod::MsAfter),
            "ms_before_and_after" => Ok(FoldMethod::MsBeforeAndAfter),
            "ms_four" => Ok(FoldMethod::MsFour),
            other => Err(Error::Config(format!("unknown fold method '{other}'"))),
        }
    }
}

/// c(i) = (X/2) i + 1 where X is the two-qubit gates added per fold.
pub fn scale_factor(method: FoldMethod, index: usize) -> Result<f64> {
    let x = method.gates_per_fold().ok_or_else(|| {
        Error::InvalidValue(
            "time stretching has a continuous scale; the gate-count law does not apply".into(),
        )
    })?;
    Ok((x as f64 / 2.0) * index as f64 + 1.0)
}

/// A fold method with the insertion indices to run, and their factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSchedule {
    pub method: FoldMethod,
    pub indices: Vec<usize>,
    pub factors: Vec<f64>,
}

impl ScaleSchedule {
    pub fn gate_insertion(method: FoldMethod, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Config("schedule needs at least one index".into()));
        }
        let mut factors = Vec::with_capacity(indices.len());
        for &i in &indices {
            factors.push(scale_factor(method, i)?);
        }
        for w in factors.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("schedule factors must increase".into()));
            }
        }
        Ok(Self { method, indices, factors })
    }

    /// The stretch grid; factors are the c_tau values themselves.
    pub fn time_stretch(factors: Vec<f64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Config("schedule needs at least one factor".into()));
        }
        for w in factors.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("schedule factors must increase".into()));
            }
        }
        if factors.iter().any(|&c| !(0.1..=20.0).contains(&c)) {
            return Err(Error::Config("stretch factors outside [0.1, 20]".into()));
        }
        Ok(Self { method: FoldMethod::TimeStretch, indices: (0..factors.len()).collect(), factors })
    }

    /// Default stretch grid used by the sweep experiments.
    pub fn default_stretch_grid() -> Self {
        Self::time_stretch(vec![0.6, 0.8, 1.0, 1.2, 1.4, 1.6]).unwrap()
    }
}

struct AnsatzParts {
    prep: Vec<GateOp>,
    ms: GateOp,
    rz: GateOp,
    ms_inverse: GateOp,
}

/// Accept exactly the recognized ansatz shape: single-qubit preparation
/// gates, one MS, one virtual Rz, one closing inverse MS.
fn recognize_ansatz(circuit: &Circuit) -> Result<AnsatzParts> {
    let mut prep = Vec::new();
    let mut rest = circuit.gates.iter();
    let ms = loop {
        match rest.next() {
            Some(g) if !g.is_two_qubit() => prep.push(g.clone()),
            Some(g) if g.kind == GateKind::Ms => break g.clone(),
            Some(g) => {
                return Err(Error::UnrecognizedAnsatz(format!(
                    "expected the entangling MS, found {:?}",
                    g.kind
                )))
            }
            None => return Err(Error::UnrecognizedAnsatz("no MS gate".into())),
        }
    };
    let rz = match rest.next() {
        Some(g) if g.kind == GateKind::RzVirtual => g.clone(),
        other => {
            return Err(Error::UnrecognizedAnsatz(format!(
                "expected the virtual Rz after MS, found {:?}",
                other.map(|g| g.kind)
            )))
        }
    };
    let ms_inverse = match rest.next() {
        Some(g) if g.kind == GateKind::MsInverse => g.clone(),
        other => {
            return Err(Error::UnrecognizedAnsatz(format!(
                "expected the closing inverse MS, found {:?}",
                other.map(|g| g.kind)
            )))
        }
    };
    if rest.next().is_some() {
        return Err(Error::UnrecognizedAnsatz("trailing gates after the inverse MS".into()));
    }
    Ok(AnsatzParts { prep, ms, rz, ms_inverse })
}

/// Insert gate identities per the method; `index` counts folds and i = 0
/// returns the circuit unchanged. The folded circuit has 2 c(i) two-qubit
/// gates while its noiseless action is unchanged.
pub fn fold_circuit(circuit: &Circuit, method: FoldMethod, index: usize) -> Result<Circuit> {
    if !method.is_gate_insertion() {
        return Err(Error::InvalidValue(
            "time stretching is applied through pulse parameters, not gate insertion".into(),
        ));
    }
    let parts = recognize_ansatz(circuit)?;
    if index == 0 {
        return Ok(circuit.clone());
    }
    let (a, b) = (parts.ms.targets[0], parts.ms.targets[1]);
    let pair = [GateOp::ms_inverse(a, b), GateOp::ms(a, b)];
    let mut gates = parts.prep.clone();
    gates.push(parts.ms.clone());
    match method {
        FoldMethod::MsBefore => {
            for _ in 0..index {
                gates.extend_from_slice(&pair);
            }
            gates.push(parts.rz.clone());
            gates.push(parts.ms_inverse.clone());
        }
        FoldMethod::MsAfter => {
            gates.push(parts.rz.clone());
            for _ in 0..index {
                gates.extend_from_slice(&pair);
            }
            gates.push(parts.ms_inverse.clone());
        }
        FoldMethod::MsBeforeAndAfter => {
            for _ in 0..index {
                gates.extend_from_slice(&pair);
            }
            gates.push(parts.rz.clone());
            for _ in 0..index {
                gates.extend_from_slice(&pair);
            }
            gates.push(parts.ms_inverse.clone());
        }
        FoldMethod::MsFour => {
            for _ in 0..4 * index {
                gates.push(GateOp::ms(a, b));
            }
            gates.push(parts.rz.clone());
            gates.push(parts.ms_inverse.clone());
            for _ in 0..4 * index {
                gates.push(GateOp::ms_inverse(a, b));
            }
        }
        FoldMethod::TimeStretch => unreachable!(),
    }
    Circuit::new(circuit.num_qubits, gates)
}

/// The circuit realizing schedule point `k` of the ansatz at `theta`:
/// folded for gate-insertion methods, stretch-annotated for time stretch.
pub fn scaled_circuit(schedule: &ScaleSchedule, theta: f64, k: usize) -> Result<Circuit> {
    let ansatz = crate::circuit::build_uccsd_ansatz(theta)?;
    match schedule.method {
        FoldMethod::TimeStretch => {
            let c = schedule.factors[k];
            let gates = ansatz
                .gates
                .iter()
                .map(|g| {
                    if g.is_two_qubit() {
                        g.clone().with_stretch(c)
                    } else {
                        g.clone()
                    }
                })
                .collect();
            Circuit::new(ansatz.num_qubits, gates)
        }
        method => fold_circuit(&ansatz, method, schedule.indices[k]),
    }
}

/// Stretch the MS pulse parameters by c_tau, holding the peak Rabi rate
/// fixed; the stretched gate is recalibrated independently.
pub fn stretch_pulse(base: &MsPulseParams, c_tau: f64) -> Result<MsPulseParams> {
    if !(0.1..=20.0).contains(&c_tau) {
        return Err(Error::InvalidValue(format!("stretch factor {c_tau} outside [0.1, 20]")));
    }
    Ok(base.stretched(c_tau))
}
