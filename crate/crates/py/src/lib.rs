//! Python bindings: the Hamiltonian model, Richardson extrapolation, noise
//! scaling bookkeeping and the pulse-level simulator behind a small API.

use ionzne::circuit::build_uccsd_ansatz;
use ionzne::density::DensityMatrix;
use ionzne::error::Error;
use ionzne::experiment::scaled_circuit;
use ionzne::folding::{FoldMethod, ScaleSchedule};
use ionzne::pulse::sim::ideal_ms_unitary;
use ionzne::pulse::{MsPulseParams, MsSign, NoiseConfig, PulseSimulator, SqPulseParams};
use ionzne::richardson;
use ionzne::sampling;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::path::PathBuf;
use std::str::FromStr;

fn err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::InvalidValue(_) | Error::DimensionMismatch(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Weighted Pauli-sum Hamiltonian loaded from a coefficient file.
#[pyclass(name = "Hamiltonian")]
struct PyHamiltonian {
    inner: ionzne::Hamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: ionzne::Hamiltonian::from_file(&path).map_err(err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: ionzne::Hamiltonian::parse(text).map_err(err)? })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    fn terms(&self) -> Vec<(String, f64)> {
        self.inner.terms().iter().map(|(c, p)| (p.to_string(), *c)).collect()
    }

    fn exact_ground_energy(&self) -> PyResult<f64> {
        self.inner.exact_ground_energy().map_err(err)
    }

    /// Exact expectation on the noiseless ansatz state at `theta`.
    fn noiseless_ansatz_energy(&self, theta: f64) -> PyResult<f64> {
        let state = build_uccsd_ansatz(theta).map_err(err)?.statevector();
        let rho = DensityMatrix::from_pure(&state).map_err(err)?;
        self.inner.expectation(&rho).map_err(err)
    }
}

/// Richardson weights for the given scale factors (order = len - 1).
#[pyfunction]
fn richardson_gammas(factors: Vec<f64>) -> PyResult<Vec<f64>> {
    richardson::richardson_gammas(&factors).map_err(err)
}

/// Extrapolate (factors, energies, sems) at the given order to c = 0,
/// returning (estimate, sem, gammas).
#[pyfunction]
fn extrapolate_at_zero(
    factors: Vec<f64>,
    energies: Vec<f64>,
    sems: Vec<f64>,
    order: usize,
) -> PyResult<(f64, f64, Vec<f64>)> {
    if factors.len() != energies.len() || factors.len() != sems.len() {
        return Err(PyValueError::new_err("factors, energies and sems must align"));
    }
    let points: Vec<richardson::ScaledEstimate> = factors
        .iter()
        .zip(&energies)
        .zip(&sems)
        .map(|((&scale, &energy), &sem)| richardson::ScaledEstimate { scale, energy, sem })
        .collect();
    let problem = richardson::ExtrapolationProblem::new(points, order).map_err(err)?;
    let r = richardson::extrapolate(&problem).map_err(err)?;
    Ok((r.estimate, r.sem, r.gammas))
}

/// Shot-cost multiplier sum gamma_i^2 of a weight vector.
#[pyfunction]
fn variance_amplification(gammas: Vec<f64>) -> f64 {
    richardson::variance_amplification(&gammas)
}

/// The gate-count scale factor c(i) = (X/2) i + 1 for a fold method.
#[pyfunction]
fn scale_factor(method: &str, index: usize) -> PyResult<f64> {
    let method = FoldMethod::from_str(method).map_err(err)?;
    ionzne::folding::scale_factor(method, index).map_err(err)
}

/// Two-qubit gate count of the folded ansatz.
#[pyfunction]
fn folded_two_qubit_gates(method: &str, index: usize) -> PyResult<usize> {
    let method = FoldMethod::from_str(method).map_err(err)?;
    let folded =
        ionzne::folding::fold_circuit(&build_uccsd_ansatz(0.0).map_err(err)?, method, index)
            .map_err(err)?;
    Ok(folded.two_qubit_gate_count())
}

fn noise_by_name(name: &str) -> PyResult<NoiseConfig> {
    match name {
        "none" | "noiseless" => Ok(NoiseConfig::none()),
        "full" => Ok(NoiseConfig::full()),
        "appendix_b" => Ok(NoiseConfig::appendix_b()),
        other => Err(PyValueError::new_err(format!("unknown noise profile '{other}'"))),
    }
}

/// Pulse-level simulator for one profile and noise configuration.
#[pyclass(name = "Simulator")]
struct PySimulator {
    sim: PulseSimulator,
    schedule_cache: Option<(String, ScaleSchedule)>,
}

#[pymethods]
impl PySimulator {
    #[new]
    #[pyo3(signature = (profile="discrete", noise="full", fock_levels=16))]
    fn new(profile: &str, noise: &str, fock_levels: usize) -> PyResult<Self> {
        let params = match profile {
            "discrete" => MsPulseParams::discrete(),
            "time_stretch" => MsPulseParams::time_stretch_base(),
            other => return Err(PyValueError::new_err(format!("unknown profile '{other}'"))),
        };
        let sim = PulseSimulator::new(params, noise_by_name(noise)?, fock_levels).map_err(err)?;
        Ok(Self { sim, schedule_cache: None })
    }

    /// Calibrated coupling and residual infidelity for the MS pulse.
    fn calibrate(&self) -> PyResult<(f64, f64)> {
        let cal = self.sim.calibrate(self.sim.ms_base()).map_err(err)?;
        Ok((cal.coupling_scale, cal.residual_infidelity))
    }

    /// Entanglement fidelities of the noisy MS gate, its inverse, their
    /// composition, and the square pulses R(pi/2), R(pi).
    fn gate_fidelities(&self) -> PyResult<std::collections::HashMap<String, f64>> {
        let mut out = std::collections::HashMap::new();
        let plus = *self.sim.ms_base();
        let minus = plus.with_sign(MsSign::MinusXx);
        let ms = self.sim.ms_channel(&plus).map_err(err)?;
        let msd = self.sim.ms_channel(&minus).map_err(err)?;
        out.insert(
            "ms".into(),
            ms.entanglement_fidelity(&ideal_ms_unitary(&plus)).map_err(err)?,
        );
        out.insert(
            "ms_dagger".into(),
            msd.entanglement_fidelity(&ideal_ms_unitary(&minus)).map_err(err)?,
        );
        let composite = msd.after(&ms).map_err(err)?;
        out.insert(
            "ms_then_inverse".into(),
            composite
                .entanglement_fidelity(&ionzne::CMatrix::identity(4))
                .map_err(err)?,
        );
        for (key, angle) in
            [("r_half_pi", std::f64::consts::FRAC_PI_2), ("r_pi", std::f64::consts::PI)]
        {
            let ch = self.sim.sq_channel(&SqPulseParams::new(0.0, angle).map_err(err)?).map_err(err)?;
            let ideal = ionzne::circuit::rotation_unitary(0.0, angle);
            out.insert(key.into(), ch.entanglement_fidelity(&ideal).map_err(err)?);
        }
        Ok(out)
    }

    /// Set the noise-scaling schedule: fold indices for gate-insertion
    /// methods, stretch factors for time_stretch.
    fn schedule(&mut self, method: &str, points: Vec<f64>) -> PyResult<()> {
        let m = FoldMethod::from_str(method).map_err(err)?;
        let schedule = if m == FoldMethod::TimeStretch {
            ScaleSchedule::time_stretch(points).map_err(err)?
        } else {
            let indices: Vec<usize> = points
                .iter()
                .map(|&x| {
                    if x >= 0.0 && x.fract() == 0.0 {
                        Ok(x as usize)
                    } else {
                        Err(PyValueError::new_err(format!("fold index {x} must be a non-negative integer")))
                    }
                })
                .collect::<PyResult<_>>()?;
            ScaleSchedule::gate_insertion(m, indices).map_err(err)?
        };
        self.schedule_cache = Some((method.to_string(), schedule));
        Ok(())
    }

    /// Exact (infinite-shot) energy of the ansatz under this noise model.
    fn ansatz_energy(&self, theta: f64, hamiltonian: &PyHamiltonian) -> PyResult<f64> {
        let circuit = build_uccsd_ansatz(theta).map_err(err)?;
        self.sim.exact_energy(&circuit, &hamiltonian.inner).map_err(err)
    }

    /// Exact energy of the folded ansatz at schedule point `k` (requires a
    /// schedule set via `schedule`).
    fn scaled_energy(&self, theta: f64, k: usize, hamiltonian: &PyHamiltonian) -> PyResult<f64> {
        let (_, schedule) = self
            .schedule_cache
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("call schedule() first"))?;
        let circuit = scaled_circuit(schedule, theta, k).map_err(err)?;
        self.sim.exact_energy(&circuit, &hamiltonian.inner).map_err(err)
    }

    /// Finite-shot energy estimate: returns (mean, sem).
    #[pyo3(signature = (theta, hamiltonian, shots_per_term, seed=0))]
    fn measure_ansatz_energy(
        &self,
        theta: f64,
        hamiltonian: &PyHamiltonian,
        shots_per_term: usize,
        seed: u64,
    ) -> PyResult<(f64, f64)> {
        let circuit = build_uccsd_ansatz(theta).map_err(err)?;
        let (est, _) =
            self.sim.measure_energy(&circuit, &hamiltonian.inner, shots_per_term, seed).map_err(err)?;
        Ok((est.mean, est.sem))
    }
}

/// Derive a reproducible stream seed (matches the sweep/VQE seeding).
#[pyfunction]
fn derive_seed(base: u64, stream: Vec<u64>) -> u64 {
    sampling::derive_seed(base, &stream)
}

#[pymodule]
fn ionzne_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PySimulator>()?;
    m.add_function(wrap_pyfunction!(richardson_gammas, m)?)?;
    m.add_function(wrap_pyfunction!(extrapolate_at_zero, m)?)?;
    m.add_function(wrap_pyfunction!(variance_amplification, m)?)?;
    m.add_function(wrap_pyfunction!(scale_factor, m)?)?;
    m.add_function(wrap_pyfunction!(folded_two_qubit_gates, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    Ok(())
}
