//! Channel production: noiseless calibration of the effective spin-motion
//! coupling, Lindblad integration of the noisy gates on qubits (x) truncated
//! Fock space, and composition of per-gate channels over circuits.
//!
//! Channel extraction evolves all 16 two-qubit operator-basis elements, each
//! tensored with a fresh thermal motional state, and traces out the mode at
//! the end of the pulse. Identical gates reuse one cached channel.

use super::channel::QuantumChannel;
use super::ode::{identity_triplets, kron_triplets, Csr, DormandPrince};
use super::{MsPulseParams, MsSign, NoiseConfig, SqPulseParams};
use crate::circuit::{sigma_phi, Circuit, GateKind, GateOp};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::sampling::{estimate_energy, sample_hamiltonian, EnergyEstimate, ShotTable};
use std::collections::HashMap;
use std::sync::Mutex;

const QUBIT_DIM: usize = 4;

/// Outcome of the noiseless coupling calibration for one pulse family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    /// Effective Lamb-Dicke coupling entering H as (kappa/2) Omega(t).
    pub coupling_scale: f64,
    /// Noiseless entanglement infidelity against the ideal gate.
    pub residual_infidelity: f64,
}

/// Pulse-level simulator: one MS pulse family, one noise configuration,
/// write-once channel and calibration caches.
pub struct PulseSimulator {
    ms_base: MsPulseParams,
    noise: NoiseConfig,
    fock_levels: usize,
    stepper: DormandPrince,
    calibrations: Mutex<HashMap<u64, CalibrationResult>>,
    channels: Mutex<HashMap<u64, QuantumChannel>>,
}

impl PulseSimulator {
    pub const DEFAULT_FOCK_LEVELS: usize = 16;

    pub fn new(ms_base: MsPulseParams, noise: NoiseConfig, fock_levels: usize) -> Result<Self> {
        ms_base.validate()?;
        noise.validate()?;
        if fock_levels < 8 {
            return Err(Error::InvalidValue(format!(
                "fock_levels {fock_levels} below the minimum of 8"
            )));
        }
        if noise.initial_nbar >= (fock_levels - 2) as f64 {
            return Err(Error::InvalidValue(format!(
                "initial_nbar {} too close to the Fock truncation {fock_levels}",
                noise.initial_nbar
            )));
        }
        Ok(Self {
            ms_base,
            noise,
            fock_levels,
            stepper: DormandPrince::default(),
            calibrations: Mutex::new(HashMap::new()),
            channels: Mutex::new(HashMap::new()),
        })
    }

    pub fn ms_base(&self) -> &MsPulseParams {
        &self.ms_base
    }

    pub fn noise(&self) -> &NoiseConfig {
        &self.noise
    }

    pub fn fock_levels(&self) -> usize {
        self.fock_levels
    }

    /// Noiseless scalar calibration of the coupling for `params`, cached.
    pub fn calibrate(&self, params: &MsPulseParams) -> Result<CalibrationResult> {
        let key = params.cache_key() ^ (self.fock_levels as u64).wrapping_mul(0x9e37);
        if let Some(hit) = self.calibrations.lock().unwrap().get(&key) {
            return Ok(*hit);
        }
        let result = calibrate_ms(params, self.fock_levels, &self.stepper)?;
        self.calibrations.lock().unwrap().insert(key, result);
        Ok(result)
    }

    /// Noisy (per this simulator's config) channel for an MS pulse.
    pub fn ms_channel(&self, params: &MsPulseParams) -> Result<QuantumChannel> {
        let key = params
            .cache_key()
            .wrapping_mul(0x100000001b3)
            .wrapping_add(self.noise.cache_key())
            .wrapping_add(self.fock_levels as u64);
        if let Some(hit) = self.channels.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let cal = self.calibrate(params)?;
        let ch = if self.noise.is_noiseless() {
            // pure-state Kraus extraction; the motional state starts in the
            // ground state and there are no dissipators
            let kraus = noiseless_evolution(params, cal.coupling_scale, self.fock_levels, &self.stepper)?;
            channel_from_kraus(&kraus)?
        } else {
            simulate_ms_channel(
                params,
                &self.noise,
                cal.coupling_scale,
                self.fock_levels,
                &self.stepper,
            )?
        };
        self.channels.lock().unwrap().insert(key, ch.clone());
        Ok(ch)
    }

    /// Square-pulse single-qubit channel (dim 2).
    pub fn sq_channel(&self, pulse: &SqPulseParams) -> Result<QuantumChannel> {
        simulate_sq_channel(pulse, &self.noise)
    }

    /// Channel for one gate, embedded on the two-qubit register.
    pub fn gate_channel(&self, gate: &GateOp) -> Result<QuantumChannel> {
        gate.validate()?;
        match gate.kind {
            GateKind::X => {
                let ch = self.sq_channel(&SqPulseParams::new(0.0, std::f64::consts::PI)?)?;
                ch.embed_on_qubit(gate.targets[0], 2)
            }
            GateKind::R => {
                let ch = self.sq_channel(&SqPulseParams::new(gate.axis, gate.angle)?)?;
                ch.embed_on_qubit(gate.targets[0], 2)
            }
            GateKind::RzVirtual => {
                // virtual phase update, exact by construction
                let u = gate.local_unitary();
                QuantumChannel::from_unitary(&u)?.embed_on_qubit(gate.targets[0], 2)
            }
            GateKind::Ms => {
                let params = self.params_for_stretch(gate.stretch).with_sign(MsSign::PlusXx);
                self.ms_channel(&params)
            }
            GateKind::MsInverse => {
                let params = self.params_for_stretch(gate.stretch).with_sign(MsSign::MinusXx);
                let ch = self.ms_channel(&params)?;
                let over = self.noise.ms_dagger_overrotation_rad;
                if over > 0.0 {
                    // rotate further along the inverse gate's own direction
                    let extra = GateOp {
                        kind: GateKind::Ms,
                        targets: vec![0, 1],
                        angle: -over,
                        axis: params.phase,
                        stretch: 1.0,
                    }
                    .local_unitary();
                    QuantumChannel::from_unitary(&extra)?.after(&ch)
                } else {
                    Ok(ch)
                }
            }
        }
    }

    fn params_for_stretch(&self, stretch: f64) -> MsPulseParams {
        if stretch == 1.0 {
            self.ms_base
        } else {
            self.ms_base.stretched(stretch)
        }
    }

    /// Left-to-right composition of per-gate channels on |00><00|.
    pub fn apply_circuit(&self, circuit: &Circuit) -> Result<DensityMatrix> {
        if circuit.num_qubits != 2 {
            return Err(Error::DimensionMismatch("pulse simulation covers 2 qubits".into()));
        }
        let mut rho = DensityMatrix::basis_state(2, 0)?;
        for gate in &circuit.gates {
            rho = self.gate_channel(gate)?.apply(&rho)?;
        }
        Ok(rho)
    }

    /// The whole circuit as one channel (composition of the gate channels).
    pub fn circuit_channel(&self, circuit: &Circuit) -> Result<QuantumChannel> {
        let mut total = QuantumChannel::identity(QUBIT_DIM);
        for gate in &circuit.gates {
            total = self.gate_channel(gate)?.after(&total)?;
        }
        Ok(total)
    }

    /// Infinite-shot energy: the exact expectation on the simulated state.
    pub fn exact_energy(&self, circuit: &Circuit, h: &Hamiltonian) -> Result<f64> {
        h.expectation(&self.apply_circuit(circuit)?)
    }

    /// Finite-shot energy estimate with the full outcome table.
    pub fn measure_energy(
        &self,
        circuit: &Circuit,
        h: &Hamiltonian,
        shots_per_term: usize,
        seed: u64,
    ) -> Result<(EnergyEstimate, ShotTable)> {
        let rho = self.apply_circuit(circuit)?;
        let table = sample_hamiltonian(&rho, h, shots_per_term, seed)?;
        let estimate = estimate_energy(&table)?;
        Ok((estimate, table))
    }

    /// Re-simulate at a deeper truncation; errors when the fidelity moves
    /// more than 1e-4, which signals an under-truncated Fock space.
    pub fn verify_fock_convergence(&self, params: &MsPulseParams) -> Result<f64> {
        let shift = self.fock_convergence_shift(params)?;
        if shift > 1e-4 {
            return Err(Error::FockNotConverged(shift));
        }
        Ok(shift)
    }

    /// Re-simulate at a deeper truncation and report the fidelity shift.
    pub fn fock_convergence_shift(&self, params: &MsPulseParams) -> Result<f64> {
        let cal = self.calibrate(params)?;
        let here = simulate_ms_channel(
            params,
            &self.noise,
            cal.coupling_scale,
            self.fock_levels,
            &self.stepper,
        )?;
        let deeper = simulate_ms_channel(
            params,
            &self.noise,
            cal.coupling_scale,
            self.fock_levels + 4,
            &self.stepper,
        )?;
        let ideal = ideal_ms_unitary(params);
        let f1 = here.entanglement_fidelity(&ideal)?;
        let f2 = deeper.entanglement_fidelity(&ideal)?;
        Ok((f1 - f2).abs())
    }
}

/// Ideal unitary the pulse is calibrated against.
pub fn ideal_ms_unitary(params: &MsPulseParams) -> CMatrix {
    let theta = match params.sign {
        MsSign::PlusXx => std::f64::consts::FRAC_PI_2,
        MsSign::MinusXx => -std::f64::consts::FRAC_PI_2,
    };
    GateOp {
        kind: GateKind::Ms,
        targets: vec![0, 1],
        angle: theta,
        axis: params.phase,
        stretch: 1.0,
    }
    .local_unitary()
}

/// Sum-of-equatorial-Paulis operator for the drive: sigma_phi on ion 0 plus
/// (for the inverse gate, minus) sigma_phi on ion 1.
fn s_operator(params: &MsPulseParams) -> CMatrix {
    let sp = sigma_phi(params.phase);
    let id = CMatrix::identity(2);
    let first = sp.kron(&id);
    let second = id.kron(&sp);
    match params.sign {
        MsSign::PlusXx => first.add(&second),
        MsSign::MinusXx => first.sub(&second),
    }
}

fn dense_to_triplets(m: &CMatrix) -> Vec<(usize, usize, C64)> {
    let mut t = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)].norm_sqr() > 0.0 {
                t.push((i, j, m[(i, j)]));
            }
        }
    }
    t
}

fn lowering_triplets(n: usize) -> Vec<(usize, usize, C64)> {
    (1..n).map(|k| (k - 1, k, C64::new((k as f64).sqrt(), 0.0))).collect()
}

fn transpose_triplets(t: &[(usize, usize, C64)]) -> Vec<(usize, usize, C64)> {
    t.iter().map(|&(r, c, v)| (c, r, v)).collect()
}

fn dagger_triplets(t: &[(usize, usize, C64)]) -> Vec<(usize, usize, C64)> {
    t.iter().map(|&(r, c, v)| (c, r, v.conj())).collect()
}

fn conj_triplets(t: &[(usize, usize, C64)]) -> Vec<(usize, usize, C64)> {
    t.iter().map(|&(r, c, v)| (r, c, v.conj())).collect()
}

fn scale_triplets(t: &[(usize, usize, C64)], s: C64) -> Vec<(usize, usize, C64)> {
    t.iter().map(|&(r, c, v)| (r, c, v * s)).collect()
}

/// Triplets of A.B for triplet operands (small operators only).
fn mul_triplets(
    a: &[(usize, usize, C64)],
    b: &[(usize, usize, C64)],
) -> Vec<(usize, usize, C64)> {
    let mut by_row: HashMap<usize, Vec<(usize, C64)>> = HashMap::new();
    for &(r, c, v) in b {
        by_row.entry(r).or_default().push((c, v));
    }
    let mut out = Vec::new();
    for &(ar, ac, av) in a {
        if let Some(cols) = by_row.get(&ac) {
            for &(bc, bv) in cols {
                out.push((ar, bc, av * bv));
            }
        }
    }
    out
}

/// Vectorized commutator superoperator -i [X, .] in column stacking:
/// -i ((I kron X) - (X^T kron I)).
fn commutator_liouvillian(x: &[(usize, usize, C64)], dim: usize) -> Vec<(usize, usize, C64)> {
    let id = identity_triplets(dim);
    let left = kron_triplets(&id, x, dim);
    let right = kron_triplets(&transpose_triplets(x), &id, dim);
    let mut out = scale_triplets(&left, -crate::linalg::I);
    out.extend(scale_triplets(&right, crate::linalg::I));
    out
}

/// Vectorized dissipator D[c] = conj(c) kron c - 1/2 (I kron c^dag c +
/// (c^dag c)^T kron I).
fn dissipator_liouvillian(c: &[(usize, usize, C64)], dim: usize) -> Vec<(usize, usize, C64)> {
    let id = identity_triplets(dim);
    let cdc = mul_triplets(&dagger_triplets(c), c);
    let half = C64::new(-0.5, 0.0);
    let mut out = kron_triplets(&conj_triplets(c), c, dim);
    out.extend(scale_triplets(&kron_triplets(&id, &cdc, dim), half));
    out.extend(scale_triplets(&kron_triplets(&transpose_triplets(&cdc), &id, dim), half));
    out
}

fn thermal_probabilities(nbar: f64, levels: usize) -> Vec<f64> {
    if nbar <= 0.0 {
        let mut p = vec![0.0; levels];
        p[0] = 1.0;
        return p;
    }
    let ratio = nbar / (nbar + 1.0);
    let mut p: Vec<f64> = (0..levels).map(|k| ratio.powi(k as i32) / (nbar + 1.0)).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

/// Spin-motion coupling operators A = (S kron (a + a^dag)) and
/// B = (S kron i(a^dag - a)); H(t) = (kappa/2) Omega(t) [cos(delta_eff t) A
/// + sin(delta_eff t) B].
type Triplets = Vec<(usize, usize, C64)>;

fn coupling_operators(params: &MsPulseParams, fock: usize) -> (Triplets, Triplets) {
    let s = dense_to_triplets(&s_operator(params));
    let a = lowering_triplets(fock);
    let adag = dagger_triplets(&a);
    let mut x_mot = a.clone();
    x_mot.extend(adag.clone());
    let mut p_mot = scale_triplets(&adag, crate::linalg::I);
    p_mot.extend(scale_triplets(&a, -crate::linalg::I));
    (kron_triplets(&s, &x_mot, fock), kron_triplets(&s, &p_mot, fock))
}

/// Noiseless pure-state evolution of the four qubit basis states (motional
/// ground state), returning the effective 4x4 unitary block and the Kraus
/// operators indexed by final Fock level.
fn noiseless_evolution(
    params: &MsPulseParams,
    kappa: f64,
    fock: usize,
    stepper: &DormandPrince,
) -> Result<Vec<CMatrix>> {
    let dim = QUBIT_DIM * fock;
    let (a_trip, b_trip) = coupling_operators(params, fock);
    let a_op = Csr::from_triplets(dim, a_trip);
    let b_op = Csr::from_triplets(dim, b_trip);
    let env = params.envelope();
    let delta = params.detuning_rad();
    let half_kappa = C64::new(0.0, -0.5 * kappa); // -i (kappa/2)
    let ncol = QUBIT_DIM;
    let mut y0 = vec![ZERO; dim * ncol];
    for q in 0..QUBIT_DIM {
        y0[(q * fock) * ncol + q] = ONE; // |q> (x) |0_m>, column q
    }
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        dy.fill(ZERO);
        let om = env.value(t);
        let fc = half_kappa * (om * (delta * t).cos());
        let fs = half_kappa * (om * (delta * t).sin());
        a_op.accumulate_multi(fc, y, dy, ncol);
        b_op.accumulate_multi(fs, y, dy, ncol);
    };
    let yf = stepper.integrate(rhs, y0, 0.0, env.duration_s)?;
    // Kraus operators: M_n[q', q] = <q', n | psi_q>
    let mut kraus = Vec::with_capacity(fock);
    for n in 0..fock {
        let mut m = CMatrix::zeros(QUBIT_DIM, QUBIT_DIM);
        for q in 0..QUBIT_DIM {
            for qp in 0..QUBIT_DIM {
                m[(qp, q)] = yf[(qp * fock + n) * ncol + q];
            }
        }
        kraus.push(m);
    }
    Ok(kraus)
}

/// Superoperator from a Kraus family: S = sum_n conj(M_n) kron M_n.
fn channel_from_kraus(kraus: &[CMatrix]) -> Result<QuantumChannel> {
    let d = kraus[0].rows();
    let mut s = CMatrix::zeros(d * d, d * d);
    for m in kraus {
        s = s.add(&m.conj().kron(m));
    }
    QuantumChannel::new(d, s)
}

fn kraus_entanglement_fidelity(kraus: &[CMatrix], ideal: &CMatrix) -> f64 {
    let d = ideal.rows() as f64;
    let udag = ideal.dagger();
    let mut f = 0.0;
    for m in kraus {
        let tr = udag.mul(m).trace();
        f += tr.norm_sqr();
    }
    (f / (d * d)).clamp(0.0, 1.0)
}

/// Phase difference between the sigma_phi (x) sigma_phi = +1 and -1 sectors
/// of the effective unitary; -pi/2 for an ideal MS, +pi/2 for its inverse.
fn sector_phase(kraus: &[CMatrix], params: &MsPulseParams) -> f64 {
    let u = &kraus[0]; // motional ground-state block carries the gate
    let phi = params.phase;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let vp = [C64::new(h, 0.0), C64::new(0.0, phi).exp() * h];
    let vm = [C64::new(h, 0.0), -C64::new(0.0, phi).exp() * h];
    let kron2 = |x: &[C64; 2], y: &[C64; 2]| -> Vec<C64> {
        vec![x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]]
    };
    let e_plus = kron2(&vp, &vp); // sigma sigma = +1
    let e_minus = kron2(&vp, &vm); // sigma sigma = -1
    let amp = |v: &[C64]| -> C64 {
        let uv = u.mul_vec(v);
        crate::linalg::inner(v, &uv)
    };
    (amp(&e_plus) * amp(&e_minus).conj()).arg()
}

/// Scalar search over the coupling so the noiseless gate hits the ideal
/// sector phase, then the residual infidelity check.
pub fn calibrate_ms(
    params: &MsPulseParams,
    fock: usize,
    stepper: &DormandPrince,
) -> Result<CalibrationResult> {
    params.validate()?;
    let env = params.envelope();
    let delta = params.detuning_rad().abs();
    // quadratic-phase estimate: |Theta| = (kappa/2)^2 Int Omega^2 / |delta|
    let n = 2000;
    let dt = env.duration_s / n as f64;
    let mut int_om2 = 0.0;
    for k in 0..=n {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        int_om2 += w * env.value(k as f64 * dt).powi(2);
    }
    int_om2 *= dt / 3.0;
    let theta_target = std::f64::consts::FRAC_PI_8;
    let mut kappa = 2.0 * (theta_target * delta / int_om2).sqrt();
    let chi_target = match params.sign {
        MsSign::PlusXx => -std::f64::consts::FRAC_PI_2,
        MsSign::MinusXx => std::f64::consts::FRAC_PI_2,
    };
    let mut kraus = Vec::new();
    let mut converged = false;
    for _ in 0..40 {
        kraus = noiseless_evolution(params, kappa, fock, stepper)?;
        let chi = sector_phase(&kraus, params);
        let ratio = chi_target / chi;
        if ratio.is_nan() || ratio <= 0.0 {
            // over-rotated past the branch cut; pull back
            kappa *= 0.7;
            continue;
        }
        if (chi - chi_target).abs() < 1e-12 {
            converged = true;
            break;
        }
        kappa *= ratio.sqrt();
    }
    if !converged {
        return Err(Error::CalibrationFailed(format!(
            "sector phase did not settle for {params:?}"
        )));
    }
    let ideal = ideal_ms_unitary(params);
    let residual = 1.0 - kraus_entanglement_fidelity(&kraus, &ideal);
    if residual > 1e-4 {
        return Err(Error::CalibrationFailed(format!(
            "residual infidelity {residual:.3e} above 1e-4 for {params:?}"
        )));
    }
    Ok(CalibrationResult { coupling_scale: kappa, residual_infidelity: residual.max(0.0) })
}

/// Integrate the noisy master equation and extract the two-qubit channel.
pub fn simulate_ms_channel(
    params: &MsPulseParams,
    noise: &NoiseConfig,
    coupling_scale: f64,
    fock: usize,
    stepper: &DormandPrince,
) -> Result<QuantumChannel> {
    params.validate()?;
    noise.validate()?;
    if fock < 8 {
        return Err(Error::InvalidValue("fock truncation below 8".into()));
    }
    let dim = QUBIT_DIM * fock;
    let sdim = dim * dim;
    let (a_trip, b_trip) = coupling_operators(params, fock);
    let l_a = Csr::from_triplets(sdim, commutator_liouvillian(&a_trip, dim));
    let l_b = Csr::from_triplets(sdim, commutator_liouvillian(&b_trip, dim));
    let gamma = noise.heating_rate_q_per_s;
    let l_diss = if gamma > 0.0 {
        let a_full = kron_triplets(&identity_triplets(QUBIT_DIM), &lowering_triplets(fock), fock);
        let adag_full = dagger_triplets(&a_full);
        let mut d = dissipator_liouvillian(&a_full, dim);
        d.extend(dissipator_liouvillian(&adag_full, dim));
        Some(Csr::from_triplets(sdim, scale_triplets(&d, C64::new(gamma, 0.0))))
    } else {
        None
    };
    let env = params.envelope();
    // positive motional error raises the mode frequency: the effective
    // detuning moves further below the sideband
    let delta_eff = params.detuning_rad() - std::f64::consts::TAU * noise.motional_freq_error_hz;
    let amp_factor = 1.0 + noise.amplitude_offset_frac;
    let half_kappa = C64::new(0.5 * coupling_scale * amp_factor, 0.0);

    let thermal = thermal_probabilities(noise.initial_nbar, fock);
    let ncol = QUBIT_DIM * QUBIT_DIM;
    let mut y0 = vec![ZERO; sdim * ncol];
    for i in 0..QUBIT_DIM {
        for j in 0..QUBIT_DIM {
            let col = i + QUBIT_DIM * j;
            for (n_level, &p) in thermal.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let row = i * fock + n_level;
                let colidx = j * fock + n_level;
                y0[(row + colidx * dim) * ncol + col] = C64::new(p, 0.0);
            }
        }
    }
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        dy.fill(ZERO);
        let om = env.value(t);
        let fc = half_kappa * (om * (delta_eff * t).cos());
        let fs = half_kappa * (om * (delta_eff * t).sin());
        l_a.accumulate_multi(fc, y, dy, ncol);
        l_b.accumulate_multi(fs, y, dy, ncol);
        if let Some(ld) = &l_diss {
            ld.accumulate_multi(ONE, y, dy, ncol);
        }
    };
    let yf = stepper.integrate(rhs, y0, 0.0, env.duration_s)?;
    // trace out the mode: L(E_ij)[q, q'] = sum_n X[(q, n), (q', n)]
    let mut superop = CMatrix::zeros(ncol, ncol);
    for col in 0..ncol {
        for q in 0..QUBIT_DIM {
            for qp in 0..QUBIT_DIM {
                let mut acc = ZERO;
                for n_level in 0..fock {
                    let row = q * fock + n_level;
                    let colidx = qp * fock + n_level;
                    acc += yf[(row + colidx * dim) * ncol + col];
                }
                superop[(q + qp * QUBIT_DIM, col)] = acc;
            }
        }
    }
    QuantumChannel::new(QUBIT_DIM, superop)
}

/// Square-pulse Rabi evolution with the fractional amplitude offset. The
/// constant-drive Schroedinger equation solves in closed form to a rotation
/// by (1 + f) theta about the pulse axis.
pub fn simulate_sq_channel(pulse: &SqPulseParams, noise: &NoiseConfig) -> Result<QuantumChannel> {
    noise.validate()?;
    let effective = (1.0 + noise.amplitude_offset_frac) * pulse.rotation;
    QuantumChannel::from_unitary(&crate::circuit::rotation_unitary(pulse.axis, effective))
}
