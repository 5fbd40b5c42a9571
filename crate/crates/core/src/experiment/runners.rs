//! Experiment execution: sweeps, strategy runs, calibration reports, and
//! standalone extrapolation, each emitting delimited tables plus a manifest.
//! Numeric table output is deterministic for a fixed config and seed; sweep
//! points and seeds are dispatched in parallel but written in index order.

use super::config::{ExperimentConfig, ResolvedExperiment};
use crate::error::{Error, Result};
use crate::folding::{scaled_circuit, ScaleSchedule};
use crate::linalg::CMatrix;
use crate::pulse::sim::ideal_ms_unitary;
use crate::pulse::{MsPulseParams, MsSign, NoiseConfig, PulseSimulator, SqPulseParams};
use crate::sampling::{derive_seed, estimate_energy, sample_hamiltonian, EnergyEstimate};
use crate::vqe::{run_strategy, MinimizeOptions, StrategyRun, VqeResult};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// One sweep sample: a (theta, scale) grid point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub scale: f64,
    pub mean: f64,
    pub sem: f64,
}

/// Pre-build the two-qubit channels each schedule point needs so parallel
/// workers hit a warm cache.
fn warm_channels(sim: &PulseSimulator, schedule: &ScaleSchedule) -> Result<()> {
    for k in 0..schedule.factors.len() {
        let circuit = scaled_circuit(schedule, 0.0, k)?;
        for gate in circuit.gates.iter().filter(|g| g.is_two_qubit()) {
            sim.gate_channel(gate)?;
        }
    }
    Ok(())
}

pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    pub table: String,
}

/// Energy sweep over the theta grid for every scale factor in the schedule.
pub fn run_sweep(resolved: &ResolvedExperiment, seed: u64) -> Result<SweepOutcome> {
    let sweep = resolved
        .config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep section missing".into()))?;
    let thetas = sweep.thetas()?;
    let sim =
        PulseSimulator::new(resolved.ms_params, resolved.noise, resolved.config.fock_levels)?;
    warm_channels(&sim, &resolved.schedule)?;
    let n_scales = resolved.schedule.factors.len();
    let jobs: Vec<(usize, usize)> = (0..n_scales)
        .flat_map(|k| (0..thetas.len()).map(move |t| (k, t)))
        .collect();
    let points: Result<Vec<SweepPoint>> = jobs
        .par_iter()
        .map(|&(k, t)| {
            let theta = thetas[t];
            let circuit = scaled_circuit(&resolved.schedule, theta, k)?;
            let est = if sweep.infinite_shots {
                EnergyEstimate::exact(sim.exact_energy(&circuit, &resolved.hamiltonian)?)
            } else {
                let rho = sim.apply_circuit(&circuit)?;
                let table = sample_hamiltonian(
                    &rho,
                    &resolved.hamiltonian,
                    sweep.shots_per_term,
                    derive_seed(seed, &[k as u64, t as u64]),
                )?;
                estimate_energy(&table)?
            };
            Ok(SweepPoint {
                theta,
                scale: resolved.schedule.factors[k],
                mean: est.mean,
                sem: est.sem,
            })
        })
        .collect();
    let points = points?;
    let mut table = String::from("theta\tscale\tmean\tsem\n");
    for p in &points {
        table.push_str(&format!(
            "{:.6}\t{:.6}\t{:.17e}\t{:.17e}\n",
            p.theta, p.scale, p.mean, p.sem
        ));
    }
    Ok(SweepOutcome { points, table })
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub budget: u64,
    pub result: VqeResult,
    pub epsilon_percent: Option<f64>,
    pub unmitigated_epsilon_percent: Option<f64>,
}

pub struct VqeOutcome {
    pub e_theory: f64,
    pub records: Vec<SeedRecord>,
    pub aggregate_table: String,
}

/// Strategy runs across the configured budgets and seeds.
pub fn run_vqe(resolved: &ResolvedExperiment) -> Result<VqeOutcome> {
    let vqe = resolved
        .config
        .vqe
        .as_ref()
        .ok_or_else(|| Error::Config("vqe section missing".into()))?;
    let sim =
        PulseSimulator::new(resolved.ms_params, resolved.noise, resolved.config.fock_levels)?;
    warm_channels(&sim, &resolved.schedule)?;
    let e_theory = resolved.hamiltonian.exact_ground_energy()?;
    let budgets: Vec<u64> = if vqe.budgets.is_empty() {
        vec![resolved.config.budget.total_samples]
    } else {
        vqe.budgets.clone()
    };
    let mut jobs: Vec<(u64, u64)> = Vec::new();
    for &b in &budgets {
        for &s in &resolved.config.seeds {
            jobs.push((b, s));
        }
    }
    let records: Result<Vec<SeedRecord>> = jobs
        .par_iter()
        .map(|&(budget_total, seed)| {
            let budget =
                crate::vqe::Budget { total_samples: budget_total, ..resolved.config.budget };
            let mut run =
                StrategyRun::new(&sim, &resolved.hamiltonian, &resolved.schedule, budget, seed)
                    .with_strategy(vqe.strategy)
                    .with_theta0(vqe.theta0)
                    .with_infinite_shots(vqe.infinite_shots);
            run.minimize = MinimizeOptions { theta_tol: vqe.theta_tol, ..MinimizeOptions::default() };
            let result = run_strategy(&run)?;
            let eps = 100.0 * (result.final_estimate.value() - e_theory).abs() / e_theory.abs();
            let unmit = result
                .unmitigated
                .map(|u| 100.0 * (u.mean - e_theory).abs() / e_theory.abs());
            Ok(SeedRecord {
                seed,
                budget: budget_total,
                result,
                epsilon_percent: Some(eps),
                unmitigated_epsilon_percent: unmit,
            })
        })
        .collect();
    let records = records?;
    let mut table = String::from(
        "strategy\tbudget\tseeds\tmean_epsilon_percent\tse_epsilon_percent\tmean_unmitigated_percent\n",
    );
    for &b in &budgets {
        let eps: Vec<f64> =
            records.iter().filter(|r| r.budget == b).filter_map(|r| r.epsilon_percent).collect();
        let unmit: Vec<f64> = records
            .iter()
            .filter(|r| r.budget == b)
            .filter_map(|r| r.unmitigated_epsilon_percent)
            .collect();
        let n = eps.len().max(1) as f64;
        let mean = eps.iter().sum::<f64>() / n;
        let se = if eps.len() > 1 {
            (eps.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        let mean_unmit = if unmit.is_empty() {
            f64::NAN
        } else {
            unmit.iter().sum::<f64>() / unmit.len() as f64
        };
        table.push_str(&format!(
            "{}\t{}\t{}\t{:.17e}\t{:.17e}\t{:.17e}\n",
            vqe.strategy.name(),
            b,
            eps.len(),
            mean,
            se,
            mean_unmit
        ));
    }
    Ok(VqeOutcome { e_theory, records, aggregate_table: table })
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationRow {
    pub gate: String,
    pub noiseless_residual: f64,
    pub noisy_fidelity: f64,
    pub reference: f64,
}

pub struct CalibrationOutcome {
    pub rows: Vec<CalibrationRow>,
    pub table: String,
}

/// Fidelity report for the profile's gates under the configured noise.
pub fn run_calibration_report(
    params: MsPulseParams,
    noise: NoiseConfig,
    fock_levels: usize,
) -> Result<CalibrationOutcome> {
    let clean = PulseSimulator::new(params, NoiseConfig::none(), fock_levels)?;
    let noisy = PulseSimulator::new(params, noise, fock_levels)?;
    let mut rows = Vec::new();

    let plus = params.with_sign(MsSign::PlusXx);
    let minus = params.with_sign(MsSign::MinusXx);
    let cal_plus = clean.calibrate(&plus)?;
    let cal_minus = clean.calibrate(&minus)?;
    let ms = noisy.ms_channel(&plus)?;
    let msd = noisy.ms_channel(&minus)?;
    rows.push(CalibrationRow {
        gate: "MS".into(),
        noiseless_residual: cal_plus.residual_infidelity,
        noisy_fidelity: ms.entanglement_fidelity(&ideal_ms_unitary(&plus))?,
        reference: 0.985,
    });
    rows.push(CalibrationRow {
        gate: "MS_dagger".into(),
        noiseless_residual: cal_minus.residual_infidelity,
        noisy_fidelity: msd.entanglement_fidelity(&ideal_ms_unitary(&minus))?,
        reference: 0.985,
    });
    // the inverse gate channel includes any configured over-rotation
    let msd_gate = noisy.gate_channel(&crate::circuit::GateOp::ms_inverse(0, 1))?;
    let composite = msd_gate.after(&ms)?;
    rows.push(CalibrationRow {
        gate: "MS_then_inverse".into(),
        noiseless_residual: 0.0,
        noisy_fidelity: composite.entanglement_fidelity(&CMatrix::identity(4))?,
        reference: 0.981,
    });
    for (label, angle, reference) in [
        ("R_half_pi", std::f64::consts::FRAC_PI_2, 0.998),
        ("R_pi", std::f64::consts::PI, 0.994),
    ] {
        let pulse = SqPulseParams::new(0.0, angle)?;
        let ch = noisy.sq_channel(&pulse)?;
        let ideal = crate::circuit::rotation_unitary(0.0, angle);
        rows.push(CalibrationRow {
            gate: label.into(),
            noiseless_residual: 0.0,
            noisy_fidelity: ch.entanglement_fidelity(&ideal)?,
            reference,
        });
    }
    let mut table = String::from("gate\tnoiseless_residual\tnoisy_fidelity\treference\n");
    for r in &rows {
        table.push_str(&format!(
            "{}\t{:.17e}\t{:.17e}\t{:.4}\n",
            r.gate, r.noiseless_residual, r.noisy_fidelity, r.reference
        ));
    }
    Ok(CalibrationOutcome { rows, table })
}

pub struct ExtrapolationOutcome {
    pub theta_star: f64,
    pub points_table: String,
    pub fits_table: String,
}

/// Standalone post-optimization extrapolation at a fixed angle.
pub fn run_extrapolation(
    resolved: &ResolvedExperiment,
    theta_star: f64,
    shots_per_term: usize,
    seed: u64,
) -> Result<ExtrapolationOutcome> {
    let sim =
        PulseSimulator::new(resolved.ms_params, resolved.noise, resolved.config.fock_levels)?;
    warm_channels(&sim, &resolved.schedule)?;
    let budget = crate::vqe::Budget {
        total_samples: u64::MAX / 4,
        extrapolation_shots: shots_per_term,
        ..resolved.config.budget
    };
    let run = StrategyRun::new(&sim, &resolved.hamiltonian, &resolved.schedule, budget, seed);
    let mut ledger = crate::vqe::BudgetLedger::new(budget.total_samples);
    let mut trace = Vec::new();
    let (fits, points) = crate::vqe::post_opt_extrapolation(
        &run,
        theta_star,
        shots_per_term,
        &mut ledger,
        &mut trace,
    )?;
    let mut points_table = String::from("scale\tmean\tsem\n");
    for p in &points {
        points_table.push_str(&format!("{:.6}\t{:.17e}\t{:.17e}\n", p.scale, p.energy, p.sem));
    }
    let mut fits_table = String::from("order\testimate\tsem\tgammas\n");
    for f in &fits {
        let gammas: Vec<String> = f.gammas.iter().map(|g| format!("{g:.17e}")).collect();
        fits_table.push_str(&format!(
            "{}\t{:.17e}\t{:.17e}\t{}\n",
            f.order,
            f.estimate,
            f.sem,
            gammas.join(",")
        ));
    }
    Ok(ExtrapolationOutcome { theta_star, points_table, fits_table })
}

/// Serialize a result record to TOML text.
pub fn record_to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("record serialization failed: {e}")))
}

/// Write a string to `dir/name`, creating the directory first.
pub fn write_output(dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut f = std::fs::File::create(dir.join(name))?;
    f.write_all(content.as_bytes())?;
    Ok(())
}

/// Manifest naming the run, its figure (when a preset), and the resolved
/// config snapshot, so any record can be re-run from its own directory.
pub fn write_manifest(
    dir: &Path,
    experiment: &str,
    figure: Option<&str>,
    config: &ExperimentConfig,
    seed_list: &[u64],
    wall_clock_seconds: f64,
) -> Result<()> {
    #[derive(Serialize)]
    struct Manifest<'a> {
        experiment: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        figure: Option<&'a str>,
        seeds: &'a [u64],
        wall_clock_seconds: f64,
        config: &'a ExperimentConfig,
    }
    let manifest = Manifest {
        experiment,
        figure,
        seeds: seed_list,
        wall_clock_seconds,
        config,
    };
    let text = toml::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
    write_output(dir, "manifest.toml", &text)
}
