//! Integration checks on the pulse-channel stack and the strategy layer
//! that go beyond per-module unit tests: truncation convergence, noise
//! monotonicity, folded-circuit channel equivalence, variance propagation
//! against Monte Carlo, and budget accounting.

use ionzne::circuit::build_uccsd_ansatz;
use ionzne::folding::{fold_circuit, FoldMethod, ScaleSchedule};
use ionzne::hamiltonian::Hamiltonian;
use ionzne::linalg::CMatrix;
use ionzne::pulse::sim::ideal_ms_unitary;
use ionzne::pulse::{MsPulseParams, NoiseConfig, PulseSimulator};
use ionzne::richardson::{extrapolate, ExtrapolationProblem, ScaledEstimate};
use ionzne::vqe::{run_strategy, Budget, Strategy, StrategyRun};
use std::path::PathBuf;
use std::sync::OnceLock;

fn hamiltonian() -> &'static Hamiltonian {
    static H: OnceLock<Hamiltonian> = OnceLock::new();
    H.get_or_init(|| {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/heh_plus_0p80.txt");
        Hamiltonian::from_file(&path).unwrap()
    })
}

#[test]
fn fock_truncation_is_converged_at_the_default() {
    let sim =
        PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::full(), 16).unwrap();
    let shift = sim.verify_fock_convergence(&MsPulseParams::discrete()).unwrap();
    assert!(shift < 1e-4, "fidelity shift {shift:.3e} between N and N+4");
}

#[test]
fn heating_rate_monotonically_degrades_fidelity() {
    let params = MsPulseParams::discrete();
    let ideal = ideal_ms_unitary(&params);
    let fid = |rate: f64| {
        let noise = NoiseConfig { heating_rate_q_per_s: rate, ..NoiseConfig::full() };
        let sim = PulseSimulator::new(params, noise, 16).unwrap();
        sim.ms_channel(&params).unwrap().entanglement_fidelity(&ideal).unwrap()
    };
    let f0 = fid(0.0);
    let f600 = fid(600.0);
    let f1200 = fid(1200.0);
    assert!(f0 > f600 && f600 > f1200, "{f0} {f600} {f1200}");
}

#[test]
fn folded_noiseless_channels_match_the_unfolded_circuit() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::none(), 16).unwrap();
    let ansatz = build_uccsd_ansatz(0.26).unwrap();
    let reference = sim.circuit_channel(&ansatz).unwrap();
    for method in [
        FoldMethod::MsBefore,
        FoldMethod::MsAfter,
        FoldMethod::MsBeforeAndAfter,
        FoldMethod::MsFour,
    ] {
        for i in 0..=3 {
            let folded = fold_circuit(&ansatz, method, i).unwrap();
            let ch = sim.circuit_channel(&folded).unwrap();
            let dist = ch.superoperator().frobenius_distance(reference.superoperator());
            assert!(dist < 1e-6, "{method:?} i={i}: {dist:.3e}");
        }
    }
}

#[test]
fn stretched_noiseless_channels_match_across_the_grid() {
    let base = MsPulseParams::time_stretch_base();
    let sim = PulseSimulator::new(base, NoiseConfig::none(), 16).unwrap();
    let reference = sim.ms_channel(&base).unwrap();
    for &c in &[0.6, 1.6] {
        let ch = sim.ms_channel(&base.stretched(c)).unwrap();
        let dist = ch.superoperator().frobenius_distance(reference.superoperator());
        assert!(dist < 1e-5, "c_tau {c}: {dist:.3e}");
    }
}

#[test]
fn appendix_b_overrotation_degrades_the_composite() {
    let params = MsPulseParams::discrete();
    let composite_fid = |noise: NoiseConfig| {
        let sim = PulseSimulator::new(params, noise, 16).unwrap();
        let ms = sim.gate_channel(&ionzne::circuit::GateOp::ms(0, 1)).unwrap();
        let msd = sim.gate_channel(&ionzne::circuit::GateOp::ms_inverse(0, 1)).unwrap();
        msd.after(&ms)
            .unwrap()
            .entanglement_fidelity(&CMatrix::identity(4))
            .unwrap()
    };
    let symmetric = composite_fid(NoiseConfig::full());
    let asymmetric = composite_fid(NoiseConfig::appendix_b());
    assert!(
        asymmetric < symmetric - 1e-3,
        "over-rotated composite {asymmetric} vs symmetric {symmetric}"
    );
}

#[test]
fn extrapolation_sem_matches_monte_carlo() {
    // quadrature variance propagation vs resampled Gaussian noise
    let factors = [1.0, 2.0, 3.0];
    let sems = [0.02, 0.03, 0.05];
    let truth = [-2.8, -2.7, -2.6];
    let points: Vec<ScaledEstimate> = factors
        .iter()
        .zip(&truth)
        .zip(&sems)
        .map(|((&scale, &energy), &sem)| ScaledEstimate { scale, energy, sem })
        .collect();
    let fit = extrapolate(&ExtrapolationProblem::new(points.clone(), 2).unwrap()).unwrap();
    // Box-Muller resampling with a deterministic generator
    let mut state = 0x1db3u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut gauss = move || {
        let (u1, u2): (f64, f64) = (next().max(1e-12), next());
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let n = 10_000;
    let mut estimates = Vec::with_capacity(n);
    for _ in 0..n {
        let resampled: Vec<ScaledEstimate> = points
            .iter()
            .map(|p| ScaledEstimate { energy: p.energy + p.sem * gauss(), ..*p })
            .collect();
        let r = extrapolate(&ExtrapolationProblem::new(resampled, 2).unwrap()).unwrap();
        estimates.push(r.estimate);
    }
    let mean = estimates.iter().sum::<f64>() / n as f64;
    let sd = (estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n as f64 - 1.0))
        .sqrt();
    let ratio = sd / fit.sem;
    assert!((ratio - 1.0).abs() < 0.05, "Monte Carlo sd {sd:.4} vs quadrature sem {:.4}", fit.sem);
}

#[test]
fn budget_ledger_matches_trace_recount() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::full(), 16).unwrap();
    let schedule = ScaleSchedule::gate_insertion(FoldMethod::MsAfter, vec![0, 1, 2, 3]).unwrap();
    let budget = Budget { total_samples: 20_000, ..Budget::default() };
    for strategy in [
        Strategy::OptimizeOverExtrapolated,
        Strategy::ExtrapolateOverOptimized,
        Strategy::OptimizeThenExtrapolate,
        Strategy::LowOrderThenHighOrder,
    ] {
        let run = StrategyRun::new(&sim, hamiltonian(), &schedule, budget, 3)
            .with_strategy(strategy);
        let r = run_strategy(&run).unwrap();
        let recount: u64 = r.trace.iter().map(|rec| rec.samples_cost).sum();
        assert_eq!(r.samples_spent, recount, "{strategy:?}");
        assert!(r.samples_spent <= budget.total_samples, "{strategy:?}");
    }
}

#[test]
fn strategy_b_runs_one_optimization_per_scale() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::full(), 16).unwrap();
    let schedule = ScaleSchedule::gate_insertion(FoldMethod::MsAfter, vec![0, 1, 2, 3]).unwrap();
    let budget =
        Budget { total_samples: 24_000, reserve_fraction: 0.45, ..Budget::default() };
    let run = StrategyRun::new(&sim, hamiltonian(), &schedule, budget, 1)
        .with_strategy(Strategy::ExtrapolateOverOptimized);
    let r = run_strategy(&run).unwrap();
    assert_eq!(r.per_scale_minima.len(), 4);
    let factors: Vec<f64> = r.per_scale_minima.iter().map(|p| p.scale).collect();
    assert_eq!(factors, vec![1.0, 2.0, 3.0, 4.0]);
    for k in 0..4 {
        let evals = r.trace.iter().filter(|rec| rec.phase == k).count();
        assert!(evals >= 4, "scale {k} has only {evals} evaluations");
    }
}

#[test]
fn infinite_shot_strategies_recover_the_exact_minimum() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::none(), 16).unwrap();
    let h = hamiltonian();
    let e0 = h.exact_ground_energy().unwrap();
    let schedule = ScaleSchedule::gate_insertion(FoldMethod::MsAfter, vec![0, 1]).unwrap();
    for strategy in [Strategy::OptimizeThenExtrapolate, Strategy::OptimizeOverExtrapolated] {
        let run = StrategyRun::new(&sim, h, &schedule, Budget::default(), 0)
            .with_strategy(strategy)
            .with_infinite_shots(true);
        let r = run_strategy(&run).unwrap();
        assert!(
            (r.final_estimate.value() - e0).abs() < 1e-4,
            "{strategy:?}: {} vs {e0}",
            r.final_estimate.value()
        );
        assert_eq!(r.samples_spent, 0);
    }
}

#[test]
fn coefficient_file_ground_energy_is_frozen() {
    // independent quadrature: the reduced 2x2 closed-form ground energy of
    // the shipped coefficients must equal the dense diagonalization
    let h = hamiltonian();
    let e0 = h.exact_ground_energy().unwrap();
    assert!((e0 - (-2.85534394113535)).abs() < 1e-11, "ground energy drifted: {e0}");
    let mut e11 = 0.0;
    let mut e00 = 0.0;
    let mut coupling = 0.0;
    for (c, p) in h.terms() {
        match p.to_string().as_str() {
            "II" => {
                e11 += c;
                e00 += c;
            }
            "ZI" | "IZ" => {
                e11 -= c;
                e00 += c;
            }
            "ZZ" => {
                e11 += c;
                e00 += c;
            }
            "XX" => coupling += c,
            "YY" => coupling -= c,
            other => panic!("unexpected term {other}"),
        }
    }
    let closed_form = 0.5 * (e11 + e00)
        - (0.25 * (e00 - e11) * (e00 - e11) + coupling * coupling).sqrt();
    assert!((closed_form - e0).abs() < 1e-10, "{closed_form} vs {e0}");
}

#[test]
fn expectation_agrees_with_inner_product_route() {
    let h = hamiltonian();
    let dense = h.matrix();
    for theta in [0.0, 0.26, -0.7, 1.3] {
        let psi = build_uccsd_ansatz(theta).unwrap().statevector();
        let hpsi = dense.mul_vec(&psi);
        let direct = ionzne::linalg::inner(&psi, &hpsi).re;
        let rho = ionzne::density::DensityMatrix::from_pure(&psi).unwrap();
        let via_traces = h.expectation(&rho).unwrap();
        assert!((direct - via_traces).abs() < 1e-10, "theta {theta}");
    }
}

#[test]
fn apply_circuit_identity_and_bit_flips() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::none(), 12).unwrap();
    let empty = ionzne::circuit::Circuit::new(2, vec![]).unwrap();
    let rho = sim.apply_circuit(&empty).unwrap();
    let zero = ionzne::density::DensityMatrix::basis_state(2, 0).unwrap();
    assert!(rho.matrix().frobenius_distance(zero.matrix()) < 1e-12);

    let flips = ionzne::circuit::Circuit::new(
        2,
        vec![ionzne::circuit::GateOp::x(0), ionzne::circuit::GateOp::x(1)],
    )
    .unwrap();
    let rho = sim.apply_circuit(&flips).unwrap();
    let ones = ionzne::density::DensityMatrix::basis_state(2, 3).unwrap();
    assert!(rho.matrix().frobenius_distance(ones.matrix()) < 1e-10);
}

#[test]
fn noisy_ansatz_energy_regression_baseline() {
    // frozen from the first verified run of the full-noise discrete profile
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::full(), 16).unwrap();
    let e = sim.exact_energy(&build_uccsd_ansatz(0.26).unwrap(), hamiltonian()).unwrap();
    assert!((e - (-2.815077886924)).abs() < 1e-6, "noisy energy drifted: {e:.12}");
    // the noisy energy exceeds the noiseless energy at the same angle
    let psi = build_uccsd_ansatz(0.26).unwrap().statevector();
    let clean = hamiltonian()
        .expectation(&ionzne::density::DensityMatrix::from_pure(&psi).unwrap())
        .unwrap();
    assert!(e > clean + 0.01, "gap vanished: noisy {e} clean {clean}");
}

#[test]
fn infinite_shot_sweep_matches_statevector_oracle() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::none(), 12).unwrap();
    let h = hamiltonian();
    let mut theta = -1.0;
    while theta <= 1.0 {
        let curve = sim.exact_energy(&build_uccsd_ansatz(theta).unwrap(), h).unwrap();
        let psi = build_uccsd_ansatz(theta).unwrap().statevector();
        let oracle =
            h.expectation(&ionzne::density::DensityMatrix::from_pure(&psi).unwrap()).unwrap();
        assert!((curve - oracle).abs() < 1e-5, "theta {theta}: {curve} vs {oracle}");
        theta += 0.25;
    }
}

#[test]
fn noisy_optimizer_converges_within_forty_evaluations() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::full(), 16).unwrap();
    let schedule = ScaleSchedule::gate_insertion(FoldMethod::MsAfter, vec![0, 1, 2]).unwrap();
    for seed in [0u64, 1, 2] {
        let budget = Budget { total_samples: 200_000, ..Budget::default() };
        let run = StrategyRun::new(&sim, hamiltonian(), &schedule, budget, seed)
            .with_strategy(Strategy::OptimizeThenExtrapolate);
        let r = run_strategy(&run).unwrap();
        assert!(r.optimizer_iterations <= 40, "seed {seed}: {} iterations", r.optimizer_iterations);
        assert!(!r.budget_exhausted);
    }
}

#[test]
fn noiseless_post_opt_fits_coincide() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::none(), 12).unwrap();
    let schedule =
        ScaleSchedule::gate_insertion(FoldMethod::MsAfter, vec![0, 1, 2, 4, 6]).unwrap();
    let run = StrategyRun::new(&sim, hamiltonian(), &schedule, Budget::default(), 0)
        .with_infinite_shots(true);
    let mut ledger = ionzne::vqe::BudgetLedger::new(u64::MAX / 4);
    let mut trace = Vec::new();
    let (fits, _) =
        ionzne::vqe::post_opt_extrapolation(&run, 0.2, 1, &mut ledger, &mut trace).unwrap();
    assert_eq!(fits.len(), 4); // linear through quartic
    let first = fits[0].estimate;
    for f in &fits {
        assert!((f.estimate - first).abs() < 1e-6, "order {} drifted", f.order);
    }
}

#[test]
fn low_order_strategy_trace_shows_linear_then_full_order() {
    let sim = PulseSimulator::new(MsPulseParams::discrete(), NoiseConfig::full(), 16).unwrap();
    let schedule = ScaleSchedule::gate_insertion(FoldMethod::MsAfter, vec![0, 1, 2, 3]).unwrap();
    let budget = Budget { total_samples: 28_000, reserve_fraction: 0.85, ..Budget::default() };
    let run = StrategyRun::new(&sim, hamiltonian(), &schedule, budget, 4)
        .with_strategy(Strategy::LowOrderThenHighOrder);
    let r = run_strategy(&run).unwrap();
    let n_final = schedule.factors.len();
    let (opt, fin) = r.trace.split_at(r.trace.len() - n_final);
    // optimization iterations only touch the two lowest scale factors
    assert!(opt.iter().all(|rec| rec.scale == 1.0 || rec.scale == 2.0));
    assert!(opt.iter().any(|rec| rec.scale == 2.0));
    // the final extrapolation measures the full schedule
    let scales: Vec<f64> = fin.iter().map(|rec| rec.scale).collect();
    assert_eq!(scales, vec![1.0, 2.0, 3.0, 4.0]);
    match &r.final_estimate {
        ionzne::vqe::FinalEstimate::Extrapolated(f) => assert_eq!(f.order, 3),
        other => panic!("expected an extrapolated final estimate, got {other:?}"),
    }
}
