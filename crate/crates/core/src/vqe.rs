//! Derivative-free optimization of the single ansatz parameter and the four
//! ways of combining Richardson extrapolation with the optimization loop
//! under a fixed sampling budget. One sample is one projective measurement
//! of one Hamiltonian term; the identity term costs nothing.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::folding::ScaleSchedule;
use crate::hamiltonian::Hamiltonian;
use crate::pulse::PulseSimulator;
use crate::richardson::{extrapolate, ExtrapolationProblem, ExtrapolationResult, ScaledEstimate};
use crate::sampling::{derive_seed, EnergyEstimate};
use serde::{Deserialize, Serialize};

/// How extrapolation is interleaved with the variational optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Extrapolate the scheduled circuits at every optimizer step and
    /// optimize the extrapolated energy.
    OptimizeOverExtrapolated,
    /// Optimize each scaled circuit separately, then extrapolate the minima.
    ExtrapolateOverOptimized,
    /// Optimize the unscaled circuit, then spend the rest on one
    /// extrapolation at the minimum.
    OptimizeThenExtrapolate,
    /// Optimize with a linear extrapolation per step, finish at full order.
    LowOrderThenHighOrder,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::OptimizeOverExtrapolated => "optimize_over_extrapolated",
            Strategy::ExtrapolateOverOptimized => "extrapolate_over_optimized",
            Strategy::OptimizeThenExtrapolate => "optimize_then_extrapolate",
            Strategy::LowOrderThenHighOrder => "low_order_then_high_order",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimize_over_extrapolated" | "a" => Ok(Strategy::OptimizeOverExtrapolated),
            "extrapolate_over_optimized" | "b" => Ok(Strategy::ExtrapolateOverOptimized),
            "optimize_then_extrapolate" | "c" => Ok(Strategy::OptimizeThenExtrapolate),
            "low_order_then_high_order" | "d" => Ok(Strategy::LowOrderThenHighOrder),
            other => Err(Error::Config(format!("unknown strategy '{other}'"))),
        }
    }
}

/// Sampling budget and its split across the two phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budget {
    pub total_samples: u64,
    /// Per-term shots cap during optimization.
    pub per_measurement_shots: usize,
    /// Per-term shots cap for the final extrapolation.
    pub extrapolation_shots: usize,
    /// Fraction of the total reserved for the final extrapolation phase.
    pub reserve_fraction: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            total_samples: 28_000,
            per_measurement_shots: 1000,
            extrapolation_shots: 2000,
            reserve_fraction: 0.5,
        }
    }
}

impl Budget {
    pub fn with_total(total_samples: u64) -> Self {
        Self { total_samples, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_samples == 0 {
            return Err(Error::Config("budget must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.reserve_fraction) {
            return Err(Error::Config("reserve_fraction must be in [0, 1)".into()));
        }
        if self.per_measurement_shots == 0 || self.extrapolation_shots == 0 {
            return Err(Error::Config("shot caps must be positive".into()));
        }
        Ok(())
    }
}

/// Strict sample counter; every projective measurement decrements it.
#[derive(Debug)]
pub struct BudgetLedger {
    cap: u64,
    spent: u64,
}

impl BudgetLedger {
    pub fn new(cap: u64) -> Self {
        Self { cap, spent: 0 }
    }

    pub fn try_spend(&mut self, samples: u64) -> Result<()> {
        if self.spent + samples > self.cap {
            return Err(Error::BudgetExhausted { spent: self.spent });
        }
        self.spent += samples;
        Ok(())
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    pub fn remaining(&self) -> u64 {
        self.cap - self.spent
    }
}

/// One objective evaluation in the run trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Scale index for per-circuit optimizations; usize::MAX for the main loop.
    pub phase: usize,
    pub theta: f64,
    /// Noise scale factor of the measured circuit.
    pub scale: f64,
    pub energy: f64,
    pub sem: f64,
    pub samples_cost: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FinalEstimate {
    Extrapolated(ExtrapolationResult),
    Measured(EnergyEstimate),
}

impl FinalEstimate {
    pub fn value(&self) -> f64 {
        match self {
            FinalEstimate::Extrapolated(r) => r.estimate,
            FinalEstimate::Measured(e) => e.mean,
        }
    }

    pub fn sem(&self) -> f64 {
        match self {
            FinalEstimate::Extrapolated(r) => r.sem,
            FinalEstimate::Measured(e) => e.sem,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VqeResult {
    pub strategy: Strategy,
    pub theta_star: f64,
    pub optimizer_iterations: usize,
    pub final_estimate: FinalEstimate,
    /// All prefix-order fits from the final extrapolation phase, ascending
    /// order (linear first), when one ran.
    pub fits: Vec<ExtrapolationResult>,
    /// The unscaled (c = 1) estimate at theta_star, when measured.
    pub unmitigated: Option<EnergyEstimate>,
    pub samples_spent: u64,
    pub trace: Vec<IterationRecord>,
    /// Set when the optimizer stopped on budget exhaustion.
    pub budget_exhausted: bool,
    /// Minima of the per-circuit optimizations (strategy b).
    pub per_scale_minima: Vec<ScaledEstimate>,
}

/// Options for the 1-D search.
#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    pub theta_tol: f64,
    pub f_tol: f64,
    pub max_iters: usize,
    pub initial_step: f64,
    pub bound: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            theta_tol: 0.01,
            f_tol: 1e-4,
            max_iters: 60,
            initial_step: 0.25,
            bound: std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOutcome {
    pub theta_star: f64,
    pub best_value: f64,
    pub iterations: usize,
    pub budget_exhausted: bool,
}

/// Derivative-free 1-D minimization: coarse downhill bracketing followed by
/// golden-section refinement. Tolerant of noisy objectives; on budget
/// exhaustion it returns the best point seen so far, flagged.
pub fn minimize_1d<F>(objective: F, theta0: f64, opts: MinimizeOptions) -> Result<MinimizeOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    struct Search<F> {
        objective: F,
        evals: usize,
        best: (f64, f64),
        exhausted: bool,
        history: Vec<(f64, f64)>,
    }
    impl<F: FnMut(f64) -> Result<f64>> Search<F> {
        fn eval(&mut self, theta: f64) -> Option<f64> {
            if self.exhausted || self.evals >= 10_000 {
                return None;
            }
            match (self.objective)(theta) {
                Ok(v) => {
                    self.evals += 1;
                    self.history.push((theta, v));
                    if v < self.best.1 {
                        self.best = (theta, v);
                    }
                    Some(v)
                }
                Err(Error::BudgetExhausted { .. }) => {
                    self.exhausted = true;
                    None
                }
                Err(_) => None,
            }
        }
    }
    let mut search = Search {
        objective,
        evals: 0,
        best: (theta0, f64::INFINITY),
        exhausted: false,
        history: Vec::new(),
    };
    let clamp = |t: f64| t.clamp(-opts.bound, opts.bound);
    let mut a = clamp(theta0 - opts.initial_step);
    let mut b = clamp(theta0);
    let mut c = clamp(theta0 + opts.initial_step);
    let (mut fa, mut fb, mut fc) = match (search.eval(a), search.eval(b), search.eval(c)) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => {
            return Ok(MinimizeOutcome {
                theta_star: search.best.0,
                best_value: search.best.1,
                iterations: search.evals,
                budget_exhausted: search.exhausted,
            })
        }
    };
    // walk downhill until the middle point is lowest
    let mut grow = opts.initial_step;
    while search.evals < opts.max_iters && !(fb <= fa && fb <= fc) {
        grow *= 1.6;
        if fa < fc {
            c = b;
            fc = fb;
            b = a;
            fb = fa;
            a = clamp(a - grow);
            if (a - b).abs() < 1e-12 {
                break;
            }
            match search.eval(a) {
                Some(v) => fa = v,
                None => break,
            }
        } else {
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            c = clamp(c + grow);
            if (c - b).abs() < 1e-12 {
                break;
            }
            match search.eval(c) {
                Some(v) => fc = v,
                None => break,
            }
        }
    }
    // golden-section refinement inside [a, c]
    let phi = 0.5 * (3.0 - 5.0f64.sqrt()); // ~0.382
    let mut lo = a.min(c);
    let mut hi = a.max(c);
    let mut x1 = lo + phi * (hi - lo);
    let mut x2 = hi - phi * (hi - lo);
    let mut f1 = search.eval(x1);
    let mut f2 = search.eval(x2);
    let mut last_best = search.best.1;
    while !search.exhausted && search.evals < opts.max_iters && (hi - lo) > opts.theta_tol {
        match (f1, f2) {
            (Some(v1), Some(v2)) => {
                if v1 <= v2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = lo + phi * (hi - lo);
                    f1 = search.eval(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = hi - phi * (hi - lo);
                    f2 = search.eval(x2);
                }
            }
            _ => break,
        }
        if (last_best - search.best.1).abs() < opts.f_tol && (hi - lo) < 2.0 * opts.theta_tol {
            break;
        }
        last_best = search.best.1;
    }
    // the bracket midpoint usually beats the best sampled corner
    if !search.exhausted && (hi - lo) < 4.0 * opts.theta_tol {
        search.eval(0.5 * (hi + lo));
    }
    // noise-tolerant re-evaluation: the lowest sampled values are biased by
    // lucky draws, so re-measure the leading candidates and decide on the
    // averaged values
    if !search.exhausted && !search.history.is_empty() {
        let mut candidates = search.history.clone();
        candidates.sort_by(|p, q| p.1.partial_cmp(&q.1).unwrap());
        let mut leaders: Vec<(f64, f64)> = Vec::new();
        for &(t, v) in &candidates {
            if leaders.iter().all(|&(lt, _)| (lt - t).abs() > opts.theta_tol / 2.0) {
                leaders.push((t, v));
            }
            if leaders.len() == 3 {
                break;
            }
        }
        let mut rescored: Option<(f64, f64)> = None;
        for &(t, v) in &leaders {
            let fresh = match search.eval(t) {
                Some(nv) => nv,
                None => break,
            };
            let avg = 0.5 * (v + fresh);
            if rescored.is_none_or(|(_, rv)| avg < rv) {
                rescored = Some((t, avg));
            }
        }
        if let Some(r) = rescored {
            search.best = r;
        }
    }
    Ok(MinimizeOutcome {
        theta_star: search.best.0,
        best_value: search.best.1,
        iterations: search.evals,
        budget_exhausted: search.exhausted,
    })
}

/// Nelder-Mead simplex for multi-parameter objectives; the 1-D pipeline does
/// not use it, multi-parameter ansatz extensions would.
pub fn nelder_mead<F>(
    mut objective: F,
    x0: &[f64],
    scale: f64,
    f_tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, f64, usize)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    if n == 0 {
        return Err(Error::InvalidValue("empty parameter vector".into()));
    }
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    for v in &simplex {
        values.push(objective(v)?);
    }
    let mut iters = 0usize;
    while iters < max_iters {
        iters += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let (best, worst) = (order[0], order[n]);
        if (values[worst] - values[best]).abs() < f_tol {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|d| {
                order[..n].iter().map(|&i| simplex[i][d]).sum::<f64>() / n as f64
            })
            .collect();
        let reflect: Vec<f64> =
            (0..n).map(|d| centroid[d] + (centroid[d] - simplex[worst][d])).collect();
        let fr = objective(&reflect)?;
        if fr < values[best] {
            let expand: Vec<f64> =
                (0..n).map(|d| centroid[d] + 2.0 * (centroid[d] - simplex[worst][d])).collect();
            let fe = objective(&expand)?;
            if fe < fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr < values[order[n - 1]] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let contract: Vec<f64> =
                (0..n).map(|d| centroid[d] + 0.5 * (simplex[worst][d] - centroid[d])).collect();
            let fc = objective(&contract)?;
            if fc < values[worst] {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                for &i in &order[1..] {
                    let b = simplex[best].clone();
                    for d in 0..n {
                        simplex[i][d] = b[d] + 0.5 * (simplex[i][d] - b[d]);
                    }
                    values[i] = objective(&simplex[i])?;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..=n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    Ok((simplex[order[0]].clone(), values[order[0]], iters))
}

/// Shared context for one strategy run.
pub struct StrategyRun<'a> {
    pub simulator: &'a PulseSimulator,
    pub hamiltonian: &'a Hamiltonian,
    pub schedule: &'a ScaleSchedule,
    pub budget: Budget,
    pub seed: u64,
    pub theta0: f64,
    pub minimize: MinimizeOptions,
    /// Infinite-shot mode: objectives return exact expectations at no cost.
    pub infinite_shots: bool,
    pub strategy: Option<Strategy>,
}

impl<'a> StrategyRun<'a> {
    pub fn new(
        simulator: &'a PulseSimulator,
        hamiltonian: &'a Hamiltonian,
        schedule: &'a ScaleSchedule,
        budget: Budget,
        seed: u64,
    ) -> Self {
        Self {
            simulator,
            hamiltonian,
            schedule,
            budget,
            seed,
            theta0: 0.0,
            minimize: MinimizeOptions::default(),
            infinite_shots: false,
            strategy: None,
        }
    }

    fn terms(&self) -> u64 {
        self.hamiltonian.sampled_terms().len() as u64
    }

    /// The circuit realizing schedule point `k` at angle `theta`.
    pub fn scaled_circuit(&self, theta: f64, k: usize) -> Result<Circuit> {
        crate::folding::scaled_circuit(self.schedule, theta, k)
    }

    /// Measure schedule point `k` at `theta`, spending from the ledger.
    #[allow(clippy::too_many_arguments)]
    fn measure_point(
        &self,
        theta: f64,
        k: usize,
        shots: usize,
        stream: &[u64],
        ledger: &mut BudgetLedger,
        trace: &mut Vec<IterationRecord>,
        phase: usize,
    ) -> Result<EnergyEstimate> {
        let circuit = self.scaled_circuit(theta, k)?;
        if self.infinite_shots {
            let e = self.simulator.exact_energy(&circuit, self.hamiltonian)?;
            let est = EnergyEstimate::exact(e);
            trace.push(IterationRecord {
                phase,
                theta,
                scale: self.schedule.factors[k],
                energy: e,
                sem: 0.0,
                samples_cost: 0,
            });
            return Ok(est);
        }
        let cost = shots as u64 * self.terms();
        ledger.try_spend(cost)?;
        let seed = derive_seed(self.seed, stream);
        let (est, _) = self.simulator.measure_energy(&circuit, self.hamiltonian, shots, seed)?;
        trace.push(IterationRecord {
            phase,
            theta,
            scale: self.schedule.factors[k],
            energy: est.mean,
            sem: est.sem,
            samples_cost: cost,
        });
        Ok(est)
    }

    /// Extrapolation over all schedule points at one theta.
    #[allow(clippy::too_many_arguments)]
    fn extrapolated_point(
        &self,
        theta: f64,
        order: usize,
        shots: usize,
        iter: u64,
        phase_tag: u64,
        ledger: &mut BudgetLedger,
        trace: &mut Vec<IterationRecord>,
    ) -> Result<ExtrapolationResult> {
        let use_points = order + 1;
        let mut points = Vec::with_capacity(use_points);
        for k in 0..use_points {
            let est =
                self.measure_point(theta, k, shots, &[phase_tag, iter, k as u64], ledger, trace, k)?;
            points.push(ScaledEstimate {
                scale: self.schedule.factors[k],
                energy: est.mean,
                sem: est.sem,
            });
        }
        extrapolate(&ExtrapolationProblem::new(points, order)?)
    }

    fn schedule_order(&self) -> usize {
        self.schedule.factors.len() - 1
    }

    /// Per-term shots for the optimization phase, sized so a reasonable
    /// number of objective evaluations fits in the non-reserved budget.
    fn optimization_shots(&self, points_per_eval: u64, opt_budget: u64) -> usize {
        let target_evals = 16;
        let per_eval = points_per_eval * self.terms();
        let s = opt_budget / (target_evals * per_eval).max(1);
        (s as usize).clamp(10, self.budget.per_measurement_shots)
    }
}

/// The final extrapolation at a fixed angle: measures every schedule point
/// and returns prefix fits of ascending order (linear, quadratic, ...).
pub fn post_opt_extrapolation(
    run: &StrategyRun<'_>,
    theta_star: f64,
    shots: usize,
    ledger: &mut BudgetLedger,
    trace: &mut Vec<IterationRecord>,
) -> Result<(Vec<ExtrapolationResult>, Vec<ScaledEstimate>)> {
    let n = run.schedule.factors.len();
    if n < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: n });
    }
    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let est = run.measure_point(
            theta_star,
            k,
            shots,
            &[0xf17, 0, k as u64],
            ledger,
            trace,
            usize::MAX,
        )?;
        points.push(ScaledEstimate {
            scale: run.schedule.factors[k],
            energy: est.mean,
            sem: est.sem,
        });
    }
    let mut fits = Vec::new();
    for order in 1..n {
        let problem = ExtrapolationProblem::new(points.clone(), order)?;
        fits.push(extrapolate(&problem)?);
    }
    Ok((fits, points))
}

/// Run one strategy under the budget. Deterministic for fixed seed.
pub fn run_strategy(run: &StrategyRun<'_>) -> Result<VqeResult> {
    run.budget.validate()?;
    let strategy = run.strategy_kind()?;
    match strategy {
        Strategy::OptimizeOverExtrapolated => run_extrapolated_objective(run, run.schedule_order()),
        Strategy::ExtrapolateOverOptimized => run_per_scale_optimizations(run),
        Strategy::OptimizeThenExtrapolate => run_optimize_then_extrapolate(run),
        Strategy::LowOrderThenHighOrder => run_extrapolated_objective(run, 1),
    }
}

impl<'a> StrategyRun<'a> {
    // The strategy is carried beside the run; stored here to keep the
    // builder simple.
    fn strategy_kind(&self) -> Result<Strategy> {
        self.strategy.ok_or_else(|| Error::Config("strategy not set".into()))
    }
}

/// (a) and (d): optimize an extrapolated objective (full order for (a),
/// linear for (d)) and finish with a reserved full-order extrapolation.
fn run_extrapolated_objective(run: &StrategyRun<'_>, opt_order: usize) -> Result<VqeResult> {
    let full_order = run.schedule_order();
    if opt_order > full_order {
        return Err(Error::Config("schedule too short for the optimization order".into()));
    }
    let reserve = (run.budget.total_samples as f64 * run.budget.reserve_fraction) as u64;
    let opt_cap = run.budget.total_samples - reserve;
    let mut opt_ledger = BudgetLedger::new(opt_cap);
    let mut trace = Vec::new();
    let shots = run.optimization_shots((opt_order + 1) as u64, opt_cap);
    let mut iter = 0u64;
    let outcome = {
        let trace_ref = &mut trace;
        let ledger_ref = &mut opt_ledger;
        minimize_1d(
            |theta| {
                let r = run.extrapolated_point(
                    theta, opt_order, shots, iter, 0xa11, ledger_ref, trace_ref,
                )?;
                iter += 1;
                Ok(r.estimate)
            },
            run.theta0,
            run.minimize,
        )?
    };
    let mut final_ledger = BudgetLedger::new(run.budget.total_samples - opt_ledger.spent());
    let n_points = run.schedule.factors.len() as u64;
    let shots_final = final_shots(run, &final_ledger, n_points)?;
    let (fits, points) = post_opt_extrapolation(run, outcome.theta_star, shots_final, &mut final_ledger, &mut trace)?;
    let final_fit = fits.last().cloned().expect("at least the linear fit");
    Ok(VqeResult {
        strategy: run.strategy_kind()?,
        theta_star: outcome.theta_star,
        optimizer_iterations: outcome.iterations,
        final_estimate: FinalEstimate::Extrapolated(final_fit),
        fits,
        unmitigated: unmitigated_from(&points),
        samples_spent: opt_ledger.spent() + final_ledger.spent(),
        trace,
        budget_exhausted: outcome.budget_exhausted,
        per_scale_minima: Vec::new(),
    })
}

/// (b): independent optimizations per scale factor, extrapolating the minima.
/// The optimization phases share one random stream across scales (common
/// random numbers), so per-scale minimum-location errors correlate instead
/// of being amplified by the extrapolation weights; the minima themselves
/// are re-measured on independent streams.
fn run_per_scale_optimizations(run: &StrategyRun<'_>) -> Result<VqeResult> {
    let n = run.schedule.factors.len();
    let slice = run.budget.total_samples / n as u64;
    let remeasure = (slice as f64 * run.budget.reserve_fraction) as u64;
    let opt_cap = slice - remeasure;
    let mut trace = Vec::new();
    let mut minima = Vec::with_capacity(n);
    let mut spent = 0u64;
    let mut iterations = 0usize;
    let mut exhausted = false;
    let mut theta_last = run.theta0;
    for k in 0..n {
        let mut ledger = BudgetLedger::new(opt_cap);
        let shots = run.optimization_shots(1, opt_cap);
        let mut iter = 0u64;
        let outcome = {
            let trace_ref = &mut trace;
            let ledger_ref = &mut ledger;
            minimize_1d(
                |theta| {
                    // common random numbers: no scale index in the stream
                    let est = run.measure_point(
                        theta,
                        k,
                        shots,
                        &[0xb22, iter],
                        ledger_ref,
                        trace_ref,
                        k,
                    )?;
                    iter += 1;
                    Ok(est.mean)
                },
                run.theta0,
                run.minimize,
            )?
        };
        let mut final_ledger = BudgetLedger::new(slice - ledger.spent());
        let terms = run.terms();
        let shots_final = ((final_ledger.remaining() / terms.max(1)) as usize)
            .min(run.budget.extrapolation_shots)
            .max(1);
        let est = match run.measure_point(
            outcome.theta_star,
            k,
            shots_final,
            &[0xb22, k as u64, 0xffff],
            &mut final_ledger,
            &mut trace,
            k,
        ) {
            Ok(e) => e,
            Err(Error::BudgetExhausted { .. }) => {
                exhausted = true;
                EnergyEstimate { mean: outcome.best_value, sem: 0.0, shots_used: 0 }
            }
            Err(e) => return Err(e),
        };
        minima.push(ScaledEstimate {
            scale: run.schedule.factors[k],
            energy: est.mean,
            sem: est.sem,
        });
        spent += ledger.spent() + final_ledger.spent();
        iterations += outcome.iterations;
        exhausted |= outcome.budget_exhausted;
        theta_last = outcome.theta_star;
    }
    let order = n - 1;
    let fit = extrapolate(&ExtrapolationProblem::new(minima.clone(), order)?)?;
    Ok(VqeResult {
        strategy: Strategy::ExtrapolateOverOptimized,
        theta_star: theta_last,
        optimizer_iterations: iterations,
        final_estimate: FinalEstimate::Extrapolated(fit.clone()),
        fits: vec![fit],
        unmitigated: minima.first().map(|p| EnergyEstimate {
            mean: p.energy,
            sem: p.sem,
            shots_used: 0,
        }),
        samples_spent: spent,
        trace,
        budget_exhausted: exhausted,
        per_scale_minima: minima,
    })
}

/// (c): plain optimization of the unscaled circuit, then one extrapolation.
fn run_optimize_then_extrapolate(run: &StrategyRun<'_>) -> Result<VqeResult> {
    let reserve = (run.budget.total_samples as f64 * run.budget.reserve_fraction) as u64;
    let opt_cap = run.budget.total_samples - reserve;
    let mut opt_ledger = BudgetLedger::new(opt_cap);
    let mut trace = Vec::new();
    let shots = run.optimization_shots(1, opt_cap);
    let mut iter = 0u64;
    let outcome = {
        let trace_ref = &mut trace;
        let ledger_ref = &mut opt_ledger;
        minimize_1d(
            |theta| {
                let est = run.measure_point(
                    theta,
                    0,
                    shots,
                    &[0xc33, 0, iter],
                    ledger_ref,
                    trace_ref,
                    usize::MAX,
                )?;
                iter += 1;
                Ok(est.mean)
            },
            run.theta0,
            run.minimize,
        )?
    };
    let mut final_ledger = BudgetLedger::new(run.budget.total_samples - opt_ledger.spent());
    let n_points = run.schedule.factors.len() as u64;
    let shots_final = final_shots(run, &final_ledger, n_points)?;
    let (fits, points) =
        post_opt_extrapolation(run, outcome.theta_star, shots_final, &mut final_ledger, &mut trace)?;
    let final_fit = fits.last().cloned().expect("at least the linear fit");
    Ok(VqeResult {
        strategy: Strategy::OptimizeThenExtrapolate,
        theta_star: outcome.theta_star,
        optimizer_iterations: outcome.iterations,
        final_estimate: FinalEstimate::Extrapolated(final_fit),
        fits,
        unmitigated: unmitigated_from(&points),
        samples_spent: opt_ledger.spent() + final_ledger.spent(),
        trace,
        budget_exhausted: outcome.budget_exhausted,
        per_scale_minima: Vec::new(),
    })
}

fn final_shots(run: &StrategyRun<'_>, ledger: &BudgetLedger, n_points: u64) -> Result<usize> {
    if run.infinite_shots {
        return Ok(1);
    }
    let per_point = run.hamiltonian.sampled_terms().len() as u64;
    let shots = ledger.remaining() / (n_points * per_point).max(1);
    if shots == 0 {
        return Err(Error::BudgetExhausted { spent: ledger.spent() });
    }
    Ok((shots as usize).min(run.budget.extrapolation_shots))
}

fn unmitigated_from(points: &[ScaledEstimate]) -> Option<EnergyEstimate> {
    points
        .iter()
        .find(|p| (p.scale - 1.0).abs() < 1e-9)
        .map(|p| EnergyEstimate { mean: p.energy, sem: p.sem, shots_used: 0 })
}

// The strategy choice rides on StrategyRun so call sites stay compact.
impl<'a> StrategyRun<'a> {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = Some(strategy);
        self
    }
    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }
    pub fn with_infinite_shots(mut self, yes: bool) -> Self {
        self.infinite_shots = yes;
        self
    }
}
