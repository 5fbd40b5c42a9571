//! Experiment configuration: TOML-backed, resolved and validated before any
//! simulation starts. A resolved snapshot rides along with every result so
//! a record can be re-run from its own directory.

use crate::error::{Error, Result};
use crate::folding::{FoldMethod, ScaleSchedule};
use crate::hamiltonian::Hamiltonian;
use crate::pulse::{MsPulseParams, NoiseConfig, PulseSimulator};
use crate::vqe::{Budget, Strategy};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Coefficient file for the molecular Hamiltonian.
    pub hamiltonian: PathBuf,
    #[serde(default)]
    pub pulse: PulseSection,
    #[serde(default)]
    pub noise: NoiseSection,
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub vqe: Option<VqeSection>,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_fock")]
    pub fock_levels: usize,
    /// Worker threads for sweep points and seeds; 0 uses the rayon default.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_fock() -> usize {
    PulseSimulator::DEFAULT_FOCK_LEVELS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PulseProfile {
    #[default]
    Discrete,
    TimeStretch,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    #[serde(default)]
    pub profile: PulseProfile,
}

impl PulseSection {
    pub fn params(&self) -> MsPulseParams {
        match self.profile {
            PulseProfile::Discrete => MsPulseParams::discrete(),
            PulseProfile::TimeStretch => MsPulseParams::time_stretch_base(),
        }
    }
}

/// Either a named profile or inline noise fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSection {
    Named { profile: String },
    Inline(NoiseConfig),
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection::Named { profile: "full".into() }
    }
}

impl NoiseSection {
    pub fn resolve(&self) -> Result<NoiseConfig> {
        let cfg = match self {
            NoiseSection::Named { profile } => match profile.as_str() {
                "none" | "noiseless" => NoiseConfig::none(),
                "full" => NoiseConfig::full(),
                "appendix_b" => NoiseConfig::appendix_b(),
                other => return Err(Error::Config(format!("unknown noise profile '{other}'"))),
            },
            NoiseSection::Inline(n) => *n,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub method: FoldMethod,
    #[serde(default)]
    pub indices: Vec<usize>,
    #[serde(default)]
    pub stretch_factors: Vec<f64>,
}

impl ScheduleSection {
    pub fn resolve(&self) -> Result<ScaleSchedule> {
        match self.method {
            FoldMethod::TimeStretch => {
                if !self.indices.is_empty() {
                    return Err(Error::Config(
                        "time_stretch schedules take stretch_factors, not indices".into(),
                    ));
                }
                let factors = if self.stretch_factors.is_empty() {
                    ScaleSchedule::default_stretch_grid().factors
                } else {
                    self.stretch_factors.clone()
                };
                ScaleSchedule::time_stretch(factors)
            }
            method => {
                if !self.stretch_factors.is_empty() {
                    return Err(Error::Config(
                        "gate-insertion schedules take indices, not stretch_factors".into(),
                    ));
                }
                ScaleSchedule::gate_insertion(method, self.indices.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub theta_start: f64,
    pub theta_stop: f64,
    pub theta_step: f64,
    #[serde(default = "default_sweep_shots")]
    pub shots_per_term: usize,
    #[serde(default)]
    pub infinite_shots: bool,
}

fn default_sweep_shots() -> usize {
    2000
}

impl SweepSection {
    pub fn thetas(&self) -> Result<Vec<f64>> {
        if self.theta_step.is_nan() || self.theta_step <= 0.0 {
            return Err(Error::Config("theta_step must be positive".into()));
        }
        if self.theta_stop < self.theta_start {
            return Err(Error::Config("theta_stop below theta_start".into()));
        }
        let n = ((self.theta_stop - self.theta_start) / self.theta_step).round() as usize;
        let thetas: Vec<f64> =
            (0..=n).map(|k| self.theta_start + k as f64 * self.theta_step).collect();
        if thetas.is_empty() {
            return Err(Error::Config("empty theta grid".into()));
        }
        Ok(thetas)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeSection {
    pub strategy: Strategy,
    #[serde(default)]
    pub theta0: f64,
    #[serde(default = "default_theta_tol")]
    pub theta_tol: f64,
    /// Budgets to sweep; empty means just budget.total_samples.
    #[serde(default)]
    pub budgets: Vec<u64>,
    #[serde(default)]
    pub infinite_shots: bool,
}

fn default_theta_tol() -> f64 {
    0.01
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        // resolve the Hamiltonian path relative to the config file
        if cfg.hamiltonian.is_relative() {
            if let Some(dir) = path.parent() {
                let candidate = dir.join(&cfg.hamiltonian);
                if candidate.exists() {
                    cfg.hamiltonian = candidate;
                }
            }
        }
        Ok(cfg)
    }

    /// Full validation pass: every referenced file and every section the
    /// underlying modules would reject is rejected here first.
    pub fn validate(&self) -> Result<ResolvedExperiment> {
        let noise = self.noise.resolve()?;
        let schedule = self.schedule.resolve()?;
        let profile_matches = matches!(
            (self.pulse.profile, schedule.method),
            (PulseProfile::TimeStretch, FoldMethod::TimeStretch)
                | (PulseProfile::Discrete, FoldMethod::MsBefore)
                | (PulseProfile::Discrete, FoldMethod::MsAfter)
                | (PulseProfile::Discrete, FoldMethod::MsBeforeAndAfter)
                | (PulseProfile::Discrete, FoldMethod::MsFour)
        );
        if !profile_matches {
            return Err(Error::Config(format!(
                "pulse profile {:?} does not support fold method {}",
                self.pulse.profile,
                schedule.method.name()
            )));
        }
        self.budget.validate()?;
        if let Some(sweep) = &self.sweep {
            sweep.thetas()?;
        }
        if let Some(vqe) = &self.vqe {
            if vqe.theta_tol.is_nan() || vqe.theta_tol <= 0.0 {
                return Err(Error::Config("theta_tol must be positive".into()));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed required".into()));
        }
        if self.fock_levels < 8 {
            return Err(Error::Config("fock_levels below the minimum of 8".into()));
        }
        if !self.hamiltonian.exists() {
            return Err(Error::Config(format!(
                "hamiltonian file {} does not exist",
                self.hamiltonian.display()
            )));
        }
        let hamiltonian = Hamiltonian::from_file(&self.hamiltonian)?;
        Ok(ResolvedExperiment {
            hamiltonian,
            noise,
            schedule,
            ms_params: self.pulse.params(),
            config: self.clone(),
        })
    }
}

/// A validated configuration with its expensive pieces parsed.
pub struct ResolvedExperiment {
    pub hamiltonian: Hamiltonian,
    pub noise: NoiseConfig,
    pub schedule: ScaleSchedule,
    pub ms_params: MsPulseParams,
    pub config: ExperimentConfig,
}
