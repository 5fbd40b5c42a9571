//! Command-line front end: calibrate, sweep, vqe, extrapolate, reproduce.
//!
//! Exit codes: 0 success, 2 validation error, 3 budget exhaustion,
//! 4 numerical failure.

use clap::{Args, Parser, Subcommand};
use ionzne::error::Error;
use ionzne::experiment::config::ExperimentConfig;
use ionzne::experiment::runners::record_to_toml;
use ionzne::experiment::{
    run_calibration_report, run_extrapolation, run_sweep, run_vqe, write_manifest, write_output,
};
use ionzne::pulse::{MsPulseParams, NoiseConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const CONFIG_DIR_ENV: &str = "IONZNE_CONFIG_DIR";

#[derive(Parser)]
#[command(name = "ionzne", version, about = "Trapped-ion VQE simulator with zero-noise extrapolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Experiment configuration file (TOML). Relative paths are also tried
    /// against $IONZNE_CONFIG_DIR.
    #[arg(long)]
    config: PathBuf,
    /// Override the first configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory; defaults to the config's out_dir or "runs/<stem>".
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Report noiseless calibration residuals and noisy gate fidelities.
    Calibrate {
        /// Pulse profile: "discrete" or "time_stretch".
        #[arg(long, default_value = "discrete")]
        profile: String,
        /// Noise profile: "none", "full" or "appendix_b".
        #[arg(long, default_value = "full")]
        noise: String,
        #[arg(long, default_value_t = 16)]
        fock: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy sweep over the theta grid for each scheduled scale factor.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Use exact expectations instead of sampled shots.
        #[arg(long)]
        infinite_shots: bool,
    },
    /// Run the configured extrapolation-integration strategy per seed.
    Vqe {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Standalone post-optimization extrapolation at a fixed angle.
    Extrapolate {
        #[command(flatten)]
        common: CommonArgs,
        /// Variational angle to extrapolate at.
        #[arg(long)]
        theta_star: f64,
        /// Per-term shots for each scheduled point.
        #[arg(long, default_value_t = 2000)]
        shots: usize,
    },
    /// Run a bundled preset reproducing one of the reference figures.
    Reproduce {
        /// Figure id, e.g. fig2a, fig4b, fig6c, fig8.
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExhausted { .. } => 3,
                Error::Config(_)
                | Error::InvalidValue(_)
                | Error::DimensionMismatch(_)
                | Error::UnrecognizedAnsatz(_)
                | Error::InsufficientPoints { .. }
                | Error::DuplicateFactors
                | Error::Io(_) => 2,
                Error::CalibrationFailed(_)
                | Error::IntegrationFailed(_)
                | Error::FockNotConverged(_)
                | Error::NotHermitian(_)
                | Error::NotUnitary(_)
                | Error::InvalidState(_)
                | Error::InvalidChannel(_) => 4,
            })
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Calibrate { profile, noise, fock, out } => cmd_calibrate(&profile, &noise, fock, out),
        Command::Sweep { common, infinite_shots } => cmd_sweep(common, infinite_shots),
        Command::Vqe { common } => cmd_vqe(common),
        Command::Extrapolate { common, theta_star, shots } => {
            cmd_extrapolate(common, theta_star, shots)
        }
        Command::Reproduce { figure, out, workers, seed } => {
            cmd_reproduce(&figure, out, workers, seed)
        }
    }
}

fn install_workers(workers: usize) {
    if workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
}

fn locate_config(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    if let Ok(dir) = std::env::var(CONFIG_DIR_ENV) {
        let candidate = Path::new(&dir).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn load_config(common: &CommonArgs) -> Result<(ExperimentConfig, PathBuf), Error> {
    let path = locate_config(&common.config);
    let mut cfg = ExperimentConfig::from_file(&path)?;
    if let Some(seed) = common.seed {
        cfg.seeds = vec![seed];
    }
    if common.workers > 0 {
        cfg.workers = common.workers;
    }
    install_workers(cfg.workers);
    let out = common
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
            PathBuf::from("runs").join(stem.unwrap_or_else(|| "experiment".into()))
        });
    Ok((cfg, out))
}

fn cmd_calibrate(
    profile: &str,
    noise: &str,
    fock: usize,
    out: Option<PathBuf>,
) -> Result<(), Error> {
    let params = match profile {
        "discrete" => MsPulseParams::discrete(),
        "time_stretch" => MsPulseParams::time_stretch_base(),
        other => return Err(Error::Config(format!("unknown pulse profile '{other}'"))),
    };
    let noise_cfg = match noise {
        "none" | "noiseless" => NoiseConfig::none(),
        "full" => NoiseConfig::full(),
        "appendix_b" => NoiseConfig::appendix_b(),
        other => return Err(Error::Config(format!("unknown noise profile '{other}'"))),
    };
    let outcome = run_calibration_report(params, noise_cfg, fock)?;
    print!("{}", outcome.table);
    if let Some(dir) = out {
        write_output(&dir, "calibration.tsv", &outcome.table)?;
        eprintln!("wrote {}", dir.join("calibration.tsv").display());
    }
    Ok(())
}

fn cmd_sweep(common: CommonArgs, infinite_shots: bool) -> Result<(), Error> {
    let started = Instant::now();
    let (mut cfg, out) = load_config(&common)?;
    if infinite_shots {
        if let Some(s) = cfg.sweep.as_mut() {
            s.infinite_shots = true;
        }
    }
    let resolved = cfg.validate()?;
    let seed = *cfg.seeds.first().unwrap_or(&0);
    let outcome = run_sweep(&resolved, seed)?;
    write_output(&out, "sweep.tsv", &outcome.table)?;
    write_manifest(&out, "sweep", None, &cfg, &[seed], started.elapsed().as_secs_f64())?;
    eprintln!("wrote {}", out.join("sweep.tsv").display());
    Ok(())
}

fn cmd_vqe(common: CommonArgs) -> Result<(), Error> {
    let started = Instant::now();
    let (cfg, out) = load_config(&common)?;
    let resolved = cfg.validate()?;
    let outcome = run_vqe(&resolved)?;
    write_output(&out, "aggregate.tsv", &outcome.aggregate_table)?;
    for record in &outcome.records {
        let text = record_to_toml(record)?;
        write_output(
            &out.join("records"),
            &format!("budget{}_seed{}.toml", record.budget, record.seed),
            &text,
        )?;
    }
    write_manifest(&out, "vqe", None, &cfg, &cfg.seeds, started.elapsed().as_secs_f64())?;
    print!("{}", outcome.aggregate_table);
    eprintln!("wrote {}", out.join("aggregate.tsv").display());
    Ok(())
}

fn cmd_extrapolate(common: CommonArgs, theta_star: f64, shots: usize) -> Result<(), Error> {
    let started = Instant::now();
    let (cfg, out) = load_config(&common)?;
    let resolved = cfg.validate()?;
    let seed = *cfg.seeds.first().unwrap_or(&0);
    let outcome = run_extrapolation(&resolved, theta_star, shots, seed)?;
    write_output(&out, "points.tsv", &outcome.points_table)?;
    write_output(&out, "fits.tsv", &outcome.fits_table)?;
    write_manifest(&out, "extrapolate", None, &cfg, &[seed], started.elapsed().as_secs_f64())?;
    print!("{}", outcome.fits_table);
    eprintln!("wrote {}", out.join("fits.tsv").display());
    Ok(())
}

struct Preset {
    figure: &'static str,
    kind: PresetKind,
    config: &'static str,
}

enum PresetKind {
    Sweep,
    Vqe,
}

const PRESETS: &[Preset] = &[
    Preset { figure: "fig2a", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig2a.toml") },
    Preset { figure: "fig2b", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig2b.toml") },
    Preset { figure: "fig4a", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig4a.toml") },
    Preset { figure: "fig4b", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig4b.toml") },
    Preset { figure: "fig4c", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig4c.toml") },
    Preset { figure: "fig4d", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig4d.toml") },
    Preset { figure: "fig5a", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig5a.toml") },
    Preset { figure: "fig5b", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig5b.toml") },
    Preset { figure: "fig5c", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig5c.toml") },
    Preset { figure: "fig5d", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig5d.toml") },
    Preset { figure: "fig6a", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig6a.toml") },
    Preset { figure: "fig6b", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig6b.toml") },
    Preset { figure: "fig6c", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig6c.toml") },
    Preset { figure: "fig6d", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig6d.toml") },
    Preset { figure: "fig7a", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig7a.toml") },
    Preset { figure: "fig7b", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig7b.toml") },
    Preset { figure: "fig7c", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig7c.toml") },
    Preset { figure: "fig7d", kind: PresetKind::Sweep, config: include_str!("../../../configs/fig7d.toml") },
    Preset { figure: "fig8", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig8.toml") },
    Preset { figure: "fig10", kind: PresetKind::Vqe, config: include_str!("../../../configs/fig10.toml") },
];

fn cmd_reproduce(
    figure: &str,
    out: Option<PathBuf>,
    workers: usize,
    seed: Option<u64>,
) -> Result<(), Error> {
    let preset = PRESETS
        .iter()
        .find(|p| p.figure == figure)
        .ok_or_else(|| Error::Config(format!("unknown figure id '{figure}'")))?;
    install_workers(workers);
    let started = Instant::now();
    let mut cfg = ExperimentConfig::from_toml(preset.config)?;
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    // presets reference the repository data file; resolve against the
    // config dir override, then the working directory
    if cfg.hamiltonian.is_relative() && !cfg.hamiltonian.exists() {
        if let Ok(dir) = std::env::var(CONFIG_DIR_ENV) {
            let candidate = Path::new(&dir).join("..").join(&cfg.hamiltonian);
            if candidate.exists() {
                cfg.hamiltonian = candidate;
            }
        }
    }
    let out = out.unwrap_or_else(|| PathBuf::from("runs").join(figure));
    let resolved = cfg.validate()?;
    match preset.kind {
        PresetKind::Sweep => {
            let seed = *cfg.seeds.first().unwrap_or(&0);
            let outcome = run_sweep(&resolved, seed)?;
            write_output(&out, "sweep.tsv", &outcome.table)?;
            write_manifest(&out, "sweep", Some(figure), &cfg, &[seed], started.elapsed().as_secs_f64())?;
            eprintln!("wrote {}", out.join("sweep.tsv").display());
        }
        PresetKind::Vqe => {
            let outcome = run_vqe(&resolved)?;
            write_output(&out, "aggregate.tsv", &outcome.aggregate_table)?;
            for record in &outcome.records {
                let text = record_to_toml(record)?;
                write_output(
                    &out.join("records"),
                    &format!("budget{}_seed{}.toml", record.budget, record.seed),
                    &text,
                )?;
            }
            write_manifest(&out, "vqe", Some(figure), &cfg, &cfg.seeds, started.elapsed().as_secs_f64())?;
            eprintln!("wrote {}", out.join("aggregate.tsv").display());
        }
    }
    Ok(())
}
