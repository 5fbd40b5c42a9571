//! End-to-end checks of the binary: exit codes, output files, determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ionzne"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("ionzne_cli_tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_mini_inputs(dir: &Path, total_samples: u64) -> PathBuf {
    let ham = dir.join("mini.txt");
    std::fs::write(&ham, "# molecule: test\nII -1.0\nZI 0.5\nXX 0.25\n").unwrap();
    let cfg = dir.join("mini.toml");
    std::fs::write(
        &cfg,
        format!(
            r#"
hamiltonian = "{}"
seeds = [3]
fock_levels = 10

[noise]
profile = "none"

[schedule]
method = "ms_after"
indices = [0, 1]

[sweep]
theta_start = 0.0
theta_stop = 0.2
theta_step = 0.1
shots_per_term = 100

[vqe]
strategy = "optimize_then_extrapolate"

[budget]
total_samples = {total_samples}
reserve_fraction = 0.5
"#,
            ham.display()
        ),
    )
    .unwrap();
    cfg
}

#[test]
fn sweep_writes_deterministic_table() {
    let dir = scratch("sweep");
    let cfg = write_mini_inputs(&dir, 4000);
    let out1 = dir.join("run1");
    let out2 = dir.join("run2");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let t1 = std::fs::read_to_string(out1.join("sweep.tsv")).unwrap();
    let t2 = std::fs::read_to_string(out2.join("sweep.tsv")).unwrap();
    assert_eq!(t1, t2);
    assert!(t1.lines().count() > 1);
    assert!(out1.join("manifest.toml").exists());

    // a different seed changes the sampled columns
    let out3 = dir.join("run3");
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out3)
        .args(["--seed", "4"])
        .status()
        .unwrap();
    assert!(status.success());
    let t3 = std::fs::read_to_string(out3.join("sweep.tsv")).unwrap();
    assert_ne!(t1, t3);
}

#[test]
fn vqe_emits_records_and_aggregate() {
    let dir = scratch("vqe");
    let cfg = write_mini_inputs(&dir, 4000);
    let out = dir.join("run");
    let status = bin().args(["vqe", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let aggregate = std::fs::read_to_string(out.join("aggregate.tsv")).unwrap();
    assert!(aggregate.contains("optimize_then_extrapolate"));
    assert!(out.join("records").join("budget4000_seed3.toml").exists());
}

#[test]
fn extrapolate_standalone_writes_fits() {
    let dir = scratch("extrapolate");
    let cfg = write_mini_inputs(&dir, 4000);
    let out = dir.join("run");
    let status = bin()
        .args(["extrapolate", "--config"])
        .arg(&cfg)
        .args(["--theta-star", "0.1", "--shots", "50"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let fits = std::fs::read_to_string(out.join("fits.tsv")).unwrap();
    // two schedule points support exactly the linear fit
    assert_eq!(fits.lines().count(), 2);
    assert!(out.join("points.tsv").exists());
}

#[test]
fn unknown_figure_is_a_validation_error() {
    let output = bin().args(["reproduce", "fig99"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn invalid_config_is_a_validation_error() {
    let dir = scratch("invalid");
    let cfg = write_mini_inputs(&dir, 4000);
    let text = std::fs::read_to_string(&cfg).unwrap().replace("indices = [0, 1]", "indices = []");
    std::fs::write(&cfg, text).unwrap();
    let output = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_with_code_three() {
    let dir = scratch("budget");
    let cfg = write_mini_inputs(&dir, 3);
    let out = dir.join("run");
    let output =
        bin().args(["vqe", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(3), "{}", String::from_utf8_lossy(&output.stderr));
}

#[test]
fn config_dir_env_var_resolves_relative_paths() {
    let dir = scratch("envvar");
    let _cfg = write_mini_inputs(&dir, 4000);
    let out = dir.join("run");
    let status = bin()
        .env("IONZNE_CONFIG_DIR", &dir)
        .args(["sweep", "--config", "mini.toml", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn calibrate_noiseless_reports_all_gates() {
    let output = bin()
        .args(["calibrate", "--profile", "discrete", "--noise", "none", "--fock", "10"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    for gate in ["MS", "MS_dagger", "MS_then_inverse", "R_half_pi", "R_pi"] {
        assert!(text.contains(gate), "missing {gate} in {text}");
    }
    // noiseless gates sit at the identity-fidelity ceiling
    for line in text.lines().skip(1) {
        let fid: f64 = line.split('\t').nth(2).unwrap().parse().unwrap();
        assert!(fid > 0.9999, "{line}");
    }
}

#[test]
fn all_shipped_presets_validate() {
    let repo = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let configs = repo.join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let mut cfg = ionzne::experiment::ExperimentConfig::from_file(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if cfg.hamiltonian.is_relative() {
            cfg.hamiltonian = repo.join(&cfg.hamiltonian);
        }
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert_eq!(count, 20, "expected all bundled presets");
}
