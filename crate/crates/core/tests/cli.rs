use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qsync(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsync"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_config(dir: &Path, n_sites: usize, coupling: f64, extra: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(
        &path,
        format!(
            "schema_version = 1\n\n[model]\nn_sites = {n_sites}\nmean_splitting = 1.0\n\
             disorder_width = 0.01\ncoupling = {coupling}\ntemperature = 0.1\n{extra}"
        ),
    )
    .unwrap();
    path.display().to_string()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&qsync(&["--help"])), 0);
    assert_eq!(code(&qsync(&["--version"])), 0);
    assert_eq!(code(&qsync(&["sweep", "--help"])), 0);
}

#[test]
fn bad_arguments_are_validation_errors() {
    assert_eq!(code(&qsync(&[])), 1);
    assert_eq!(code(&qsync(&["simulate", "--method", "langevin"])), 1);
    assert_eq!(code(&qsync(&["sweep", "--kappa-list", "1,x"])), 1);
    assert_eq!(code(&qsync(&["--seed", "-3", "simulate"])), 1);
}

#[test]
fn unknown_config_keys_and_versions_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16, 0.01, "typo_key = 1\n");
    let out = dir.path().join("o").display().to_string();
    let o = qsync(&["--config", &cfg, "--out", &out, "simulate"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("typo_key"));
    let path = dir.path().join("v.toml");
    fs::write(
        &path,
        fs::read_to_string(&cfg)
            .unwrap()
            .replace("schema_version = 1", "schema_version = 7"),
    )
    .unwrap();
    assert_eq!(
        code(&qsync(&[
            "--config",
            path.to_str().unwrap(),
            "--out",
            &out,
            "simulate"
        ])),
        1
    );
}

#[test]
fn simulate_writes_field_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 128, 0.02, "");
    let out = dir.path().join("o");
    let o = qsync(&[
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "3",
        "simulate",
        "--method",
        "saddle",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("manifest.json").exists());
    assert!(out
        .join("point_000/fields/r0000_saddle_filter.csv")
        .exists());
}

#[test]
fn saturated_solver_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 64, 0.12, "");
    let out = dir.path().join("o").display().to_string();
    assert_eq!(
        code(&qsync(&["--config", &cfg, "--out", &out, "simulate"])),
        2
    );
}

#[test]
fn partial_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 64, 0.01, "");
    let out = dir.path().join("o").display().to_string();
    let o = qsync(&[
        "--config",
        &cfg,
        "--out",
        &out,
        "--realizations",
        "10",
        "sweep",
        "--kappa-list",
        "1,10",
    ]);
    assert_eq!(code(&o), 3);
    assert!(Path::new(&out).join("manifest.json").exists());
}

#[test]
fn mcmc_chain_flags_reach_the_sampler() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        16,
        0.01,
        "\n[mcmc]\nburn_in_sweeps = 50\nsweeps = 100\nthin = 5\n",
    );
    let out = dir.path().join("o");
    let o = qsync(&[
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "simulate",
        "--method",
        "mcmc",
        "--sweeps",
        "60",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(out.join("point_000/fields/r0000_mcmc.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(side["details"]["samples"], 12);
    assert_eq!(side["details"]["chain"]["burn_in_sweeps"], 50);
}

#[test]
fn sweep_fit_and_plot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 256, 0.02, "");
    let out = dir.path().join("run");
    let o = qsync(&[
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--realizations",
        "20",
        "sweep",
        "--pipeline",
        "saddle",
        "--kappa-list",
        "2,3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("scaling.csv").exists());

    let corr = out.join("point_001/correlation_saddle_filter.csv");
    let fit_dir = dir.path().join("fit");
    let o = qsync(&[
        "--out",
        fit_dir.to_str().unwrap(),
        "fit-r0",
        corr.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let refit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fit_dir.join("fit_r0.json")).unwrap()).unwrap();
    let stored: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(corr.with_extension("json")).unwrap()).unwrap();
    let (a, b) = (
        refit["fit"]["r0"].as_f64().unwrap(),
        stored["fit"]["r0"].as_f64().unwrap(),
    );
    assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");

    let o = qsync(&["plot", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(out.join("plots/correlation.svg").exists());
    assert!(out.join("plots/scaling.svg").exists());
    assert!(!out.join("plots/spectrum.svg").exists());
}

#[test]
fn fit_r0_without_sidecar_fails() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    fs::write(&csv, "separation,r,r_stderr\n0,1,0.1\n").unwrap();
    assert_eq!(code(&qsync(&["fit-r0", csv.to_str().unwrap()])), 1);
}

#[test]
fn plot_on_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert_ne!(code(&qsync(&["plot", dir.path().to_str().unwrap()])), 0);
}

#[test]
fn other_subcommands_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 20, 0.025, "");
    for (sub, probe) in [
        ("sample-disorder", "point_000/disorder/r0000.csv"),
        ("spectrum", "drop_counts.csv"),
        ("oracle", "point_000/spinon/r0000.csv"),
    ] {
        let out = dir.path().join(sub);
        let o = qsync(&[
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--realizations",
            "2",
            sub,
        ]);
        assert_eq!(code(&o), 0, "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(probe).exists(), "{sub}");
    }
}

#[test]
fn plots_flag_draws_after_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 20, 0.025, "");
    let out = dir.path().join("o");
    let o = qsync(&[
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--plots",
        "spectrum",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("plots/spectrum.svg").exists());
}
