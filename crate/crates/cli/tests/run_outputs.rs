use std::fs;
use std::path::Path;

use fnls_cli::presets::load_preset;
use fnls_cli::run::{run, DIAGNOSTICS_HEADER};
use fnls_cli::{RunConfig, RunSummary};
use fnls_core::dynamics::StopReason;

fn small(overrides: &[&str]) -> RunConfig {
    let mut all = vec![
        "grid.N=1024".to_string(),
        "time.n_steps=200".to_string(),
        "time.t_end=1.0".to_string(),
    ];
    all.extend(overrides.iter().map(|s| s.to_string()));
    load_preset("critical_s025_sech_n16", &all).unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn run_writes_every_output() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small(&["output.snapshot_times=[0.0, 0.5]"]);
    let (sim, dir) = run(&cfg, root.path()).unwrap();
    assert_eq!(dir, root.path().join("critical_s025_sech_n16"));
    assert_eq!(
        files(&dir),
        [
            "config.toml",
            "diagnostics.csv",
            "snapshot_t00000.000000.csv",
            "snapshot_t00000.500000.csv",
            "snapshot_t00001.000000.csv",
            "spectrum_t00000.000000.csv",
            "spectrum_t00000.500000.csv",
            "spectrum_t00001.000000.csv",
            "summary.json",
        ]
    );

    let diag = fs::read_to_string(dir.join("diagnostics.csv")).unwrap();
    let mut lines = diag.lines();
    assert_eq!(lines.next().unwrap(), DIAGNOSTICS_HEADER);
    assert_eq!(
        DIAGNOSTICS_HEADER,
        "t,mass,energy,delta_E,linf,l2,l8,l10,hs_s,hs_half,hs_1,delta_fit,mu_fit,fit_residual"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r.split(',').count() == 14));
    // fits every 100 steps: the columns are empty in between
    assert!(rows[1].ends_with(",,,"));
    assert!(!rows[10].ends_with(",,,"));

    let snap = fs::read_to_string(dir.join("snapshot_t00000.500000.csv")).unwrap();
    assert!(snap.starts_with("x,re_u,im_u,abs_u\n"));
    assert_eq!(snap.lines().count(), 1025);
    let spec = fs::read_to_string(dir.join("spectrum_t00001.000000.csv")).unwrap();
    assert!(spec.starts_with("k,abs_uhat\n"));
    let ks: Vec<f64> = spec.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ks.len(), 1024);
    assert!(ks.windows(2).all(|w| w[0] < w[1]));

    let summary: RunSummary =
        serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.stop_reason, StopReason::Completed);
    assert_eq!(summary.steps, 200);
    assert_eq!(summary, sim.summary);
}

#[test]
fn echoed_config_round_trips() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small(&["tracer.n_fit=50", "norms.cadence=5"]);
    let (sim, dir) = run(&cfg, root.path()).unwrap();
    let echoed = RunConfig::from_path(&dir.join("config.toml"), &[]).unwrap();
    assert_eq!(echoed, cfg);
    assert_eq!(sim.summary.config, cfg);
    let reparsed = RunConfig::from_toml_str(&sim.summary.config.to_toml()).unwrap();
    assert_eq!(reparsed, cfg);
}

#[test]
fn output_is_deterministic() {
    let cfg = small(&[]);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (_, da) = run(&cfg, a.path()).unwrap();
    let (_, db) = run(&cfg, b.path()).unwrap();
    for f in files(&da) {
        if f == "summary.json" {
            let strip = |p: &Path| {
                let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
                v["wall_clock_seconds"] = serde_json::Value::Null;
                v
            };
            assert_eq!(strip(&da.join(&f)), strip(&db.join(&f)));
        } else {
            assert_eq!(fs::read(da.join(&f)).unwrap(), fs::read(db.join(&f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn zero_amplitude_completes_quietly() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small(&["initial.amplitude=0.0"]);
    let (sim, _) = run(&cfg, root.path()).unwrap();
    assert_eq!(sim.summary.stop_reason, StopReason::Completed);
    assert!(sim.summary.t_f.is_none());
    assert!(sim.monitor.records().all(|r| r.mass == 0.0 && r.energy == 0.0 && r.linf == 0.0));
}

#[test]
fn overflow_is_reported_in_the_summary() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small(&["initial.amplitude=1e120", "model.p=2"]);
    let (sim, dir) = run(&cfg, root.path()).unwrap();
    assert_eq!(sim.summary.stop_reason, StopReason::Overflow);
    assert!(!sim.summary.succeeded());
    assert!(sim.summary.overflow_at.is_some());
    assert!(dir.join("summary.json").exists());
}

#[test]
fn invalid_values_name_their_key() {
    let err = load_preset("critical_s025_sech_n16", &["model.s=1.5".into()]).unwrap_err();
    assert!(err.is_config());
    assert!(err.to_string().contains("model.s"), "{err}");
    let err = RunConfig::from_toml_str("name = \"x\"\n[model]\nepsilon = 0.1\ns = 0.5\np = 1\nbogus = 3\n").unwrap_err();
    assert!(err.is_config());
    let err = load_preset("critical_s025_sech_n16", &["output.snapshot_times=[30.0]".into()]).unwrap_err();
    assert!(err.to_string().contains("output.snapshot_times"), "{err}");
}
