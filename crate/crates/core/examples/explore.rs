//! Ad-hoc runner: prints fit and norm traces for one configuration.
//!
//! cargo run --release -p fnls-core --example explore -- \
//!     <s> <p> <kind> <amp> <L> <log2N> <t_end> <N_t> [integrator] [fit_every]

use std::time::Instant;

use fnls_core::dynamics::{evolve, IntegratorKind, ModelParams, PropagatorOptions, TimeGrid};
use fnls_core::initial::{evaluate_profile, InitialProfile, ProfileKind};
use fnls_core::monitor::{Monitor, MonitorConfig};
use fnls_core::spectral::build_grid;

fn main() {
    let a: Vec<String> = std::env::args().skip(1).collect();
    let s: f64 = a[0].parse().unwrap();
    let p: u32 = a[1].parse().unwrap();
    let kind = match a[2].as_str() {
        "sech" => ProfileKind::Sech,
        "gaussian" => ProfileKind::Gaussian,
        _ => ProfileKind::SuperGaussian,
    };
    let amp: f64 = a[3].parse().unwrap();
    let l: f64 = a[4].parse().unwrap();
    let n = 1usize << a[5].parse::<u32>().unwrap();
    let t_end: f64 = a[6].parse().unwrap();
    let nt: usize = a[7].parse().unwrap();
    let integrator = match a.get(8).map(String::as_str) {
        Some("irk4") => IntegratorKind::Irk4,
        Some("splitting") => IntegratorKind::Splitting,
        _ => IntegratorKind::Rk4,
    };
    let fit_every: usize = a.get(9).map(|v| v.parse().unwrap()).unwrap_or(100);

    let grid = build_grid(l, n).unwrap();
    let model = ModelParams::new(0.1, s, p).unwrap();
    let u0 = evaluate_profile(&InitialProfile::new(kind, amp).unwrap(), &grid);
    let tg = TimeGrid::new(t_end, nt).unwrap();
    let mut cfg = MonitorConfig::new(nt);
    cfg.fit_every = fit_every;
    cfg.norms.cadence = fit_every;
    if let Ok(every) = std::env::var("SNAP_EVERY") {
        let every: usize = every.parse().unwrap();
        cfg.snapshot_steps = (0..=nt).step_by(every).collect();
    }
    cfg.stop_on_singularity = std::env::var("NOSTOP").is_err();
    let mut mon = Monitor::new(model, cfg);
    let start = Instant::now();
    let options = PropagatorOptions {
        dealias: std::env::var("DEALIAS").is_ok(),
        ..PropagatorOptions::default()
    };
    let traj = evolve(&u0, &tg, &model, integrator, options, &mut mon).unwrap();
    let el = start.elapsed().as_secs_f64();
    println!("m = {:.4e}", grid.min_resolved_distance());
    if let Ok(path) = std::env::var("DUMP") {
        let body: String = traj.state.sorted_moduli().iter().map(|(k, a)| format!("{k:e},{a:e}\n")).collect();
        std::fs::write(&path, body).unwrap();
        let u = fnls_core::spectral::inverse_transform(&traj.state);
        let body: String = grid.x().iter().zip(u.values()).map(|(x, v)| format!("{x:e},{:e}\n", v.norm())).collect();
        std::fs::write(format!("{path}.x"), body).unwrap();
        for snap in &mon.snapshots {
            let body: String = snap.spectrum.sorted_moduli().iter().filter(|(k, _)| *k >= 0.0).map(|(k, a)| format!("{k:e},{a:e}\n")).collect();
            std::fs::write(format!("{path}.t{:06.2}", snap.t), body).unwrap();
        }
    }
    for snap in &mon.snapshots {
        let peaks = fnls_core::tracer::locate_singularity(&snap.field, &Default::default());
        println!("snapshot t={:7.3} peaks={peaks:.3?}", snap.t);
    }
    for smp in &mon.samples {
        let r = &smp.record;
        if let Some(f) = smp.fit {
            println!(
                "t={:7.3} dE={:.2e} dM={:.2e} linf={:.4} h1={:.4e} l8={:.4} delta={:.4e} mu={:.3} res={:.3} n={} win=({:.2},{:.2})",
                r.t, r.delta_e, r.mass_drift, r.linf, r.hs(1.0).unwrap(), r.lq(8.0).unwrap(),
                f.delta, f.mu, f.residual, f.n_points, f.window.0, f.window.1
            );
        }
    }
    println!(
        "stop={:?} t={} t_f={:?} mu={:?} x0={:?} elapsed={el:.1}s ({:.2} ms/step) maxdE={:.2e} maxdM={:.2e}",
        traj.stop, traj.t, mon.trace.t_f, mon.trace.mu_at_tf, mon.trace.x0_estimate,
        1e3 * el / traj.steps.max(1) as f64, mon.max_delta_e, mon.max_mass_drift
    );
}
