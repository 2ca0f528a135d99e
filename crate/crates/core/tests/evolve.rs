use fnls_core::dynamics::{
    evolve, IntegratorKind, ModelParams, NoObserver, PropagatorOptions, StopReason, TimeGrid,
};
use fnls_core::initial::{evaluate_profile, InitialProfile, ProfileKind};
use fnls_core::monitor::{Monitor, MonitorConfig};
use fnls_core::spectral::build_grid;

#[test]
fn cadence_ten_over_a_thousand_steps_gives_101_records() {
    let g = build_grid(10.0, 1 << 9).unwrap();
    let u0 = evaluate_profile(&InitialProfile::unit(ProfileKind::Gaussian), &g);
    let mp = ModelParams::new(0.1, 0.5, 1).unwrap();
    let tg = TimeGrid::new(1.0, 1000).unwrap();
    let mut cfg = MonitorConfig::new(tg.n_steps);
    cfg.fit_every = 250;
    let mut mon = Monitor::new(mp, cfg);
    let traj = evolve(&u0, &tg, &mp, IntegratorKind::Splitting, PropagatorOptions::default(), &mut mon).unwrap();
    assert_eq!(traj.stop, StopReason::Completed);
    assert_eq!(traj.steps, 1000);
    assert_eq!(traj.t, 1.0);
    assert_eq!(mon.samples.len(), 101);
    assert_eq!(mon.samples[0].record.t, 0.0);
    assert_eq!(mon.samples.last().unwrap().record.t, 1.0);
    let fitted: Vec<usize> = mon.samples.iter().filter(|s| s.fit.is_some()).map(|s| s.step).collect();
    assert!(fitted.iter().all(|s| s % 250 == 0));
    assert!(mon.max_mass_drift <= 1e-12, "{}", mon.max_mass_drift);
}

#[test]
fn energy_bound_holds_along_the_trajectory() {
    let g = build_grid(10.0, 1 << 11).unwrap();
    let u0 = evaluate_profile(&InitialProfile::unit(ProfileKind::Sech), &g);
    for (s, p) in [(0.5, 1), (0.3, 2), (1.0, 1)] {
        let mp = ModelParams::new(0.1, s, p).unwrap();
        let tg = TimeGrid::new(1.0, 400).unwrap();
        let mut mon = Monitor::new(mp, MonitorConfig::new(tg.n_steps));
        evolve(&u0, &tg, &mp, IntegratorKind::Splitting, PropagatorOptions::default(), &mut mon).unwrap();
        let e0 = mon.samples[0].record.energy;
        for smp in &mon.samples {
            let r = &smp.record;
            let hs = r.hs(s).unwrap();
            assert!(
                mp.epsilon.powf(2.0 * s) * hs * hs <= 2.0 * e0 * (1.0 + 10.0 * r.delta_e),
                "s={s} p={p} t={}",
                r.t
            );
            assert!(r.energy >= 0.0 && r.kinetic >= 0.0 && r.potential >= 0.0);
        }
    }
}

#[test]
fn huge_amplitude_overflows_with_last_finite_state() {
    let g = build_grid(10.0, 1 << 8).unwrap();
    let u0 = evaluate_profile(&InitialProfile::new(ProfileKind::Gaussian, 1e120).unwrap(), &g);
    let mp = ModelParams::new(0.1, 0.5, 2).unwrap();
    let tg = TimeGrid::new(1.0, 10).unwrap();
    for kind in [IntegratorKind::Rk4, IntegratorKind::Splitting, IntegratorKind::Irk4] {
        let traj = evolve(&u0, &tg, &mp, kind, PropagatorOptions::default(), &mut NoObserver).unwrap();
        assert_eq!(traj.stop, StopReason::Overflow, "{kind:?}");
        assert!(traj.overflow_at.is_some());
        assert!(traj.state.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()));
    }
}

#[test]
fn zero_data_runs_to_the_end() {
    let g = build_grid(10.0, 1 << 8).unwrap();
    let u0 = evaluate_profile(&InitialProfile::new(ProfileKind::Sech, 0.0).unwrap(), &g);
    let mp = ModelParams::new(0.1, 0.25, 1).unwrap();
    let tg = TimeGrid::new(2.0, 50).unwrap();
    let mut mon = Monitor::new(mp, MonitorConfig::new(tg.n_steps));
    let traj = evolve(&u0, &tg, &mp, IntegratorKind::Rk4, PropagatorOptions::default(), &mut mon).unwrap();
    assert_eq!(traj.stop, StopReason::Completed);
    assert!(mon.trace.t_f.is_none());
    assert!(mon.samples.iter().all(|s| s.record.mass == 0.0 && s.record.energy == 0.0));
}

#[test]
fn runs_are_bit_reproducible() {
    let g = build_grid(10.0, 1 << 10).unwrap();
    let u0 = evaluate_profile(&InitialProfile::unit(ProfileKind::Sech), &g);
    let mp = ModelParams::new(0.1, 0.25, 1).unwrap();
    let tg = TimeGrid::new(0.5, 100).unwrap();
    for kind in [IntegratorKind::Rk4, IntegratorKind::Splitting, IntegratorKind::Irk4] {
        let a = evolve(&u0, &tg, &mp, kind, PropagatorOptions::default(), &mut NoObserver).unwrap();
        let b = evolve(&u0, &tg, &mp, kind, PropagatorOptions::default(), &mut NoObserver).unwrap();
        assert_eq!(a.state, b.state);
    }
}
