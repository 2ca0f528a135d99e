use std::f64::consts::PI;
use std::sync::Arc;

use fnls_core::dynamics::{
    evolve, exact_linear_solution, exact_linear_spectrum, irk4_step, limiting_solution, rhs_fourier,
    rk4_step, splitting_step, IntegratorKind, ModelParams, NoObserver, Propagator,
    PropagatorOptions, Terms, TimeGrid,
};
use fnls_core::initial::{evaluate_profile, InitialProfile, ProfileKind};
use fnls_core::spectral::{build_grid, forward_transform, inverse_transform, Field, Grid, Spectrum};
use fnls_core::Complex64;

fn model(epsilon: f64, s: f64, p: u32) -> ModelParams {
    ModelParams::new(epsilon, s, p).unwrap()
}

fn sech(grid: &Arc<Grid>) -> Field {
    evaluate_profile(&InitialProfile::unit(ProfileKind::Sech), grid)
}

fn max_diff(a: &Field, b: &Field) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn run(u0: &Field, t_end: f64, n: usize, mp: &ModelParams, kind: IntegratorKind, terms: Terms) -> Field {
    let tg = TimeGrid::new(t_end, n).unwrap();
    let opts = PropagatorOptions {
        terms,
        dealias: false,
    };
    let traj = evolve(u0, &tg, mp, kind, opts, &mut NoObserver).unwrap();
    inverse_transform(&traj.state)
}

#[test]
fn zero_state_stays_zero() {
    let g = build_grid(5.0, 128).unwrap();
    let mp = model(0.1, 0.4, 2);
    let zero = Spectrum::zeros(g.clone());
    assert!(rhs_fourier(&zero, &mp).unwrap().coeffs().iter().all(|c| *c == Complex64::default()));
    for step in [rk4_step, splitting_step, irk4_step] {
        let mut s = zero.clone();
        for _ in 0..5 {
            s = step(&s, 0.01, &mp).unwrap();
        }
        assert!(s.coeffs().iter().all(|c| *c == Complex64::default()));
    }
}

#[test]
fn constant_field_rhs_lives_on_the_zero_mode() {
    let g = build_grid(3.0, 64).unwrap();
    let mp = model(0.1, 0.3, 2);
    let c = Complex64::new(0.6, -0.3);
    let f = Field::from_fn(g.clone(), |_| c);
    let r = rhs_fourier(&forward_transform(&f), &mp).unwrap();
    let expected = -Complex64::i() / mp.epsilon * c.norm_sqr().powi(2) * c;
    assert!((r.coeffs()[0] - expected).norm() < 1e-13);
    assert!(r.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));
}

#[test]
fn single_mode_linear_rate() {
    let g = build_grid(2.0, 64).unwrap();
    let mp = model(0.1, 0.35, 1);
    let j = 5;
    let k0 = g.k()[j];
    let mut coeffs = vec![Complex64::default(); 64];
    coeffs[j] = Complex64::new(0.3, 0.1);
    let mut prop = Propagator::new(
        g.clone(),
        mp,
        PropagatorOptions {
            terms: Terms::LinearOnly,
            dealias: false,
        },
    )
    .unwrap();
    let mut out = vec![Complex64::default(); 64];
    prop.rhs(&coeffs, &mut out, 0.0).unwrap();
    let rate = mp.epsilon.powf(2.0 * mp.s - 1.0) * k0.abs().powf(2.0 * mp.s);
    assert!((out[j] - Complex64::new(0.0, -rate) * coeffs[j]).norm() < 1e-14);
}

#[test]
fn rk4_linear_step_matches_exact_propagator() {
    let g = build_grid(10.0, 1 << 12).unwrap();
    let mp = model(0.1, 0.5, 1);
    let u0 = sech(&g);
    let one = run(&u0, 1e-3, 1, &mp, IntegratorKind::Rk4, Terms::LinearOnly);
    let err = max_diff(&one, &exact_linear_solution(&u0, 1e-3, &mp));
    assert!(err <= 1e-12, "one step: {err:e}");
}

#[test]
fn splitting_is_exact_for_each_sub_flow() {
    let g = build_grid(10.0, 1 << 11).unwrap();
    let mp = model(0.1, 0.3, 1);
    let u0 = sech(&g);
    for n in [1, 7, 100] {
        let lin = run(&u0, 2.0, n, &mp, IntegratorKind::Splitting, Terms::LinearOnly);
        let err = max_diff(&lin, &exact_linear_solution(&u0, 2.0, &mp));
        assert!(err < 1e-13, "linear, {n} steps: {err:e}");

        let non = run(&u0, 2.0, n, &mp, IntegratorKind::Splitting, Terms::NonlinearOnly);
        // the nonlinear-only flow is the limiting solution without the unit rotation
        let exact: Vec<Complex64> = u0
            .values()
            .iter()
            .map(|&v| v * Complex64::from_polar(1.0, -2.0 * v.norm_sqr() / mp.epsilon))
            .collect();
        let err = non
            .values()
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-11, "nonlinear, {n} steps: {err:e}");
        let modulus = non
            .values()
            .iter()
            .zip(u0.values())
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0, f64::max);
        assert!(modulus < 1e-13, "nonlinear modulus drift {modulus:e}");
    }
}

#[test]
fn nonlinear_phase_preserves_modulus() {
    let g = build_grid(4.0, 256).unwrap();
    let mp = model(0.05, 0.2, 3);
    let prop = Propagator::new(g.clone(), mp, PropagatorOptions::default()).unwrap();
    let f = Field::from_fn(g, |x| Complex64::new((x / 3.0).cos() * 1.3, (x * 0.7).sin()));
    let mut u = f.values().to_vec();
    prop.nonlinear_phase(&mut u, 0.37);
    for (a, b) in u.iter().zip(f.values()) {
        assert!((a.norm() - b.norm()).abs() <= 4.0 * f64::EPSILON * b.norm().max(f64::MIN_POSITIVE));
    }
}

#[test]
fn irk4_single_mode_is_the_pade_approximant() {
    let g = build_grid(3.0, 64).unwrap();
    let mp = model(0.2, 0.45, 1);
    let j = 9;
    let mut coeffs = vec![Complex64::default(); 64];
    coeffs[j] = Complex64::new(1.0, 0.0);
    let y0 = Spectrum::new(g.clone(), coeffs).unwrap();
    let h = 0.6;
    let tg = TimeGrid::new(h, 1).unwrap();
    let opts = PropagatorOptions {
        terms: Terms::LinearOnly,
        dealias: false,
    };
    let traj = evolve(&inverse_transform(&y0), &tg, &mp, IntegratorKind::Irk4, opts, &mut NoObserver).unwrap();
    let w = mp.linear_weight() * g.k()[j].abs().powf(2.0 * mp.s);
    let z = Complex64::new(0.0, -w * h);
    let pade = (1.0 + z / 2.0 + z * z / 12.0) / (1.0 - z / 2.0 + z * z / 12.0);
    assert!(w * h > 1.0, "the test wants a step that is not small");
    assert!((traj.state.coeffs()[j] - pade).norm() < 1e-13);
    assert!((pade.norm() - 1.0).abs() < 1e-14);
}

#[test]
fn exact_linear_solution_properties() {
    let g = build_grid(10.0, 1 << 12).unwrap();
    let u0 = sech(&g);
    let mp = model(0.1, 0.37, 1);
    assert_eq!(exact_linear_solution(&u0, 0.0, &mp), u0);

    let s0 = forward_transform(&u0);
    let st = exact_linear_spectrum(&s0, 13.0, &mp);
    for (a, b) in st.coeffs().iter().zip(s0.coeffs()) {
        if b.norm() > 1e-300 {
            assert!((a.norm() / b.norm() - 1.0).abs() <= 1e-13);
        }
    }

    // at s = 1/2 the parameter ε drops out
    let a = exact_linear_solution(&u0, 3.0, &model(0.1, 0.5, 1));
    let b = exact_linear_solution(&u0, 3.0, &model(1.0, 0.5, 1));
    assert!(max_diff(&a, &b) <= 1e-13);
}

#[test]
fn limiting_solution_properties() {
    let g = build_grid(10.0, 1 << 10).unwrap();
    let u0 = sech(&g);
    let mp = model(0.1, 0.01, 2);
    assert_eq!(limiting_solution(&u0, 0.0, &mp), u0);
    let ul = limiting_solution(&u0, 0.7, &mp);
    for (a, b) in ul.values().iter().zip(u0.values()) {
        assert!((a.norm() - b.norm()).abs() <= 4.0 * f64::EPSILON * b.norm());
    }
}

#[test]
fn constant_field_global_error_is_fourth_order() {
    let g = build_grid(1.0, 32).unwrap();
    let mp = model(0.1, 0.6, 1);
    let c = Complex64::new(0.8, 0.3);
    let u0 = Field::from_fn(g.clone(), |_| c);
    let t = 1.0;
    let exact = c * Complex64::from_polar(1.0, -c.norm_sqr().powi(1) * t / mp.epsilon);
    for kind in [IntegratorKind::Rk4, IntegratorKind::Irk4] {
        let err = |n: usize| {
            let u = run(&u0, t, n, &mp, kind, Terms::Full);
            u.values().iter().map(|v| (v - exact).norm()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(200), err(400));
        let ratio = e1 / e2;
        assert!((13.0..19.0).contains(&ratio), "{kind:?}: {e1:e} / {e2:e} = {ratio}");
    }
    // the splitting integrates the phase rotation exactly
    let u = run(&u0, t, 10, &mp, IntegratorKind::Splitting, Terms::Full);
    assert!(u.values().iter().all(|v| (v - exact).norm() < 1e-12));
}

#[test]
fn even_data_stays_even() {
    let g = build_grid(10.0, 1 << 11).unwrap();
    let mp = model(0.1, 0.3, 1);
    let u = run(&sech(&g), 2.0, 400, &mp, IntegratorKind::Rk4, Terms::Full);
    let asym = (0..g.len())
        .map(|j| (u.values()[j].norm() - u.values()[g.mirror_index(j)].norm()).abs())
        .fold(0.0, f64::max);
    assert!(asym <= 1e-8, "{asym:e}");
}

fn convergence_ratios(kind: IntegratorKind, base: usize) -> Vec<f64> {
    let g = build_grid(10.0, 1 << 10).unwrap();
    let mp = model(0.1, 1.0, 1);
    let u0 = sech(&g);
    let reference = run(&u0, 0.5, 8 * base, &mp, kind, Terms::Full);
    let errors: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|m| max_diff(&run(&u0, 0.5, m * base, &mp, kind, Terms::Full), &reference))
        .collect();
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

#[test]
fn rk4_is_fourth_order() {
    for r in convergence_ratios(IntegratorKind::Rk4, 200) {
        assert!((12.0..=20.0).contains(&r), "ratio {r}");
    }
}

#[test]
fn splitting_is_fourth_order() {
    for r in convergence_ratios(IntegratorKind::Splitting, 25) {
        assert!((12.0..=20.0).contains(&r), "ratio {r}");
    }
}

#[test]
fn grid_period_is_the_domain_length() {
    let g = build_grid(10.0, 1 << 8).unwrap();
    assert!((g.period() - 20.0 * PI).abs() < 1e-12);
}
