mod common;

use common::*;
use euler_maxwell::em::{em_propagate, ModeEmState};
use euler_maxwell::evolution::*;
use euler_maxwell::fluid::{fluid_propagate, ModeFluidState};
use euler_maxwell::{CVec3, Error, ModeFullState, RVec3, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn full_mode_propagator_matches_ode() {
    let mut r = rng(11);
    for _ in 0..20 {
        let p = random_params(&mut r);
        let k = 10f64.powf(rand::Rng::random_range(&mut r, -1.0..1.0));
        let s0 = random_mode(&p, random_direction(&mut r) * k, &mut r);
        let t = rand::Rng::random_range(&mut r, 0.1..3.0);
        let exact = evolve_mode(&p, &s0, t).unwrap();
        let ode = ode_evolve(&p, &s0, t);
        assert!(rel_diff(&exact, &ode) < 1e-7, "k={k} t={t}: {}", rel_diff(&exact, &ode));
    }
}

#[test]
fn zero_mode_matches_ode_and_relaxes() {
    let mut r = rng(12);
    let p = random_params(&mut r);
    let mut s0 = random_mode(&p, RVec3::zeros(), &mut r);
    s0.rho_e = s0.rho_i;
    for t in [0.5, 2.0] {
        let exact = evolve_zero_mode(&p, &s0, t).unwrap();
        assert!(rel_diff(&exact, &ode_evolve(&p, &s0, t)) < 1e-7);
    }
    let late = evolve_zero_mode(&p, &s0, 200.0).unwrap();
    assert!(late.u_i.norm() + late.u_e.norm() + late.e_field.norm() < 1e-8);
    assert_eq!(late.rho_i, s0.rho_i);
}

#[test]
fn zero_mode_rest_state_is_stationary() {
    let p = unit();
    let mut s0 = ModeFullState::zeros(RVec3::zeros());
    s0.rho_i = c(0.3, 0.1);
    s0.rho_e = c(0.3, 0.1);
    s0.b_field = CVec3::new(c(1.0, 0.0), c(0.0, 0.0), c(-2.0, 0.5));
    let s = evolve_zero_mode(&p, &s0, 7.0).unwrap();
    assert!(rel_diff(&s, &s0) < 1e-14);
}

#[test]
fn zero_mode_rejects_charged_data() {
    let mut s0 = ModeFullState::zeros(RVec3::zeros());
    s0.rho_i = c(1.0, 0.0);
    assert!(matches!(evolve_zero_mode(&unit(), &s0, 1.0), Err(Error::ConstraintViolation(_))));
}

#[test]
fn helmholtz_split_projects_along_k() {
    let mut s = ModeFullState::zeros(RVec3::new(1.0, 0.0, 0.0));
    s.u_i = CVec3::new(c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0));
    let (fluid, _, em) = helmholtz_split(&s).unwrap();
    assert_eq!(fluid.s_i, c(1.0, 0.0));
    assert_eq!(em.u_i_perp, CVec3::new(c(0.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)));
    let back = helmholtz_recombine(&fluid, s.e_field.x, &em);
    assert!(rel_diff(&back, &s) < 1e-15);
}

#[test]
fn split_propagators_match_full_propagator() {
    let mut r = rng(13);
    let p = unit();
    let s0 = random_mode(&p, RVec3::new(0.3, -0.4, 0.2), &mut r);
    let t = 2.5;
    let full = evolve_mode(&p, &s0, t).unwrap();
    let (fl, _, em) = helmholtz_split(&s0).unwrap();
    let fl = fluid_propagate(&p, &fl, t).unwrap();
    let em = em_propagate(&p, &em, t).unwrap();
    let e_par = euler_maxwell::fluid::e_parallel(&p, fl.rho_i, fl.rho_e, fl.k_mag).unwrap();
    assert!(rel_diff(&helmholtz_recombine(&fl, e_par, &em), &full) < 1e-12);
}

fn smooth_field(n: usize, seed: u64) -> GridField {
    let p = unit();
    let mut f = GridField::from_modes(n, 6.0 * std::f64::consts::PI, |w, k| {
        let mut r = rng(seed ^ ((w[0] + 8) as u64 * 289 + (w[1] + 8) as u64 * 17 + (w[2] + 8) as u64));
        let mut s = random_mode(&p, k, &mut r);
        if k.norm() == 0.0 {
            s.rho_e = s.rho_i;
        }
        s.scale(c((-0.5 * k.norm_squared()).exp(), 0.0))
    });
    f.symmetrize();
    f
}

#[test]
fn linear_evolve_keeps_constraints_and_reality() {
    let p = unit();
    let f0 = smooth_field(8, 3);
    let f = linear_evolve(&p, &f0, 5.0).unwrap();
    assert!(f.gauss_residual(&p) < 5.0 * 1e-10 + f0.gauss_residual(&p));
    assert!(f.reality_residual() < 1e-12);
}

#[test]
fn diffusion_profile_starts_at_weighted_density() {
    let p = unit();
    let f0 = smooth_field(8, 4);
    let prof = diffusion_profiles(&p, &f0, 0.0);
    for idx in 0..f0.len() {
        let avg = (f0.comps[0][idx] + f0.comps[1][idx]) * 0.5;
        assert!((prof.comps[0][idx] - avg).norm() < 1e-14);
    }
}

#[test]
fn projection_of_zero_magnetic_field_vanishes() {
    let mut f = smooth_field(8, 5);
    for comp in 11..14 {
        f.comps[comp].iter_mut().for_each(|z| *z = c(0.0, 0.0));
    }
    assert_eq!(l2_norm(&projection_extract(&f, Selector::P4), Selector::All), 0.0);
}

#[test]
fn single_mode_norm_uses_parseval_weight() {
    let l = 2.0;
    let mut f = GridField::zeros(4, l);
    let idx = f.index_of([1, 0, 0]);
    f.comps[0][idx] = c(3.0, 4.0);
    assert!((l2_norm(&f, Selector::P1i) - 5.0 * l.powf(1.5)).abs() < 1e-12);
}

#[test]
fn radial_quadrature_matches_gaussian_moments() {
    let quad = RadialQuadrature::new(256, 12.0).unwrap();
    for n in [0, 2, 4] {
        let exact = gaussian_moment(n, 1.0);
        let got = quad.integrate(|k| k.powi(n as i32) * (-k * k).exp());
        assert!((got - exact).abs() < 1e-8 * exact, "n={n}");
    }
    let a = quad.isotropic_norm_sqr(|k| (-0.5 * k * k).exp());
    let exact = 4.0 * std::f64::consts::PI * gaussian_moment(2, 1.0) / (2.0 * std::f64::consts::PI).powi(3);
    assert!((a - exact).abs() < 1e-8 * exact);
}

#[test]
fn decay_fit_recovers_exact_power_laws() {
    let ts: Vec<f64> = (0..40).map(|j| 10f64.powf(1.0 + 2.0 * j as f64 / 39.0)).collect();
    let s1: Vec<(f64, f64)> = ts.iter().map(|&t| (t, (1.0 + t).powf(-0.75))).collect();
    let f = decay_fit(&s1, (10.0, 1000.0)).unwrap();
    assert!((f.exponent + 0.75).abs() < 1e-6);
    let s2: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 5.0 * (1.0 + t).powf(-1.75))).collect();
    let f = decay_fit(&s2, (10.0, 1000.0)).unwrap();
    assert!((f.exponent + 1.75).abs() < 1e-6);
    assert!((f.amplitude - 5.0).abs() < 1e-6);
    let s3: Vec<(f64, f64)> = ts.iter().map(|&t| (t, (1.0 + t).powf(-0.75) + (-t).exp())).collect();
    let f = decay_fit(&s3, (50.0, 1000.0)).unwrap();
    assert!((f.exponent + 0.75).abs() < 0.01);
}

#[test]
fn decay_fit_errors() {
    let few = [(1.0, 1.0), (2.0, 0.5)];
    assert!(matches!(decay_fit(&few, (0.0, 10.0)), Err(Error::TooFewSamples { .. })));
    let bad: Vec<(f64, f64)> = (0..12).map(|j| (j as f64, if j == 3 { 0.0 } else { 1.0 })).collect();
    assert_eq!(decay_fit(&bad, (0.0, 20.0)), Err(Error::NonPositiveSample(3)));
}

#[test]
fn generic_data_decays_at_three_quarters() {
    let p = unit();
    let quad = RadialQuadrature::for_window(&p, 100.0, 256).unwrap();
    let times: Vec<f64> = (0..21).map(|j| 10f64.powf(2.0 + 2.0 * j as f64 / 20.0)).collect();
    let series = radial_norm_series(&p, &IsotropicDatum::standard_generic(), &quad, &times).unwrap();
    let pts: Vec<(f64, f64)> = series.iter().map(|s| (s.t, s.total)).collect();
    let f = decay_fit(&pts, (100.0, 1e4)).unwrap();
    assert!((f.exponent + 0.75).abs() < 0.05, "{}", f.exponent);
    let bar: Vec<(f64, f64)> = series.iter().map(|s| (s.t, s.n_bar)).collect();
    assert!((decay_fit(&bar, (100.0, 1e4)).unwrap().exponent + 0.75).abs() < 0.05);
}

#[test]
fn fluid_and_em_blocks_match_ode() {
    let mut r = rng(14);
    let p = random_params(&mut r);
    let k_vec = random_direction(&mut r) * 0.7;
    let fl = ModeFluidState { rho_i: c(1.0, 0.2), rho_e: c(-0.5, 0.1), s_i: c(0.3, 0.0), s_e: c(0.0, -0.4), k_mag: 0.7 };
    let e_par = euler_maxwell::fluid::e_parallel(&p, fl.rho_i, fl.rho_e, 0.7).unwrap();
    let zero_em = ModeEmState {
        u_i_perp: CVec3::zeros(),
        u_e_perp: CVec3::zeros(),
        e_perp: CVec3::zeros(),
        b: CVec3::zeros(),
        k_vec,
    };
    let s0 = helmholtz_recombine(&fl, e_par, &zero_em);
    let out = fluid_propagate(&p, &fl, 1.5).unwrap();
    let (ode, _, _) = helmholtz_split(&ode_evolve(&p, &s0, 1.5)).unwrap();
    let d = (out.to_vector() - ode.to_vector()).norm() / ode.to_vector().norm();
    assert!(d < 1e-7, "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_propagator_semigroup(seed in any::<u64>(), t1 in 0.0..5.0f64, t2 in 0.0..5.0f64, k in 0.05..5.0f64) {
        let mut r = rng(seed);
        let p = random_params(&mut r);
        let s0 = random_mode(&p, random_direction(&mut r) * k, &mut r);
        let a = evolve_mode(&p, &evolve_mode(&p, &s0, t1).unwrap(), t2).unwrap();
        let b = evolve_mode(&p, &s0, t1 + t2).unwrap();
        prop_assert!(rel_diff(&a, &b) < 1e-8);
    }

    #[test]
    fn gauss_constraint_invariant(seed in any::<u64>(), t in 0.0..50.0f64, k in 0.05..5.0f64) {
        let mut r = rng(seed);
        let p = random_params(&mut r);
        let s0 = random_mode(&p, random_direction(&mut r) * k, &mut r);
        let s = evolve_mode(&p, &s0, t).unwrap();
        let scale = s0.gauss_scale(&p);
        let (res, div_b) = s.gauss_residual(&p);
        prop_assert!(res < 1e-10 * scale.max(1.0) && div_b < 1e-10 * scale.max(1.0));
    }
}

