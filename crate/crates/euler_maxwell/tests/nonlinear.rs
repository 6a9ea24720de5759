#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use euler_maxwell::evolution::{linear_evolve, GridField, Selector};
use euler_maxwell::nonlinear::*;
use euler_maxwell::{Error, PlasmaParams, Species, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real field with every mode `|n_j| ≤ 1` filled at random.
fn low_mode_field(p: &PlasmaParams, n: usize, l: f64, amp: f64, seed: u64) -> GridField {
    let mut r = rng(seed);
    let mut f = GridField::zeros(n, l);
    for idx in 0..f.len() {
        let w = f.wave(idx);
        if w.iter().all(|x| x.abs() <= 1) {
            let mut s = random_mode(p, f.k_vec(idx), &mut r);
            if w == [0, 0, 0] {
                s.rho_e = s.rho_i;
            }
            f.set_mode(idx, &s.scale(c(amp, 0.0)));
        }
    }
    f.symmetrize();
    f
}

fn wave_of(f: &GridField, idx: usize) -> [i64; 3] {
    f.wave(idx)
}

fn index_mod(f: &GridField, w: [i64; 3]) -> usize {
    let n = f.n as i64;
    let m = w.map(|x| x.rem_euclid(n) as usize);
    (m[0] * f.n + m[1]) * f.n + m[2]
}

fn circular_product(f: &GridField, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); f.len()];
    for i in 0..f.len() {
        if a[i] == c(0.0, 0.0) {
            continue;
        }
        for j in 0..f.len() {
            let (wi, wj) = (wave_of(f, i), wave_of(f, j));
            out[index_mod(f, [wi[0] + wj[0], wi[1] + wj[1], wi[2] + wj[2]])] += a[i] * b[j];
        }
    }
    out
}

fn deriv(f: &GridField, a: &[C64], axis: usize) -> Vec<C64> {
    (0..f.len()).map(|i| a[i] * c(0.0, f.k_vec(i)[axis])).collect()
}

/// Naive DFT to point values.
fn point_values(f: &GridField, a: &[C64]) -> Vec<f64> {
    let n = f.n;
    let mut out = vec![0.0; f.len()];
    for (x, o) in out.iter_mut().enumerate() {
        let pos = [x / (n * n), (x / n) % n, x % n].map(|j| j as f64 / n as f64);
        let mut s = c(0.0, 0.0);
        for i in 0..f.len() {
            let w = wave_of(f, i);
            let phase = 2.0 * PI * (w[0] as f64 * pos[0] + w[1] as f64 * pos[1] + w[2] as f64 * pos[2]);
            s += a[i] * c(phase.cos(), phase.sin());
        }
        *o = s.re;
    }
    out
}

fn naive_forward(f: &GridField, v: &[f64]) -> Vec<C64> {
    let n = f.n;
    let mut out = vec![c(0.0, 0.0); f.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let w = wave_of(f, i);
        for (x, &val) in v.iter().enumerate() {
            let pos = [x / (n * n), (x / n) % n, x % n].map(|j| j as f64 / n as f64);
            let phase = -2.0 * PI * (w[0] as f64 * pos[0] + w[1] as f64 * pos[1] + w[2] as f64 * pos[2]);
            *o += c(phase.cos(), phase.sin()) * val;
        }
        *o /= f.len() as f64;
    }
    out
}

fn truncate(f: &GridField, a: &mut [C64]) {
    let cut = dealias_cutoff(f.n);
    for (i, z) in a.iter_mut().enumerate() {
        if wave_of(f, i).iter().any(|x| x.abs() > cut) {
            *z = c(0.0, 0.0);
        }
    }
}

/// Sources of the mild form from explicit convolutions; the pressure
/// factor `ρ/(1+ρ)` is not polynomial and goes through naive transforms.
fn oracle_sources(p: &PlasmaParams, f: &GridField) -> GridField {
    let mut out = GridField::zeros(f.n, f.box_length);
    let comp = |j: usize| f.comps[j].as_slice();
    for (s, sp) in Species::BOTH.iter().enumerate() {
        let (m, t, q) = (p.mass(*sp), p.temp(*sp), p.charge(*sp));
        let u0 = 2 + 3 * s;
        let rho_pts = point_values(f, comp(s));
        let ratio: Vec<f64> = rho_pts.iter().map(|r| r / (1.0 + r)).collect();
        for b in 0..3 {
            let mut flux: Vec<C64> = circular_product(f, comp(s), comp(u0 + b)).iter().map(|z| -z).collect();
            truncate(f, &mut flux);
            for i in 0..f.len() {
                out.comps[s][i] += c(0.0, f.k_vec(i)[b]) * flux[i];
                out.comps[8 + b][i] += flux[i] * (FOUR_PI * q);
            }
            let mut g2 = vec![c(0.0, 0.0); f.len()];
            for a in 0..3 {
                let adv = circular_product(f, comp(u0 + a), &deriv(f, comp(u0 + b), a));
                g2.iter_mut().zip(adv).for_each(|(g, x)| *g -= x * m);
            }
            let (b1, b2) = ((b + 1) % 3, (b + 2) % 3);
            let cross1 = circular_product(f, comp(u0 + b1), comp(11 + b2));
            let cross2 = circular_product(f, comp(u0 + b2), comp(11 + b1));
            for i in 0..f.len() {
                g2[i] += (cross1[i] - cross2[i]) * (q / p.c_light);
            }
            let grad = point_values(f, &deriv(f, comp(s), b));
            let pres: Vec<f64> = ratio.iter().zip(&grad).map(|(r, g)| t * r * g).collect();
            g2.iter_mut().zip(naive_forward(f, &pres)).for_each(|(g, x)| *g += x);
            truncate(f, &mut g2);
            out.comps[u0 + b] = g2.iter().map(|z| z / m).collect();
        }
    }
    out
}

fn max_diff(a: &GridField, b: &GridField) -> f64 {
    a.comps
        .iter()
        .zip(&b.comps)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).norm()))
        .fold(0.0, f64::max)
}

#[test]
fn sources_match_convolution_oracle() {
    let p = random_params(&mut rng(61));
    let f = low_mode_field(&p, 4, 2.0 * PI, 0.05, 62);
    let fft = Fft3::new(4);
    let got = source_field(&p, &fft, &f).unwrap();
    let want = oracle_sources(&p, &f);
    let scale = want.comps.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(scale > 0.0);
    assert!(max_diff(&got, &want) < 1e-12 * scale, "{}", max_diff(&got, &want) / scale);
}

#[test]
fn zero_field_has_zero_sources() {
    let p = unit();
    let f = GridField::zeros(8, 6.0 * PI);
    let s = source_field(&p, &Fft3::new(8), &f).unwrap();
    assert!(s.comps.iter().flatten().all(|z| *z == c(0.0, 0.0)));
}

#[test]
fn uniform_velocity_has_zero_sources() {
    let p = unit();
    let mut f = GridField::zeros(8, 6.0 * PI);
    let z = f.index_of([0, 0, 0]);
    f.comps[2][z] = c(0.3, 0.0);
    f.comps[6][z] = c(-0.2, 0.0);
    let fft = Fft3::new(8);
    let src = nonlinear_sources(&p, &fft, &f).unwrap();
    for s in 0..2 {
        for a in 0..3 {
            assert!(src.f[s][a].iter().all(|x| x.abs() < 1e-15));
            assert!(src.g2[s][a].iter().all(|x| x.abs() < 1e-15));
        }
    }
}

#[test]
fn divergence_sources_have_zero_mean() {
    let p = unit();
    let f = low_mode_field(&p, 8, 6.0 * PI, 0.1, 63);
    let src = nonlinear_sources(&p, &Fft3::new(8), &f).unwrap();
    for g in &src.g1 {
        let mean: f64 = g.iter().sum::<f64>() / g.len() as f64;
        assert!(mean.abs() < 1e-15);
    }
}

#[test]
fn source_field_respects_gauss_law() {
    let p = random_params(&mut rng(64));
    let f = low_mode_field(&p, 8, 6.0 * PI, 0.1, 65);
    let s = source_field(&p, &Fft3::new(8), &f).unwrap();
    for idx in 0..s.len() {
        let k = s.k_vec(idx);
        let div: C64 = (0..3).map(|a| c(0.0, k[a]) * s.comps[8 + a][idx]).sum();
        let charge = (s.comps[0][idx] - s.comps[1][idx]) * (FOUR_PI * p.e_charge);
        assert!((div - charge).norm() < 1e-14);
    }
}

#[test]
fn vacuum_is_rejected() {
    let p = unit();
    let mut f = GridField::zeros(8, 6.0 * PI);
    let z = f.index_of([0, 0, 0]);
    f.comps[0][z] = c(-1.5, 0.0);
    f.comps[1][z] = c(-1.5, 0.0);
    assert!(matches!(source_field(&p, &Fft3::new(8), &f), Err(Error::VacuumReached(_))));
}

#[test]
fn time_step_above_bound_is_rejected() {
    let p = unit();
    let f = GridField::zeros(16, 6.0 * PI);
    let dt = max_step(&p, &f);
    assert!(MildStepper::new(&p, &f, 0.9 * dt, Sources::Full).is_ok());
    assert!(matches!(MildStepper::new(&p, &f, 1.1 * dt, Sources::Full), Err(Error::InvalidInput(_))));
    assert!(matches!(MildStepper::new(&p, &f, -1.0, Sources::Full), Err(Error::InvalidInput(_))));
}

#[test]
fn disabled_sources_reproduce_linear_propagator() {
    let p = unit();
    let u0 = smooth_initial_data(&p, 16, 6.0 * PI, 1e-3, 5);
    let st = MildStepper::new(&p, &u0, 0.05, Sources::Disabled).unwrap();
    let u = st.advance(&u0, 40).unwrap();
    let lin = linear_evolve(&p, &u0, 2.0).unwrap();
    let gap = l2(&u.sub(&lin)) / l2(&lin);
    assert!(gap < 1e-10, "{gap}");
}

fn l2(f: &GridField) -> f64 {
    euler_maxwell::evolution::l2_norm(f, Selector::All)
}

#[test]
fn initial_data_is_small_real_and_consistent() {
    let p = unit();
    let u0 = smooth_initial_data(&p, 16, 6.0 * PI, 1e-3, 9);
    assert!(u0.reality_residual() < 1e-15);
    assert!(u0.gauss_residual(&p) < 1e-14);
    let fft = Fft3::new(16);
    let phys = PhysicalField::from_spectral(&fft, &u0);
    let sup = phys.values.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    assert!((sup - 1e-3).abs() < 1e-12);
    assert!(max_diff(&phys.to_spectral(&fft), &u0) < 1e-16);
    assert_eq!(u0, smooth_initial_data(&p, 16, 6.0 * PI, 1e-3, 9));
}

#[test]
fn quadratic_smallness_on_small_grid() {
    let p = unit();
    let gap = |eps: f64| {
        let u0 = smooth_initial_data(&p, 16, 6.0 * PI, eps, 3);
        let st = MildStepper::new(&p, &u0, 0.05, Sources::Full).unwrap();
        let u = st.advance(&u0, 40).unwrap();
        l2(&u.sub(&linear_evolve(&p, &u0, 2.0).unwrap()))
    };
    let ratio = (gap(1e-3) / gap(5e-4)).log2();
    assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
}

#[test]
fn unit_weight_energy_matches_parseval() {
    let p = random_params(&mut rng(66));
    let f = low_mode_field(&p, 8, 6.0 * PI, 0.1, 67);
    let fft = Fft3::new(8);
    for order in [0, 1, 3] {
        let rep = sobolev_energy_with(&p, &fft, &f, order, [0.0; 3], DensityWeights::Unit);
        let vol = f.box_length.powi(3);
        let mut want = 0.0;
        for idx in 0..f.len() {
            let w = sobolev_weight(&f.k_vec(idx), order as i64);
            let m = f.mode(idx);
            let mut e = (m.e_field.norm_squared() + m.b_field.norm_squared()) / FOUR_PI;
            for s in Species::BOTH {
                e += p.temp(s) * m.rho(s).norm_sqr() + p.mass(s) * m.u(s).norm_squared();
            }
            want += vol * w * e;
        }
        assert!((rep.e_n - want).abs() < 1e-9 * want, "order {order}");
        assert!((rep.sobolev_sq - want).abs() < 1e-9 * want);
    }
}

#[test]
fn unit_weight_energy_matches_hermitian_form() {
    let p = random_params(&mut rng(68));
    let f = low_mode_field(&p, 8, 6.0 * PI, 0.1, 69);
    let kap = [0.05, 0.0025, 0.0006];
    let rep = sobolev_energy_with(&p, &Fft3::new(8), &f, 2, kap, DensityWeights::Unit);
    let vol = f.box_length.powi(3);
    let (mut e, mut d) = (0.0, 0.0);
    for idx in 0..f.len() {
        let v = f.mode(idx).to_vector();
        let (h, dm) = energy_form_nonlinear(&p, &f.k_vec(idx), 2, kap);
        e += vol * (v.adjoint() * h * v)[(0, 0)].re;
        d += vol * (v.adjoint() * dm * v)[(0, 0)].re;
    }
    assert!((rep.e_n - e).abs() < 1e-10 * e.abs());
    assert!((rep.d_n - d).abs() < 1e-10 * d.abs());
}

#[test]
fn zero_field_has_zero_energy() {
    let f = GridField::zeros(8, 6.0 * PI);
    let rep = sobolev_energy(&unit(), &Fft3::new(8), &f, 3, [0.1, 0.01, 0.003]);
    assert_eq!((rep.e_n, rep.d_n), (0.0, 0.0));
    assert_eq!(rep.equivalence_ratio(), 1.0);
}

#[test]
fn multi_index_counts() {
    for n in 0..5usize {
        assert_eq!(multi_indices(n).len(), (n + 1) * (n + 2) * (n + 3) / 6);
    }
    assert_eq!(sobolev_weight(&euler_maxwell::RVec3::new(1.0, 2.0, 0.0), -1), 0.0);
    assert_eq!(sobolev_weight(&euler_maxwell::RVec3::new(1.0, 2.0, 0.0), 0), 1.0);
}

#[test]
fn energy_inequality_on_exact_dissipation() {
    // E = e^{-t}, D = E: dE/dt = −D, so λ̂ ≤ 1 needs no correction
    let samples: Vec<(f64, f64, f64)> = (0..50).map(|j| {
        let t = j as f64 * 0.01;
        (t, (-t).exp(), (-t).exp())
    }).collect();
    let rep = energy_inequality(&samples, 0.5).unwrap();
    assert_eq!(rep.c_hat, 0.0);
    assert!((rep.max_derivative_ratio + 1.0).abs() < 1e-4);
    assert!(energy_inequality(&samples, 2.0).unwrap().c_hat > 0.0);
    assert!(energy_inequality(&samples[..2], 0.5).is_err());
}

#[test]
fn kappa_selection_is_admissible() {
    let p = unit();
    let template = GridField::zeros(16, 6.0 * PI);
    let sel = select_kappas(&p, &template, 3).unwrap();
    let [k1, k2, k3] = sel.kappas;
    assert!(k1 > 0.0 && k1 < 1.0);
    assert!((k2 - k1 * k1).abs() < 1e-15 && (k3 - k1.powf(2.5)).abs() < 1e-15);
    assert!(sel.lambda_lin > 0.0 && sel.equivalence_ratio <= 10.0);
}

#[test]
fn short_run_records() {
    let p = unit();
    let cfg = NonlinearConfig { grid_size: 16, t_end: 1.0, record_every: 5, ..NonlinearConfig::default() };
    let run = run_nonlinear(&p, &cfg).unwrap();
    assert_eq!(run.records.len(), 5);
    assert_eq!(run.records[0].t, 0.0);
    assert!((run.records[4].t - 1.0).abs() < 1e-12);
    for r in &run.records {
        assert!(r.gauss_residual < 1e-8);
        assert!(r.energy.equivalence_ratio() <= 10.0);
        assert!(r.min_density > 0.99);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transform_round_trip(seed in any::<u64>(), n in prop::sample::select(vec![4usize, 6, 8, 12])) {
        let mut r = rng(seed);
        let fft = Fft3::new(n);
        let v: Vec<C64> = (0..n * n * n).map(|_| random_c(&mut r)).collect();
        let back = fft.to_spectral(&fft.to_physical(&v));
        let err = v.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
        let a: Vec<f64> = (0..n * n * n).map(|_| rand::Rng::random_range(&mut r, -1.0..1.0)).collect();
        let b: Vec<f64> = (0..n * n * n).map(|_| rand::Rng::random_range(&mut r, -1.0..1.0)).collect();
        let (sa, sb) = fft.to_spectral_pair(&a, &b);
        let (pa, pb) = fft.to_physical_pair(&sa, &sb);
        let err = a.iter().zip(&pa).chain(b.iter().zip(&pb)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn dealiasing_is_idempotent_and_keeps_low_modes(seed in any::<u64>()) {
        let p = unit();
        let f = low_mode_field(&p, 6, 2.0 * PI, 1.0, seed);
        let mut g = f.clone();
        dealias_field(&mut g);
        prop_assert_eq!(&g, &f);
        let mut r = rng(seed);
        let mut h = GridField::zeros(6, 2.0 * PI);
        for z in h.comps[3].iter_mut() { *z = random_c(&mut r); }
        dealias_field(&mut h);
        let once = h.clone();
        dealias_field(&mut h);
        prop_assert_eq!(&h, &once);
        for idx in 0..h.len() {
            if h.wave(idx).iter().any(|w| w.abs() > dealias_cutoff(6)) {
                prop_assert_eq!(h.comps[3][idx], c(0.0, 0.0));
            }
        }
    }
}
