mod common;

use std::time::{Duration, Instant};

use common::{ode_evolve, random_c, random_cvec, random_direction, random_mode, random_params, rel_diff, rng, unit};
use euler_maxwell::darcy::{coefficient_g, sandwich_identity_residual};
use euler_maxwell::em::{b_propagate, em_eigenvalues, em_propagate, ModeEmState};
use euler_maxwell::evolution::{
    decay_fit, evolve_mode, evolve_zero_mode, helmholtz_recombine, helmholtz_split, linear_evolve, radial_norm_series,
    IsotropicDatum, NormSample, RadialQuadrature, Selector,
};
use euler_maxwell::fluid::{
    e_parallel, fluid_decomp, fluid_eigenvalues, fluid_matrix, fluid_propagate, lambda1_fourth_ratio, ModeFluidState,
};
use euler_maxwell::lyapunov::{lyapunov_decay_check, mode_rate, probe_direction, select_weights};
use euler_maxwell::nonlinear::{
    energy_inequality, run_nonlinear, select_kappas, smooth_initial_data, MildStepper, NonlinearConfig, Sources,
};
use euler_maxwell::params::{relaxation_cubic, sigma_roots, validate};
use euler_maxwell::{ModeFullState, PlasmaParams, RawParams, Result};
use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| lo * (hi / lo).powf(j as f64 / (n - 1) as f64)).collect()
}

/// Richardson over `|k| = 10⁻²·2⁻ʲ`, j = 0..6, assuming an `O(k²)` remainder.
fn richardson(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let vals: Vec<f64> = (0..=6).map(|j| f(1e-2 * 0.5f64.powi(j))).collect();
    vals.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect()
}

fn darcy() -> Result<Outcome> {
    let mut r = rng(1);
    let (mut sandwich, mut g_res) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let p = validate(&RawParams::random(&mut r))?;
        let n = 10f64.powf(r.random_range(-1.0..1.0));
        for b in [0.0, 1.0, 1e3] {
            sandwich = sandwich.max(sandwich_identity_residual(&p, b)?);
            let target = -p.mu1() / n;
            let g = coefficient_g(&p, n, b)?;
            g_res = g_res.max((g - Matrix2::identity() * target).abs().max() / target.abs());
        }
    }
    outcome(sandwich < 1e-11 && g_res < 1e-10, format!("sandwich {sandwich:.2e}, G {g_res:.2e}"))
}

fn fluid() -> Result<Outcome> {
    let p = unit();
    let r = richardson(|k| {
        let l1 = fluid_eigenvalues(&p, k).unwrap()[0];
        (l1.re + p.mu1() * k * k).abs() / k.powi(4)
    });
    let target = lambda1_fourth_ratio(&p).fourth_order().abs();
    let ratio_err = (r[r.len() - 1] / target - 1.0).abs();

    let lam = fluid_eigenvalues(&p, 1e-4)?;
    let sigma = sigma_roots(&relaxation_cubic(&p))?.sigma;
    let root_err = lam[1..]
        .iter()
        .map(|l| sigma.iter().map(|s| (l - s).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);

    let mut proj = 0.0_f64;
    for k in log_grid(1e-3, 1e2, 41) {
        let res = fluid_decomp(&p, k)?.algebra_residuals(&fluid_matrix(&p, k)?);
        proj = res.iter().copied().fold(proj, f64::max);
    }
    outcome(
        ratio_err < 0.01 && root_err < 1e-6 && proj < 1e-9,
        format!("fourth-order ratio off by {ratio_err:.2e}, roots {root_err:.2e}, projections {proj:.2e}"),
    )
}

fn em() -> Result<Outcome> {
    let p = unit();
    let r = richardson(|k| {
        let l1 = em_eigenvalues(&p, k).unwrap()[0];
        (l1.re + p.mu2() * k * k).abs() / k.powi(4)
    });
    let (a, b) = (r[r.len() - 2], r[r.len() - 1]);
    let settled = b.is_finite() && (a / b - 1.0).abs() < 0.01;

    let mut g = rng(3);
    let times: Vec<f64> = (0..=100).map(|j| j as f64).collect();
    let mut gap = 0.0_f64;
    for _ in 0..50 {
        let k_vec = random_direction(&mut g) * 10f64.powf(g.random_range(-2.0..1.0));
        let kh = k_vec.normalize().map(|x| C64::new(x, 0.0));
        let mut perp = || {
            let v = random_cvec(&mut g);
            v - kh * kh.dot(&v)
        };
        let s = ModeEmState { u_i_perp: perp(), u_e_perp: perp(), e_perp: perp(), b: perp(), k_vec };
        let n0 = s.norm_sqr().sqrt();
        for &t in &times {
            let exact = em_propagate(&p, &s, t)?.b;
            let scale = exact.norm().max(1e-6 * n0);
            gap = gap.max((b_propagate(&p, &s, t)? - exact).norm() / scale);
        }
    }
    outcome(settled && gap < 1e-8, format!("k⁴ coefficient {b:.4e} (previous {a:.4e}), B gap {gap:.2e}"))
}

fn lyapunov() -> Result<Outcome> {
    let p = unit();
    let w = select_weights(&p)?;
    let mut g = rng(4);
    let grid: Vec<f64> = (0..=50).map(|j| j as f64).collect();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let k_vec = random_direction(&mut g) * 10f64.powf(g.random_range(-2.0..2.0));
        let s0 = random_mode(&p, k_vec, &mut g);
        let rep = lyapunov_decay_check(&p, &w, &k_vec, &s0, &grid)?;
        worst = worst.max(rep.max_relative_derivative);
    }
    let mut fitted = f64::INFINITY;
    let mut exact = f64::INFINITY;
    for k in log_grid(1e-2, 1e2, 41) {
        let k_vec = probe_direction() * k;
        let s0 = random_mode(&p, k_vec, &mut g);
        fitted = fitted.min(lyapunov_decay_check(&p, &w, &k_vec, &s0, &grid)?.lambda_hat);
        exact = exact.min(mode_rate(&p, &k_vec, &w)?.lambda_hat);
    }
    outcome(
        worst <= 1e-8 && fitted > 0.0 && exact > 0.0,
        format!(
            "kappa = ({:.4}, {:.4}), max dE/dt/E {worst:.2e}, min fitted rate {fitted:.3e}, min exact rate {exact:.3e}",
            w.kappa1, w.kappa2
        ),
    )
}

fn series(p: &PlasmaParams, datum: &IsotropicDatum) -> Result<Vec<NormSample>> {
    let quad = RadialQuadrature::for_window(p, 1e2, 512)?;
    radial_norm_series(p, datum, &quad, &log_grid(1e2, 1e4, 41))
}

fn exponent(s: &[NormSample], name: &str) -> Result<f64> {
    let pts: Vec<(f64, f64)> = s.iter().map(|x| (x.t, x.get(name).unwrap_or(f64::NAN))).collect();
    Ok(decay_fit(&pts, (1e2, 1e4))?.exponent)
}

fn decay_rates() -> Result<Outcome> {
    let s = series(&unit(), &IsotropicDatum::standard_generic())?;
    let targets = [
        ("total", -0.75),
        ("rho_i_diff", -1.25),
        ("rho_e_diff", -1.25),
        ("b_diff", -1.25),
        ("u_i_diff", -1.75),
        ("u_e_diff", -1.75),
        ("e_diff", -1.75),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, want) in targets {
        let got = exponent(&s, name)?;
        pass &= (got - want).abs() <= 0.05;
        parts.push(format!("{name} {got:.3}"));
    }
    outcome(pass, parts.join(", "))
}

fn special_data() -> Result<Outcome> {
    let p = unit();
    let special = IsotropicDatum::standard_special();
    let s = series(&p, &special)?;
    let g = series(&p, &special.matched_generic(&p))?;
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["rho_i", "rho_e"] {
        let extra = exponent(&g, name)? - exponent(&s, name)?;
        pass &= extra >= 0.4;
        parts.push(format!("{name} extra decay {extra:.3}"));
    }
    outcome(pass, parts.join(", "))
}

fn nonlinear() -> Result<Outcome> {
    let p = unit();
    let cfg = NonlinearConfig { record_every: 4, ..NonlinearConfig::default() };
    let (n, l) = (cfg.grid_size, cfg.box_length);
    let mut parts = Vec::new();

    // ε-halving against the linear flow
    let t_gap = 2.0;
    let gap = |eps: f64| -> Result<f64> {
        let u0 = smooth_initial_data(&p, n, l, eps, cfg.seed);
        let st = MildStepper::new(&p, &u0, cfg.dt, Sources::Full)?;
        let u = st.advance(&u0, (t_gap / cfg.dt).round() as usize)?;
        Ok(u.sub(&linear_evolve(&p, &u0, t_gap)?).norm_sqr(Selector::All).sqrt())
    };
    let eps_exp = (gap(cfg.epsilon)? / gap(cfg.epsilon / 2.0)?).log2();
    let eps_ok = (eps_exp - 2.0).abs() <= 0.2;
    parts.push(format!("eps exponent {eps_exp:.3}"));

    // self-convergence at t = 1
    let u0 = smooth_initial_data(&p, n, l, cfg.epsilon, cfg.seed);
    let sols = [cfg.dt, cfg.dt / 2.0, cfg.dt / 4.0]
        .iter()
        .map(|&dt| MildStepper::new(&p, &u0, dt, Sources::Full)?.advance(&u0, (1.0 / dt).round() as usize))
        .collect::<Result<Vec<_>>>()?;
    let e1 = sols[0].sub(&sols[1]).norm_sqr(Selector::All).sqrt();
    let e2 = sols[1].sub(&sols[2]).norm_sqr(Selector::All).sqrt();
    let order = (e1 / e2).log2();
    let order_ok = (order - 2.0).abs() <= 0.1;
    parts.push(format!("order {order:.3}"));

    let sel = select_kappas(&p, &u0, cfg.sobolev_order)?;
    let run = run_nonlinear(&p, &NonlinearConfig { kappas: Some(sel.kappas), ..cfg })?;
    let gauss = run.records.iter().map(|r| r.gauss_residual).fold(0.0, f64::max);
    let equiv = run.records.iter().map(|r| r.energy.equivalence_ratio()).fold(0.0, f64::max);
    let samples: Vec<(f64, f64, f64)> = run.records.iter().map(|r| (r.t, r.energy.e_n, r.energy.d_n)).collect();
    let ineq = energy_inequality(&samples, sel.lambda_lin)?;
    let t_last = run.records.last().map_or(0.0, |r| r.t);
    parts.push(format!("gauss {gauss:.2e} to t = {t_last}"));
    parts.push(format!("equivalence {equiv:.2}"));
    parts.push(format!("lambda_hat {:.3e}, c_hat {:.3e}", ineq.lambda_hat, ineq.c_hat));
    let ok = eps_ok
        && order_ok
        && gauss < 1e-8
        && t_last >= 20.0
        && equiv <= 10.0
        && ineq.lambda_hat > 0.0
        && ineq.c_hat.is_finite();
    outcome(ok, parts.join(", "))
}

fn random_em(p: &PlasmaParams, k_vec: nalgebra::Vector3<f64>, g: &mut rand_chacha::ChaCha8Rng) -> ModeFullState {
    let kh = k_vec.normalize().map(|x| C64::new(x, 0.0));
    let mut perp = || {
        let v = random_cvec(g);
        v - kh * kh.dot(&v)
    };
    let em = ModeEmState { u_i_perp: perp(), u_e_perp: perp(), e_perp: perp(), b: perp(), k_vec };
    let (zero, _, _) = helmholtz_split(&ModeFullState::zeros(k_vec)).unwrap();
    let s = helmholtz_recombine(&zero, C64::new(0.0, 0.0), &em);
    assert!(s.check_gauss(p).is_ok());
    s
}

fn oracle() -> Result<Outcome> {
    let mut g = rng(8);
    let (mut fl, mut emw, mut zero, mut full) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..10 {
        let p = random_params(&mut g);
        let k = 10f64.powf(g.random_range(-1.0..0.7));
        let k_vec = random_direction(&mut g) * k;
        let t = g.random_range(0.5..5.0);
        if fluid_eigenvalues(&p, k).is_err() || em_eigenvalues(&p, k).is_err() {
            continue;
        }

        let f0 = ModeFluidState {
            rho_i: random_c(&mut g),
            rho_e: random_c(&mut g),
            s_i: random_c(&mut g),
            s_e: random_c(&mut g),
            k_mag: k,
        };
        let (_, _, zero_em) = helmholtz_split(&ModeFullState::zeros(k_vec))?;
        let s0 = helmholtz_recombine(&f0, e_parallel(&p, f0.rho_i, f0.rho_e, k)?, &zero_em);
        let (ode, _, _) = helmholtz_split(&ode_evolve(&p, &s0, t))?;
        let out = fluid_propagate(&p, &f0, t)?;
        fl = fl.max((out.to_vector() - ode.to_vector()).norm() / ode.to_vector().norm().max(1e-6 * f0.to_vector().norm()));

        let s0 = random_em(&p, k_vec, &mut g);
        let (_, _, e0) = helmholtz_split(&s0)?;
        let (_, _, ode) = helmholtz_split(&ode_evolve(&p, &s0, t))?;
        let out = em_propagate(&p, &e0, t)?;
        let d = (out.norm_sqr() + ode.norm_sqr() - 2.0 * dot(&out, &ode)).max(0.0).sqrt();
        emw = emw.max(d / ode.norm_sqr().sqrt().max(1e-6 * e0.norm_sqr().sqrt()));

        let s0 = random_mode(&p, k_vec, &mut g);
        full = full.max(rel_diff(&evolve_mode(&p, &s0, t)?, &ode_evolve(&p, &s0, t)));

        let mut z0 = random_mode(&p, nalgebra::Vector3::zeros(), &mut g);
        z0.rho_e = z0.rho_i;
        zero = zero.max(rel_diff(&evolve_zero_mode(&p, &z0, t)?, &ode_evolve(&p, &z0, t)));
    }
    let worst = fl.max(emw).max(zero).max(full);
    outcome(worst < 1e-7, format!("fluid {fl:.2e}, em {emw:.2e}, zero mode {zero:.2e}, full {full:.2e}"))
}

fn dot(a: &ModeEmState, b: &ModeEmState) -> f64 {
    let d = |x: &nalgebra::Vector3<C64>, y: &nalgebra::Vector3<C64>| x.dotc(y).re;
    d(&a.u_i_perp, &b.u_i_perp) + d(&a.u_e_perp, &b.u_e_perp) + d(&a.e_perp, &b.e_perp) + d(&a.b, &b.b)
}

type Criterion = (u32, &'static str, f64, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "darcy algebra", 1.0, darcy),
        (2, "fluid spectrum", 1.0, fluid),
        (3, "em spectrum", 5.0, em),
        (4, "lyapunov functional", 10.0, lyapunov),
        (5, "linear decay rates", 60.0, decay_rates),
        (6, "special data extra decay", 60.0, special_data),
        (7, "nonlinear properties", 300.0, nonlinear),
        (8, "ode oracle", f64::INFINITY, oracle),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        let in_time = Duration::from_secs_f64(secs) < Duration::from_secs_f64(limit.min(1e9));
        let (pass, detail) = match res {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {verdict} {name}: {detail} [{secs:.2} s, limit {limit} s]");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
