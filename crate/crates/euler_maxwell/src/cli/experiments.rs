use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CliError, CliResult, Experiment, ExperimentConfig, ResultTable};
use crate::darcy::{coefficient_g, sandwich_identity_residual};
use crate::em::{b_propagate, em_eigenvalues, em_propagate, ModeEmState};
use crate::evolution::{decay_fit, radial_norm_series, IsotropicDatum, NormSample, RadialQuadrature};
use crate::fluid::{fluid_decomp, fluid_matrix, fluid_spectrum};
use crate::lyapunov::{
    lyapunov_decay_check, mode_rate, probe_direction, probe_wavenumbers, select_weights, ModeFullState, StateVector,
};
use crate::nonlinear::{run_nonlinear, NonlinearConfig};
use crate::params::{validate, PlasmaParams, RawParams};
use crate::{c, RVec3, Result, C64};

/// Runs the configured experiment; identical configs give identical tables.
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<ResultTable> {
    let out = match cfg.experiment {
        Experiment::DarcyCheck => darcy_check(cfg),
        Experiment::FluidSpectrum => fluid_table(cfg),
        Experiment::EmSpectrum => em_table(cfg),
        Experiment::EmError => em_error(cfg),
        Experiment::LyapunovCheck => lyapunov_check(cfg),
        Experiment::LinearDecay => linear_decay(cfg),
        Experiment::ProfileConvergence => profile_convergence(cfg),
        Experiment::SpecialData => special_data(cfg),
        Experiment::NonlinearRun => nonlinear(cfg),
    };
    out.map_err(|e| CliError::Run { experiment: cfg.experiment.name().into(), source: e })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|j| lo * (hi / lo).powf(j as f64 / (n - 1) as f64)).collect()
}

fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
}

fn unit_vector(rng: &mut ChaCha8Rng) -> RVec3 {
    loop {
        let v = RVec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn cplx(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random wavevector with `|k|` log-uniform in `[10⁻², 10]`.
fn random_k(rng: &mut ChaCha8Rng) -> RVec3 {
    unit_vector(rng) * 10f64.powf(rng.random_range(-2.0..1.0))
}

fn random_full_mode(p: &PlasmaParams, rng: &mut ChaCha8Rng) -> ModeFullState {
    let k = random_k(rng);
    let v = StateVector::from_fn(|_, _| cplx(rng));
    ModeFullState::from_vector(&v, k).gauss_projected(p)
}

fn darcy_check(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(cfg, &["set", "b_mag", "sandwich_residual", "g_residual"]);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.float("density");
    let mut worst = (0.0_f64, 0.0_f64);
    for set in 0..cfg.count("n_sets") {
        let p = validate(&RawParams::random(&mut rng))?;
        for &b in &cfg.list("b_values") {
            let s = sandwich_identity_residual(&p, b)?;
            let g = coefficient_g(&p, n, b)?;
            let target = -p.mu1() / n;
            let gr = (g - nalgebra::Matrix2::identity() * target).abs().max() / target.abs();
            worst = (worst.0.max(s), worst.1.max(gr));
            t.push(vec![set as f64, b, s, gr]);
        }
    }
    t.note("max_sandwich_residual", worst.0);
    t.note("max_g_residual", worst.1);
    Ok(t)
}

fn eig_columns(prefix: &str) -> Vec<String> {
    let mut cols = vec!["k".to_string()];
    for j in 1..=4 {
        cols.push(format!("re_{prefix}{j}"));
        cols.push(format!("im_{prefix}{j}"));
    }
    cols
}

fn fluid_table(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let p = cfg.params;
    let mut cols = eig_columns("lambda");
    cols.extend(["lambda1_diffusion_gap".into(), "projection_residual".into()]);
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = ResultTable::new(cfg, &refs);
    for k in log_grid(cfg.float("k_min"), cfg.float("k_max"), cfg.count("n_k")) {
        let s = fluid_spectrum(&p, k)?;
        let res = fluid_decomp(&p, k)?.algebra_residuals(&fluid_matrix(&p, k)?);
        let mut row = vec![k];
        for l in s.lambda {
            row.extend([l.re, l.im]);
        }
        row.push((s.lambda[0] + p.mu1() * k * k).norm());
        row.push(res.iter().copied().fold(0.0, f64::max));
        t.push(row);
    }
    Ok(t)
}

fn em_table(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let p = cfg.params;
    let mut cols = eig_columns("lambda");
    cols.push("lambda1_diffusion_gap".into());
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = ResultTable::new(cfg, &refs);
    for k in log_grid(cfg.float("k_min"), cfg.float("k_max"), cfg.count("n_k")) {
        let lam = em_eigenvalues(&p, k)?;
        let mut row = vec![k];
        for l in lam {
            row.extend([l.re, l.im]);
        }
        row.push((lam[0] + p.mu2() * k * k).norm());
        t.push(row);
    }
    Ok(t)
}

fn em_error(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let p = cfg.params;
    let mut t = ResultTable::new(cfg, &["mode", "k", "t", "b_gap"]);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let times = lin_grid(0.0, cfg.float("t_max"), cfg.count("n_t"));
    let mut worst = 0.0_f64;
    for mode in 0..cfg.count("n_modes") {
        let k = random_k(&mut rng);
        let kh = k.normalize();
        let mut perp = || {
            let v = crate::CVec3::from_fn(|_, _| cplx(&mut rng));
            v - crate::cvec(&kh) * crate::cvec(&kh).dot(&v)
        };
        let s = ModeEmState { u_i_perp: perp(), u_e_perp: perp(), e_perp: perp(), b: perp(), k_vec: k };
        let scale = s.norm_sqr().sqrt();
        for &tt in &times {
            let gap = (b_propagate(&p, &s, tt)? - em_propagate(&p, &s, tt)?.b).norm() / scale;
            worst = worst.max(gap);
            t.push(vec![mode as f64, k.norm(), tt, gap]);
        }
    }
    t.note("max_b_gap", worst);
    Ok(t)
}

fn lyapunov_check(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let p = cfg.params;
    let w = select_weights(&p)?;
    let mut t = ResultTable::new(cfg, &["k", "rate", "lambda_hat", "equivalence_ratio"]);
    let mut min_hat = f64::INFINITY;
    for k in probe_wavenumbers() {
        let r = mode_rate(&p, &(probe_direction() * k), &w)?;
        min_hat = min_hat.min(r.lambda_hat);
        t.push(vec![k, r.rate, r.lambda_hat, r.equivalence_ratio]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = lin_grid(0.0, cfg.float("t_max"), cfg.count("n_t"));
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cfg.count("n_modes") {
        let s = random_full_mode(&p, &mut rng);
        let rep = lyapunov_decay_check(&p, &w, &s.k_vec, &s, &grid)?;
        worst = worst.max(rep.max_relative_derivative);
    }
    t.note("kappa1", w.kappa1);
    t.note("kappa2", w.kappa2);
    t.note("min_lambda_hat", min_hat);
    t.note("max_relative_derivative", worst);
    Ok(t)
}

fn radial_series(cfg: &ExperimentConfig, datum: &IsotropicDatum) -> Result<(Vec<f64>, Vec<NormSample>)> {
    let p = cfg.params;
    let (t_min, t_max) = (cfg.float("t_min"), cfg.float("t_max"));
    let quad = RadialQuadrature::for_window(&p, t_min, cfg.count("nodes"))?;
    let times = log_grid(t_min, t_max, cfg.count("n_t"));
    let series = radial_norm_series(&p, datum, &quad, &times)?;
    Ok((times, series))
}

fn fit_note(t: &mut ResultTable, series: &[NormSample], name: &str, window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series.iter().map(|s| (s.t, s.get(name).unwrap_or(f64::NAN))).collect();
    let fit = decay_fit(&pts, window)?;
    t.note(&format!("exponent.{name}"), fit.exponent);
    Ok(fit.exponent)
}

fn table_from_series(
    cfg: &ExperimentConfig,
    series: &[NormSample],
    names: &[&str],
) -> Result<ResultTable> {
    let mut cols = vec!["t"];
    cols.extend_from_slice(names);
    let mut t = ResultTable::new(cfg, &cols);
    for s in series {
        let mut row = vec![s.t];
        row.extend(names.iter().map(|n| s.get(n).unwrap_or(f64::NAN)));
        t.push(row);
    }
    let window = (cfg.float("t_min"), cfg.float("t_max"));
    for n in names {
        fit_note(&mut t, series, n, window)?;
    }
    Ok(t)
}

fn linear_decay(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let (_, series) = radial_series(cfg, &IsotropicDatum::standard_generic())?;
    table_from_series(cfg, &series, &["rho_i", "rho_e", "u_i", "u_e", "e", "b", "total"])
}

fn profile_convergence(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let (_, series) = radial_series(cfg, &IsotropicDatum::standard_generic())?;
    table_from_series(
        cfg,
        &series,
        &[
            "rho_i_diff", "rho_e_diff", "u_i_diff", "u_e_diff", "e_diff", "b_diff", "n_bar", "u_i_bar", "u_e_bar",
            "e_bar", "b_bar",
        ],
    )
}

fn special_data(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let special = IsotropicDatum::standard_special();
    let generic = special.matched_generic(&cfg.params);
    let (times, s) = radial_series(cfg, &special)?;
    let (_, g) = radial_series(cfg, &generic)?;
    let mut t = ResultTable::new(
        cfg,
        &["t", "special_rho_i", "special_rho_e", "generic_rho_i", "generic_rho_e", "special_total", "generic_total"],
    );
    for j in 0..times.len() {
        t.push(vec![times[j], s[j].rho[0], s[j].rho[1], g[j].rho[0], g[j].rho[1], s[j].total, g[j].total]);
    }
    let window = (cfg.float("t_min"), cfg.float("t_max"));
    let exp = |series: &[NormSample], name: &str| -> Result<f64> {
        let pts: Vec<(f64, f64)> = series.iter().map(|x| (x.t, x.get(name).unwrap_or(f64::NAN))).collect();
        Ok(decay_fit(&pts, window)?.exponent)
    };
    for name in ["rho_i", "rho_e", "total"] {
        let (es, eg) = (exp(&s, name)?, exp(&g, name)?);
        t.note(&format!("special_exponent.{name}"), es);
        t.note(&format!("generic_exponent.{name}"), eg);
        t.note(&format!("extra_decay.{name}"), eg - es);
    }
    Ok(t)
}

fn nonlinear(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let kap = cfg.list("kappas");
    let kappas = match kap.len() {
        0 => None,
        3 => Some([kap[0], kap[1], kap[2]]),
        n => return Err(crate::Error::InvalidInput(format!("kappas needs 0 or 3 entries, got {n}"))),
    };
    let nc = NonlinearConfig {
        grid_size: cfg.count("grid_size"),
        box_length: cfg.float("box_length"),
        epsilon: cfg.float("epsilon"),
        t_end: cfg.float("t_end"),
        dt: cfg.float("dt"),
        sobolev_order: cfg.count("sobolev_order"),
        kappas,
        seed: cfg.seed,
        record_every: cfg.count("record_every"),
    };
    let run = run_nonlinear(&cfg.params, &nc)?;
    let mut t = ResultTable::new(
        cfg,
        &[
            "t", "norm", "grad_norm", "e_n", "d_n", "e_n_high", "d_n_high", "equivalence_ratio", "gauss_residual",
            "min_density", "gap_to_linear", "gap_to_profile",
        ],
    );
    for r in &run.records {
        t.push(vec![
            r.t,
            r.norm,
            r.grad_norm,
            r.energy.e_n,
            r.energy.d_n,
            r.energy.e_n_high,
            r.energy.d_n_high,
            r.energy.equivalence_ratio(),
            r.gauss_residual,
            r.min_density,
            r.gap_to_linear,
            r.gap_to_profile,
        ]);
    }
    for (j, k) in run.kappas.iter().enumerate() {
        t.note(&format!("kappa{}", j + 1), *k);
    }
    Ok(t)
}
