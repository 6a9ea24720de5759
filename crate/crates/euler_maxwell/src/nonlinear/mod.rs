//! Pseudo-spectral solver for the perturbation system on a periodic box.
//!
//! With `n_α = 1 + ρ_α` the equations are the linear system plus sources
//! `∂ρ_α = … + ∇·f_α`, `m_α∂u_α = … + g_{2α}`, `∂E = … + g₃` where
//! `f_α = −ρ_αu_α`, `g_{2α} = −m_αu_α·∇u_α + T_αρ_α/(1+ρ_α)∇ρ_α + q_αu_α×B/c`
//! and `g₃ = 4πΣq_αf_α`. Products are formed at grid points, derivatives
//! spectrally, and `f̂_α`, `ĝ_{2α}` are truncated by the 2/3 rule; `ĝ₁ = ik·f̂`
//! and `ĝ₃` are then formed from the truncated `f̂`, so the source satisfies
//! Gauss's law exactly.

mod energy;
mod fft;

pub use energy::{
    energy_form_nonlinear, energy_inequality, multi_indices, select_kappas, sobolev_energy, sobolev_energy_with,
    sobolev_weight, DensityWeights, EnergyInequalityReport, EnergyReport, KappaSelection,
};
pub use fft::Fft3;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evolution::{diffusion_profiles, wave_index, GridField, ModeOperator, Selector, ShellPropagators};
use crate::params::{PlasmaParams, Species};
use crate::spectral::{phi1, phi2};
use crate::{c, par_map, Error, Result, C64, FOUR_PI};

/// Real-space values of the fourteen components.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub n: usize,
    pub box_length: f64,
    pub values: Vec<Vec<f64>>,
}

impl PhysicalField {
    pub fn from_spectral(fft: &Fft3, field: &GridField) -> Self {
        let values = par_map(field.comps.len(), |j| fft.to_physical(&field.comps[j]).iter().map(|z| z.re).collect());
        PhysicalField { n: field.n, box_length: field.box_length, values }
    }

    pub fn to_spectral(&self, fft: &Fft3) -> GridField {
        let comps = par_map(self.values.len(), |j| {
            let v: Vec<C64> = self.values[j].iter().map(|&x| c(x, 0.0)).collect();
            fft.to_spectral(&v)
        });
        GridField { n: self.n, box_length: self.box_length, comps }
    }

    /// `min(1 + ρ_α)` over both species.
    pub fn min_density(&self) -> f64 {
        self.values[0].iter().chain(&self.values[1]).fold(f64::INFINITY, |m, &r| m.min(1.0 + r))
    }
}

/// Point values of the sources.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTriple {
    pub f: [[Vec<f64>; 3]; 2],
    pub g1: [Vec<f64>; 2],
    pub g2: [[Vec<f64>; 3]; 2],
    pub g3: [Vec<f64>; 3],
}

/// Largest `|n_j|` kept by the 2/3 rule.
pub fn dealias_cutoff(n: usize) -> i64 {
    (n / 3) as i64
}

fn dealias(field: &GridField, data: &mut [C64]) {
    let n = field.n;
    let cut = dealias_cutoff(n);
    let keep: Vec<bool> = (0..n).map(|i| wave_index(i, n).abs() <= cut).collect();
    for (idx, z) in data.iter_mut().enumerate() {
        if !(keep[idx / (n * n)] && keep[(idx / n) % n] && keep[idx % n]) {
            *z = c(0.0, 0.0);
        }
    }
}

/// Truncates every component of a field by the 2/3 rule.
pub fn dealias_field(field: &mut GridField) {
    let template = GridField { n: field.n, box_length: field.box_length, comps: Vec::new() };
    for comp in field.comps.iter_mut() {
        dealias(&template, comp);
    }
}

/// Spectral derivative `∂_a` of a coefficient array.
fn derivative(field: &GridField, data: &[C64], a: usize) -> Vec<C64> {
    let n = field.n;
    let k1: Vec<f64> = (0..n).map(|i| field.k_unit() * wave_index(i, n) as f64).collect();
    let stride = n.pow(2 - a as u32);
    data.iter().enumerate().map(|(idx, z)| z * c(0.0, k1[(idx / stride) % n])).collect()
}

/// Dealiased `(f̂_α, ĝ_{2α})` in spectral space, component-major:
/// `[f_i(3), f_e(3), g2_i(3), g2_e(3)]`.
fn flux_coefficients(p: &PlasmaParams, fft: &Fft3, field: &GridField) -> Result<Vec<Vec<C64>>> {
    // physical inputs: ρ_α (2), u_α (6), B (3), ∇ρ_α (6), ∂_a u_{α,b} (18)
    let mut specs: Vec<Vec<C64>> = Vec::with_capacity(35);
    for j in [0, 1] {
        specs.push(field.comps[j].clone());
    }
    for j in 2..8 {
        specs.push(field.comps[j].clone());
    }
    for j in 11..14 {
        specs.push(field.comps[j].clone());
    }
    for j in [0, 1] {
        for a in 0..3 {
            specs.push(derivative(field, &field.comps[j], a));
        }
    }
    for j in 2..8 {
        for a in 0..3 {
            specs.push(derivative(field, &field.comps[j], a));
        }
    }
    specs.push(vec![c(0.0, 0.0); field.len()]);
    let mut phys: Vec<Vec<f64>> = par_map(specs.len() / 2, |j| {
        let (a, b) = fft.to_physical_pair(&specs[2 * j], &specs[2 * j + 1]);
        [a, b]
    })
    .into_iter()
    .flatten()
    .collect();
    phys.pop();
    let rho = |s: usize| &phys[s];
    let u = |s: usize, b: usize| &phys[2 + 3 * s + b];
    let bf = |b: usize| &phys[8 + b];
    let grad_rho = |s: usize, a: usize| &phys[11 + 3 * s + a];
    let du = |s: usize, b: usize, a: usize| &phys[17 + 9 * s + 3 * b + a];
    let min_n = phys[0].iter().chain(&phys[1]).fold(f64::INFINITY, |m, &r| m.min(1.0 + r));
    if !(min_n > 0.0) {
        return Err(Error::VacuumReached(min_n));
    }
    let npts = field.len();
    let mut out: Vec<Vec<f64>> = vec![vec![0.0; npts]; 12];
    for (si, s) in Species::BOTH.iter().enumerate() {
        let (m, t, q) = (p.mass(*s), p.temp(*s), p.charge(*s));
        let qc = q / p.c_light;
        for x in 0..npts {
            let r = rho(si)[x];
            let uu = [u(si, 0)[x], u(si, 1)[x], u(si, 2)[x]];
            let b = [bf(0)[x], bf(1)[x], bf(2)[x]];
            let cross = [uu[1] * b[2] - uu[2] * b[1], uu[2] * b[0] - uu[0] * b[2], uu[0] * b[1] - uu[1] * b[0]];
            let pres = t * r / (1.0 + r);
            for bi in 0..3 {
                out[3 * si + bi][x] = -r * uu[bi];
                let adv: f64 = (0..3).map(|a| uu[a] * du(si, bi, a)[x]).sum();
                out[6 + 3 * si + bi][x] = -m * adv + pres * grad_rho(si, bi)[x] + qc * cross[bi];
            }
        }
    }
    Ok(par_map(out.len() / 2, |j| {
        let (mut a, mut b) = fft.to_spectral_pair(&out[2 * j], &out[2 * j + 1]);
        dealias(field, &mut a);
        dealias(field, &mut b);
        [a, b]
    })
    .into_iter()
    .flatten()
    .collect())
}

/// Source term `N(U) = [ĝ_{1α}, ĝ_{2α}/m_α, ĝ₃, 0]` of the mild form.
pub fn source_field(p: &PlasmaParams, fft: &Fft3, field: &GridField) -> Result<GridField> {
    let fl = flux_coefficients(p, fft, field)?;
    let mut out = GridField::zeros(field.n, field.box_length);
    for idx in 0..field.len() {
        let k = field.k_vec(idx);
        for (si, s) in Species::BOTH.iter().enumerate() {
            let mut div = c(0.0, 0.0);
            for a in 0..3 {
                let f = fl[3 * si + a][idx];
                div += c(0.0, k[a]) * f;
                out.comps[2 + 3 * si + a][idx] = fl[6 + 3 * si + a][idx] / p.mass(*s);
                out.comps[8 + a][idx] += f * (FOUR_PI * p.charge(*s));
            }
            out.comps[si][idx] = div;
        }
    }
    Ok(out)
}

/// Point values of `f_α, g_{1α}, g_{2α}, g₃` after dealiasing.
pub fn nonlinear_sources(p: &PlasmaParams, fft: &Fft3, field: &GridField) -> Result<SourceTriple> {
    let fl = flux_coefficients(p, fft, field)?;
    let nf = source_field(p, fft, field)?;
    let real = |d: &[C64]| -> Vec<f64> { fft.to_physical(d).iter().map(|z| z.re).collect() };
    let f = [0, 1].map(|s| [0, 1, 2].map(|a| real(&fl[3 * s + a])));
    let g2 = [0, 1].map(|s| [0, 1, 2].map(|a| real(&fl[6 + 3 * s + a])));
    let g1 = [0, 1].map(|s| real(&nf.comps[s]));
    let g3 = [0, 1, 2].map(|a| real(&nf.comps[8 + a]));
    Ok(SourceTriple { f, g1, g2, g3 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sources {
    Full,
    /// Linear propagation only.
    Disabled,
}

/// Largest admissible step `0.5/max(ν_α, c·k_max)`.
pub fn max_step(p: &PlasmaParams, field: &GridField) -> f64 {
    let half = (field.n / 2) as f64;
    let k_max = 3f64.sqrt() * half * field.k_unit();
    0.5 / p.nu_i.max(p.nu_e).max(p.c_light * k_max)
}

/// Second-order exponential time differencing (Cox–Matthews ETD2RK) with the
/// exact per-mode linear propagator:
/// `a = e^{hL}U + hφ₁(hL)N(U)`, `U⁺ = a + hφ₂(hL)(N(a) − N(U))`.
#[derive(Debug, Clone)]
pub struct MildStepper {
    pub params: PlasmaParams,
    pub dt: f64,
    pub sources: Sources,
    fft: Fft3,
    exp_op: HashMap<i64, ModeOperator>,
    phi1_op: HashMap<i64, ModeOperator>,
    phi2_op: HashMap<i64, ModeOperator>,
}

impl MildStepper {
    pub fn new(p: &PlasmaParams, template: &GridField, dt: f64, sources: Sources) -> Result<Self> {
        let bound = max_step(p, template);
        if !(dt > 0.0) || dt > bound {
            return Err(Error::InvalidInput(format!("time step {dt} outside (0, {bound}]")));
        }
        let shells = ShellPropagators::new(p, template)?;
        let h = c(dt, 0.0);
        Ok(MildStepper {
            params: *p,
            dt,
            sources,
            fft: Fft3::new(template.n),
            exp_op: shells.operators(|z| (z * h).exp()),
            phi1_op: shells.operators(|z| phi1(z * h) * h),
            phi2_op: shells.operators(|z| phi2(z * h) * h),
        })
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    pub fn source(&self, u: &GridField) -> Result<GridField> {
        match self.sources {
            Sources::Full => source_field(&self.params, &self.fft, u),
            Sources::Disabled => Ok(GridField::zeros(u.n, u.box_length)),
        }
    }

    pub fn step(&self, u: &GridField) -> Result<GridField> {
        let p = &self.params;
        let apply = |ops: &HashMap<i64, ModeOperator>, f: &GridField| ShellPropagators::apply(p, ops, f);
        let mut a = apply(&self.exp_op, u);
        if self.sources == Sources::Disabled {
            return Ok(a);
        }
        let nu = self.source(u)?;
        a.axpy(c(1.0, 0.0), &apply(&self.phi1_op, &nu));
        let mut dn = self.source(&a)?;
        dn.axpy(c(-1.0, 0.0), &nu);
        a.axpy(c(1.0, 0.0), &apply(&self.phi2_op, &dn));
        Ok(a)
    }

    /// `steps` steps with the blow-up guard `‖U‖ ≤ 10‖U₀‖`.
    pub fn advance(&self, u0: &GridField, steps: usize) -> Result<GridField> {
        let n0 = u0.norm_sqr(Selector::All).sqrt();
        let mut u = u0.clone();
        for s in 0..steps {
            u = self.step(&u)?;
            let nrm = u.norm_sqr(Selector::All).sqrt();
            if !nrm.is_finite() || nrm > 10.0 * n0 {
                return Err(Error::StepRejected(format!("norm {nrm:e} after {} steps exceeds 10x initial {n0:e}", s + 1)));
            }
        }
        Ok(u)
    }
}

/// One ETD2RK step.
pub fn step_mild(p: &PlasmaParams, field: &GridField, dt: f64) -> Result<GridField> {
    MildStepper::new(p, field, dt, Sources::Full)?.step(field)
}

/// Smooth, real, neutral-mean, constraint-consistent data with largest point
/// value `epsilon` over all components.
pub fn smooth_initial_data(p: &PlasmaParams, n: usize, box_length: f64, epsilon: f64, seed: u64) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GridField::zeros(n, box_length);
    let band = 2_i64.min(dealias_cutoff(n));
    for idx in 0..g.len() {
        let w = g.wave(idx);
        if w == [0, 0, 0] || w.iter().any(|x| x.abs() > band) {
            continue;
        }
        let env = (-0.5 * g.k_vec(idx).norm_squared()).exp();
        let mut v = crate::lyapunov::StateVector::zeros();
        for z in v.iter_mut() {
            *z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * env;
        }
        let m = crate::lyapunov::ModeFullState::from_vector(&v, g.k_vec(idx)).gauss_projected(p);
        g.set_mode(idx, &m);
    }
    g.symmetrize();
    let fft = Fft3::new(n);
    let phys = PhysicalField::from_spectral(&fft, &g);
    let sup = phys.values.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    if sup > 0.0 {
        g.scale(c(epsilon / sup, 0.0));
    }
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearConfig {
    pub grid_size: usize,
    pub box_length: f64,
    pub epsilon: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sobolev_order: usize,
    /// `None` selects them with [`select_kappas`].
    pub kappas: Option<[f64; 3]>,
    pub seed: u64,
    pub record_every: usize,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        NonlinearConfig {
            grid_size: 32,
            box_length: 6.0 * std::f64::consts::PI,
            epsilon: 1e-3,
            t_end: 20.0,
            dt: 0.05,
            sobolev_order: 3,
            kappas: None,
            seed: 7,
            record_every: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearRecord {
    pub t: f64,
    pub norm: f64,
    pub grad_norm: f64,
    pub energy: EnergyReport,
    pub gauss_residual: f64,
    pub min_density: f64,
    pub gap_to_linear: f64,
    pub gap_to_profile: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearRun {
    pub kappas: [f64; 3],
    pub records: Vec<NonlinearRecord>,
    pub final_field: GridField,
}

fn grad_norm(field: &GridField) -> f64 {
    let vol = field.box_length.powi(3);
    let mut s = 0.0;
    for idx in 0..field.len() {
        let k2 = field.k_vec(idx).norm_squared();
        s += k2 * field.comps.iter().map(|cmp| cmp[idx].norm_sqr()).sum::<f64>();
    }
    (s * vol).sqrt()
}

pub fn run_nonlinear(p: &PlasmaParams, cfg: &NonlinearConfig) -> Result<NonlinearRun> {
    if cfg.grid_size < 4 || !(cfg.box_length > 0.0) || !(cfg.t_end >= 0.0) || cfg.record_every == 0 {
        return Err(Error::InvalidInput("grid_size ≥ 4, box_length > 0, t_end ≥ 0 and record_every ≥ 1 required".into()));
    }
    let u0 = smooth_initial_data(p, cfg.grid_size, cfg.box_length, cfg.epsilon, cfg.seed);
    let stepper = MildStepper::new(p, &u0, cfg.dt, Sources::Full)?;
    let kappas = match cfg.kappas {
        Some(k) => k,
        None => select_kappas(p, &u0, cfg.sobolev_order)?.kappas,
    };
    let linear = ShellPropagators::new(p, &u0)?;
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let n0 = u0.norm_sqr(Selector::All).sqrt();
    let mut u = u0.clone();
    let mut records = Vec::new();
    for s in 0..=steps {
        let t = s as f64 * cfg.dt;
        if s % cfg.record_every == 0 || s == steps {
            let phys = PhysicalField::from_spectral(stepper.fft(), &u);
            let lin = ShellPropagators::apply(p, &linear.operators(|z| (z * t).exp()), &u0);
            let prof = diffusion_profiles(p, &u0, t);
            records.push(NonlinearRecord {
                t,
                norm: u.norm_sqr(Selector::All).sqrt(),
                grad_norm: grad_norm(&u),
                energy: sobolev_energy(p, stepper.fft(), &u, cfg.sobolev_order, kappas),
                gauss_residual: u.gauss_residual(p),
                min_density: phys.min_density(),
                gap_to_linear: u.sub(&lin).norm_sqr(Selector::All).sqrt(),
                gap_to_profile: u.sub(&prof).norm_sqr(Selector::All).sqrt(),
            });
        }
        if s == steps {
            break;
        }
        u = stepper.step(&u)?;
        let nrm = u.norm_sqr(Selector::All).sqrt();
        if !nrm.is_finite() || nrm > 10.0 * n0 {
            return Err(Error::StepRejected(format!("norm {nrm:e} at t = {:.4} exceeds 10x initial {n0:e}", t + cfg.dt)));
        }
    }
    Ok(NonlinearRun { kappas, records, final_field: u })
}
