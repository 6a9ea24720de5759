//! Energy and dissipation functionals of order `N` on the periodic box.
//!
//! With `⟨f, g⟩ = ∫ f·g dx`,
//! `E_N = Σ_{|l|≤N} Σ_α ∫ T_α/(1+ρ_α)|∂^lρ_α|² + m_α(1+ρ_α)|∂^lu_α|² + (1/4π)‖[E,B]‖²_N
//!      + κ₁ Σ_{|l|≤N−1} Σ_α m_α⟨∂^lu_α, ∂^l∇ρ_α⟩
//!      − κ₂ Σ_{|l|≤N−1} Σ_α (m_αq_α/T_α)⟨∂^lu_α, ∂^lE⟩
//!      − κ₃ Σ_{|l|≤N−2} ⟨∂^lE, ∇×∂^lB⟩`
//! and
//! `D_N = Σ_{|l|≤N} Σ_α ∫ m_α(1+ρ_α)|∂^lu_α|² + Σ_α‖∇ρ_α‖²_{N−1} + ‖∇[E,B]‖²_{N−2} + ‖E‖²`.
//! The high-order variants drop `l = 0` from every sum, replace the field
//! term by `(1/4π)‖∇[E,B]‖²_{N−1}` and use
//! `D^h_N = Σ_{1≤|l|≤N} ∫ m_α(1+ρ_α)|∂^lu_α|² + ‖∇²ρ_α‖²_{N−2} + ‖∇²[E,B]‖²_{N−3} + ‖∇E‖²`.
//!
//! Every term except the density weights is a Fourier multiplier; in
//! particular `Σ_{|l|≤M} |∂^l f|²` has symbol `w_M(k) = Σ_{|l|≤M} Π_j k_j^{2l_j}`.

use nalgebra::DMatrix;

use super::{dealias_cutoff, Fft3};
use crate::evolution::{mode_generator, GridField};
use crate::lyapunov::{constraint_basis, pencil_eigenvalues, StateMatrix, MAX_EQUIVALENCE};
use crate::params::{PlasmaParams, Species};
use crate::{c, par_map, re, Error, RVec3, Result, C64, FOUR_PI};

/// Multi-indices `l ∈ ℕ³` with `|l| ≤ order`.
pub fn multi_indices(order: usize) -> Vec<[u32; 3]> {
    let m = order as u32;
    let mut out = Vec::new();
    for a in 0..=m {
        for b in 0..=m - a {
            for c3 in 0..=m - a - b {
                out.push([a, b, c3]);
            }
        }
    }
    out
}

/// `w_M(k) = Σ_{|l|≤M} Π_j k_j^{2l_j}`; zero for negative `M`.
pub fn sobolev_weight(k: &RVec3, order: i64) -> f64 {
    if order < 0 {
        return 0.0;
    }
    multi_indices(order as usize)
        .iter()
        .map(|l| (0..3).map(|j| k[j].powi(2 * l[j] as i32)).product::<f64>())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub e_n: f64,
    pub d_n: f64,
    pub e_n_high: f64,
    pub d_n_high: f64,
    /// `E_N` at zero perturbation weights and zero `κ`'s: the weighted
    /// squared Sobolev norm `E_N` is compared against.
    pub sobolev_sq: f64,
    pub kappas: [f64; 3],
    pub sobolev_order: usize,
}

impl EnergyReport {
    /// `max(E_N/S, S/E_N)` with `S` the weighted squared Sobolev norm.
    pub fn equivalence_ratio(&self) -> f64 {
        if self.sobolev_sq == 0.0 {
            return 1.0;
        }
        let r = self.e_n / self.sobolev_sq;
        if r > 0.0 {
            r.max(1.0 / r)
        } else {
            f64::INFINITY
        }
    }
}

/// Whether `1 + ρ_α` enters the density weights or is replaced by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityWeights {
    Full,
    Unit,
}

/// Multiplier parts of the functionals, per mode:
/// `[E_N, E^h_N, D_N, D^h_N, S]` without the density-weighted integrals.
fn spectral_parts(p: &PlasmaParams, k: &RVec3, v: &[C64; 14], order: i64, kap: &[f64; 3]) -> [f64; 5] {
    let k2 = k.norm_squared();
    let w = |m: i64| sobolev_weight(k, m);
    let (wn, wn1, wn2, wn3) = (w(order), w(order - 1), w(order - 2), w(order - 3));
    let hi = |wm: f64| if wm > 0.0 { wm - 1.0 } else { 0.0 };
    let sq = |r: std::ops::Range<usize>| v[r].iter().map(|z| z.norm_sqr()).sum::<f64>();
    let (e2, b2) = (sq(8..11), sq(11..14));
    let mut cross1 = 0.0;
    let mut cross2 = 0.0;
    let mut lin = 0.0;
    let mut rho2 = 0.0;
    for (s, sp) in Species::BOTH.iter().enumerate() {
        let (m, t, q) = (p.mass(*sp), p.temp(*sp), p.charge(*sp));
        let rho = v[s];
        let u0 = 2 + 3 * s;
        lin += t * rho.norm_sqr() + m * sq(u0..u0 + 3);
        rho2 += rho.norm_sqr();
        for a in 0..3 {
            cross1 += m * (v[u0 + a] * (c(0.0, k[a]) * rho).conj()).re;
            cross2 -= m * q / t * (v[u0 + a] * v[8 + a].conj()).re;
        }
    }
    let bv = [v[11], v[12], v[13]];
    let curl = [
        c(0.0, 1.0) * (k[1] * bv[2] - k[2] * bv[1]),
        c(0.0, 1.0) * (k[2] * bv[0] - k[0] * bv[2]),
        c(0.0, 1.0) * (k[0] * bv[1] - k[1] * bv[0]),
    ];
    let cross3: f64 = -(0..3).map(|a| (v[8 + a] * curl[a].conj()).re).sum::<f64>();
    let fields = (e2 + b2) / FOUR_PI;
    let e_n = wn * fields + kap[0] * wn1 * cross1 + kap[1] * wn1 * cross2 + kap[2] * wn2 * cross3;
    let e_h = k2 * wn1 * fields + kap[0] * hi(wn1) * cross1 + kap[1] * hi(wn1) * cross2 + kap[2] * hi(wn2) * cross3;
    let d_n = k2 * wn1 * rho2 + k2 * wn2 * (e2 + b2) + e2;
    let d_h = k2 * k2 * wn2 * rho2 + k2 * k2 * wn3 * (e2 + b2) + k2 * e2;
    [e_n, e_h, d_n, d_h, wn * (lin + fields)]
}

/// `E_N`, `D_N` and their high-order variants of a real field.
pub fn sobolev_energy(p: &PlasmaParams, fft: &Fft3, field: &GridField, order: usize, kappas: [f64; 3]) -> EnergyReport {
    sobolev_energy_with(p, fft, field, order, kappas, DensityWeights::Full)
}

pub fn sobolev_energy_with(
    p: &PlasmaParams,
    fft: &Fft3,
    field: &GridField,
    order: usize,
    kappas: [f64; 3],
    weights: DensityWeights,
) -> EnergyReport {
    let vol = field.box_length.powi(3);
    let npts = field.len();
    let mut spec = [0.0; 5];
    for idx in 0..npts {
        let v: [C64; 14] = std::array::from_fn(|j| field.comps[j][idx]);
        let parts = spectral_parts(p, &field.k_vec(idx), &v, order as i64, &kappas);
        for (a, b) in spec.iter_mut().zip(parts) {
            *a += vol * b;
        }
    }
    let dens: [Vec<f64>; 2] = match weights {
        DensityWeights::Full => [0, 1].map(|s| fft.to_physical(&field.comps[s]).iter().map(|z| 1.0 + z.re).collect()),
        DensityWeights::Unit => [vec![1.0; npts], vec![1.0; npts]],
    };
    let indices = multi_indices(order);
    // per multi-index: (energy integrand, dissipation integrand)
    let per_l = par_map(indices.len(), |j| {
        let l = indices[j];
        let sym: Vec<C64> = (0..npts)
            .map(|idx| {
                let k = field.k_vec(idx);
                (0..3).fold(c(1.0, 0.0), |acc, a| acc * c(0.0, k[a]).powu(l[a]))
            })
            .collect();
        let deriv = |c1: usize, c2: usize| {
            let d = |comp: usize| -> Vec<C64> { field.comps[comp].iter().zip(&sym).map(|(z, s)| z * s).collect() };
            fft.to_physical_pair(&d(c1), &d(c2))
        };
        let (mut en, mut dn) = (0.0, 0.0);
        for (s, sp) in Species::BOTH.iter().enumerate() {
            let (m, t) = (p.mass(*sp), p.temp(*sp));
            let u0 = 2 + 3 * s;
            let (r, ux) = deriv(s, u0);
            let (uy, uz) = deriv(u0 + 1, u0 + 2);
            let us = [ux, uy, uz];
            for x in 0..npts {
                let n = dens[s][x];
                let u2 = us[0][x].powi(2) + us[1][x].powi(2) + us[2][x].powi(2);
                en += t / n * r[x].powi(2) + m * n * u2;
                dn += m * n * u2;
            }
        }
        let cell = vol / npts as f64;
        (l.iter().sum::<u32>(), en * cell, dn * cell)
    });
    let (mut e0, mut d0, mut e_all, mut d_all) = (0.0, 0.0, 0.0, 0.0);
    for (deg, en, dn) in per_l {
        e_all += en;
        d_all += dn;
        if deg == 0 {
            e0 += en;
            d0 += dn;
        }
    }
    EnergyReport {
        e_n: e_all + spec[0],
        d_n: d_all + spec[2],
        e_n_high: e_all - e0 + spec[1],
        d_n_high: d_all - d0 + spec[3],
        sobolev_sq: spec[4],
        kappas,
        sobolev_order: order,
    }
}

/// Hermitian forms of the linearized `E_N` and `D_N` at one wavevector, so
/// that the mode contributes `L³·Û*HÛ` and `L³·Û*DÛ`.
pub fn energy_form_nonlinear(p: &PlasmaParams, k: &RVec3, order: usize, kappas: [f64; 3]) -> (StateMatrix, StateMatrix) {
    let mut h = StateMatrix::zeros();
    let mut d = StateMatrix::zeros();
    // Columns of the identity give the diagonal, pairs give the polarization.
    let basis = |j: usize, z: C64| {
        let mut v = [c(0.0, 0.0); 14];
        v[j] = z;
        v
    };
    let eval = |v: &[C64; 14]| spectral_linear(p, k, v, order as i64, &kappas);
    for a in 0..14 {
        let [ea, da] = eval(&basis(a, re(1.0)));
        h[(a, a)] = re(ea);
        d[(a, a)] = re(da);
    }
    for a in 0..14 {
        for b in (a + 1)..14 {
            let mut v1 = basis(a, re(1.0));
            v1[b] = re(1.0);
            let mut v2 = basis(a, re(1.0));
            v2[b] = c(0.0, 1.0);
            let [e1, d1] = eval(&v1);
            let [e2, d2] = eval(&v2);
            // Q(x_a + x_b) = H_aa + H_bb + 2Re H_ab, Q(x_a + i x_b) = H_aa + H_bb − 2Im H_ab
            let hr = 0.5 * (e1 - h[(a, a)].re - h[(b, b)].re);
            let hi = 0.5 * (e2 - h[(a, a)].re - h[(b, b)].re);
            let dr = 0.5 * (d1 - d[(a, a)].re - d[(b, b)].re);
            let di = 0.5 * (d2 - d[(a, a)].re - d[(b, b)].re);
            h[(a, b)] = c(hr, -hi);
            h[(b, a)] = c(hr, hi);
            d[(a, b)] = c(dr, -di);
            d[(b, a)] = c(dr, di);
        }
    }
    (h, d)
}

/// Linearized `[E_N, D_N]` integrands of one mode.
fn spectral_linear(p: &PlasmaParams, k: &RVec3, v: &[C64; 14], order: i64, kap: &[f64; 3]) -> [f64; 2] {
    let parts = spectral_parts(p, k, v, order, kap);
    let w = sobolev_weight(k, order);
    let mut fluid_e = 0.0;
    let mut fluid_d = 0.0;
    for (s, sp) in Species::BOTH.iter().enumerate() {
        let (m, t) = (p.mass(*sp), p.temp(*sp));
        let u2: f64 = v[2 + 3 * s..5 + 3 * s].iter().map(|z| z.norm_sqr()).sum();
        fluid_e += t * v[s].norm_sqr() + m * u2;
        fluid_d += m * u2;
    }
    [parts[0] + w * fluid_e, parts[2] + w * fluid_d]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaSelection {
    /// `(s, s², s^{5/2})`.
    pub kappas: [f64; 3],
    /// Smallest `λ` with `−dE_N/dt ≥ λD_N` for the linearized flow over the
    /// resolved modes.
    pub lambda_lin: f64,
    pub equivalence_ratio: f64,
}

/// Representatives `(a, b, c)`, `0 ≤ a ≤ b ≤ c ≤ n/3`, of the resolved
/// lattice modes up to permutations and reflections.
fn mode_triples(n: usize) -> Vec<[i64; 3]> {
    let cut = dealias_cutoff(n);
    let mut out = Vec::new();
    for a in 0..=cut {
        for b in a..=cut {
            for c3 in b..=cut {
                if c3 > 0 {
                    out.push([a, b, c3]);
                }
            }
        }
    }
    out
}

fn to_dmat(m: &nalgebra::SMatrix<C64, 12, 12>) -> DMatrix<C64> {
    DMatrix::from_fn(12, 12, |i, j| m[(i, j)])
}

/// Forms of one mode restricted to the constraint subspace: the energy is
/// `h[0] + Σ κ_j h[j+1]`.
struct TripleForms {
    h: [DMatrix<C64>; 4],
    s: [DMatrix<C64>; 4],
    d: DMatrix<C64>,
}

impl TripleForms {
    fn new(p: &PlasmaParams, k: &RVec3, order: usize) -> Option<Self> {
        let q = constraint_basis(p, k).ok()?;
        let l = mode_generator(p, k);
        let unit = [[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let forms = unit.map(|kap| energy_form_nonlinear(p, k, order, kap));
        let r = |m: &StateMatrix| to_dmat(&(q.adjoint() * m * q));
        let h0 = forms[0].0;
        let raw: [StateMatrix; 4] = std::array::from_fn(|j| if j == 0 { h0 } else { forms[j].0 - h0 });
        Some(TripleForms {
            h: raw.map(|m| r(&m)),
            s: raw.map(|m| r(&-(m * l + l.adjoint() * m))),
            d: r(&forms[0].1),
        })
    }

    /// `(λ_lin, equivalence ratio)`, `None` if a form is not definite.
    fn check(&self, kappas: [f64; 3]) -> Option<(f64, f64)> {
        let combine = |m: &[DMatrix<C64>; 4]| {
            let mut out = m[0].clone();
            for j in 0..3 {
                out += &m[j + 1] * re(kappas[j]);
            }
            out
        };
        let h = combine(&self.h);
        let eq = pencil_eigenvalues(&h, &self.h[0])?;
        let (lo, hi) = (eq[0], eq[eq.len() - 1]);
        if !(lo > 0.0) {
            return None;
        }
        let lam = pencil_eigenvalues(&combine(&self.s), &self.d)?[0];
        Some((lam, hi.max(1.0 / lo)))
    }
}

fn min_rate(forms: &[TripleForms], s: f64) -> Option<(f64, f64)> {
    let kappas = [s, s * s, s.powf(2.5)];
    let checks = par_map(forms.len(), |j| forms[j].check(kappas));
    let (mut lam, mut ratio) = (f64::INFINITY, 0.0_f64);
    for ch in checks {
        let (l, r) = ch?;
        if r > MAX_EQUIVALENCE || !(l > 0.0) {
            return None;
        }
        lam = lam.min(l);
        ratio = ratio.max(r);
    }
    Some((lam, ratio))
}

/// `κ = (s, s², s^{5/2})`: bracket the admissible `s` (positive linearized
/// rate and equivalence ratio ≤ 10 on every resolved mode) by halving and
/// bisection, then take the `s` below the edge with the largest rate.
pub fn select_kappas(p: &PlasmaParams, template: &GridField, order: usize) -> Result<KappaSelection> {
    let triples = mode_triples(template.n);
    let forms: Vec<TripleForms> = par_map(triples.len(), |j| TripleForms::new(p, &template.k_of(&triples[j]), order))
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::WeightSearchFailed("constraint basis unavailable".into()))?;
    let mut hi = 1.0_f64;
    let mut lo = 0.5_f64;
    while min_rate(&forms, lo).is_none() {
        hi = lo;
        lo /= 2.0;
        if lo < 1e-8 {
            return Err(Error::WeightSearchFailed(format!("no s in [1e-8, 1) passes at order {order}")));
        }
    }
    for _ in 0..10 {
        let mid = (lo * hi).sqrt();
        if min_rate(&forms, mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for j in 0..=16 {
        let s = lo * 2f64.powf(-j as f64 / 4.0);
        if let Some((lam, ratio)) = min_rate(&forms, s) {
            if best.is_none_or(|b| lam > b.1) {
                best = Some((s, lam, ratio));
            }
        }
    }
    let (s, lambda_lin, equivalence_ratio) = best.expect("the bracket edge is admissible");
    Ok(KappaSelection { kappas: [s, s * s, s.powf(2.5)], lambda_lin, equivalence_ratio })
}

/// `dE_N/dt + λ̂D_N ≤ ĉ(E_N^{1/2} + E_N)D_N` along a recorded trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyInequalityReport {
    pub lambda_hat: f64,
    /// Smallest `ĉ ≥ 0` for which the inequality holds at every interior sample.
    pub c_hat: f64,
    /// Largest `(dE_N/dt)/D_N`.
    pub max_derivative_ratio: f64,
    pub samples: usize,
}

/// Central differences of `E_N` over `(t, E_N, D_N)` samples.
pub fn energy_inequality(samples: &[(f64, f64, f64)], lambda_hat: f64) -> Result<EnergyInequalityReport> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: samples.len() });
    }
    let mut c_hat = 0.0_f64;
    let mut worst = f64::NEG_INFINITY;
    for w in samples.windows(3) {
        let (t0, e0, _) = w[0];
        let (_, e1, d1) = w[1];
        let (t2, e2, _) = w[2];
        if !(d1 > 0.0) {
            continue;
        }
        let de = (e2 - e0) / (t2 - t0);
        worst = worst.max(de / d1);
        let excess = de / d1 + lambda_hat;
        let size = e1.max(0.0).sqrt() + e1;
        if excess > 0.0 {
            c_hat = c_hat.max(excess / size);
        }
    }
    Ok(EnergyInequalityReport { lambda_hat, c_hat, max_derivative_ratio: worst, samples: samples.len() })
}
