//! Longitudinal subsystem: state `(ρ_i, ρ_e, s_i, s_e)` with `û_α = s_α k̂`
//! and the longitudinal field slaved to the densities by Gauss's law.

use nalgebra::{Matrix4, Vector4};

use crate::params::{relaxation_cubic, sigma_roots, PlasmaParams, Species};
use crate::spectral::{check_distinct, continue_branches, roots_array, SpectralDecomp};
use crate::{c, Error, Result, C64, FOUR_PI};

/// Reference wavenumber the branch labels are anchored at.
pub const K_REF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFluidState {
    pub rho_i: C64,
    pub rho_e: C64,
    pub s_i: C64,
    pub s_e: C64,
    pub k_mag: f64,
}

impl ModeFluidState {
    pub fn to_vector(&self) -> Vector4<C64> {
        Vector4::new(self.rho_i, self.rho_e, self.s_i, self.s_e)
    }

    pub fn from_vector(v: &Vector4<C64>, k_mag: f64) -> Self {
        ModeFluidState { rho_i: v[0], rho_e: v[1], s_i: v[2], s_e: v[3], k_mag }
    }
}

/// Labelled eigenvalues (`λ₁` diffusive) and eigenprojections at one `|k|`.
#[derive(Debug, Clone)]
pub struct FluidSpectrum {
    pub lambda: [C64; 4],
    pub projections: [Matrix4<C64>; 4],
    pub k_mag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda1Expansion {
    pub second_order: f64,
    pub fourth_ratio: f64,
}

impl Lambda1Expansion {
    pub fn fourth_order(&self) -> f64 {
        self.fourth_ratio * self.second_order * self.second_order
    }
}

pub fn fluid_matrix(p: &PlasmaParams, k: f64) -> Result<Matrix4<C64>> {
    if !(k > 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let e2 = p.e_charge * p.e_charge;
    let ai = FOUR_PI * e2 / p.m_i / k;
    let ae = FOUR_PI * e2 / p.m_e / k;
    let z = c(0.0, 0.0);
    Ok(Matrix4::new(
        z,
        z,
        c(0.0, -k),
        z,
        //
        z,
        z,
        z,
        c(0.0, -k),
        //
        c(0.0, -p.t_i / p.m_i * k - ai),
        c(0.0, ai),
        c(-p.nu_i, 0.0),
        z,
        //
        c(0.0, ae),
        c(0.0, -p.t_e / p.m_e * k - ae),
        z,
        c(-p.nu_e, 0.0),
    ))
}

/// Descending coefficients `[1, a₃, a₂, a₁, a₀]` of `det(λI − A)`.
pub fn fluid_char_coeffs(p: &PlasmaParams, k: f64) -> [f64; 5] {
    let cub = relaxation_cubic(p);
    let k2 = k * k;
    let (ti, te, mi, me) = (p.t_i, p.t_e, p.m_i, p.m_e);
    let e2 = p.e_charge * p.e_charge;
    [
        1.0,
        cub.c2,
        cub.c1 + (ti / mi + te / me) * k2,
        (ti * p.nu_e / mi + te * p.nu_i / me) * k2 + cub.c0,
        ti * te / (mi * me) * k2 * k2 + FOUR_PI * e2 * (ti + te) / (mi * me) * k2,
    ]
}

/// Unlabelled polished roots of the quartic.
pub fn fluid_roots(p: &PlasmaParams, k: f64) -> [C64; 4] {
    roots_array::<4>(&fluid_char_coeffs(p, k))
}

/// Labels at `K_REF`: `λ₁` closest to zero, then the roots nearest `σ₂, σ₃, σ₄`.
pub(crate) fn anchor_labels(roots: [C64; 4], sigma: &[C64; 3]) -> [C64; 4] {
    let mut rest: Vec<C64> = roots.to_vec();
    rest.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let l1 = rest.remove(0);
    let mut out = [l1; 4];
    for (j, s) in sigma.iter().enumerate() {
        let (idx, _) = rest
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - s).norm().total_cmp(&(b.1 - s).norm()))
            .expect("three roots remain");
        out[j + 1] = rest.remove(idx);
    }
    out
}

/// Eigenvalues with `λ₁` continued from the diffusive branch at `|k| = 10⁻⁶`.
pub fn fluid_eigenvalues(p: &PlasmaParams, k: f64) -> Result<[C64; 4]> {
    if !(k > 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let sigma = sigma_roots(&relaxation_cubic(p))?;
    let start = anchor_labels(fluid_roots(p, K_REF), &sigma.sigma);
    let lam = continue_branches(|kk| fluid_roots(p, kk), K_REF, start, k);
    check_distinct(&lam)?;
    Ok(lam)
}

pub fn fluid_spectrum(p: &PlasmaParams, k: f64) -> Result<FluidSpectrum> {
    let lambda = fluid_eigenvalues(p, k)?;
    let a = fluid_matrix(p, k)?;
    let d = SpectralDecomp::new(&a, lambda)?;
    Ok(FluidSpectrum { lambda, projections: d.proj, k_mag: k })
}

/// Unlabelled decomposition used for propagation.
pub fn fluid_decomp(p: &PlasmaParams, k: f64) -> Result<SpectralDecomp<4>> {
    let a = fluid_matrix(p, k)?;
    SpectralDecomp::new(&a, fluid_roots(p, k))
}

/// `λ₁⁽⁴⁾/(λ₁⁽²⁾)²` from the small-`|k|` expansion `λ₁ = −μ₁|k|² + λ₁⁽⁴⁾|k|⁴ + …`.
pub fn lambda1_fourth_ratio(p: &PlasmaParams) -> Lambda1Expansion {
    let e2 = p.e_charge * p.e_charge;
    let sum = p.friction_sum();
    let tsum = p.t_i + p.t_e;
    let r = sum / tsum;
    let num = p.m_i * p.nu_i * p.m_e * p.nu_e + FOUR_PI * e2 * (p.m_i + p.m_e)
        - (p.t_i * p.m_e * p.nu_e + p.t_e * p.m_i * p.nu_i) * r
        + p.t_i * p.t_e * r * r;
    Lambda1Expansion { second_order: -p.mu1(), fourth_ratio: -num / (FOUR_PI * e2 * sum) }
}

pub fn fluid_propagate(p: &PlasmaParams, state0: &ModeFluidState, t: f64) -> Result<ModeFluidState> {
    let d = fluid_decomp(p, state0.k_mag)?;
    Ok(ModeFluidState::from_vector(&(d.exp(t) * state0.to_vector()), state0.k_mag))
}

/// Longitudinal field amplitude along `k̂`: `−4πie(ρ_i − ρ_e)/|k|`, so that
/// `ik·Ê = 4πe(ρ_i − ρ_e)`.
pub fn e_parallel(p: &PlasmaParams, rho_i: C64, rho_e: C64, k: f64) -> Result<C64> {
    if !(k > 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    Ok(c(0.0, -FOUR_PI * p.e_charge / k) * (rho_i - rho_e))
}

/// Diffusion-wave rows `(ρ̄, ū_∥, Ē_∥)` in the scalar convention.
pub fn fluid_profile(p: &PlasmaParams, state0: &ModeFluidState, t: f64) -> (C64, C64, C64) {
    let k = state0.k_mag;
    let heat = (-p.mu1() * k * k * t).exp();
    let rho = (state0.rho_i * p.density_weight(Species::Ion) + state0.rho_e * p.density_weight(Species::Electron)) * heat;
    let grad = c(0.0, k) * rho;
    (rho, grad * (-p.mu1()), grad * p.e_gradient_coeff())
}

/// Low/high frequency split: the largest `r₀` such that on `(0, r₀]` the
/// diffusive branch stays separated from the others by more than half of
/// `min|σ_j|`.
pub fn split_wavenumber(p: &PlasmaParams) -> Result<f64> {
    let sigma = sigma_roots(&relaxation_cubic(p))?;
    let half = 0.5 * sigma.min_abs();
    let mut lam = anchor_labels(fluid_roots(p, K_REF), &sigma.sigma);
    let mut k = K_REF;
    let factor = 1.01_f64;
    loop {
        let next = k * factor;
        lam = continue_branches(|kk| fluid_roots(p, kk), k, lam, next);
        let gap = (1..4).map(|j| (lam[j] - lam[0]).norm()).fold(f64::INFINITY, f64::min);
        if gap <= half || next > 1e4 {
            return Ok(k);
        }
        k = next;
    }
}
