//! Transverse (electromagnetic) subsystem on full 3-vectors.
//!
//! With `β = i k̂×B` the transverse dynamics become a real 4×4 generator
//! acting componentwise on `(û_{i,⊥}, û_{e,⊥}, Ê_⊥, β)`; since
//! `(i k̂×)² = I` on transverse vectors, `B = i k̂×β`. The k̂-collinear
//! components of `û_α, Ê` follow the relaxation block and `B_∥` is static.
//! Together this is the exact exponential of [`em_matrix`].

use nalgebra::{Matrix4, SMatrix, Vector3, Vector4};

use crate::fluid::{anchor_labels, K_REF};
use crate::params::{relaxation_cubic, relaxation_matrix, sigma_roots, PlasmaParams};
use crate::spectral::{check_distinct, continue_branches, roots_array, SpectralDecomp};
use crate::{c, cvec, re, CVec3, Error, RVec3, Result, C64, FOUR_PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEmState {
    pub u_i_perp: CVec3,
    pub u_e_perp: CVec3,
    pub e_perp: CVec3,
    pub b: CVec3,
    pub k_vec: RVec3,
}

impl ModeEmState {
    /// Largest `|k·v|/(|k||v|)` over the four components.
    pub fn transversality_residual(&self) -> f64 {
        let k = cvec(&self.k_vec);
        let kn = self.k_vec.norm();
        [self.u_i_perp, self.u_e_perp, self.e_perp, self.b]
            .iter()
            .map(|v| {
                let n = v.norm();
                if n == 0.0 {
                    0.0
                } else {
                    k.dot(v).norm() / (kn * n)
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u_i_perp.norm_squared() + self.u_e_perp.norm_squared() + self.e_perp.norm_squared() + self.b.norm_squared()
    }
}

/// Labelled roots of the `B̂`-quartic and the coefficients `c_j` of
/// `B̂(t) = Σ_j c_j e^{λ_j t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmSpectrum {
    pub lambda: [C64; 4],
    pub vandermonde_coeffs: [CVec3; 4],
}

pub fn em_quartic_coeffs(p: &PlasmaParams, k: f64) -> [f64; 5] {
    let cub = relaxation_cubic(p);
    let c2k2 = p.c_light * p.c_light * k * k;
    [1.0, cub.c2, c2k2 + cub.c1, c2k2 * cub.c2 + cub.c0, p.nu_i * p.nu_e * c2k2]
}

pub fn em_roots(p: &PlasmaParams, k: f64) -> [C64; 4] {
    roots_array::<4>(&em_quartic_coeffs(p, k))
}

pub fn em_eigenvalues(p: &PlasmaParams, k: f64) -> Result<[C64; 4]> {
    if !(k > 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let sigma = sigma_roots(&relaxation_cubic(p))?;
    let start = anchor_labels(em_roots(p, K_REF), &sigma.sigma);
    let lam = continue_branches(|kk| em_roots(p, kk), K_REF, start, k);
    check_distinct(&lam)?;
    Ok(lam)
}

fn ik_cross(k: &RVec3, v: &CVec3) -> CVec3 {
    cvec(k).cross(v) * c(0.0, 1.0)
}

/// `(B̂, ∂_tB̂, ∂²_tB̂, ∂³_tB̂)` at `t = 0`.
pub fn b_initial_derivatives(p: &PlasmaParams, s: &ModeEmState) -> [CVec3; 4] {
    let (e, cl) = (p.e_charge, p.c_light);
    let k2 = s.k_vec.norm_squared();
    let curl_e = ik_cross(&s.k_vec, &s.e_perp);
    let curl_ui = ik_cross(&s.k_vec, &s.u_i_perp);
    let curl_ue = ik_cross(&s.k_vec, &s.u_e_perp);
    let d1 = -curl_e * re(cl);
    let d2 = -s.b * re(cl * cl * k2) + (curl_ui - curl_ue) * re(FOUR_PI * cl * e);
    let d3 = curl_e * re((cl * cl * k2 + p.omega_p2()) * cl) - curl_ui * re(FOUR_PI * cl * e * p.nu_i)
        + curl_ue * re(FOUR_PI * cl * e * p.nu_e);
    [s.b, d1, d2, d3]
}

/// Solves `Σ_j λ_jⁿ c_j = rhs_n`, `n = 0..3`, componentwise.
pub fn vandermonde_solve(lambda: &[C64; 4], rhs: &[CVec3; 4]) -> Result<[CVec3; 4]> {
    check_distinct(lambda)?;
    let v = Matrix4::from_fn(|n, j| lambda[j].powi(n as i32));
    let lu = v.lu();
    let mut out = [CVec3::zeros(); 4];
    for comp in 0..3 {
        let b = Vector4::from_fn(|n, _| rhs[n][comp]);
        let x = lu
            .solve(&b)
            .ok_or_else(|| Error::DegenerateSpectrum("singular Vandermonde matrix".into()))?;
        for j in 0..4 {
            out[j][comp] = x[j];
        }
    }
    Ok(out)
}

pub fn em_spectrum(p: &PlasmaParams, s: &ModeEmState) -> Result<EmSpectrum> {
    let lambda = em_eigenvalues(p, s.k_vec.norm())?;
    let vandermonde_coeffs = vandermonde_solve(&lambda, &b_initial_derivatives(p, s))?;
    Ok(EmSpectrum { lambda, vandermonde_coeffs })
}

pub fn b_propagate(p: &PlasmaParams, s: &ModeEmState, t: f64) -> Result<CVec3> {
    let k = s.k_vec.norm();
    if !(k > 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let lambda = em_roots(p, k);
    let cj = vandermonde_solve(&lambda, &b_initial_derivatives(p, s))?;
    Ok((0..4).fold(CVec3::zeros(), |acc, j| acc + cj[j] * (lambda[j] * t).exp()))
}

/// Generator of `(û_i, û_e, Ê, B̂)` stacked as 12 complex components.
pub fn em_matrix(p: &PlasmaParams, k_vec: &RVec3) -> Result<SMatrix<C64, 12, 12>> {
    if !(k_vec.norm() > 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let (e, cl) = (p.e_charge, p.c_light);
    let mut m = SMatrix::<C64, 12, 12>::zeros();
    // (ik×v)_a = Σ_b X[a][b] v_b
    let (kx, ky, kz) = (k_vec.x, k_vec.y, k_vec.z);
    let x = [[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]];
    for a in 0..3 {
        m[(a, a)] = c(-p.nu_i, 0.0);
        m[(a, 6 + a)] = c(e / p.m_i, 0.0);
        m[(3 + a, 3 + a)] = c(-p.nu_e, 0.0);
        m[(3 + a, 6 + a)] = c(-e / p.m_e, 0.0);
        m[(6 + a, a)] = c(-FOUR_PI * e, 0.0);
        m[(6 + a, 3 + a)] = c(FOUR_PI * e, 0.0);
        for b in 0..3 {
            m[(6 + a, 9 + b)] = c(0.0, cl * x[a][b]);
            m[(9 + a, 6 + b)] = c(0.0, -cl * x[a][b]);
        }
    }
    Ok(m)
}

/// Transverse 4×4 generator on `(a_i, a_e, ε, β)`.
pub fn transverse_matrix(p: &PlasmaParams, k: f64) -> Matrix4<C64> {
    let (e, ck) = (p.e_charge, p.c_light * k);
    let r = |x: f64| c(x, 0.0);
    Matrix4::new(
        r(-p.nu_i),
        r(0.0),
        r(e / p.m_i),
        r(0.0),
        r(0.0),
        r(-p.nu_e),
        r(-e / p.m_e),
        r(0.0),
        r(-FOUR_PI * e),
        r(FOUR_PI * e),
        r(0.0),
        r(ck),
        r(0.0),
        r(0.0),
        r(-ck),
        r(0.0),
    )
}

/// Spectral data of the exact exponential of [`em_matrix`] at one wavenumber.
#[derive(Debug, Clone)]
pub struct EmPropagator {
    pub transverse: SpectralDecomp<4>,
    pub collinear: SpectralDecomp<3>,
}

impl EmPropagator {
    pub fn new(p: &PlasmaParams, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::ZeroWavenumber);
        }
        let transverse = SpectralDecomp::new(&transverse_matrix(p, k), em_roots(p, k))?;
        let collinear = relaxation_decomp(p)?;
        Ok(EmPropagator { transverse, collinear })
    }

    /// Applies `f(em_matrix)` given `f` evaluated on each block.
    pub fn apply(
        &self,
        s: &ModeEmState,
        f_trans: &Matrix4<C64>,
        f_coll: &nalgebra::Matrix3<C64>,
        f_zero: C64,
    ) -> ModeEmState {
        let khc = cvec(&(s.k_vec / s.k_vec.norm()));
        let par = |v: &CVec3| khc.dot(v);
        let perp = |v: &CVec3| v - khc * par(v);
        let [ui, ue, ef, b] = transverse_apply(
            &khc,
            f_trans,
            [perp(&s.u_i_perp), perp(&s.u_e_perp), perp(&s.e_perp), perp(&s.b)],
        );
        let coll = f_coll * Vector3::new(par(&s.u_i_perp), par(&s.u_e_perp), par(&s.e_perp));
        ModeEmState {
            u_i_perp: ui + khc * coll[0],
            u_e_perp: ue + khc * coll[1],
            e_perp: ef + khc * coll[2],
            b: b + khc * (par(&s.b) * f_zero),
            k_vec: s.k_vec,
        }
    }

    pub fn propagate(&self, s: &ModeEmState, t: f64) -> ModeEmState {
        self.apply(s, &self.transverse.exp(t), &self.collinear.exp(t), c(1.0, 0.0))
    }
}

/// `f` applied to transverse `(û_i, û_e, Ê, B̂)` through `β = i k̂×B̂`.
pub(crate) fn transverse_apply(khc: &CVec3, f: &Matrix4<C64>, v: [CVec3; 4]) -> [CVec3; 4] {
    let i = c(0.0, 1.0);
    let beta = khc.cross(&v[3]) * i;
    let mut out = [CVec3::zeros(); 4];
    for a in 0..3 {
        let w = f * Vector4::new(v[0][a], v[1][a], v[2][a], beta[a]);
        for j in 0..4 {
            out[j][a] = w[j];
        }
    }
    out[3] = khc.cross(&out[3]) * i;
    out
}

pub(crate) fn relaxation_decomp(p: &PlasmaParams) -> Result<SpectralDecomp<3>> {
    let sigma = sigma_roots(&relaxation_cubic(p))?;
    SpectralDecomp::new(&relaxation_matrix(p), sigma.sigma)
}

pub fn em_propagate(p: &PlasmaParams, s: &ModeEmState, t: f64) -> Result<ModeEmState> {
    Ok(EmPropagator::new(p, s.k_vec.norm())?.propagate(s, t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmProfile {
    pub u_i: CVec3,
    pub u_e: CVec3,
    pub e: CVec3,
    pub b: CVec3,
}

/// Coefficients `(a_i, a_e, a_E)` with `ū_{α,⊥} = a_α ik×B̄`, `Ē_⊥ = a_E ik×B̄`,
/// from the quasi-static Ampère law and the Darcy balance
/// `m_αν_αū_α = q_αĒ`.
pub fn curl_coefficients(p: &PlasmaParams) -> [f64; 3] {
    let sum = p.friction_sum();
    let e = p.e_charge;
    let cl = p.c_light;
    let (ai, ae) = (p.m_i * p.nu_i, p.m_e * p.nu_e);
    [cl / (FOUR_PI * e) * ae / sum, -cl / (FOUR_PI * e) * ai / sum, cl / (FOUR_PI * e * e) * ai * ae / sum]
}

/// Coefficients read literally off the profile definition, where the curl
/// weight is `c/(4πq_α)·m_eν_e/(m_iν_i+m_eν_e)` for both species. Differs from
/// [`curl_coefficients`] in the electron entry unless `m_iν_i = m_eν_e`.
pub fn curl_coefficients_literal(p: &PlasmaParams) -> [f64; 3] {
    let [ai, _, ef] = curl_coefficients(p);
    [ai, -ai, ef]
}

pub fn em_profile(p: &PlasmaParams, b0: &CVec3, k_vec: &RVec3, t: f64) -> EmProfile {
    let b = b0 * re((-p.mu2() * k_vec.norm_squared() * t).exp());
    let curl = ik_cross(k_vec, &b);
    let [ai, ae, ef] = curl_coefficients(p);
    EmProfile { u_i: curl * re(ai), u_e: curl * re(ae), e: curl * re(ef), b }
}
