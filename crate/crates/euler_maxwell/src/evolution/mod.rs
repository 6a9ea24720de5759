//! Full linear solution: per-mode dispatch to the fluid and EM propagators,
//! the zero mode, diffusion-wave profiles, grid and radial back ends, and
//! power-law fits.

mod fit;
mod grid;
mod radial;

pub use fit::{decay_fit, fit_bound, BoundFit, BoundSample, DecayFit};
pub use grid::{
    diffusion_profiles, diffusion_profiles_with, l2_norm, linear_evolve, profile_discrepancy, projection_extract,
    wave_index, GridField, Selector, ShellPropagators,
};
pub use radial::{
    gaussian_moment, octahedral_directions, radial_norm_series, IsotropicDatum, NormSample, RadialQuadrature,
};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::em::{curl_coefficients, curl_coefficients_literal, transverse_apply, EmPropagator, ModeEmState};
use crate::fluid::{e_parallel, fluid_decomp, ModeFluidState};
use crate::lyapunov::{ModeFullState, StateMatrix};
use crate::params::{PlasmaParams, Species};
use crate::spectral::SpectralDecomp;
use crate::{c, cvec, re, CVec3, Error, RVec3, Result, C64, FOUR_PI};

/// Generator `L(k)` on the 14-component layout of [`ModeFullState::to_vector`].
pub fn mode_generator(p: &PlasmaParams, k_vec: &RVec3) -> StateMatrix {
    let mut l = StateMatrix::zeros();
    let cl = p.c_light;
    let x = [[0.0, -k_vec.z, k_vec.y], [k_vec.z, 0.0, -k_vec.x], [-k_vec.y, k_vec.x, 0.0]];
    for (idx, s) in Species::BOTH.iter().enumerate() {
        let (m, t, q, nu) = (p.mass(*s), p.temp(*s), p.charge(*s), p.nu(*s));
        let (rho, u0) = (idx, 2 + 3 * idx);
        for a in 0..3 {
            l[(rho, u0 + a)] = c(0.0, -k_vec[a]);
            l[(u0 + a, rho)] = c(0.0, -t / m * k_vec[a]);
            l[(u0 + a, 8 + a)] = re(q / m);
            l[(u0 + a, u0 + a)] = re(-nu);
            l[(8 + a, u0 + a)] = re(-FOUR_PI * q);
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            l[(8 + a, 11 + b)] = c(0.0, cl * x[a][b]);
            l[(11 + a, 8 + b)] = c(0.0, -cl * x[a][b]);
        }
    }
    l
}

/// Longitudinal part, `Ê_∥ = k̂·Ê`, and transverse part.
pub fn helmholtz_split(s: &ModeFullState) -> Result<(ModeFluidState, C64, ModeEmState)> {
    let k = s.k_vec.norm();
    if !(k > 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let kh = cvec(&(s.k_vec / k));
    let par = |v: &CVec3| kh.dot(v);
    let perp = |v: &CVec3| v - kh * par(v);
    let fluid = ModeFluidState { rho_i: s.rho_i, rho_e: s.rho_e, s_i: par(&s.u_i), s_e: par(&s.u_e), k_mag: k };
    let em = ModeEmState {
        u_i_perp: perp(&s.u_i),
        u_e_perp: perp(&s.u_e),
        e_perp: perp(&s.e_field),
        b: s.b_field,
        k_vec: s.k_vec,
    };
    Ok((fluid, par(&s.e_field), em))
}

pub fn helmholtz_recombine(fluid: &ModeFluidState, e_par: C64, em: &ModeEmState) -> ModeFullState {
    let kh = cvec(&(em.k_vec / em.k_vec.norm()));
    ModeFullState {
        rho_i: fluid.rho_i,
        rho_e: fluid.rho_e,
        u_i: em.u_i_perp + kh * fluid.s_i,
        u_e: em.u_e_perp + kh * fluid.s_e,
        e_field: em.e_perp + kh * e_par,
        b_field: em.b,
        k_vec: em.k_vec,
    }
}

/// Eigen-data of `L(k)`, which depends on `|k|` only.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ModePropagator {
    Zero { relax: SpectralDecomp<3> },
    Mode { k_mag: f64, fluid: SpectralDecomp<4>, em: EmPropagator },
}

/// `f(L(k))` stored blockwise. Applied to constraint-consistent states the
/// longitudinal field is slaved to the densities and `B̂_∥` is scaled by
/// `f(0)`; `coll` acts on each Cartesian component at `k = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ModeOperator {
    pub fluid: Matrix4<C64>,
    pub trans: Matrix4<C64>,
    pub coll: Matrix3<C64>,
    pub zero: C64,
}

impl ModePropagator {
    pub fn new(p: &PlasmaParams, k_mag: f64) -> Result<Self> {
        if k_mag == 0.0 {
            return Ok(ModePropagator::Zero { relax: crate::em::relaxation_decomp(p)? });
        }
        Ok(ModePropagator::Mode { k_mag, fluid: fluid_decomp(p, k_mag)?, em: EmPropagator::new(p, k_mag)? })
    }

    pub fn operator(&self, f: impl Fn(C64) -> C64) -> ModeOperator {
        let zero = f(c(0.0, 0.0));
        match self {
            ModePropagator::Zero { relax } => ModeOperator {
                fluid: Matrix4::zeros(),
                trans: Matrix4::zeros(),
                coll: relax.func(&f),
                zero,
            },
            ModePropagator::Mode { fluid, em, .. } => ModeOperator {
                fluid: fluid.func(&f),
                trans: em.transverse.func(&f),
                coll: em.collinear.func(&f),
                zero,
            },
        }
    }

    pub fn exp(&self, t: f64) -> ModeOperator {
        self.operator(|z| (z * t).exp())
    }

    pub fn propagate(&self, p: &PlasmaParams, s: &ModeFullState, t: f64) -> ModeFullState {
        self.exp(t).apply(p, s)
    }
}

impl ModeOperator {
    pub fn apply(&self, p: &PlasmaParams, s: &ModeFullState) -> ModeFullState {
        let k = s.k_vec.norm();
        if k == 0.0 {
            let mut out = *s;
            out.rho_i *= self.zero;
            out.rho_e *= self.zero;
            out.b_field *= self.zero;
            for a in 0..3 {
                let w = self.coll * Vector3::new(s.u_i[a], s.u_e[a], s.e_field[a]);
                out.u_i[a] = w[0];
                out.u_e[a] = w[1];
                out.e_field[a] = w[2];
            }
            return out;
        }
        let kh = cvec(&(s.k_vec / k));
        let par = |v: &CVec3| kh.dot(v);
        let perp = |v: &CVec3| v - kh * par(v);
        let f = self.fluid * Vector4::new(s.rho_i, s.rho_e, par(&s.u_i), par(&s.u_e));
        let e_par = e_parallel(p, f[0], f[1], k).expect("k > 0");
        let [ui, ue, ef, b] =
            transverse_apply(&kh, &self.trans, [perp(&s.u_i), perp(&s.u_e), perp(&s.e_field), perp(&s.b_field)]);
        ModeFullState {
            rho_i: f[0],
            rho_e: f[1],
            u_i: ui + kh * f[2],
            u_e: ue + kh * f[3],
            e_field: ef + kh * e_par,
            b_field: b + kh * (par(&s.b_field) * self.zero),
            k_vec: s.k_vec,
        }
    }
}

/// `e^{tL}` at `k = 0`: densities and field constant, `(û_i, û_e, Ê)` relax.
pub fn evolve_zero_mode(p: &PlasmaParams, s: &ModeFullState, t: f64) -> Result<ModeFullState> {
    if s.k_vec.norm() != 0.0 {
        return Err(Error::InvalidInput("zero mode expects k = 0".into()));
    }
    let scale = s.rho_i.norm().max(s.rho_e.norm()).max(f64::MIN_POSITIVE);
    if (s.rho_i - s.rho_e).norm() > 1e-12 * scale {
        return Err(Error::ConstraintViolation("zero mode must be neutral: rho_i(0) != rho_e(0)".into()));
    }
    Ok(ModePropagator::new(p, 0.0)?.propagate(p, s, t))
}

/// Exact `e^{tL}` for one mode.
pub fn evolve_mode(p: &PlasmaParams, s: &ModeFullState, t: f64) -> Result<ModeFullState> {
    if s.k_vec.norm() == 0.0 {
        return evolve_zero_mode(p, s, t);
    }
    Ok(ModePropagator::new(p, s.k_vec.norm())?.propagate(p, s, t))
}

/// Which curl coefficients the velocity and field profiles use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileVariant {
    /// From the quasi-static Ampère law plus Darcy balance.
    Darcy,
    /// The electron weight read literally as `m_eν_e/(m_iν_i+m_eν_e)`.
    Literal,
}

/// Diffusion-wave profile of one mode, stored with `ρ̂_i = ρ̂_e = n̄̂`.
pub fn mode_profile(p: &PlasmaParams, s0: &ModeFullState, t: f64, variant: ProfileVariant) -> ModeFullState {
    let k2 = s0.k_vec.norm_squared();
    let n = (s0.rho_i * p.density_weight(Species::Ion) + s0.rho_e * p.density_weight(Species::Electron))
        * (-p.mu1() * k2 * t).exp();
    let ik = cvec(&s0.k_vec) * c(0.0, 1.0);
    let b = if k2 > 0.0 {
        let kh = cvec(&(s0.k_vec / k2.sqrt()));
        s0.b_field - kh * kh.dot(&s0.b_field)
    } else {
        s0.b_field
    } * re((-p.mu2() * k2 * t).exp());
    let curl = ik.cross(&b);
    let grad = ik * n;
    let [ai, ae, ef] = match variant {
        ProfileVariant::Darcy => curl_coefficients(p),
        ProfileVariant::Literal => curl_coefficients_literal(p),
    };
    ModeFullState {
        rho_i: n,
        rho_e: n,
        u_i: grad * re(-p.mu1()) + curl * re(ai),
        u_e: grad * re(-p.mu1()) + curl * re(ae),
        e_field: grad * re(p.e_gradient_coeff()) + curl * re(ef),
        b_field: b,
        k_vec: s0.k_vec,
    }
}
