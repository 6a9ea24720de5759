//! Mobility matrices and Darcy-law response maps in a constant background
//! field `B = (0, 0, |B|)`.
//!
//! The 2×2 algebra is carried in double-double precision: `K_i + K_e`
//! cancels the `O(c/(e|B|))` off-diagonals, so plain `f64` loses about
//! `log10` of the Hall parameter `e|B|/(c m_αν_α)` digits.

use nalgebra::{Matrix2, Matrix3};
use twofloat::TwoFloat;

use crate::params::{PlasmaParams, Species};
use crate::{Error, Result};

type Dd = TwoFloat;

#[derive(Clone, Copy, Debug)]
struct M2([[Dd; 2]; 2]);

impl M2 {
    fn identity() -> Self {
        let (o, z) = (Dd::from(1.0), Dd::from(0.0));
        M2([[o, z], [z, o]])
    }

    fn add(&self, b: &M2) -> M2 {
        let a = &self.0;
        M2([[a[0][0] + b.0[0][0], a[0][1] + b.0[0][1]], [a[1][0] + b.0[1][0], a[1][1] + b.0[1][1]]])
    }

    fn scale(&self, s: Dd) -> M2 {
        let a = &self.0;
        M2([[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]])
    }

    fn mul(&self, b: &M2) -> M2 {
        let a = &self.0;
        let b = &b.0;
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        M2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    fn inv(&self) -> Option<M2> {
        let a = &self.0;
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if f64::from(det) == 0.0 {
            return None;
        }
        Some(M2([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]))
    }

    fn to_f64(self) -> Matrix2<f64> {
        let a = self.0;
        Matrix2::new(f64::from(a[0][0]), f64::from(a[0][1]), f64::from(a[1][0]), f64::from(a[1][1]))
    }
}

/// `K_α = (1/C_α)[[m_αν_α, q_α|B|/c], [−q_α|B|/c, m_αν_α]]`,
/// `C_α = m_α²ν_α² + e²|B|²/c²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityMatrix {
    pub entries: Matrix2<f64>,
    pub species: Species,
    pub b_mag: f64,
}

fn mobility_dd(p: &PlasmaParams, b_mag: f64, s: Species) -> M2 {
    let a = Dd::from(p.mass(s)) * Dd::from(p.nu(s));
    let b = Dd::from(p.charge(s)) * Dd::from(b_mag) / Dd::from(p.c_light);
    let cc = a * a + b * b;
    M2([[a / cc, b / cc], [-b / cc, a / cc]])
}

pub fn mobility(p: &PlasmaParams, b_mag: f64, s: Species) -> MobilityMatrix {
    MobilityMatrix { entries: mobility_dd(p, b_mag, s).to_f64(), species: s, b_mag }
}

/// `A_α = [[−m_αν_αn, q_αn|B|/c], [−q_αn|B|/c, −m_αν_αn]]`, the in-plane
/// friction-plus-Lorentz operator acting on `u_α`.
pub fn drag_matrix(p: &PlasmaParams, n: f64, b_mag: f64, s: Species) -> Matrix2<f64> {
    let a = p.mass(s) * p.nu(s) * n;
    let b = p.charge(s) * n * b_mag / p.c_light;
    Matrix2::new(-a, b, -b, -a)
}

fn sandwich_dd(p: &PlasmaParams, b_mag: f64, first: Species) -> Result<M2> {
    let ki = mobility_dd(p, b_mag, Species::Ion);
    let ke = mobility_dd(p, b_mag, Species::Electron);
    let m_inv = ki.add(&ke).inv().ok_or(Error::SingularSum)?;
    Ok(match first {
        Species::Electron => ke.mul(&m_inv).mul(&ki),
        Species::Ion => ki.mul(&m_inv).mul(&ke),
    })
}

fn g_dd(p: &PlasmaParams, n: f64, b_mag: f64) -> Result<M2> {
    let n = Dd::from(n);
    let ei = sandwich_dd(p, b_mag, Species::Electron)?;
    let ie = sandwich_dd(p, b_mag, Species::Ion)?;
    Ok(ei.scale(-Dd::from(p.t_i) / n).add(&ie.scale(-Dd::from(p.t_e) / n)))
}

/// `G = −(T_i/n)K_e(K_i+K_e)⁻¹K_i − (T_e/n)K_i(K_i+K_e)⁻¹K_e`.
pub fn coefficient_g(p: &PlasmaParams, n: f64, b_mag: f64) -> Result<Matrix2<f64>> {
    if !(n > 0.0) {
        return Err(Error::InvalidInput(format!("background density must be positive, got {n}")));
    }
    Ok(g_dd(p, n, b_mag)?.to_f64())
}

/// Max-norm of `K_e(K_i+K_e)⁻¹K_i − I/(m_iν_i+m_eν_e)` and of the i↔e swap,
/// relative to `1/(m_iν_i+m_eν_e)`.
pub fn sandwich_identity_residual(p: &PlasmaParams, b_mag: f64) -> Result<f64> {
    let inv_sum = Dd::from(1.0) / (Dd::from(p.m_i) * Dd::from(p.nu_i) + Dd::from(p.m_e) * Dd::from(p.nu_e));
    let target = M2::identity().scale(inv_sum);
    let mut worst = 0.0_f64;
    for first in Species::BOTH {
        let s = sandwich_dd(p, b_mag, first)?;
        for i in 0..2 {
            for j in 0..2 {
                let d = f64::from((s.0[i][j] - target.0[i][j]) / inv_sum).abs();
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}

/// Response maps defined by `n·u = u_map·∇n` and `n·E = e_map·∇n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarcyMaps {
    pub g_matrix: Matrix2<f64>,
    pub u_map: Matrix3<f64>,
    pub e_map: Matrix3<f64>,
    pub n_background: f64,
}

pub fn darcy_maps(p: &PlasmaParams, n: f64, b_mag: f64) -> Result<DarcyMaps> {
    let g = g_dd(p, n, b_mag)?;
    let ki = mobility_dd(p, b_mag, Species::Ion);
    let ke = mobility_dd(p, b_mag, Species::Electron);
    let m_inv = ki.add(&ke).inv().ok_or(Error::SingularSum)?;
    // Quasineutral, current-free: K_i(T_i∇n − enE) = K_e(T_e∇n + enE).
    let rhs = ki.scale(Dd::from(p.t_i)).add(&ke.scale(-Dd::from(p.t_e)));
    let e_perp = m_inv.mul(&rhs).scale(Dd::from(1.0) / Dd::from(p.e_charge)).to_f64();
    let u_perp = g.scale(Dd::from(n)).to_f64();

    let sum = p.friction_sum();
    let mut u_map = Matrix3::zeros();
    let mut e_map = Matrix3::zeros();
    for i in 0..2 {
        for j in 0..2 {
            u_map[(i, j)] = u_perp[(i, j)];
            e_map[(i, j)] = e_perp[(i, j)];
        }
    }
    // Along B there is no Lorentz force: m_αν_αu₃ = −T_α∂₃n/n + q_αE₃.
    u_map[(2, 2)] = -(p.t_i + p.t_e) / sum;
    e_map[(2, 2)] = p.e_gradient_coeff();
    Ok(DarcyMaps { g_matrix: g.to_f64(), u_map, e_map, n_background: n })
}
