//! Whole-space `L²` norms of isotropic data via Parseval and radial
//! Gauss–Legendre quadrature.
//!
//! `‖f‖² = (2π)⁻³ ∫ k² ∫_{S²} |f̂(kω)|² dω dk`. The integrands met here are
//! quadratic forms in `k̂` of degree at most two, so the six-point
//! octahedral rule on the sphere is exact.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use super::{mode_profile, ModePropagator, ProfileVariant};
use crate::lyapunov::ModeFullState;
use crate::params::{PlasmaParams, Species};
use crate::{c, cvec, par_map, re, CVec3, Error, RVec3, Result, FOUR_PI};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub k_max: f64,
}

impl RadialQuadrature {
    /// Gauss–Legendre in `x ∈ [0, 1]` with `k = k_max·x²`, which clusters
    /// nodes near `k = 0` where late-time integrands concentrate.
    pub fn new(n_nodes: usize, k_max: f64) -> Result<Self> {
        let n = NonZeroUsize::new(n_nodes).ok_or_else(|| Error::InvalidInput("need at least one node".into()))?;
        if !(k_max > 0.0) {
            return Err(Error::InvalidInput(format!("k_max must be positive, got {k_max}")));
        }
        let rule = GaussLegendre::new(n);
        let (mut nodes, mut weights) = (Vec::with_capacity(n_nodes), Vec::with_capacity(n_nodes));
        for &(xi, w) in rule.as_node_weight_pairs() {
            let x = 0.5 * (xi + 1.0);
            nodes.push(k_max * x * x);
            weights.push(0.5 * w * 2.0 * k_max * x);
        }
        Ok(RadialQuadrature { nodes, weights, k_max })
    }

    /// `k_max = 16/√(μ_min t_min)`.
    pub fn for_window(p: &PlasmaParams, t_min: f64, n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, 16.0 / (p.mu_min() * t_min).sqrt())
    }

    /// `∫₀^{k_max} f(k) dk`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&k, &w)| w * f(k)).sum()
    }

    /// `‖f‖²` for a radial amplitude `|f̂(k)|`.
    pub fn isotropic_norm_sqr(&self, amplitude: impl Fn(f64) -> f64) -> f64 {
        self.integrate(|k| FOUR_PI * k * k * amplitude(k).powi(2)) / (2.0 * PI).powi(3)
    }
}

/// `∫₀^∞ kⁿ e^{−ak²} dk = Γ((n+1)/2) / (2a^{(n+1)/2})`.
pub fn gaussian_moment(n: u32, a: f64) -> f64 {
    let s = (n as f64 + 1.0) / 2.0;
    gamma_half_integer(n + 1) / (2.0 * a.powf(s))
}

/// `Γ(m/2)` for a positive integer `m`.
fn gamma_half_integer(m: u32) -> f64 {
    let (mut g, mut x) = if m.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < m as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

pub fn octahedral_directions() -> [RVec3; 6] {
    [RVec3::x(), -RVec3::x(), RVec3::y(), -RVec3::y(), RVec3::z(), -RVec3::z()]
}

/// Initial data with the common envelope `e^{−|k|²/2}`.
#[derive(Debug, Clone, PartialEq)]
pub enum IsotropicDatum {
    /// `ρ̂_α = a_α g`, `û_α = w_α g`, `Ê_⊥ = P_⊥e g` with `Ê_∥` from Gauss's
    /// law, `B̂ = P_⊥b g`.
    Gaussian { rho: [f64; 2], u: [RVec3; 2], e: RVec3, b: RVec3 },
    /// Divergence-form data: `ρ̂_α = ik·F_α g`, `û_α = G_α g`,
    /// `Ê = 4πΣq_αF_α g`, `B̂ = 0`.
    Divergence { f: [RVec3; 2], g2: [RVec3; 2] },
}

impl IsotropicDatum {
    /// Neutral densities, distinct species velocities and a nonzero field.
    pub fn standard_generic() -> Self {
        IsotropicDatum::Gaussian {
            rho: [1.0, 1.0],
            u: [RVec3::new(0.3, -0.2, 0.5), RVec3::new(-0.4, 0.1, 0.2)],
            e: RVec3::new(0.1, 0.2, -0.1),
            b: RVec3::new(0.5, -0.3, 0.4),
        }
    }

    pub fn standard_special() -> Self {
        IsotropicDatum::Divergence {
            f: [RVec3::new(0.6, -0.2, 0.3), RVec3::new(-0.3, 0.6, 0.2)],
            g2: [RVec3::new(0.2, 0.1, -0.3), RVec3::new(-0.1, 0.3, 0.2)],
        }
    }

    /// Generic data with the same envelope and the same amplitudes, but the
    /// densities not in divergence form.
    pub fn matched_generic(&self, p: &PlasmaParams) -> Self {
        match self {
            IsotropicDatum::Gaussian { .. } => self.clone(),
            IsotropicDatum::Divergence { f, g2 } => IsotropicDatum::Gaussian {
                rho: [f[0].norm(), f[1].norm()],
                u: *g2,
                e: (f[0] - f[1]) * (FOUR_PI * p.e_charge),
                b: RVec3::zeros(),
            },
        }
    }

    pub fn mode(&self, p: &PlasmaParams, k_vec: &RVec3) -> ModeFullState {
        let k = k_vec.norm();
        let g = (-0.5 * k * k).exp();
        let ik = cvec(k_vec) * c(0.0, 1.0);
        match self {
            IsotropicDatum::Gaussian { rho, u, e, b } => {
                let mut s = ModeFullState::zeros(*k_vec);
                s.rho_i = re(rho[0] * g);
                s.rho_e = re(rho[1] * g);
                s.u_i = cvec(&(u[0] * g));
                s.u_e = cvec(&(u[1] * g));
                s.e_field = cvec(&(e * g));
                s.b_field = cvec(&(b * g));
                s.gauss_projected(p)
            }
            IsotropicDatum::Divergence { f, g2 } => {
                let fi: CVec3 = cvec(&(f[0] * g));
                let fe: CVec3 = cvec(&(f[1] * g));
                ModeFullState {
                    rho_i: ik.dot(&fi),
                    rho_e: ik.dot(&fe),
                    u_i: cvec(&(g2[0] * g)),
                    u_e: cvec(&(g2[1] * g)),
                    e_field: (fi - fe) * re(FOUR_PI * p.e_charge),
                    b_field: CVec3::zeros(),
                    k_vec: *k_vec,
                }
            }
        }
    }
}

/// Norms of the solution, of its distance to the diffusion waves and of the
/// waves themselves at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSample {
    pub t: f64,
    pub total: f64,
    pub rho: [f64; 2],
    pub u: [f64; 2],
    pub e: f64,
    pub b: f64,
    pub rho_diff: [f64; 2],
    pub u_diff: [f64; 2],
    pub e_diff: f64,
    pub b_diff: f64,
    pub n_bar: f64,
    pub u_bar: [f64; 2],
    pub e_bar: f64,
    pub b_bar: f64,
}

const N_QUANT: usize = 18;

impl NormSample {
    pub const NAMES: [&'static str; N_QUANT] = [
        "total", "rho_i", "rho_e", "u_i", "u_e", "e", "b", "rho_i_diff", "rho_e_diff", "u_i_diff", "u_e_diff",
        "e_diff", "b_diff", "n_bar", "u_i_bar", "u_e_bar", "e_bar", "b_bar",
    ];

    pub fn values(&self) -> [f64; N_QUANT] {
        [
            self.total,
            self.rho[0],
            self.rho[1],
            self.u[0],
            self.u[1],
            self.e,
            self.b,
            self.rho_diff[0],
            self.rho_diff[1],
            self.u_diff[0],
            self.u_diff[1],
            self.e_diff,
            self.b_diff,
            self.n_bar,
            self.u_bar[0],
            self.u_bar[1],
            self.e_bar,
            self.b_bar,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::NAMES.iter().position(|n| *n == name).map(|j| self.values()[j])
    }

    fn from_squares(t: f64, q: &[f64; N_QUANT]) -> Self {
        let r = q.map(f64::sqrt);
        NormSample {
            t,
            total: r[0],
            rho: [r[1], r[2]],
            u: [r[3], r[4]],
            e: r[5],
            b: r[6],
            rho_diff: [r[7], r[8]],
            u_diff: [r[9], r[10]],
            e_diff: r[11],
            b_diff: r[12],
            n_bar: r[13],
            u_bar: [r[14], r[15]],
            e_bar: r[16],
            b_bar: r[17],
        }
    }
}

fn squares(s: &ModeFullState, bar: &ModeFullState) -> [f64; N_QUANT] {
    let d = s.sub(bar);
    let sp = Species::BOTH;
    [
        s.norm_sqr(),
        s.rho_i.norm_sqr(),
        s.rho_e.norm_sqr(),
        s.u_i.norm_squared(),
        s.u_e.norm_squared(),
        s.e_field.norm_squared(),
        s.b_field.norm_squared(),
        d.rho(sp[0]).norm_sqr(),
        d.rho(sp[1]).norm_sqr(),
        d.u_i.norm_squared(),
        d.u_e.norm_squared(),
        d.e_field.norm_squared(),
        d.b_field.norm_squared(),
        bar.rho_i.norm_sqr(),
        bar.u_i.norm_squared(),
        bar.u_e.norm_squared(),
        bar.e_field.norm_squared(),
        bar.b_field.norm_squared(),
    ]
}

/// Norm series of `e^{tL}U₀` for isotropic data, one sample per time.
pub fn radial_norm_series(
    p: &PlasmaParams,
    datum: &IsotropicDatum,
    quad: &RadialQuadrature,
    times: &[f64],
) -> Result<Vec<NormSample>> {
    let dirs = octahedral_directions();
    let per_node = par_map(quad.nodes.len(), |j| -> Result<Vec<[f64; N_QUANT]>> {
        let k = quad.nodes[j];
        let prop = ModePropagator::new(p, k)?;
        let w = quad.weights[j] * k * k * (FOUR_PI / dirs.len() as f64) / (2.0 * PI).powi(3);
        let initial: Vec<ModeFullState> = dirs.iter().map(|d| datum.mode(p, &(d * k))).collect();
        Ok(times
            .iter()
            .map(|&t| {
                let op = prop.exp(t);
                let mut acc = [0.0; N_QUANT];
                for s0 in &initial {
                    let s = op.apply(p, s0);
                    let bar = mode_profile(p, s0, t, ProfileVariant::Darcy);
                    for (a, v) in acc.iter_mut().zip(squares(&s, &bar)) {
                        *a += w * v;
                    }
                }
                acc
            })
            .collect())
    });
    let mut total = vec![[0.0; N_QUANT]; times.len()];
    for node in per_node {
        for (acc, v) in total.iter_mut().zip(node?) {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
        }
    }
    Ok(times.iter().zip(&total).map(|(&t, q)| NormSample::from_squares(t, q)).collect())
}
