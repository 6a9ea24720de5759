//! Physical constants, the relaxation cubic `g(λ)` and the diffusion
//! coefficients.

use nalgebra::Matrix3;

use crate::spectral::{newton_polish, poly_roots};
use crate::{c, Error, Result, C64, FOUR_PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    Ion,
    Electron,
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::Ion, Species::Electron];

    pub fn name(self) -> &'static str {
        match self {
            Species::Ion => "i",
            Species::Electron => "e",
        }
    }
}

/// Unvalidated parameter record, field names as in the config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    pub m_i: f64,
    pub m_e: f64,
    pub t_i: f64,
    pub t_e: f64,
    pub nu_i: f64,
    pub nu_e: f64,
    pub e: f64,
    pub c: f64,
}

impl RawParams {
    pub const KEYS: [&'static str; 8] = ["m_i", "m_e", "T_i", "T_e", "nu_i", "nu_e", "e", "c"];

    pub fn unit() -> Self {
        RawParams { m_i: 1.0, m_e: 1.0, t_i: 1.0, t_e: 1.0, nu_i: 1.0, nu_e: 1.0, e: 1.0, c: 1.0 }
    }

    pub fn values(&self) -> [f64; 8] {
        [self.m_i, self.m_e, self.t_i, self.t_e, self.nu_i, self.nu_e, self.e, self.c]
    }

    pub fn from_values(v: [f64; 8]) -> Self {
        RawParams { m_i: v[0], m_e: v[1], t_i: v[2], t_e: v[3], nu_i: v[4], nu_e: v[5], e: v[6], c: v[7] }
    }

    /// Every parameter log-uniform in `[0.1, 10]`.
    pub fn random(rng: &mut impl rand::Rng) -> Self {
        Self::from_values(std::array::from_fn(|_| 10f64.powf(rng.random_range(-1.0..1.0))))
    }
}

/// Validated parameters. All eight fields are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmaParams {
    pub m_i: f64,
    pub m_e: f64,
    pub t_i: f64,
    pub t_e: f64,
    pub nu_i: f64,
    pub nu_e: f64,
    pub e_charge: f64,
    pub c_light: f64,
    mu1: f64,
    mu2: f64,
}

/// Checks positivity and precomputes `μ₁`, `μ₂`.
pub fn validate(raw: &RawParams) -> Result<PlasmaParams> {
    for (name, v) in RawParams::KEYS.iter().zip(raw.values()) {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveParameter(name.to_string()));
        }
    }
    let sum = raw.m_i * raw.nu_i + raw.m_e * raw.nu_e;
    let mu1 = (raw.t_i + raw.t_e) / sum;
    let mu2 = raw.c * raw.c * raw.m_i * raw.nu_i * raw.m_e * raw.nu_e / (FOUR_PI * raw.e * raw.e * sum);
    Ok(PlasmaParams {
        m_i: raw.m_i,
        m_e: raw.m_e,
        t_i: raw.t_i,
        t_e: raw.t_e,
        nu_i: raw.nu_i,
        nu_e: raw.nu_e,
        e_charge: raw.e,
        c_light: raw.c,
        mu1,
        mu2,
    })
}

impl PlasmaParams {
    pub fn unit() -> Self {
        validate(&RawParams::unit()).expect("unit parameters are valid")
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            m_i: self.m_i,
            m_e: self.m_e,
            t_i: self.t_i,
            t_e: self.t_e,
            nu_i: self.nu_i,
            nu_e: self.nu_e,
            e: self.e_charge,
            c: self.c_light,
        }
    }

    /// Ambipolar diffusion coefficient `(T_i+T_e)/(m_iν_i+m_eν_e)`.
    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    /// Magnetic diffusion coefficient.
    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn mu_min(&self) -> f64 {
        self.mu1.min(self.mu2)
    }

    /// `m_iν_i + m_eν_e`.
    pub fn friction_sum(&self) -> f64 {
        self.m_i * self.nu_i + self.m_e * self.nu_e
    }

    pub fn mass(&self, s: Species) -> f64 {
        match s {
            Species::Ion => self.m_i,
            Species::Electron => self.m_e,
        }
    }

    pub fn temp(&self, s: Species) -> f64 {
        match s {
            Species::Ion => self.t_i,
            Species::Electron => self.t_e,
        }
    }

    pub fn nu(&self, s: Species) -> f64 {
        match s {
            Species::Ion => self.nu_i,
            Species::Electron => self.nu_e,
        }
    }

    pub fn charge(&self, s: Species) -> f64 {
        match s {
            Species::Ion => self.e_charge,
            Species::Electron => -self.e_charge,
        }
    }

    /// Darcy weight `m_αν_α/(m_iν_i+m_eν_e)` of the density profile.
    pub fn density_weight(&self, s: Species) -> f64 {
        self.mass(s) * self.nu(s) / self.friction_sum()
    }

    /// `(T_im_eν_e − T_em_iν_i)/(e(m_iν_i+m_eν_e))`, the gradient coefficient of the
    /// asymptotic electric field.
    pub fn e_gradient_coeff(&self) -> f64 {
        (self.t_i * self.m_e * self.nu_e - self.t_e * self.m_i * self.nu_i) / (self.e_charge * self.friction_sum())
    }

    /// `4πe²(1/m_i + 1/m_e)`, the squared plasma frequency.
    pub fn omega_p2(&self) -> f64 {
        FOUR_PI * self.e_charge * self.e_charge * (1.0 / self.m_i + 1.0 / self.m_e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicBranch {
    ThreeRealDistinct,
    OneRealPlusConjugatePair,
    Degenerate,
}

/// `g(λ) = λ³ + c2 λ² + c1 λ + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicSpec {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub discriminant: f64,
    pub branch: CubicBranch,
}

impl CubicSpec {
    pub fn from_coeffs(c2: f64, c1: f64, c0: f64) -> Self {
        let terms = [
            18.0 * c2 * c1 * c0,
            -4.0 * c2.powi(3) * c0,
            c2 * c2 * c1 * c1,
            -4.0 * c1.powi(3),
            -27.0 * c0 * c0,
        ];
        let discriminant: f64 = terms.iter().sum();
        let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        let branch = if discriminant.abs() <= 1e-12 * scale {
            CubicBranch::Degenerate
        } else if discriminant > 0.0 {
            CubicBranch::ThreeRealDistinct
        } else {
            CubicBranch::OneRealPlusConjugatePair
        };
        CubicSpec { c2, c1, c0, discriminant, branch }
    }

    pub fn eval(&self, z: C64) -> C64 {
        ((z + self.c2) * z + self.c1) * z + self.c0
    }
}

pub fn relaxation_cubic(p: &PlasmaParams) -> CubicSpec {
    let e2 = p.e_charge * p.e_charge;
    let c2 = p.nu_i + p.nu_e;
    let c1 = p.nu_i * p.nu_e + p.omega_p2();
    let c0 = FOUR_PI * (e2 * p.nu_e / p.m_i + e2 * p.nu_i / p.m_e);
    CubicSpec::from_coeffs(c2, c1, c0)
}

/// Roots `σ₂, σ₃, σ₄` of `g`. For a conjugate pair the real root comes first,
/// then `Im > 0`, then `Im < 0`; three real roots are sorted by decreasing value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRoots {
    pub sigma: [C64; 3],
}

impl SigmaRoots {
    /// The real root inside `(−(ν_i+ν_e), 0)`.
    pub fn real_root(&self) -> f64 {
        self.sigma
            .iter()
            .min_by(|a, b| a.im.abs().total_cmp(&b.im.abs()))
            .map(|z| z.re)
            .unwrap_or(f64::NAN)
    }

    pub fn min_abs(&self) -> f64 {
        self.sigma.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn min_decay(&self) -> f64 {
        self.sigma.iter().map(|z| -z.re).fold(f64::INFINITY, f64::min)
    }
}

pub fn sigma_roots(cubic: &CubicSpec) -> Result<SigmaRoots> {
    if cubic.branch == CubicBranch::Degenerate {
        return Err(Error::DegenerateSpectrum(format!(
            "relaxation cubic has discriminant {:e}",
            cubic.discriminant
        )));
    }
    let coeffs = [1.0, cubic.c2, cubic.c1, cubic.c0];
    let mut r: Vec<C64> = poly_roots(&coeffs).into_iter().map(|z| newton_polish(&coeffs, z, 1)).collect();
    match cubic.branch {
        CubicBranch::ThreeRealDistinct => {
            for z in r.iter_mut() {
                z.im = 0.0;
            }
            r.sort_by(|a, b| b.re.total_cmp(&a.re));
        }
        _ => {
            r.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
            r[0].im = 0.0;
            let (re, im) = ((r[1].re + r[2].re) / 2.0, (r[1].im.abs() + r[2].im.abs()) / 2.0);
            r[1] = c(re, im);
            r[2] = c(re, -im);
        }
    }
    Ok(SigmaRoots { sigma: [r[0], r[1], r[2]] })
}

/// Generator of `(u_α, E)` along one Cartesian direction when no density or
/// magnetic coupling is present: `m_α∂u_α = q_αE − m_αν_αu_α`, `∂E = −4πΣq_αu_α`.
/// Its characteristic polynomial is `g`.
pub fn relaxation_matrix(p: &PlasmaParams) -> Matrix3<C64> {
    let e = p.e_charge;
    Matrix3::new(
        c(-p.nu_i, 0.0),
        c(0.0, 0.0),
        c(e / p.m_i, 0.0),
        c(0.0, 0.0),
        c(-p.nu_e, 0.0),
        c(-e / p.m_e, 0.0),
        c(-FOUR_PI * e, 0.0),
        c(FOUR_PI * e, 0.0),
        c(0.0, 0.0),
    )
}
