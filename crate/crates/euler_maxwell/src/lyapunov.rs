//! Time-frequency Lyapunov functional per Fourier mode.
//!
//! The functional is a Hermitian form `E(Û) = Û*HÛ` on the 14 complex
//! components. Its decay rate along exact trajectories is the smallest
//! generalized eigenvalue of `(−(HL + L*H), H)` on the Gauss-constraint
//! subspace, which gives the largest admissible `λ̂` for all data at once;
//! the finite-difference check on individual trajectories is kept as an
//! independent route.

use nalgebra::{DMatrix, SMatrix, SVector};

use crate::evolution::{mode_generator, ModePropagator};
use crate::params::{PlasmaParams, Species};
use crate::{c, cvec, re, CVec3, Error, RVec3, Result, C64, FOUR_PI};

pub type StateVector = SVector<C64, 14>;
pub type StateMatrix = SMatrix<C64, 14, 14>;

/// One Fourier coefficient of `(ρ_i, ρ_e, u_i, u_e, E, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFullState {
    pub rho_i: C64,
    pub rho_e: C64,
    pub u_i: CVec3,
    pub u_e: CVec3,
    pub e_field: CVec3,
    pub b_field: CVec3,
    pub k_vec: RVec3,
}

pub const GAUSS_TOL: f64 = 1e-9;

impl ModeFullState {
    pub fn zeros(k_vec: RVec3) -> Self {
        let z = CVec3::zeros();
        ModeFullState { rho_i: c(0.0, 0.0), rho_e: c(0.0, 0.0), u_i: z, u_e: z, e_field: z, b_field: z, k_vec }
    }

    /// Layout `[ρ_i, ρ_e, u_i, u_e, E, B]`.
    pub fn to_vector(&self) -> StateVector {
        let mut v = StateVector::zeros();
        v[0] = self.rho_i;
        v[1] = self.rho_e;
        for a in 0..3 {
            v[2 + a] = self.u_i[a];
            v[5 + a] = self.u_e[a];
            v[8 + a] = self.e_field[a];
            v[11 + a] = self.b_field[a];
        }
        v
    }

    pub fn from_vector(v: &StateVector, k_vec: RVec3) -> Self {
        let part = |o: usize| CVec3::new(v[o], v[o + 1], v[o + 2]);
        ModeFullState {
            rho_i: v[0],
            rho_e: v[1],
            u_i: part(2),
            u_e: part(5),
            e_field: part(8),
            b_field: part(11),
            k_vec,
        }
    }

    pub fn rho(&self, s: Species) -> C64 {
        match s {
            Species::Ion => self.rho_i,
            Species::Electron => self.rho_e,
        }
    }

    pub fn u(&self, s: Species) -> CVec3 {
        match s {
            Species::Ion => self.u_i,
            Species::Electron => self.u_e,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_vector().norm_squared()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_vector(&(self.to_vector() + o.to_vector()), self.k_vec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_vector(&(self.to_vector() - o.to_vector()), self.k_vec)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_vector(&(self.to_vector() * s), self.k_vec)
    }

    /// `(|ik·Ê − 4πe(ρ̂_i − ρ̂_e)|, |ik·B̂|)`.
    pub fn gauss_residual(&self, p: &PlasmaParams) -> (f64, f64) {
        let ik = cvec(&self.k_vec) * c(0.0, 1.0);
        let div_e = ik.dot(&self.e_field) - (self.rho_i - self.rho_e) * (FOUR_PI * p.e_charge);
        (div_e.norm(), ik.dot(&self.b_field).norm())
    }

    /// Magnitude the Gauss residuals are measured against.
    pub fn gauss_scale(&self, p: &PlasmaParams) -> f64 {
        (self.k_vec.norm() + FOUR_PI * p.e_charge) * self.norm_sqr().sqrt()
    }

    pub fn check_gauss(&self, p: &PlasmaParams) -> Result<()> {
        let (de, db) = self.gauss_residual(p);
        let tol = GAUSS_TOL * self.gauss_scale(p).max(f64::MIN_POSITIVE);
        if de > tol || db > tol {
            Err(Error::ConstraintViolation(format!("Gauss residuals ({de:e}, {db:e}) exceed {tol:e}")))
        } else {
            Ok(())
        }
    }

    /// Nearest constraint-consistent state: `B̂_∥` removed and `Ê_∥` slaved
    /// to the charge density; at `k = 0` the densities are averaged.
    pub fn gauss_projected(&self, p: &PlasmaParams) -> Self {
        let mut s = *self;
        let k = self.k_vec.norm();
        if k == 0.0 {
            let m = (s.rho_i + s.rho_e) * 0.5;
            s.rho_i = m;
            s.rho_e = m;
            return s;
        }
        let kh = cvec(&(self.k_vec / k));
        s.b_field -= kh * kh.dot(&s.b_field);
        let e_par = c(0.0, -FOUR_PI * p.e_charge / k) * (s.rho_i - s.rho_e);
        s.e_field += kh * (e_par - kh.dot(&s.e_field));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovWeights {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl LyapunovWeights {
    pub const ZERO: LyapunovWeights = LyapunovWeights { kappa1: 0.0, kappa2: 0.0 };
}

/// `(v|w) = v·w̄`.
fn inner(v: &CVec3, w: &CVec3) -> C64 {
    v.iter().zip(w.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// The functional evaluated directly from its definition.
pub fn mode_energy(p: &PlasmaParams, s: &ModeFullState, w: &LyapunovWeights) -> f64 {
    let k2 = s.k_vec.norm_squared();
    let d = 1.0 + k2;
    let ik = cvec(&s.k_vec) * c(0.0, 1.0);
    let mut e = (s.e_field.norm_squared() + s.b_field.norm_squared()) / FOUR_PI;
    for a in Species::BOTH {
        let (m, t, q) = (p.mass(a), p.temp(a), p.charge(a));
        let (rho, u) = (s.rho(a), s.u(a));
        e += t * rho.norm_sqr() + m * u.norm_squared();
        e += w.kappa1 * m * inner(&u, &(ik * rho)).re / d;
        e -= w.kappa1 * FOUR_PI * m * q / t * k2 * inner(&u, &s.e_field).re / (d * d);
    }
    let curl_b = ik.cross(&s.b_field);
    e += w.kappa1 * w.kappa2 * inner(&s.e_field, &(-curl_b)).re / (d * d);
    e
}

/// Hermitian matrix `H` with `mode_energy = Û*HÛ`.
pub fn energy_form(p: &PlasmaParams, k_vec: &RVec3, w: &LyapunovWeights) -> StateMatrix {
    let mut h = StateMatrix::zeros();
    let k2 = k_vec.norm_squared();
    let d = 1.0 + k2;
    // Adds Re(conj(x_a)·m·x_b) to the form.
    let mut add = |a: usize, b: usize, m: C64| {
        h[(a, b)] += m * 0.5;
        h[(b, a)] += m.conj() * 0.5;
    };
    for (idx, sp) in Species::BOTH.iter().enumerate() {
        let (m, t, q) = (p.mass(*sp), p.temp(*sp), p.charge(*sp));
        let (rho, u0) = (idx, 2 + 3 * idx);
        add(rho, rho, re(t));
        let cross_e = -w.kappa1 * FOUR_PI * m * q / t * k2 / (d * d);
        for j in 0..3 {
            add(u0 + j, u0 + j, re(m));
            // Re(u_j·conj(ik_jρ)) = Re(conj(ρ)·(−ik_j)·u_j)
            add(rho, u0 + j, c(0.0, -w.kappa1 * m * k_vec[j] / d));
            add(8 + j, u0 + j, re(cross_e));
        }
    }
    for j in 0..6 {
        add(8 + j, 8 + j, re(1.0 / FOUR_PI));
    }
    // Re(E·conj(−ik×B)) = Re(Σ conj(B_b)·iX_{jb}·E_j) with (k×v)_j = Σ_b X_{jb}v_b.
    let x = cross_matrix(k_vec);
    let w3 = w.kappa1 * w.kappa2 / (d * d);
    for j in 0..3 {
        for b in 0..3 {
            if x[(j, b)] != 0.0 {
                add(11 + b, 8 + j, c(0.0, w3 * x[(j, b)]));
            }
        }
    }
    h
}

fn cross_matrix(k: &RVec3) -> nalgebra::Matrix3<f64> {
    nalgebra::Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0)
}

/// Columns spanning the Gauss-constraint subspace at `k ≠ 0` (not orthonormal).
pub fn constraint_basis(p: &PlasmaParams, k_vec: &RVec3) -> Result<SMatrix<C64, 14, 12>> {
    let k = k_vec.norm();
    if !(k > 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let kh = k_vec / k;
    let trial = if kh.x.abs() < 0.9 { RVec3::x() } else { RVec3::y() };
    let e1 = (trial - kh * kh.dot(&trial)).normalize();
    let e2 = kh.cross(&e1);
    let mut q = SMatrix::<C64, 14, 12>::zeros();
    let e_par = -FOUR_PI * p.e_charge / k;
    // densities with their slaved longitudinal field
    for (col, sign) in [(0usize, 1.0), (1, -1.0)] {
        q[(col, col)] = re(1.0);
        for a in 0..3 {
            q[(8 + a, col)] = c(0.0, sign * e_par * kh[a]);
        }
    }
    for j in 0..6 {
        q[(2 + j, 2 + j)] = re(1.0);
    }
    for (n, v) in [e1, e2].iter().enumerate() {
        for a in 0..3 {
            q[(8 + a, 8 + n)] = re(v[a]);
            q[(11 + a, 10 + n)] = re(v[a]);
        }
    }
    Ok(q)
}

/// Eigenvalues of the pencil `(a, b)` with `b` Hermitian positive definite,
/// ascending. `None` if `b` is not positive definite.
pub(crate) fn pencil_eigenvalues(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Option<Vec<f64>> {
    let chol = b.clone().cholesky()?;
    let l = chol.l();
    let y = l.solve_lower_triangular(a)?;
    let m = l.solve_lower_triangular(&y.adjoint())?.adjoint();
    let herm = (&m + m.adjoint()) * re(0.5);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Some(ev)
}

fn restrict(q: &SMatrix<C64, 14, 12>, m: &StateMatrix) -> DMatrix<C64> {
    let r = q.adjoint() * m * q;
    DMatrix::from_fn(12, 12, |i, j| r[(i, j)])
}

/// Spectral summary of the functional at one wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRate {
    pub k_mag: f64,
    /// Smallest `r` with `dE/dt ≤ −r E` along every constrained trajectory.
    pub rate: f64,
    /// `rate·(1+|k|²)²/|k|²`.
    pub lambda_hat: f64,
    /// `max(c_max, 1/c_min)` over `c_min|Û|²_w ≤ E ≤ c_max|Û|²_w`.
    pub equivalence_ratio: f64,
}

pub fn mode_rate(p: &PlasmaParams, k_vec: &RVec3, w: &LyapunovWeights) -> Result<ModeRate> {
    let q = constraint_basis(p, k_vec)?;
    let h = energy_form(p, k_vec, w);
    let h0 = energy_form(p, k_vec, &LyapunovWeights::ZERO);
    let l = mode_generator(p, k_vec);
    let s = -(h * l + l.adjoint() * h);
    let (hr, h0r, sr) = (restrict(&q, &h), restrict(&q, &h0), restrict(&q, &s));
    let not_pd = || Error::WeightSearchFailed("energy form is not positive definite".into());
    let eq = pencil_eigenvalues(&hr, &h0r).ok_or_else(not_pd)?;
    let (cmin, cmax) = (eq[0], eq[eq.len() - 1]);
    if !(cmin > 0.0) {
        return Err(not_pd());
    }
    let rate = pencil_eigenvalues(&sr, &hr).ok_or_else(not_pd)?[0];
    let k2 = k_vec.norm_squared();
    Ok(ModeRate {
        k_mag: k2.sqrt(),
        rate,
        lambda_hat: rate * (1.0 + k2).powi(2) / k2,
        equivalence_ratio: cmax.max(1.0 / cmin),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCheckReport {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// Richardson-extrapolated central differences of `E`.
    pub derivatives: Vec<f64>,
    /// `max_t (dE/dt)/E`; non-positive for a non-increasing functional.
    pub max_relative_derivative: f64,
    /// Largest `λ̂` with `dE/dt + λ̂|k|²/(1+|k|²)²E ≤ 0` on the grid.
    pub lambda_hat: f64,
    /// Smallest `Ĉ` with `|Û(t)| ≤ Ĉe^{−λ̂|k|²t/(1+|k|²)²}|Û₀|` on the grid.
    pub bound_constant: f64,
}

impl DecayCheckReport {
    pub fn non_increasing(&self, tol: f64) -> bool {
        self.max_relative_derivative <= tol
    }
}

pub fn lyapunov_decay_check(
    p: &PlasmaParams,
    w: &LyapunovWeights,
    k_vec: &RVec3,
    state0: &ModeFullState,
    t_grid: &[f64],
) -> Result<DecayCheckReport> {
    state0.check_gauss(p)?;
    let prop = ModePropagator::new(p, k_vec.norm())?;
    let s0 = ModeFullState { k_vec: *k_vec, ..*state0 };
    let at = |t: f64| prop.propagate(p, &s0, t);
    let energy = |t: f64| mode_energy(p, &at(t), w);
    let k2 = k_vec.norm_squared();
    let scale = k2 / (1.0 + k2).powi(2);
    let mut energies = Vec::with_capacity(t_grid.len());
    let mut derivatives = Vec::with_capacity(t_grid.len());
    let mut max_rel = f64::NEG_INFINITY;
    let mut lambda_hat = f64::INFINITY;
    for &t in t_grid {
        let h = 1e-4 * (1.0 + t);
        let central = |h: f64| (energy(t + h) - energy(t - h)) / (2.0 * h);
        let d = (4.0 * central(h / 2.0) - central(h)) / 3.0;
        let e = energy(t);
        energies.push(e);
        derivatives.push(d);
        if e > 0.0 {
            max_rel = max_rel.max(d / e);
            lambda_hat = lambda_hat.min(-d / (e * scale));
        }
    }
    let lambda_hat = lambda_hat.max(0.0);
    let n0 = s0.norm_sqr().sqrt();
    let bound_constant = t_grid
        .iter()
        .map(|&t| at(t).norm_sqr().sqrt() / (n0 * (-lambda_hat * scale * t).exp()))
        .fold(0.0, f64::max);
    Ok(DecayCheckReport {
        times: t_grid.to_vec(),
        energies,
        derivatives,
        max_relative_derivative: max_rel,
        lambda_hat,
        bound_constant,
    })
}

/// Wavenumbers the weight search is validated on.
pub fn probe_wavenumbers() -> Vec<f64> {
    (0..=32).map(|j| 10f64.powf(-2.0 + 4.0 * j as f64 / 32.0)).collect()
}

/// A direction with no special alignment to the axes.
pub fn probe_direction() -> RVec3 {
    RVec3::new(0.48, -0.6, 0.64).normalize()
}

pub const KAPPA2: f64 = 0.1;
pub const MAX_EQUIVALENCE: f64 = 10.0;

/// Smallest normalized rate over the probes, or `None` if some probe fails
/// equivalence or positivity.
fn probe_min_rate(p: &PlasmaParams, kappa1: f64) -> Option<f64> {
    let w = LyapunovWeights { kappa1, kappa2: KAPPA2 };
    let mut worst = f64::INFINITY;
    for k in probe_wavenumbers() {
        let r = mode_rate(p, &(probe_direction() * k), &w).ok()?;
        if r.equivalence_ratio > MAX_EQUIVALENCE || !(r.lambda_hat > 0.0) {
            return None;
        }
        worst = worst.min(r.lambda_hat);
    }
    Some(worst)
}

/// `κ₂ = 0.1`; bisection brackets the admissible `κ₁` (equivalence ratio
/// below 10, positive rate on every probe), then `κ₁` is taken where the
/// smallest probe rate peaks. The admissible edge itself has rate near zero
/// at some probe, so it is not returned.
pub fn select_weights(p: &PlasmaParams) -> Result<LyapunovWeights> {
    let mut hi = 1.0_f64;
    let mut lo = 0.5_f64;
    while probe_min_rate(p, lo).is_none() {
        hi = lo;
        lo /= 2.0;
        if lo < 1e-8 {
            return Err(Error::WeightSearchFailed(format!(
                "no kappa1 in [1e-8, 1) passes with kappa2 = {KAPPA2}"
            )));
        }
    }
    for _ in 0..12 {
        let mid = (lo * hi).sqrt();
        if probe_min_rate(p, mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (mut best, mut best_rate) = (lo, 0.0);
    for j in 0..=24 {
        let k1 = lo * 2f64.powf(-j as f64 / 4.0);
        if let Some(r) = probe_min_rate(p, k1) {
            if r > best_rate {
                best = k1;
                best_rate = r;
            }
        }
    }
    Ok(LyapunovWeights { kappa1: best, kappa2: KAPPA2 })
}
