//! Fourier coefficients on the periodic lattice `k = (2π/L)·n`, stored as
//! fourteen component arrays in FFT ordering.
//!
//! Convention: `u(x) = Σ_k û_k e^{ik·x}`, so `‖u‖²_{L²} = L³ Σ|û_k|²`.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::{mode_profile, ModeOperator, ModePropagator, ProfileVariant};
use crate::lyapunov::ModeFullState;
use crate::params::PlasmaParams;
use crate::{c, par_map, Error, RVec3, Result, C64};

pub const N_COMPONENTS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub n: usize,
    pub box_length: f64,
    /// `comps[c][idx]`, component order as in [`ModeFullState::to_vector`].
    pub comps: Vec<Vec<C64>>,
}

/// Component groups of a solution field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    P1i,
    P1e,
    P2i,
    P2e,
    P3,
    P4,
    All,
}

impl Selector {
    pub const PARTITION: [Selector; 6] =
        [Selector::P1i, Selector::P1e, Selector::P2i, Selector::P2e, Selector::P3, Selector::P4];

    pub fn components(self) -> std::ops::Range<usize> {
        match self {
            Selector::P1i => 0..1,
            Selector::P1e => 1..2,
            Selector::P2i => 2..5,
            Selector::P2e => 5..8,
            Selector::P3 => 8..11,
            Selector::P4 => 11..14,
            Selector::All => 0..14,
        }
    }
}

/// Signed wave index of FFT slot `i`.
pub fn wave_index(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl GridField {
    pub fn zeros(n: usize, box_length: f64) -> Self {
        GridField { n, box_length, comps: vec![vec![c(0.0, 0.0); n * n * n]; N_COMPONENTS] }
    }

    /// Builds a field from a per-mode rule; the Nyquist planes of even grids are left at zero.
    pub fn from_modes(n: usize, box_length: f64, f: impl Fn([i64; 3], RVec3) -> ModeFullState + Sync + Send) -> Self {
        let mut g = GridField::zeros(n, box_length);
        let modes = par_map(g.len(), |idx| {
            let w = g.wave(idx);
            if g.is_nyquist(&w) {
                None
            } else {
                Some(f(w, g.k_of(&w)))
            }
        });
        for (idx, m) in modes.iter().enumerate() {
            if let Some(m) = m {
                g.set_mode(idx, m);
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn k_unit(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn wave(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [wave_index(idx / (n * n), n), wave_index((idx / n) % n, n), wave_index(idx % n, n)]
    }

    pub fn index_of(&self, w: [i64; 3]) -> usize {
        let n = self.n as i64;
        let s = |x: i64| x.rem_euclid(n) as usize;
        (s(w[0]) * self.n + s(w[1])) * self.n + s(w[2])
    }

    pub fn is_nyquist(&self, w: &[i64; 3]) -> bool {
        self.n.is_multiple_of(2) && w.iter().any(|&x| x == -(self.n as i64) / 2)
    }

    pub fn k_of(&self, w: &[i64; 3]) -> RVec3 {
        RVec3::new(w[0] as f64, w[1] as f64, w[2] as f64) * self.k_unit()
    }

    pub fn k_vec(&self, idx: usize) -> RVec3 {
        self.k_of(&self.wave(idx))
    }

    /// `|n|²` of slot `idx`; modes sharing it share a propagator.
    pub fn shell(&self, idx: usize) -> i64 {
        self.wave(idx).iter().map(|x| x * x).sum()
    }

    pub fn mode(&self, idx: usize) -> ModeFullState {
        let mut v = crate::lyapunov::StateVector::zeros();
        for (j, comp) in self.comps.iter().enumerate() {
            v[j] = comp[idx];
        }
        ModeFullState::from_vector(&v, self.k_vec(idx))
    }

    pub fn set_mode(&mut self, idx: usize, m: &ModeFullState) {
        let v = m.to_vector();
        for (j, comp) in self.comps.iter_mut().enumerate() {
            comp[idx] = v[j];
        }
    }

    /// Index of `−k`.
    pub fn conj_index(&self, idx: usize) -> usize {
        let w = self.wave(idx);
        self.index_of([-w[0], -w[1], -w[2]])
    }

    /// Largest `|û(−k) − conj(û(k))|`.
    pub fn reality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for comp in &self.comps {
            for idx in 0..self.len() {
                worst = worst.max((comp[self.conj_index(idx)] - comp[idx].conj()).norm());
            }
        }
        worst
    }

    /// Enforces reality symmetry by averaging `k` with `−k`.
    pub fn symmetrize(&mut self) {
        let conj: Vec<usize> = (0..self.len()).map(|i| self.conj_index(i)).collect();
        for comp in self.comps.iter_mut() {
            let old = comp.clone();
            for (idx, z) in comp.iter_mut().enumerate() {
                *z = (old[idx] + old[conj[idx]].conj()) * 0.5;
            }
        }
    }

    /// Largest Gauss residual over the lattice, relative to the field scale.
    pub fn gauss_residual(&self, p: &PlasmaParams) -> f64 {
        let scale = (0..self.len()).map(|i| self.mode(i).gauss_scale(p)).fold(0.0, f64::max);
        let worst = (0..self.len())
            .map(|i| {
                let (a, b) = self.mode(i).gauss_residual(p);
                a.max(b)
            })
            .fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn norm_sqr(&self, sel: Selector) -> f64 {
        let vol = self.box_length.powi(3);
        self.comps[sel.components()].iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum::<f64>() * vol
    }

    pub fn axpy(&mut self, a: C64, x: &GridField) {
        for (cs, cx) in self.comps.iter_mut().zip(&x.comps) {
            for (s, v) in cs.iter_mut().zip(cx) {
                *s += a * v;
            }
        }
    }

    pub fn sub(&self, o: &GridField) -> GridField {
        let mut d = self.clone();
        d.axpy(c(-1.0, 0.0), o);
        d
    }

    pub fn scale(&mut self, a: C64) {
        for cs in self.comps.iter_mut() {
            for s in cs.iter_mut() {
                *s *= a;
            }
        }
    }

    pub fn map_modes(&self, f: impl Fn(usize, &ModeFullState) -> Result<ModeFullState> + Sync + Send) -> Result<GridField> {
        let out = par_map(self.len(), |idx| f(idx, &self.mode(idx)));
        let mut g = GridField::zeros(self.n, self.box_length);
        for (idx, m) in out.into_iter().enumerate() {
            let m = m.map_err(|e| Error::AtMode { index: self.wave(idx), source: Box::new(e) })?;
            g.set_mode(idx, &m);
        }
        Ok(g)
    }
}

/// Propagators cached per shell `|n|²` of a lattice.
#[derive(Debug, Clone)]
pub struct ShellPropagators {
    props: HashMap<i64, ModePropagator>,
}

impl ShellPropagators {
    pub fn new(p: &PlasmaParams, field: &GridField) -> Result<Self> {
        let mut reps: HashMap<i64, usize> = HashMap::new();
        for idx in 0..field.len() {
            reps.entry(field.shell(idx)).or_insert(idx);
        }
        let mut reps: Vec<(i64, usize)> = reps.into_iter().collect();
        reps.sort_unstable();
        let built = par_map(reps.len(), |j| {
            let (shell, idx) = reps[j];
            (shell, idx, ModePropagator::new(p, field.k_unit() * (shell as f64).sqrt()))
        });
        let mut props = HashMap::new();
        for (shell, idx, prop) in built {
            let prop = prop.map_err(|e| Error::AtMode { index: field.wave(idx), source: Box::new(e) })?;
            props.insert(shell, prop);
        }
        Ok(ShellPropagators { props })
    }

    pub fn operators(&self, f: impl Fn(C64) -> C64 + Sync) -> HashMap<i64, ModeOperator> {
        self.props.iter().map(|(s, prop)| (*s, prop.operator(&f))).collect()
    }

    /// Applies `ops` modewise.
    pub fn apply(p: &PlasmaParams, ops: &HashMap<i64, ModeOperator>, field: &GridField) -> GridField {
        field
            .map_modes(|idx, m| Ok(ops[&field.shell(idx)].apply(p, m)))
            .expect("operator application does not fail")
    }
}

/// `e^{tL}` over the lattice.
pub fn linear_evolve(p: &PlasmaParams, field0: &GridField, t: f64) -> Result<GridField> {
    let shells = ShellPropagators::new(p, field0)?;
    let ops = shells.operators(|z| (z * t).exp());
    Ok(ShellPropagators::apply(p, &ops, field0))
}

pub fn diffusion_profiles_with(p: &PlasmaParams, field0: &GridField, t: f64, variant: ProfileVariant) -> GridField {
    field0.map_modes(|_, m| Ok(mode_profile(p, m, t, variant))).expect("profiles do not fail")
}

pub fn diffusion_profiles(p: &PlasmaParams, field0: &GridField, t: f64) -> GridField {
    diffusion_profiles_with(p, field0, t, ProfileVariant::Darcy)
}

/// `‖profile_Darcy − profile_literal‖ / ‖profile_Darcy‖` of the velocity components.
pub fn profile_discrepancy(p: &PlasmaParams, field0: &GridField, t: f64) -> f64 {
    let a = diffusion_profiles_with(p, field0, t, ProfileVariant::Darcy);
    let b = diffusion_profiles_with(p, field0, t, ProfileVariant::Literal);
    let d = a.sub(&b);
    let num = d.norm_sqr(Selector::P2i) + d.norm_sqr(Selector::P2e);
    let den = a.norm_sqr(Selector::P2i) + a.norm_sqr(Selector::P2e);
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// The field with every component outside `sel` zeroed.
pub fn projection_extract(field: &GridField, sel: Selector) -> GridField {
    let mut out = field.clone();
    let keep = sel.components();
    for (j, comp) in out.comps.iter_mut().enumerate() {
        if !keep.contains(&j) {
            comp.iter_mut().for_each(|z| *z = c(0.0, 0.0));
        }
    }
    out
}

pub fn l2_norm(field: &GridField, sel: Selector) -> f64 {
    field.norm_sqr(sel).sqrt()
}
