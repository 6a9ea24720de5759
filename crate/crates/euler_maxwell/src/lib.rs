//! Linearized and weakly nonlinear two-fluid Euler–Maxwell system with
//! collisional damping: per-mode spectral solutions, diffusion-wave
//! profiles, Darcy-law maps, decay-rate fits and a pseudo-spectral
//! nonlinear solver.
//!
//! Units are Gaussian with `q_i = +e`, `q_e = -e`. Fourier conventions:
//! `∇ ↦ ik`, `∇× ↦ ik×`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod darcy;
pub mod em;
pub mod error;
pub mod evolution;
pub mod fluid;
pub mod lyapunov;
pub mod nonlinear;
pub mod params;
pub mod spectral;

pub use error::{Error, Result};
pub use lyapunov::ModeFullState;
pub use params::{PlasmaParams, RawParams, Species};

/// Complex double.
pub type C64 = num_complex::Complex64;
/// Complex 3-vector.
pub type CVec3 = nalgebra::Vector3<C64>;
/// Real 3-vector.
pub type RVec3 = nalgebra::Vector3<f64>;

pub(crate) const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `(0..n).map(f)`, in parallel when the `parallel` feature is on.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[inline]
pub(crate) fn cvec(v: &RVec3) -> CVec3 {
    v.map(|x| C64::new(x, 0.0))
}
