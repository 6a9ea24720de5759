//! Three-dimensional FFT built from one-dimensional passes.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

#[derive(Clone)]
pub struct Fft3 {
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft3({})", self.n)
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn transform(&self, data: &mut [C64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);
        let mut lines = vec![C64::new(0.0, 0.0); data.len()];
        // axis 1 then axis 0, each gathered into contiguous rows and scattered back
        for axis in [1, 0] {
            let slot = |i: usize, j: usize, l: usize| if axis == 1 { (i * n + l) * n + j } else { (j * n + l) * n + i };
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        lines[slot(i, j, l)] = data[(i * n + j) * n + l];
                    }
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        data[(i * n + j) * n + l] = lines[slot(i, j, l)];
                    }
                }
            }
        }
    }

    /// Point values `Σ_k û_k e^{ik·x}` from coefficients.
    pub fn to_physical(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut d = coeffs.to_vec();
        self.transform(&mut d, &self.inv);
        d
    }

    /// Coefficients from point values.
    pub fn to_spectral(&self, values: &[C64]) -> Vec<C64> {
        let mut d = values.to_vec();
        self.transform(&mut d, &self.fwd);
        let s = 1.0 / d.len() as f64;
        d.iter_mut().for_each(|z| *z *= s);
        d
    }

    /// Point values of two real fields from their coefficients with one
    /// complex transform.
    pub fn to_physical_pair(&self, a: &[C64], b: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let mut d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x + C64::i() * y).collect();
        self.transform(&mut d, &self.inv);
        (d.iter().map(|z| z.re).collect(), d.iter().map(|z| z.im).collect())
    }

    /// Coefficients of two real fields with one complex transform.
    pub fn to_spectral_pair(&self, a: &[f64], b: &[f64]) -> (Vec<C64>, Vec<C64>) {
        let v: Vec<C64> = a.iter().zip(b).map(|(&x, &y)| C64::new(x, y)).collect();
        let d = self.to_spectral(&v);
        let n = self.n;
        let neg = |i: usize| (n - i) % n;
        let mut fa = vec![C64::new(0.0, 0.0); d.len()];
        let mut fb = vec![C64::new(0.0, 0.0); d.len()];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let idx = (i * n + j) * n + l;
                    let m = d[(neg(i) * n + neg(j)) * n + neg(l)].conj();
                    fa[idx] = (d[idx] + m) * 0.5;
                    fb[idx] = (d[idx] - m) * C64::new(0.0, -0.5);
                }
            }
        }
        (fa, fb)
    }
}
