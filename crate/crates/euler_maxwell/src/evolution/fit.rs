//! Power-law decay fits and fitted constants of exponential error bounds.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub amplitude: f64,
    /// Largest `|value/(A(1+t)^p) − 1|` on the window.
    pub residual: f64,
    pub window: (f64, f64),
    /// Rate of an exponential factor when one is fitted, else zero.
    pub rate_constant: f64,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Least-squares line through `(log(1+t), log value)` for `t` in the window.
pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let mut pts = Vec::new();
    for (idx, &(t, v)) in series.iter().enumerate() {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::NonPositiveSample(idx));
        }
        pts.push(((1.0 + t).ln(), v.ln()));
    }
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_FIT_SAMPLES, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all samples share one time".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = pts.iter().map(|p| ((p.1 - intercept - exponent * p.0).exp() - 1.0).abs()).fold(0.0, f64::max);
    Ok(DecayFit { exponent, amplitude: intercept.exp(), residual, window, rate_constant: 0.0 })
}

/// One observation `value ≤ C·envelope(rate, k, t)·initial` of an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub k: f64,
    pub t: f64,
    pub value: f64,
    pub initial: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundFit {
    pub rate: f64,
    pub constant: f64,
}

/// Smallest `C` for each candidate rate; returns the largest rate whose
/// constant is within a factor two of the best one.
pub fn fit_bound(samples: &[BoundSample], rates: &[f64], envelope: impl Fn(f64, f64, f64) -> f64) -> Result<BoundFit> {
    if samples.is_empty() || rates.is_empty() {
        return Err(Error::InvalidInput("bound fit needs samples and candidate rates".into()));
    }
    let constant = |r: f64| {
        samples
            .iter()
            .filter(|s| s.initial > 0.0)
            .map(|s| s.value / (s.initial * envelope(r, s.k, s.t)))
            .fold(0.0, f64::max)
    };
    let fits: Vec<BoundFit> = rates.iter().map(|&r| BoundFit { rate: r, constant: constant(r) }).collect();
    let best = fits.iter().map(|f| f.constant).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::InvalidInput("no candidate rate gives a finite constant".into()));
    }
    Ok(*fits
        .iter()
        .filter(|f| f.constant <= 2.0 * best)
        .max_by(|a, b| a.rate.total_cmp(&b.rate))
        .expect("the best fit qualifies"))
}
