//! Small dense spectral toolkit shared by the per-mode propagators:
//! polynomial roots via companion matrices, eigenprojections of
//! diagonalizable matrices, branch continuation and the φ-functions of
//! exponential integrators.

use nalgebra::{DMatrix, SMatrix};

use crate::{c, Error, Result, C64};

/// Roots of the monic-normalized polynomial `coeffs[0] zⁿ + … + coeffs[n]`
/// (descending order) as eigenvalues of the companion matrix.
pub fn poly_roots(coeffs: &[f64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs[j + 1] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

pub fn poly_eval(coeffs: &[f64], z: C64) -> C64 {
    coeffs.iter().fold(c(0.0, 0.0), |acc, &a| acc * z + a)
}

fn poly_eval_with_derivative(coeffs: &[f64], z: C64) -> (C64, C64) {
    let mut p = c(0.0, 0.0);
    let mut dp = c(0.0, 0.0);
    for &a in coeffs {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Up to `steps` Newton iterations, each kept only if it lowers `|p|`.
pub fn newton_polish(coeffs: &[f64], mut z: C64, steps: usize) -> C64 {
    for _ in 0..steps {
        let (p, dp) = poly_eval_with_derivative(coeffs, z);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        if poly_eval(coeffs, next).norm() <= p.norm() {
            z = next;
        } else {
            break;
        }
    }
    z
}

/// Polished roots of a real polynomial of degree `D`.
pub fn roots_array<const D: usize>(coeffs: &[f64]) -> [C64; D] {
    debug_assert_eq!(coeffs.len(), D + 1);
    let r = poly_roots(coeffs);
    std::array::from_fn(|j| newton_polish(coeffs, r[j], 3))
}

/// Smallest pairwise separation relative to `1 + max|λ|`.
pub fn relative_gap(lambda: &[C64]) -> f64 {
    let scale = 1.0 + lambda.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut gap = f64::INFINITY;
    for j in 0..lambda.len() {
        for l in j + 1..lambda.len() {
            gap = gap.min((lambda[j] - lambda[l]).norm());
        }
    }
    gap / scale
}

pub const DEGENERACY_TOL: f64 = 1e-8;

pub fn check_distinct(lambda: &[C64]) -> Result<()> {
    let g = relative_gap(lambda);
    if g < DEGENERACY_TOL {
        Err(Error::DegenerateSpectrum(format!("relative eigenvalue gap {g:e}")))
    } else {
        Ok(())
    }
}

/// `P_j = Π_{ℓ≠j}(A − λ_ℓ I)/(λ_j − λ_ℓ)`.
pub fn spectral_projections<const D: usize>(
    a: &SMatrix<C64, D, D>,
    lambda: &[C64; D],
) -> Result<[SMatrix<C64, D, D>; D]> {
    check_distinct(lambda)?;
    let id = SMatrix::<C64, D, D>::identity();
    Ok(std::array::from_fn(|j| {
        let mut p = id;
        for l in 0..D {
            if l != j {
                p = p * (a - id * lambda[l]) / (lambda[j] - lambda[l]);
            }
        }
        p
    }))
}

/// Eigenvalues and eigenprojections of a diagonalizable `D×D` symbol.
#[derive(Debug, Clone)]
pub struct SpectralDecomp<const D: usize> {
    pub lambda: [C64; D],
    pub proj: [SMatrix<C64, D, D>; D],
}

impl<const D: usize> SpectralDecomp<D> {
    pub fn new(a: &SMatrix<C64, D, D>, lambda: [C64; D]) -> Result<Self> {
        let proj = spectral_projections(a, &lambda)?;
        Ok(SpectralDecomp { lambda, proj })
    }

    /// `f(A) = Σ_j f(λ_j) P_j`.
    pub fn func(&self, f: impl Fn(C64) -> C64) -> SMatrix<C64, D, D> {
        let mut m = SMatrix::<C64, D, D>::zeros();
        for j in 0..D {
            m += self.proj[j] * f(self.lambda[j]);
        }
        m
    }

    pub fn exp(&self, t: f64) -> SMatrix<C64, D, D> {
        self.func(|z| (z * t).exp())
    }

    pub fn reconstruct(&self) -> SMatrix<C64, D, D> {
        self.func(|z| z)
    }

    /// Max-norm residuals of `ΣP_j − I`, `P_jP_l − δ_{jl}P_j` and `ΣλP − A`.
    pub fn algebra_residuals(&self, a: &SMatrix<C64, D, D>) -> [f64; 3] {
        let maxabs = |m: &SMatrix<C64, D, D>| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let sum: SMatrix<C64, D, D> = self.proj.iter().sum();
        let completeness = maxabs(&(sum - SMatrix::identity()));
        let mut orth = 0.0_f64;
        for j in 0..D {
            for l in 0..D {
                let pp = self.proj[j] * self.proj[l];
                let r = if j == l { pp - self.proj[j] } else { pp };
                orth = orth.max(maxabs(&r) / (1.0 + maxabs(&self.proj[j]) * maxabs(&self.proj[l])));
            }
        }
        let recon = maxabs(&(self.reconstruct() - a)) / (1.0 + maxabs(a));
        [completeness, orth, recon]
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..d {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out
}

/// Returns (assignment, best cost, runner-up cost) where `cand[perm[j]]`
/// continues branch `j`.
fn assign(pred: &[C64], cand: &[C64]) -> (Vec<usize>, f64, f64) {
    let mut best = (vec![], f64::INFINITY);
    let mut second = f64::INFINITY;
    for p in permutations(pred.len()) {
        let cost: f64 = p.iter().enumerate().map(|(j, &i)| (cand[i] - pred[j]).norm_sqr()).sum();
        if cost < best.1 {
            second = best.1;
            best = (p, cost);
        } else if cost < second {
            second = cost;
        }
    }
    (best.0, best.1, second)
}

/// Tracks labelled roots from `k_ref` (where they are `start`) to `k` along a
/// geometric path, matching by minimal total displacement.
pub fn continue_branches<const D: usize>(
    roots_at: impl Fn(f64) -> [C64; D],
    k_ref: f64,
    start: [C64; D],
    k: f64,
) -> [C64; D] {
    let mut cur = start;
    let mut prev: Option<([C64; D], f64)> = None;
    let mut kc = k_ref;
    let target = k.ln();
    let max_step = 1.25_f64.ln();
    while (target - kc.ln()).abs() > 1e-14 {
        let mut step = (target - kc.ln()).clamp(-max_step, max_step);
        loop {
            let kn = (kc.ln() + step).exp();
            let pred: [C64; D] = match prev {
                Some((p, dl)) if dl.abs() > 0.0 => std::array::from_fn(|j| cur[j] + (cur[j] - p[j]) * (step / dl)),
                _ => cur,
            };
            let cand = roots_at(kn);
            let (perm, best, second) = assign(&pred, &cand);
            if second < 4.0 * best && step.abs() > 1e-6 {
                step /= 2.0;
                continue;
            }
            prev = Some((cur, step));
            cur = std::array::from_fn(|j| cand[perm[j]]);
            kc = kn;
            break;
        }
    }
    cur
}

/// `φ₁(z) = (eᶻ − 1)/z`.
pub fn phi1(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let mut term = c(1.0, 0.0);
        let mut sum = term;
        for n in 1..24 {
            term = term * z / (n as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `φ₂(z) = (eᶻ − 1 − z)/z²`.
pub fn phi2(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let mut term = c(0.5, 0.0);
        let mut sum = term;
        for n in 1..24 {
            term = term * z / (n as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}
