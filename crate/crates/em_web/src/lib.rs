//! Browser bindings: dispersion curves, decay curves with fitted exponents
//! and Darcy response maps, returned as flat `Float64Array`s of rows.

use euler_maxwell::darcy::darcy_maps;
use euler_maxwell::em::em_eigenvalues;
use euler_maxwell::evolution::{decay_fit, radial_norm_series, IsotropicDatum, RadialQuadrature};
use euler_maxwell::fluid::fluid_eigenvalues;
use euler_maxwell::params::validate;
use euler_maxwell::{PlasmaParams, RawParams};
use wasm_bindgen::prelude::*;

fn js(e: euler_maxwell::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|j| lo * (hi / lo).powf(j as f64 / (n - 1) as f64)).collect()
}

#[wasm_bindgen]
pub struct Lab {
    params: PlasmaParams,
}

#[wasm_bindgen]
impl Lab {
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(m_i: f64, m_e: f64, t_i: f64, t_e: f64, nu_i: f64, nu_e: f64, e: f64, c: f64) -> Result<Lab, JsError> {
        let raw = RawParams { m_i, m_e, t_i, t_e, nu_i, nu_e, e, c };
        Ok(Lab { params: validate(&raw).map_err(js)? })
    }

    pub fn mu1(&self) -> f64 {
        self.params.mu1()
    }

    pub fn mu2(&self) -> f64 {
        self.params.mu2()
    }

    /// Rows `[k, Re λ₁, Im λ₁, …, Re λ₄, Im λ₄]` of the fluid (`em = false`)
    /// or electromagnetic branches on a log grid.
    pub fn dispersion(&self, em: bool, k_min: f64, k_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
        let mut out = Vec::with_capacity(9 * n);
        for k in log_grid(k_min, k_max, n) {
            let lam = if em { em_eigenvalues(&self.params, k) } else { fluid_eigenvalues(&self.params, k) };
            // near-coincident roots are skipped rather than failing the whole curve
            let Ok(lam) = lam else { continue };
            out.push(k);
            for l in lam {
                out.extend([l.re, l.im]);
            }
        }
        Ok(out)
    }

    /// Rows `[t, ‖U‖, ‖ρ_i − n̄‖, ‖u_i − ū_i‖, ‖E − Ē‖, ‖B − B̄‖]` for Gaussian
    /// data, followed by one row of fitted exponents (first entry `NaN`).
    pub fn decay_curves(&self, t_min: f64, t_max: f64, n_t: usize, nodes: usize) -> Result<Vec<f64>, JsError> {
        let quad = RadialQuadrature::for_window(&self.params, t_min, nodes).map_err(js)?;
        let times = log_grid(t_min, t_max, n_t);
        let series =
            radial_norm_series(&self.params, &IsotropicDatum::standard_generic(), &quad, &times).map_err(js)?;
        let names = ["total", "rho_i_diff", "u_i_diff", "e_diff", "b_diff"];
        let mut out = Vec::with_capacity(6 * (series.len() + 1));
        for s in &series {
            out.push(s.t);
            out.extend(names.iter().map(|n| s.get(n).unwrap_or(f64::NAN)));
        }
        out.push(f64::NAN);
        for n in names {
            let pts: Vec<(f64, f64)> = series.iter().map(|s| (s.t, s.get(n).unwrap_or(f64::NAN))).collect();
            out.push(decay_fit(&pts, (t_min, t_max)).map(|f| f.exponent).unwrap_or(f64::NAN));
        }
        Ok(out)
    }

    /// Rows `[|B|, U₁₁, U₁₂, U₃₃, E₁₁, E₁₂, E₃₃]` of the maps `n·u = U∇n`,
    /// `n·E = E∇n` with `B` along the third axis, background density `n`.
    pub fn darcy_map(&self, b_max: f64, n: usize, density: f64) -> Result<Vec<f64>, JsError> {
        let mut out = Vec::with_capacity(7 * n);
        for j in 0..n.max(2) {
            let b = b_max * j as f64 / (n.max(2) - 1) as f64;
            let m = darcy_maps(&self.params, density, b).map_err(js)?;
            out.extend([
                b,
                m.u_map[(0, 0)],
                m.u_map[(0, 1)],
                m.u_map[(2, 2)],
                m.e_map[(0, 0)],
                m.e_map[(0, 1)],
                m.e_map[(2, 2)],
            ]);
        }
        Ok(out)
    }
}
