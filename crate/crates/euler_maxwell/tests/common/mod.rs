#![allow(dead_code)]

use euler_maxwell::{CVec3, ModeFullState, PlasmaParams, RawParams, RVec3, C64};
use ode_solvers::{Dop853, OutputType, SVector, System};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit() -> PlasmaParams {
    PlasmaParams::unit()
}

pub fn random_params(rng: &mut impl Rng) -> PlasmaParams {
    euler_maxwell::params::validate(&RawParams::random(rng)).unwrap()
}

pub fn random_c(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_cvec(rng: &mut impl Rng) -> CVec3 {
    CVec3::new(random_c(rng), random_c(rng), random_c(rng))
}

pub fn random_direction(rng: &mut impl Rng) -> RVec3 {
    loop {
        let v = RVec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random state at `k_vec`, projected onto the Gauss constraints.
pub fn random_mode(p: &PlasmaParams, k_vec: RVec3, rng: &mut impl Rng) -> ModeFullState {
    let s = ModeFullState {
        rho_i: random_c(rng),
        rho_e: random_c(rng),
        u_i: random_cvec(rng),
        u_e: random_cvec(rng),
        e_field: random_cvec(rng),
        b_field: random_cvec(rng),
        k_vec,
    };
    if k_vec.norm() > 0.0 {
        s.gauss_projected(p)
    } else {
        s
    }
}

pub fn rel_diff(a: &ModeFullState, b: &ModeFullState) -> f64 {
    a.sub(b).norm_sqr().sqrt() / a.norm_sqr().sqrt().max(b.norm_sqr().sqrt())
}

type Real28 = SVector<f64, 28>;

/// Linearized two-fluid system for one Fourier mode, written out from
/// `∂ρ + ∇·u = 0`, `m∂u + T∇ρ − qE + mνu = 0`, `∂E − c∇×B + 4πΣq u = 0`,
/// `∂B + c∇×E = 0`.
struct LinearMode {
    m: [f64; 2],
    t: [f64; 2],
    q: [f64; 2],
    nu: [f64; 2],
    c: f64,
    k: [f64; 3],
}

fn get(y: &Real28, j: usize) -> C64 {
    C64::new(y[2 * j], y[2 * j + 1])
}

fn put(y: &mut Real28, j: usize, z: C64) {
    y[2 * j] = z.re;
    y[2 * j + 1] = z.im;
}

fn cross(a: [f64; 3], b: [C64; 3]) -> [C64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl System<f64, Real28> for LinearMode {
    fn system(&self, _t: f64, y: &Real28, dy: &mut Real28) {
        let i = C64::i();
        let vec3 = |o: usize| [get(y, o), get(y, o + 1), get(y, o + 2)];
        let e = vec3(8);
        let b = vec3(11);
        let mut current = [C64::new(0.0, 0.0); 3];
        for s in 0..2 {
            let rho = get(y, s);
            let u = vec3(2 + 3 * s);
            let div: C64 = (0..3).map(|a| i * self.k[a] * u[a]).sum();
            put(dy, s, -div);
            for a in 0..3 {
                let du = (-(self.t[s]) * i * self.k[a] * rho + self.q[s] * e[a]) / self.m[s] - self.nu[s] * u[a];
                put(dy, 2 + 3 * s + a, du);
                current[a] += self.q[s] * u[a];
            }
        }
        let curl_b = cross(self.k, b);
        let curl_e = cross(self.k, e);
        for a in 0..3 {
            put(dy, 8 + a, self.c * i * curl_b[a] - FOUR_PI * current[a]);
            put(dy, 11 + a, -self.c * i * curl_e[a]);
        }
    }
}

/// `U(t)` from an adaptive 8th-order Runge–Kutta integration.
pub fn ode_evolve(p: &PlasmaParams, s0: &ModeFullState, t: f64) -> ModeFullState {
    if t == 0.0 {
        return *s0;
    }
    let sys = LinearMode {
        m: [p.m_i, p.m_e],
        t: [p.t_i, p.t_e],
        q: [p.e_charge, -p.e_charge],
        nu: [p.nu_i, p.nu_e],
        c: p.c_light,
        k: [s0.k_vec.x, s0.k_vec.y, s0.k_vec.z],
    };
    let v0 = s0.to_vector();
    let mut y0 = Real28::zeros();
    for j in 0..14 {
        put(&mut y0, j, v0[j]);
    }
    let scale = s0.norm_sqr().sqrt();
    let mut solver = Dop853::from_param(
        sys,
        0.0,
        t,
        t,
        y0,
        1e-13,
        1e-18 * scale,
        0.9,
        0.0,
        0.333,
        6.0,
        t,
        0.0,
        1_000_000,
        1000,
        OutputType::Sparse,
    );
    solver.integrate().expect("ode integration");
    let y = solver.y_out().last().unwrap();
    let mut v = euler_maxwell::lyapunov::StateVector::zeros();
    for j in 0..14 {
        v[j] = get(y, j);
    }
    ModeFullState::from_vector(&v, s0.k_vec)
}
