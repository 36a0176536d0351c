//! Method-of-lines Klein-Gordon solver.
//!
//! With `P u = F` and
//! `P = -c^{-2}(dt + iV)^2 + c^{-4} aleph dt^2 - (i dx + A)^2 - c^2 + W`,
//! the evolved system is `u' = w` and
//!
//! `(1 - aleph/c^2) c^{-2} w' = -F - c^{-2}(2iV w + i V_t u - V^2 u) - K u - c^2 u + W u`
//!
//! where `K` is the discrete `(i dx + A)^2` with Dirichlet walls. Time
//! stepping is classical RK4 with a stability-limited internal step.

use std::sync::Arc;

use num_complex::Complex64;

use crate::coeffs::CoefficientSet;
use crate::error::{check_len, Error, Result};
use crate::field::{ComplexField, FieldKind};
use crate::grid::SpaceTimeGrid;
use crate::stencil::apply_kinetic;
use crate::Support;

/// Complex forcing `F(t, x)`.
pub type Forcing = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KgScheme {
    Rk4Mol,
}

/// Fraction of the RK4 imaginary-axis limit (2.8) used for the step.
pub const CFL_SAFETY: f64 = 0.8;
pub const RK4_IMAG_LIMIT: f64 = 2.8;

#[derive(Clone)]
pub struct KGProblem {
    pub coeffs: CoefficientSet,
    pub c: f64,
    /// `u(0, x)`; empty means zero.
    pub phi: Vec<Complex64>,
    /// `c^{-2} u_t(0, x)`; empty means zero.
    pub psi: Vec<Complex64>,
    pub forcing: Option<Forcing>,
    pub support: Support,
    pub grid: SpaceTimeGrid,
    pub scheme: KgScheme,
    /// Internal steps per record interval; `None` picks the smallest stable count.
    pub steps_per_record: Option<usize>,
}

impl KGProblem {
    pub fn cauchy(coeffs: CoefficientSet, c: f64, grid: SpaceTimeGrid, phi: Vec<Complex64>, psi: Vec<Complex64>) -> Self {
        KGProblem {
            coeffs,
            c,
            phi,
            psi,
            forcing: None,
            support: Support::Cauchy,
            grid,
            scheme: KgScheme::Rk4Mol,
            steps_per_record: None,
        }
    }

    pub fn forced(coeffs: CoefficientSet, c: f64, grid: SpaceTimeGrid, forcing: Forcing, support: Support) -> Self {
        KGProblem {
            coeffs,
            c,
            phi: Vec::new(),
            psi: Vec::new(),
            forcing: Some(forcing),
            support,
            grid,
            scheme: KgScheme::Rk4Mol,
            steps_per_record: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KGSolution {
    pub u: ComplexField,
    pub dtu: ComplexField,
    pub c: f64,
    /// Max |u| within `margin` nodes of either wall, per record.
    pub boundary: Vec<f64>,
    pub margin: usize,
    /// Set when the boundary magnitude exceeds `1e-3 max|u|`.
    pub domain_warning: bool,
    pub steps_per_record: usize,
    pub internal_dt: f64,
}

impl KGSolution {
    pub fn max_boundary(&self) -> f64 {
        self.boundary.iter().fold(0.0, |m, &b| m.max(b))
    }
}

/// Largest stable internal step: `0.8 * 2.8 / omega_max`.
pub fn max_stable_dt(p: &KGProblem) -> Result<f64> {
    let g = &p.grid;
    let c = p.c;
    let h = 1.0 / c;
    let (mut amax, mut vmax, mut wmax, mut almax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let tstride = (g.nt / 64).max(1);
    let xstride = (g.nx / 512).max(1);
    let mut n = 0;
    while n < g.nt {
        let t = g.t(n);
        let mut i = 0;
        while i < g.nx {
            let x = g.x(i);
            amax = amax.max(p.coeffs.a(t, x, h).abs());
            vmax = vmax.max(p.coeffs.v(t, x, h).abs());
            wmax = wmax.max(p.coeffs.w(t, x, h).abs());
            almax = almax.max(p.coeffs.aleph(t, x).abs());
            i += xstride;
        }
        n += tstride;
    }
    if almax * h * h >= 0.5 {
        return Err(Error::Domain(format!("|aleph|/c^2 = {} must stay below 0.5", almax * h * h)));
    }
    let k2 = (std::f64::consts::PI / g.dx).powi(2) + amax * amax;
    let omega = c * (k2 + c * c + wmax).sqrt() / (1.0 - almax * h * h).sqrt() + vmax;
    Ok(CFL_SAFETY * RK4_IMAG_LIMIT / omega)
}

struct Coeffs {
    t: f64,
    v: Vec<f64>,
    vdot: Vec<f64>,
    a: Vec<f64>,
    w: Vec<f64>,
    inv_mass: Vec<f64>,
    f: Vec<Complex64>,
}

struct Rhs<'a> {
    p: &'a KGProblem,
    xs: Vec<f64>,
    has_v: bool,
    has_a: bool,
    cache: [Option<Coeffs>; 2],
    next_slot: usize,
    ku: Vec<Complex64>,
}

impl<'a> Rhs<'a> {
    fn new(p: &'a KGProblem) -> Self {
        Rhs {
            p,
            xs: p.grid.xs(),
            has_v: !p.coeffs.v_is_zero(),
            has_a: !p.coeffs.a_is_zero(),
            cache: [None, None],
            next_slot: 0,
            ku: vec![Complex64::new(0.0, 0.0); p.grid.nx],
        }
    }

    fn coeffs_at(&mut self, t: f64) -> usize {
        for (k, c) in self.cache.iter().enumerate() {
            if matches!(c, Some(c) if c.t.to_bits() == t.to_bits()) {
                return k;
            }
        }
        let p = self.p;
        let h = 1.0 / p.c;
        let n = self.xs.len();
        let mut c = Coeffs {
            t,
            v: vec![0.0; n],
            vdot: vec![0.0; n],
            a: vec![0.0; n],
            w: vec![0.0; n],
            inv_mass: vec![0.0; n],
            f: vec![Complex64::new(0.0, 0.0); n],
        };
        for (i, &x) in self.xs.iter().enumerate() {
            if self.has_v {
                c.v[i] = p.coeffs.v(t, x, h);
                c.vdot[i] = p.coeffs.v_dot(t, x, h);
            }
            if self.has_a {
                c.a[i] = p.coeffs.a(t, x, h);
            }
            c.w[i] = p.coeffs.w(t, x, h);
            c.inv_mass[i] = -p.c * p.c / (1.0 - p.coeffs.aleph(t, x) * h * h);
            if let Some(f) = &p.forcing {
                c.f[i] = f(t, x);
            }
        }
        let slot = self.next_slot;
        self.cache[slot] = Some(c);
        self.next_slot = 1 - slot;
        slot
    }

    fn eval(&mut self, t: f64, u: &[Complex64], w: &[Complex64], du: &mut [Complex64], dw: &mut [Complex64]) {
        let slot = self.coeffs_at(t);
        let c = self.cache[slot].as_ref().unwrap();
        let p = self.p;
        let c2 = p.c * p.c;
        let h2 = 1.0 / c2;
        let n = u.len();
        apply_kinetic(u, if self.has_a { Some(&c.a) } else { None }, p.grid.dx, &mut self.ku);
        let zero = Complex64::new(0.0, 0.0);
        du[0] = zero;
        dw[0] = zero;
        du[n - 1] = zero;
        dw[n - 1] = zero;
        for i in 1..n - 1 {
            du[i] = w[i];
            let mut b = c.f[i] + self.ku[i] + u[i] * (c2 - c.w[i]);
            if self.has_v {
                let v = c.v[i];
                b += Complex64::new(0.0, 2.0 * v * h2) * w[i] + u[i] * Complex64::new(-v * v * h2, c.vdot[i] * h2);
            }
            dw[i] = b * c.inv_mass[i];
        }
    }
}

struct Stepper<'a> {
    rhs: Rhs<'a>,
    k: [Vec<Complex64>; 8],
    tu: Vec<Complex64>,
    tw: Vec<Complex64>,
}

impl<'a> Stepper<'a> {
    fn new(p: &'a KGProblem) -> Self {
        let n = p.grid.nx;
        let z = || vec![Complex64::new(0.0, 0.0); n];
        Stepper { rhs: Rhs::new(p), k: [z(), z(), z(), z(), z(), z(), z(), z()], tu: z(), tw: z() }
    }

    fn step(&mut self, t: f64, dt: f64, u: &mut [Complex64], w: &mut [Complex64]) {
        let n = u.len();
        let [k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w] = &mut self.k;
        self.rhs.eval(t, u, w, k1u, k1w);
        for i in 0..n {
            self.tu[i] = u[i] + k1u[i] * (0.5 * dt);
            self.tw[i] = w[i] + k1w[i] * (0.5 * dt);
        }
        self.rhs.eval(t + 0.5 * dt, &self.tu, &self.tw, k2u, k2w);
        for i in 0..n {
            self.tu[i] = u[i] + k2u[i] * (0.5 * dt);
            self.tw[i] = w[i] + k2w[i] * (0.5 * dt);
        }
        self.rhs.eval(t + 0.5 * dt, &self.tu, &self.tw, k3u, k3w);
        for i in 0..n {
            self.tu[i] = u[i] + k3u[i] * dt;
            self.tw[i] = w[i] + k3w[i] * dt;
        }
        self.rhs.eval(t + dt, &self.tu, &self.tw, k4u, k4w);
        let s = dt / 6.0;
        for i in 0..n {
            u[i] += (k1u[i] + (k2u[i] + k3u[i]) * 2.0 + k4u[i]) * s;
            w[i] += (k1w[i] + (k2w[i] + k3w[i]) * 2.0 + k4w[i]) * s;
        }
    }
}

fn all_zero(v: &[Complex64]) -> bool {
    v.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

pub fn solve_kg(p: &KGProblem) -> Result<KGSolution> {
    let g = &p.grid;
    let nx = g.nx;
    if !(p.c > 0.0) || !p.c.is_finite() {
        return Err(Error::InvalidArgument(format!("c must be positive, got {}", p.c)));
    }
    let phi = if p.phi.is_empty() { vec![Complex64::new(0.0, 0.0); nx] } else { p.phi.clone() };
    let psi = if p.psi.is_empty() { vec![Complex64::new(0.0, 0.0); nx] } else { p.psi.clone() };
    check_len(phi.len(), nx)?;
    check_len(psi.len(), nx)?;
    if phi.iter().chain(&psi).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("initial data".into()));
    }

    let dt_max = max_stable_dt(p)?;
    let m = match p.steps_per_record {
        Some(0) => return Err(Error::InvalidArgument("steps_per_record must be positive".into())),
        Some(m) => {
            if g.dt / m as f64 > dt_max {
                return Err(Error::Stability(format!(
                    "internal step {} exceeds the stable limit {dt_max}",
                    g.dt / m as f64
                )));
            }
            m
        }
        None => (g.dt / dt_max).ceil().max(1.0) as usize,
    };
    let h = g.dt / m as f64;

    let c2 = p.c * p.c;
    let mut u_hist = vec![Complex64::new(0.0, 0.0); g.nt * nx];
    let mut w_hist = vec![Complex64::new(0.0, 0.0); g.nt * nx];

    // (start record, initial u, initial w)
    let (n0, u0, w0) = match p.support {
        Support::Cauchy => {
            let n0 = g
                .time_index(0.0, 1e-9)
                .ok_or_else(|| Error::Grid("Cauchy data needs t = 0 on the time grid".into()))?;
            let w0: Vec<Complex64> = psi.iter().map(|z| z * c2).collect();
            (n0, phi, w0)
        }
        Support::Retarded | Support::Advanced => {
            if !all_zero(&phi) || !all_zero(&psi) {
                return Err(Error::InvalidArgument("retarded/advanced problems take zero data".into()));
            }
            let n0 = if p.support == Support::Retarded { 0 } else { g.nt - 1 };
            if let Some(f) = &p.forcing {
                let t0 = g.t(n0);
                let worst = g.xs().iter().map(|&x| f(t0, x).norm()).fold(0.0, f64::max);
                if worst > 1e-10 {
                    return Err(Error::Domain(format!("forcing is {worst:e} at the initial time {t0}")));
                }
            }
            (n0, phi, psi)
        }
    };
    u_hist[n0 * nx..(n0 + 1) * nx].copy_from_slice(&u0);
    w_hist[n0 * nx..(n0 + 1) * nx].copy_from_slice(&w0);

    let mut stepper = Stepper::new(p);
    // forward sweep
    {
        let mut u = u0.clone();
        let mut w = w0.clone();
        for n in n0..g.nt - 1 {
            let t_rec = g.t(n);
            for s in 0..m {
                stepper.step(t_rec + s as f64 * h, h, &mut u, &mut w);
            }
            u_hist[(n + 1) * nx..(n + 2) * nx].copy_from_slice(&u);
            w_hist[(n + 1) * nx..(n + 2) * nx].copy_from_slice(&w);
        }
    }
    // backward sweep
    {
        let mut u = u0;
        let mut w = w0;
        for n in (1..=n0).rev() {
            let t_rec = g.t(n);
            for s in 0..m {
                stepper.step(t_rec - s as f64 * h, -h, &mut u, &mut w);
            }
            u_hist[(n - 1) * nx..n * nx].copy_from_slice(&u);
            w_hist[(n - 1) * nx..n * nx].copy_from_slice(&w);
        }
    }

    let u = ComplexField::from_parts(g.clone(), FieldKind::History, u_hist);
    let dtu = ComplexField::from_parts(g.clone(), FieldKind::History, w_hist);
    u.ensure_finite("u")?;
    dtu.ensure_finite("dtu")?;

    let margin = (nx / 100).max(1);
    let boundary: Vec<f64> = (0..g.nt)
        .map(|n| {
            let r = u.row(n);
            r[..margin].iter().chain(&r[nx - margin..]).fold(0.0f64, |a, z| a.max(z.norm()))
        })
        .collect();
    let umax = u.max_abs();
    let domain_warning = boundary.iter().any(|&b| b > 1e-3 * umax);

    Ok(KGSolution { u, dtu, c: p.c, boundary, margin, domain_warning, steps_per_record: m, internal_dt: h })
}

/// Discrete energy `int c^{-2}|u_t|^2 + |D_+ u|^2 + c^2|u|^2 dx` per record.
/// Conserved by the semi-discrete free problem with Dirichlet walls.
pub fn kg_energy(sol: &KGSolution, c: f64) -> Vec<f64> {
    let g = sol.u.grid();
    let nx = g.nx;
    let c2 = c * c;
    (0..sol.u.rows())
        .map(|n| {
            let u = sol.u.row(n);
            let w = sol.dtu.row(n);
            let mut e = 0.0;
            for i in 0..nx {
                let q = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                e += q * g.dx * (w[i].norm_sqr() / c2 + c2 * u[i].norm_sqr());
            }
            for i in 0..nx - 1 {
                e += (u[i + 1] - u[i]).norm_sqr() / g.dx;
            }
            e
        })
        .collect()
}

/// Apply the spatial part of `P` to a snapshot (used by tests and diagnostics).
pub fn kinetic(u: &[Complex64], a: Option<&[f64]>, dx: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
    apply_kinetic(u, a, dx, &mut out);
    out
}
