//! Crank-Nicolson solver for the limiting Schrodinger equations
//!
//! `(+-i dt + (1/2)(i dx + A)^2 + V_eff) v = -f/2`, i.e. `N(P+-) v = f`,
//!
//! with `V_eff = -+V - W/2 + s * aleph/2` (`s` set by [`AlephWiring`]) and
//! all coefficients frozen at `c = infinity`. Also hosts the data and
//! forcing splittings and the modulated ansatz.

use num_complex::Complex64;

use crate::coeffs::CoefficientSet;
use crate::error::{check_len, Error, Result};
use crate::field::{ComplexField, FieldKind};
use crate::grid::SpaceTimeGrid;
use crate::kg::Forcing;
use crate::stencil::{apply_kinetic, kinetic_row};
use crate::tridiag::solve_tridiagonal;
use crate::{Branch, Support};

/// Internal step aimed for when `steps_per_record` is not given.
pub const DEFAULT_INTERNAL_DT: f64 = 2.5e-4;

/// Sign with which aleph enters the effective potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlephWiring {
    /// `V_eff += aleph/2`.
    Plus,
    /// `V_eff -= aleph/2`.
    Minus,
}

impl AlephWiring {
    pub fn sign(self) -> f64 {
        match self {
            AlephWiring::Plus => 1.0,
            AlephWiring::Minus => -1.0,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(AlephWiring::Plus),
            "minus" => Ok(AlephWiring::Minus),
            other => Err(Error::Config(format!("unknown aleph wiring '{other}'"))),
        }
    }
}

#[derive(Clone)]
pub struct SchrodingerProblem {
    pub branch: Branch,
    pub coeffs: CoefficientSet,
    /// Initial profile at `t = 0`; empty means zero.
    pub ic: Vec<Complex64>,
    /// Source `f` of `N(P+-) v = f`.
    pub forcing: Option<Forcing>,
    pub support: Support,
    pub grid: SpaceTimeGrid,
    pub aleph_wiring: AlephWiring,
    pub steps_per_record: Option<usize>,
}

impl SchrodingerProblem {
    pub fn cauchy(branch: Branch, coeffs: CoefficientSet, grid: SpaceTimeGrid, ic: Vec<Complex64>) -> Self {
        SchrodingerProblem {
            branch,
            coeffs,
            ic,
            forcing: None,
            support: Support::Cauchy,
            grid,
            aleph_wiring: AlephWiring::Plus,
            steps_per_record: None,
        }
    }

    pub fn forced(branch: Branch, coeffs: CoefficientSet, grid: SpaceTimeGrid, forcing: Forcing, support: Support) -> Self {
        SchrodingerProblem {
            branch,
            coeffs,
            ic: Vec::new(),
            forcing: Some(forcing),
            support,
            grid,
            aleph_wiring: AlephWiring::Plus,
            steps_per_record: None,
        }
    }

    pub fn with_wiring(mut self, w: AlephWiring) -> Self {
        self.aleph_wiring = w;
        self
    }

    pub fn v_eff(&self, t: f64, x: f64) -> f64 {
        let s = self.branch.sign();
        -s * self.coeffs.v(t, x, 0.0) - 0.5 * self.coeffs.w(t, x, 0.0)
            + 0.5 * self.aleph_wiring.sign() * self.coeffs.aleph(t, x)
    }
}

struct Frame {
    a: Option<Vec<f64>>,
    veff: Vec<f64>,
}

fn frame(p: &SchrodingerProblem, xs: &[f64], t: f64) -> Frame {
    let a = (!p.coeffs.a_is_zero()).then(|| xs.iter().map(|&x| p.coeffs.a(t, x, 0.0)).collect());
    Frame { a, veff: xs.iter().map(|&x| p.v_eff(t, x)).collect() }
}

fn forcing_row(p: &SchrodingerProblem, xs: &[f64], t: f64) -> Option<Vec<Complex64>> {
    p.forcing.as_ref().map(|f| xs.iter().map(|&x| f(t, x)).collect())
}

/// `H v = (1/2) K v + V_eff v`.
fn apply_h(fr: &Frame, v: &[Complex64], dx: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    apply_kinetic(v, fr.a.as_deref(), dx, &mut out);
    let n = v.len();
    for i in 1..n - 1 {
        out[i] = out[i] * 0.5 + v[i] * fr.veff[i];
    }
    out
}

struct Cn<'a> {
    p: &'a SchrodingerProblem,
    xs: Vec<f64>,
    zero_a: Vec<f64>,
}

impl Cn<'_> {
    // one step from t to t + dt (dt may be negative)
    fn step(&self, t: f64, dt: f64, v: &mut [Complex64]) -> Result<()> {
        let p = self.p;
        let n = v.len();
        let dx = p.grid.dx;
        let s = p.branch.sign();
        let fr = frame(p, &self.xs, t + 0.5 * dt);
        let a = fr.a.as_deref().unwrap_or(&self.zero_a);
        // z = s i dt/2
        let z = Complex64::new(0.0, s * 0.5 * dt);
        let m = n - 2;
        let mut lo = vec![Complex64::new(0.0, 0.0); m];
        let mut di = vec![Complex64::new(0.0, 0.0); m];
        let mut up = vec![Complex64::new(0.0, 0.0); m];
        let mut rhs = vec![Complex64::new(0.0, 0.0); m];
        for r in 0..m {
            let i = r + 1;
            let (kl, kd, ku) = kinetic_row(a, i, dx);
            let hl = kl * 0.5;
            let hd = kd * 0.5 + fr.veff[i];
            let hu = ku * 0.5;
            lo[r] = -z * hl;
            di[r] = Complex64::new(1.0, 0.0) - z * hd;
            up[r] = -z * hu;
            let hv = hl * v[i - 1] + hd * v[i] + hu * v[i + 1];
            rhs[r] = v[i] + z * hv;
        }
        if p.forcing.is_some() {
            let f0 = forcing_row(p, &self.xs, t).unwrap();
            let f1 = forcing_row(p, &self.xs, t + dt).unwrap();
            // s i dt/2 * (f0 + f1)/2
            for r in 0..m {
                rhs[r] += z * (f0[r + 1] + f1[r + 1]) * 0.5;
            }
        }
        let sol = solve_tridiagonal(&lo, &di, &up, &rhs)?;
        v[0] = Complex64::new(0.0, 0.0);
        v[n - 1] = Complex64::new(0.0, 0.0);
        v[1..n - 1].copy_from_slice(&sol);
        Ok(())
    }
}

pub fn solve_schrodinger(p: &SchrodingerProblem) -> Result<ComplexField> {
    let g = &p.grid;
    let nx = g.nx;
    let ic = if p.ic.is_empty() { vec![Complex64::new(0.0, 0.0); nx] } else { p.ic.clone() };
    check_len(ic.len(), nx)?;
    let m = match p.steps_per_record {
        Some(0) => return Err(Error::InvalidArgument("steps_per_record must be positive".into())),
        Some(m) => m,
        None => (g.dt / DEFAULT_INTERNAL_DT).ceil().max(1.0) as usize,
    };
    let h = g.dt / m as f64;
    let n0 = match p.support {
        Support::Cauchy => g
            .time_index(0.0, 1e-9)
            .ok_or_else(|| Error::Grid("Cauchy data needs t = 0 on the time grid".into()))?,
        Support::Retarded => 0,
        Support::Advanced => g.nt - 1,
    };
    if p.support != Support::Cauchy && ic.iter().any(|z| z.norm() != 0.0) {
        return Err(Error::InvalidArgument("retarded/advanced problems take zero data".into()));
    }
    let mut hist = vec![Complex64::new(0.0, 0.0); g.nt * nx];
    hist[n0 * nx..(n0 + 1) * nx].copy_from_slice(&ic);
    let cn = Cn { p, xs: g.xs(), zero_a: vec![0.0; nx] };
    let mut v = ic.clone();
    for n in n0..g.nt - 1 {
        for s in 0..m {
            cn.step(g.t(n) + s as f64 * h, h, &mut v)?;
        }
        hist[(n + 1) * nx..(n + 2) * nx].copy_from_slice(&v);
    }
    let mut v = ic;
    for n in (1..=n0).rev() {
        for s in 0..m {
            cn.step(g.t(n) - s as f64 * h, -h, &mut v)?;
        }
        hist[(n - 1) * nx..n * nx].copy_from_slice(&v);
    }
    let out = ComplexField::from_parts(g.clone(), FieldKind::History, hist);
    out.ensure_finite("v")?;
    Ok(out)
}

/// `dt v = +-i (H v + f/2)` evaluated from the equation at every record.
pub fn schrodinger_time_derivative(p: &SchrodingerProblem, v: &ComplexField) -> Result<ComplexField> {
    let g = v.grid();
    if !g.same_shape(&p.grid) {
        return Err(Error::GridMismatch);
    }
    let xs = g.xs();
    let s = p.branch.sign();
    let mut rows = Vec::with_capacity(v.rows());
    for n in 0..v.rows() {
        let t = v.time(n);
        let fr = frame(p, &xs, t);
        let mut hv = apply_h(&fr, v.row(n), g.dx);
        if let Some(f) = forcing_row(p, &xs, t) {
            for i in 1..g.nx - 1 {
                hv[i] += f[i] * 0.5;
            }
        }
        rows.push(hv.into_iter().map(|z| z * Complex64::new(0.0, s)).collect::<Vec<_>>());
    }
    match v.kind() {
        FieldKind::History => ComplexField::from_rows(g, rows),
        FieldKind::Snapshot { t } => ComplexField::snapshot(g, t, rows.pop().unwrap()),
    }
}

/// `phi_+- = (phi -+ i psi)/2`, returned as `(plus, minus)`.
pub fn split_cauchy_data(phi: &[Complex64], psi: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_len(phi.len(), psi.len())?;
    let i = Complex64::new(0.0, 1.0);
    let plus = phi.iter().zip(psi).map(|(&f, &g)| (f - i * g) * 0.5).collect();
    let minus = phi.iter().zip(psi).map(|(&f, &g)| (f + i * g) * 0.5).collect();
    Ok((plus, minus))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSplit {
    pub f_plus: Vec<Complex64>,
    pub g_plus: Vec<Complex64>,
    pub f_minus: Vec<Complex64>,
    pub g_minus: Vec<Complex64>,
}

/// `f+- = f +- i g` and `g+- = (g -+ i f)/2`.
pub fn split_delta_forcing(f: &[Complex64], g: &[Complex64]) -> Result<DeltaSplit> {
    check_len(f.len(), g.len())?;
    let i = Complex64::new(0.0, 1.0);
    Ok(DeltaSplit {
        f_plus: f.iter().zip(g).map(|(&a, &b)| a + i * b).collect(),
        g_plus: f.iter().zip(g).map(|(&a, &b)| (b - i * a) * 0.5).collect(),
        f_minus: f.iter().zip(g).map(|(&a, &b)| a - i * b).collect(),
        g_minus: f.iter().zip(g).map(|(&a, &b)| (b + i * a) * 0.5).collect(),
    })
}

/// `v = e^{-ic^2 t} v_- + e^{ic^2 t} v_+` with its parts.
#[derive(Clone, Debug)]
pub struct AnsatzField {
    pub v: ComplexField,
    pub v_minus: ComplexField,
    pub v_plus: ComplexField,
    pub c: f64,
}

pub fn assemble_ansatz(v_minus: &ComplexField, v_plus: &ComplexField, c: f64) -> Result<AnsatzField> {
    v_minus.check_compatible(v_plus)?;
    let c2 = c * c;
    let mut rows = Vec::with_capacity(v_minus.rows());
    for n in 0..v_minus.rows() {
        let t = v_minus.time(n);
        let e = Complex64::cis(c2 * t);
        let ec = e.conj();
        rows.push(v_minus.row(n).iter().zip(v_plus.row(n)).map(|(&m, &p)| ec * m + e * p).collect::<Vec<_>>());
    }
    let g = v_minus.grid();
    let v = match v_minus.kind() {
        FieldKind::History => ComplexField::from_rows(g, rows)?,
        FieldKind::Snapshot { t } => ComplexField::snapshot(g, t, rows.pop().unwrap())?,
    };
    Ok(AnsatzField { v, v_minus: v_minus.clone(), v_plus: v_plus.clone(), c })
}

/// `c^{-2} dt v = e^{-ic^2 t}(-i v_- + c^{-2} dt v_-) + e^{ic^2 t}(i v_+ + c^{-2} dt v_+)`.
pub fn ansatz_inv_c2_dt(a: &AnsatzField, dv_minus: &ComplexField, dv_plus: &ComplexField) -> Result<ComplexField> {
    a.v_minus.check_compatible(dv_minus)?;
    a.v_minus.check_compatible(dv_plus)?;
    let c2 = a.c * a.c;
    let i = Complex64::new(0.0, 1.0);
    let mut rows = Vec::with_capacity(a.v.rows());
    for n in 0..a.v.rows() {
        let t = a.v.time(n);
        let e = Complex64::cis(c2 * t);
        let ec = e.conj();
        let row = (0..a.v.grid().nx)
            .map(|k| {
                ec * (-i * a.v_minus.at(n, k) + dv_minus.at(n, k) / c2) + e * (i * a.v_plus.at(n, k) + dv_plus.at(n, k) / c2)
            })
            .collect::<Vec<_>>();
        rows.push(row);
    }
    let g = a.v.grid();
    match a.v.kind() {
        FieldKind::History => ComplexField::from_rows(g, rows),
        FieldKind::Snapshot { t } => ComplexField::snapshot(g, t, rows.pop().unwrap()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn split_examples() {
        let phi = vec![z(1.0, 2.0), z(-3.0, 0.5)];
        let zero = vec![z(0.0, 0.0); 2];
        let (p, m) = split_cauchy_data(&phi, &zero).unwrap();
        assert_eq!(p, vec![phi[0] * 0.5, phi[1] * 0.5]);
        assert_eq!(m, p);
        let (p, m) = split_cauchy_data(&zero, &phi).unwrap();
        for k in 0..2 {
            assert_eq!(p[k], -z(0.0, 1.0) * phi[k] * 0.5);
            assert_eq!(m[k], z(0.0, 1.0) * phi[k] * 0.5);
        }
        assert!(split_cauchy_data(&phi, &phi[..1]).is_err());
    }

    #[test]
    fn delta_split_examples() {
        let f = vec![z(1.0, -1.0)];
        let zero = vec![z(0.0, 0.0)];
        let s = split_delta_forcing(&f, &zero).unwrap();
        assert_eq!(s.f_plus, f);
        assert_eq!(s.f_minus, f);
        assert_eq!(s.g_plus[0], -z(0.0, 1.0) * f[0] * 0.5);
        assert_eq!(s.g_minus[0], z(0.0, 1.0) * f[0] * 0.5);
        let s = split_delta_forcing(&zero, &f).unwrap();
        assert_eq!(s.f_plus[0], z(0.0, 1.0) * f[0]);
        assert_eq!(s.f_minus[0], -z(0.0, 1.0) * f[0]);
        assert_eq!(s.g_plus[0], f[0] * 0.5);
        assert!(split_delta_forcing(&f, &[]).is_err());
    }

    #[test]
    fn ansatz_phase() {
        let g = crate::grid::make_grid(0.0, 1.0, 3, 0.0, 1.0, 2).unwrap();
        let c = 2.0;
        let t = std::f64::consts::PI / (c * c);
        let zero = ComplexField::snapshot(&g, t, vec![z(0.0, 0.0); 3]).unwrap();
        let one = ComplexField::snapshot(&g, t, vec![z(1.0, 0.0); 3]).unwrap();
        let a = assemble_ansatz(&zero, &one, c).unwrap();
        for v in a.v.row(0) {
            assert!((v - z(-1.0, 0.0)).norm() < 1e-15);
        }
        let b = assemble_ansatz(&zero, &zero, c).unwrap();
        assert_eq!(b.v.max_abs(), 0.0);
        let h = ComplexField::zeros(&g);
        assert!(assemble_ansatz(&zero, &h, c).is_err());
    }

    #[test]
    fn wiring_parse() {
        assert_eq!(AlephWiring::parse("plus").unwrap(), AlephWiring::Plus);
        assert!(AlephWiring::parse("up").is_err());
    }
}
