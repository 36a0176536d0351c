//! Cauchy problem in natural units: data dilated by `c`, time window
//! `[0, T/c^2]`, compared against the rescaled free solution at `c = 1`.

use std::sync::Arc;

use kgnr_core::coeffs::{parse_shape, CoefficientSet, Shape};
use kgnr_core::config::RunConfig;
use kgnr_core::dft::trig_interpolate;
use kgnr_core::free_kg::{evolve_spectrum, FreeData};
use kgnr_core::kg::{solve_kg, KGProblem};
use kgnr_core::{make_grid, Branch, ComplexField, Error, Result, SpaceTimeGrid};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::rate::{fit_rate, RateFit};
use crate::sweep::FIT_FLOOR;

/// Largest allowed natural-unit spacing `c dx`.
pub const MAX_NATURAL_DX: f64 = 0.1;

#[derive(Clone)]
pub struct NaturalSpec {
    pub coeffs: CoefficientSet,
    /// Undilated data profiles `phi(x_nat)` and `psi(x_nat)`.
    pub phi: Arc<dyn Shape>,
    pub psi: Arc<dyn Shape>,
    /// Natural-unit window `[x_min, x_max]` with `nx` nodes.
    pub x: (f64, f64),
    pub nx: usize,
    /// Natural end time `T`; the physical window is `[0, T/c^2]`.
    pub t_nat: f64,
    pub nt: usize,
    /// Natural half-width of the sup-norm window.
    pub err_half_width: f64,
    /// Periodic window used for the `c = 1` reference.
    pub ref_half_width: f64,
    pub ref_n: usize,
}

impl NaturalSpec {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let coeffs = kgnr_core::coeffs::preset_registry().build(&cfg.preset, cfg)?;
        Ok(NaturalSpec {
            coeffs,
            phi: parse_shape(&cfg.phi)?,
            psi: parse_shape(&cfg.psi)?,
            x: (cfg.x_min, cfg.x_max),
            nx: cfg.nx,
            t_nat: cfg.t_max,
            nt: cfg.nt,
            err_half_width: 5.0,
            ref_half_width: 2.0 * cfg.x_max.abs().max(cfg.x_min.abs()),
            ref_n: 4096,
        })
    }

    fn natural_grid(&self) -> Result<SpaceTimeGrid> {
        make_grid(self.x.0, self.x.1, self.nx, 0.0, self.t_nat, self.nt)
    }

    fn physical_grid(&self, c: f64) -> Result<SpaceTimeGrid> {
        make_grid(self.x.0 / c, self.x.1 / c, self.nx, 0.0, self.t_nat / (c * c), self.nt)
    }
}

/// `u_0` at `c = 1` on the natural lattice, restricted to the error window.
/// Returned rows are indexed like the natural grid, columns by `cols`.
pub struct Reference {
    pub cols: std::ops::Range<usize>,
    pub rows: Vec<Vec<Complex64>>,
}

pub fn natural_reference(spec: &NaturalSpec) -> Result<Reference> {
    let g = spec.natural_grid()?;
    let h = spec.ref_half_width;
    let n = spec.ref_n;
    let dxr = 2.0 * h / n as f64;
    let x0 = -h;
    let phi = sample(&*spec.phi, (0..n).map(|j| x0 + j as f64 * dxr));
    let psi = sample(&*spec.psi, (0..n).map(|j| x0 + j as f64 * dxr));
    let data = FreeData::from_samples(&phi, &psi, dxr, 1.0)?;
    let cols = g.x_range(-spec.err_half_width, spec.err_half_width);
    let points: Vec<f64> = cols.clone().map(|i| g.x(i)).collect();
    let rows = (0..g.nt)
        .into_par_iter()
        .map(|k| {
            let t = g.t(k);
            let sp = evolve_spectrum(&data, Branch::Plus, t);
            let sm = evolve_spectrum(&data, Branch::Minus, t);
            let both = sp.zip(&sm, |_, a, b| a + b).expect("same length");
            trig_interpolate(&both, x0, &points)
        })
        .collect();
    Ok(Reference { cols, rows })
}

fn sample(f: &dyn Shape, xs: impl Iterator<Item = f64>) -> Vec<Complex64> {
    xs.map(|x| Complex64::new(f.eval(0.0, x), 0.0)).collect()
}

/// KG solution with dilated data at light speed `c`.
pub fn natural_solve(spec: &NaturalSpec, c: f64) -> Result<ComplexField> {
    let g = spec.physical_grid(c)?;
    if c * g.dx > MAX_NATURAL_DX + 1e-12 {
        return Err(Error::Grid(format!("dx = {} exceeds {MAX_NATURAL_DX}/c at c = {c}", g.dx)));
    }
    // u(0) = phi(cx), u_t(0) = c^2 psi(cx); the solver takes c^{-2} u_t
    let nat = spec.natural_grid()?.xs();
    let phi = sample(&*spec.phi, nat.iter().copied());
    let psi = sample(&*spec.psi, nat.iter().copied());
    let p = KGProblem::cauchy(spec.coeffs.clone(), c, g, phi, psi);
    Ok(solve_kg(&p)?.u)
}

pub fn natural_error(spec: &NaturalSpec, reference: &Reference, c: f64) -> Result<f64> {
    let u = natural_solve(spec, c)?;
    let mut m: f64 = 0.0;
    for (n, r) in reference.rows.iter().enumerate() {
        for (k, i) in reference.cols.clone().enumerate() {
            m = m.max((u.at(n, i) - r[k]).norm());
        }
    }
    Ok(m)
}

/// Solver self-convergence estimate: `sup |u_h - u_{h/2}|` on common nodes.
pub fn self_convergence_floor(spec: &NaturalSpec, c: f64) -> Result<f64> {
    let coarse = natural_solve(spec, c)?;
    let mut fine_spec = spec.clone();
    fine_spec.nx = 2 * spec.nx - 1;
    let g = spec.natural_grid()?;
    let fine = natural_solve(&fine_spec, c)?;
    let cols = g.x_range(-spec.err_half_width, spec.err_half_width);
    let mut m: f64 = 0.0;
    for n in 0..g.nt {
        for i in cols.clone() {
            m = m.max((coarse.at(n, i) - fine.at(n, 2 * i)).norm());
        }
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct NaturalReport {
    pub c_values: Vec<f64>,
    pub sup_err: Vec<f64>,
    pub fit: Option<RateFit>,
    pub notes: Vec<String>,
}

pub fn natural_sweep(spec: &NaturalSpec, cs: &[f64]) -> Result<NaturalReport> {
    if cs.len() < 3 {
        return Err(Error::Config("a sweep needs at least 3 c values".into()));
    }
    let cmax = cs.iter().fold(0.0f64, |a, &b| a.max(b));
    if spec.physical_grid(cmax)?.dx * cmax > MAX_NATURAL_DX + 1e-12 {
        return Err(Error::Config(format!("grid too coarse for c = {cmax}: need natural dx <= {MAX_NATURAL_DX}")));
    }
    let reference = natural_reference(spec)?;
    let sup_err = cs.iter().map(|&c| natural_error(spec, &reference, c)).collect::<Result<Vec<_>>>()?;
    let (fc, fe): (Vec<f64>, Vec<f64>) = cs.iter().zip(&sup_err).filter(|(_, &e)| e >= FIT_FLOOR).unzip();
    let mut notes = Vec::new();
    if fc.len() < cs.len() {
        notes.push(format!("{} value(s) below {FIT_FLOOR:e} left out of the fit", cs.len() - fc.len()));
    }
    Ok(NaturalReport { c_values: cs.to_vec(), sup_err, fit: fit_rate(&fc, &fe).ok(), notes })
}

pub const NATURAL_C: [f64; 4] = [2.0, 3.0, 4.0, 6.0];

pub fn run_natural(cfg: &RunConfig) -> Result<NaturalReport> {
    natural_sweep(&NaturalSpec::from_config(cfg)?, &cfg.c_list)
}
