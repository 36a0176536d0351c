//! c-sweeps: Cauchy and forced comparisons, the Example 1.3 bundle.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use kgnr_core::coeffs::{CompactBump, Shape};
use kgnr_core::config::RunConfig;
use kgnr_core::kg::Forcing;
use kgnr_core::observables::{four_current, nr_current, zitterbewegung};
use kgnr_core::table::{emit_csv, Table};
use kgnr_core::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::pipeline::{run_pipeline, solve_branches, sweep_errors, PipelineRun, Setup, Source, SweepErrors};
use crate::rate::{fit_rate, RateFit};

/// Errors below this are treated as floor noise and left out of fits.
pub const FIT_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CSweepReport {
    pub c_values: Vec<f64>,
    pub errors: Vec<SweepErrors>,
    /// Fit of `sup_err`; `None` when fewer than 3 usable points remain.
    pub fit: Option<RateFit>,
    /// One fit per column of [`SweepErrors::NAMES`].
    pub column_fits: Vec<(&'static str, Option<RateFit>)>,
    pub notes: Vec<String>,
}

impl CSweepReport {
    pub fn fitted_slope(&self) -> f64 {
        self.fit.map_or(f64::NAN, |f| f.slope)
    }

    pub fn slope_ci(&self) -> (f64, f64) {
        self.fit.map_or((f64::NAN, f64::NAN), |f| f.ci)
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        self.errors.iter().filter_map(|e| e.get(name)).collect()
    }

    pub fn slope_of(&self, name: &str) -> Option<f64> {
        self.column_fits.iter().find(|(n, _)| *n == name).and_then(|(_, f)| f.map(|f| f.slope))
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(std::iter::once("c").chain(SweepErrors::NAMES));
        for (c, e) in self.c_values.iter().zip(&self.errors) {
            t.push(std::iter::once(*c).chain(e.values()).collect()).expect("row width");
        }
        t
    }

    pub fn from_errors(c_values: Vec<f64>, errors: Vec<SweepErrors>) -> Self {
        let mut notes = Vec::new();
        let column_fits = SweepErrors::NAMES
            .iter()
            .map(|&name| {
                let (cs, es): (Vec<f64>, Vec<f64>) = c_values
                    .iter()
                    .zip(&errors)
                    .map(|(&c, e)| (c, e.get(name).unwrap()))
                    .filter(|&(_, e)| e >= FIT_FLOOR)
                    .unzip();
                if cs.len() < c_values.len() {
                    notes.push(format!("{name}: {} value(s) below {FIT_FLOOR:e} left out of the fit", c_values.len() - cs.len()));
                }
                (name, fit_rate(&cs, &es).ok())
            })
            .collect::<Vec<_>>();
        let fit = column_fits[0].1;
        CSweepReport { c_values, errors, fit, column_fits, notes }
    }
}

fn check_c_values(cs: &[f64]) -> Result<()> {
    if cs.len() < 3 {
        return Err(Error::Config(format!("a sweep needs at least 3 c values, got {}", cs.len())));
    }
    if cs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("c values must be strictly increasing".into()));
    }
    Ok(())
}

/// Full pipeline at every `c`; runs are independent and go through rayon.
pub fn sweep_setup(setup: &Setup, cs: &[f64]) -> Result<CSweepReport> {
    check_c_values(cs)?;
    let br = solve_branches(setup)?;
    let errors = cs
        .par_iter()
        .map(|&c| {
            let run = run_pipeline(setup, &br, c)?;
            sweep_errors(&run, setup.window, setup.epsilon)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CSweepReport::from_errors(cs.to_vec(), errors))
}

pub fn c_sweep(cfg: &RunConfig) -> Result<CSweepReport> {
    let setup = Setup::from_config(cfg)?;
    sweep_setup(&setup, &cfg.c_list)
}

/// Default sources for the forced comparison: smooth bumps in `t in (0.2, 0.8)`.
pub fn default_forcing() -> (Forcing, Forcing) {
    let fp = CompactBump { a: 1.0, t0: 0.5, rt: 0.3, x0: 0.0, rx: 1.5 };
    let fm = CompactBump { a: 0.5, t0: 0.5, rt: 0.3, x0: 0.5, rx: 1.5 };
    (
        Arc::new(move |t, x| Complex64::new(fm.eval(t, x), 0.0)),
        Arc::new(move |t, x| Complex64::new(fp.eval(t, x), 0.0)),
    )
}

pub fn run_forced(cfg: &RunConfig) -> Result<CSweepReport> {
    let (f_minus, f_plus) = default_forcing();
    run_forced_with(cfg, f_minus, f_plus)
}

pub fn run_forced_with(cfg: &RunConfig, f_minus: Forcing, f_plus: Forcing) -> Result<CSweepReport> {
    let mut setup = Setup::from_config(cfg)?;
    setup.source = Source::Forced { f_minus, f_plus };
    sweep_setup(&setup, &cfg.c_list)
}

#[derive(Clone, Debug)]
pub struct Example1Row {
    pub c: f64,
    pub sup_err: f64,
    pub sup_u: f64,
    /// `sup|u - v| > 0.1 sup|u|`.
    pub non_asymptotic: bool,
}

#[derive(Clone, Debug)]
pub struct Example1Bundle {
    pub rows: Vec<Example1Row>,
    pub files: Vec<PathBuf>,
}

pub const EXAMPLE1_C: [f64; 3] = [1.0, 3.0, 6.0];

/// Solve at c = 1, 3, 6 and write the field data behind the figures.
/// `out = None` skips the CSV output.
pub fn run_example1(cfg: &RunConfig, out: Option<&Path>) -> Result<Example1Bundle> {
    let setup = Setup::from_config(cfg)?;
    let br = solve_branches(&setup)?;
    let stride = cfg.stride;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for c in EXAMPLE1_C {
        let run = run_pipeline(&setup, &br, c)?;
        let w = setup.window;
        let sup_err = run.kg.u.sub(&run.ansatz.v)?.max_abs_in(w.t.0, w.t.1, w.x.0, w.x.1);
        let sup_u = run.kg.u.max_abs_in(w.t.0, w.t.1, w.x.0, w.x.1);
        rows.push(Example1Row { c, sup_err, sup_u, non_asymptotic: sup_err > 0.1 * sup_u });
        if let Some(dir) = out {
            files.extend(write_example1_fields(&run, dir, stride)?);
        }
    }
    Ok(Example1Bundle { rows, files })
}

fn write_example1_fields(run: &PipelineRun, dir: &Path, stride: usize) -> Result<Vec<PathBuf>> {
    let c = run.c;
    let u = &run.kg.u;
    let a = &run.ansatz;
    let rel = four_current(u, &run.kg.dtu, c)?;
    let cl = nr_current(&a.v_minus, &a.v_plus)?;
    let zb = zitterbewegung(&a.v_minus, &a.v_plus, c)?;
    let g = u.grid();
    let mut fields = Table::new([
        "t", "x", "re_u", "im_u", "re_v", "im_v", "re_err", "im_err", "abs2_v_plus", "abs2_v_minus", "rho", "rho_cl",
        "j", "j_zb", "j_cl",
    ]);
    for n in (0..g.nt).step_by(stride) {
        for i in (0..g.nx).step_by(stride) {
            let (uu, vv) = (u.at(n, i), a.v.at(n, i));
            let e = uu - vv;
            fields.push(vec![
                g.t(n),
                g.x(i),
                uu.re,
                uu.im,
                vv.re,
                vv.im,
                e.re,
                e.im,
                a.v_plus.at(n, i).norm_sqr(),
                a.v_minus.at(n, i).norm_sqr(),
                rel.rho.at(n, i),
                cl.rho.at(n, i),
                rel.j.at(n, i),
                zb.at(n, i),
                cl.j.at(n, i),
            ])?;
        }
    }
    let path = dir.join(format!("example1_c{c}.csv"));
    emit_csv(&fields, &path)?;
    Ok(vec![path])
}
