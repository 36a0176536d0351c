//! One relativistic solve plus its two-branch Schrodinger ansatz, and the
//! error norms the sweeps are built from.

use std::sync::Arc;

use kgnr_core::coeffs::{parse_shape, CoefficientSet};
use kgnr_core::config::RunConfig;
use kgnr_core::kg::{solve_kg, Forcing, KGProblem, KGSolution};
use kgnr_core::norm::{weighted_norm, Exponent, WeightSpec};
use kgnr_core::observables::{error_field, four_current, nr_current, zitterbewegung, ErrorDerivative};
use kgnr_core::schrodinger::{
    ansatz_inv_c2_dt, assemble_ansatz, schrodinger_time_derivative, solve_schrodinger, split_cauchy_data,
    AlephWiring, AnsatzField, SchrodingerProblem,
};
use kgnr_core::{Branch, ComplexField, Error, Field, Result, SpaceTimeGrid, Support};
use num_complex::Complex64;

/// Error window used by every sweep unless overridden.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrWindow {
    pub t: (f64, f64),
    pub x: (f64, f64),
}

impl Default for ErrWindow {
    fn default() -> Self {
        ErrWindow { t: (0.0, 2.0), x: (-5.0, 5.0) }
    }
}

/// Problem description shared by all light speeds of a sweep.
#[derive(Clone)]
pub enum Source {
    Cauchy { phi: Vec<Complex64>, psi: Vec<Complex64> },
    /// `F = e^{-ic^2 t} f_- + e^{ic^2 t} f_+`, retarded.
    Forced { f_minus: Forcing, f_plus: Forcing },
}

#[derive(Clone)]
pub struct Setup {
    pub coeffs: CoefficientSet,
    pub grid: SpaceTimeGrid,
    pub source: Source,
    pub wiring: AlephWiring,
    pub window: ErrWindow,
    pub epsilon: f64,
}

impl Setup {
    pub fn cauchy(coeffs: CoefficientSet, grid: SpaceTimeGrid, phi: Vec<Complex64>, psi: Vec<Complex64>) -> Self {
        Setup {
            coeffs,
            grid,
            source: Source::Cauchy { phi, psi },
            wiring: AlephWiring::Plus,
            window: ErrWindow::default(),
            epsilon: 0.1,
        }
    }

    /// Coefficients, grid, data and wiring from a run configuration.
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let coeffs = kgnr_core::coeffs::preset_registry().build(&cfg.preset, cfg)?;
        let coeffs = if cfg.v_inv_c != (0.0, 0.0) { coeffs.with_v_inv_c(cfg.v_inv_c.0, cfg.v_inv_c.1) } else { coeffs };
        let grid = cfg.grid()?;
        let (phi, psi) = initial_data(cfg, &grid)?;
        let mut s = Setup::cauchy(coeffs, grid, phi, psi);
        s.wiring = AlephWiring::parse(&cfg.aleph_wiring)?;
        s.epsilon = cfg.epsilon;
        Ok(s)
    }
}

/// `phi` and `psi` shapes sampled at `t = 0`.
pub fn initial_data(cfg: &RunConfig, grid: &SpaceTimeGrid) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let phi = parse_shape(&cfg.phi)?;
    let psi = parse_shape(&cfg.psi)?;
    let xs = grid.xs();
    Ok((
        xs.iter().map(|&x| Complex64::new(phi.eval(0.0, x), 0.0)).collect(),
        xs.iter().map(|&x| Complex64::new(psi.eval(0.0, x), 0.0)).collect(),
    ))
}

pub struct PipelineRun {
    pub c: f64,
    pub kg: KGSolution,
    pub ansatz: AnsatzField,
    /// `c^{-2} dt v`.
    pub inv_c2_dtv: ComplexField,
}

fn branch_problem(s: &Setup, b: Branch) -> Result<SchrodingerProblem> {
    let p = match &s.source {
        Source::Cauchy { phi, psi } => {
            let (plus, minus) = split_cauchy_data(phi, psi)?;
            let ic = if b == Branch::Plus { plus } else { minus };
            SchrodingerProblem::cauchy(b, s.coeffs.clone(), s.grid.clone(), ic)
        }
        Source::Forced { f_minus, f_plus } => {
            let f = if b == Branch::Plus { f_plus.clone() } else { f_minus.clone() };
            SchrodingerProblem::forced(b, s.coeffs.clone(), s.grid.clone(), f, Support::Retarded)
        }
    };
    Ok(p.with_wiring(s.wiring))
}

fn kg_problem(s: &Setup, c: f64) -> KGProblem {
    match &s.source {
        Source::Cauchy { phi, psi } => KGProblem::cauchy(s.coeffs.clone(), c, s.grid.clone(), phi.clone(), psi.clone()),
        Source::Forced { f_minus, f_plus } => {
            let (fm, fp) = (f_minus.clone(), f_plus.clone());
            let c2 = c * c;
            let f: Forcing = Arc::new(move |t, x| {
                let e = Complex64::cis(c2 * t);
                e.conj() * fm(t, x) + e * fp(t, x)
            });
            KGProblem::forced(s.coeffs.clone(), c, s.grid.clone(), f, Support::Retarded)
        }
    }
}

/// Both Schrodinger branches and their time derivatives. Independent of `c`.
pub struct Branches {
    pub v_minus: ComplexField,
    pub v_plus: ComplexField,
    pub dv_minus: ComplexField,
    pub dv_plus: ComplexField,
}

pub fn solve_branches(s: &Setup) -> Result<Branches> {
    let pm = branch_problem(s, Branch::Minus)?;
    let pp = branch_problem(s, Branch::Plus)?;
    let v_minus = solve_schrodinger(&pm)?;
    let v_plus = solve_schrodinger(&pp)?;
    let dv_minus = schrodinger_time_derivative(&pm, &v_minus)?;
    let dv_plus = schrodinger_time_derivative(&pp, &v_plus)?;
    Ok(Branches { v_minus, v_plus, dv_minus, dv_plus })
}

pub fn run_pipeline(s: &Setup, br: &Branches, c: f64) -> Result<PipelineRun> {
    let kg = solve_kg(&kg_problem(s, c))?;
    let ansatz = assemble_ansatz(&br.v_minus, &br.v_plus, c)?;
    let inv_c2_dtv = ansatz_inv_c2_dt(&ansatz, &br.dv_minus, &br.dv_plus)?;
    Ok(PipelineRun { c, kg, ansatz, inv_c2_dtv })
}

/// Sub-field on the nodes of `win`.
pub fn window_field<T: kgnr_core::field::Sample>(f: &Field<T>, win: ErrWindow) -> Result<Field<T>> {
    let g = f.grid();
    let tr = g.t_range(win.t.0, win.t.1);
    let xr = g.x_range(win.x.0, win.x.1);
    if tr.len() < 2 || xr.len() < 3 {
        return Err(Error::Grid("error window holds too few nodes".into()));
    }
    let sub = kgnr_core::make_grid(g.x(xr.start), g.x(xr.end - 1), xr.len(), g.t(tr.start), g.t(tr.end - 1), tr.len())?;
    let rows = tr.map(|n| f.row(n)[xr.clone()].to_vec()).collect();
    Field::from_rows(&sub, rows)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SweepErrors {
    pub sup_err: f64,
    pub weighted_err: f64,
    pub sup_err_dtu: f64,
    pub sup_err_dxu: f64,
    pub rho_err: f64,
    pub j_sub_err: f64,
    pub j_raw_err: f64,
}

impl SweepErrors {
    pub const NAMES: [&'static str; 7] =
        ["sup_err", "weighted_err", "sup_err_dtu", "sup_err_dxu", "rho_err", "j_sub_err", "j_raw_err"];

    pub fn values(&self) -> [f64; 7] {
        [self.sup_err, self.weighted_err, self.sup_err_dtu, self.sup_err_dxu, self.rho_err, self.j_sub_err, self.j_raw_err]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::NAMES.iter().position(|n| *n == name).map(|i| self.values()[i])
    }
}

pub fn sweep_errors(run: &PipelineRun, win: ErrWindow, epsilon: f64) -> Result<SweepErrors> {
    let c = run.c;
    let u = &run.kg.u;
    let v = &run.ansatz.v;
    let (ta, tb, xa, xb) = (win.t.0, win.t.1, win.x.0, win.x.1);
    let e0 = error_field(u, v, ErrorDerivative::None, c)?;
    let sup_err = e0.max_abs_in(ta, tb, xa, xb);
    let weighted_err = weighted_norm(&window_field(&e0, win)?, &WeightSpec::weighted(epsilon, Exponent::Two))?;
    drop(e0);
    let et = error_field(u, v, ErrorDerivative::InvC2Dt { dtu: &run.kg.dtu, inv_c2_dtv: &run.inv_c2_dtv }, c)?;
    let sup_err_dtu = et.max_abs_in(ta, tb, xa, xb);
    drop(et);
    let ex = error_field(u, v, ErrorDerivative::Dx, c)?;
    let sup_err_dxu = ex.max_abs_in(ta, tb, xa, xb);
    drop(ex);

    let rel = four_current(u, &run.kg.dtu, c)?;
    let cl = nr_current(&run.ansatz.v_minus, &run.ansatz.v_plus)?;
    let zb = zitterbewegung(&run.ansatz.v_minus, &run.ansatz.v_plus, c)?;
    let rho_err = rel.rho.sub(&cl.rho)?.max_abs_in(ta, tb, xa, xb);
    let j_raw = rel.j.sub(&cl.j)?;
    let j_raw_err = j_raw.max_abs_in(ta, tb, xa, xb);
    let j_sub_err = j_raw.sub(&zb)?.max_abs_in(ta, tb, xa, xb);
    Ok(SweepErrors { sup_err, weighted_err, sup_err_dtu, sup_err_dxu, rho_err, j_sub_err, j_raw_err })
}
