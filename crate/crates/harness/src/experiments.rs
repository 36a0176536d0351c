//! Named experiments behind a common trait, one per CLI subcommand.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use kgnr_core::config::RunConfig;
use kgnr_core::free_kg::{error_expansion_term, free_evolve_modulated, free_schrodinger, greens_1d, FreeData};
use kgnr_core::kg::{kg_energy, solve_kg, KGProblem};
use kgnr_core::observables::{four_current, nr_current, zitterbewegung};
use kgnr_core::schrodinger::{solve_schrodinger, split_cauchy_data, AlephWiring, SchrodingerProblem};
use kgnr_core::table::{emit_csv, Table};
use kgnr_core::{Branch, Result};
use num_complex::Complex64;

use crate::expansion::free_expansion;
use crate::greens::{default_greens_forcing, greens_check};
use crate::natural::run_natural;
use crate::orders::verify_orders;
use crate::pipeline::{initial_data, run_pipeline, solve_branches, sweep_errors, Setup};
use crate::sweep::{c_sweep, run_example1, run_forced, CSweepReport};
use crate::trajectory::{classical_trajectory, TrajectoryOptions};

/// One asserted acceptance band.
#[derive(Clone, Debug)]
pub struct Band {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Band {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Band { name: name.into(), ok, detail: detail.into() }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Band::new(name, value >= lo && value <= hi, format!("{value:.4} in [{lo}, {hi}]"))
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", if self.ok { "ok" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub bands: Vec<Band>,
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.bands.iter().all(|b| b.ok)
    }

    fn write(&mut self, table: &Table, path: PathBuf) -> Result<()> {
        emit_csv(table, &path)?;
        self.files.push(path);
        Ok(())
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome>;
}

pub struct Registry {
    items: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { items: BTreeMap::new() }
    }

    pub fn register(&mut self, e: Box<dyn Experiment>) {
        self.items.insert(e.name(), e);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.items.get(name).map(|b| b.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Experiment> {
        self.items.values().map(|b| b.as_ref())
    }

    pub fn builtin() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(Example1));
        r.register(Box::new(Sweep));
        r.register(Box::new(Forced));
        r.register(Box::new(Natural));
        r.register(Box::new(Trajectory));
        r.register(Box::new(Orders));
        r.register(Box::new(Free));
        r.register(Box::new(Greens));
        r.register(Box::new(Kg));
        r.register(Box::new(Schrodinger));
        r.register(Box::new(Current));
        r
    }
}

fn branch_tag(b: Branch) -> &'static str {
    if b == Branch::Plus {
        "plus"
    } else {
        "minus"
    }
}

fn sweep_lines(r: &CSweepReport) -> Vec<String> {
    let mut v: Vec<String> = r
        .c_values
        .iter()
        .zip(&r.errors)
        .map(|(c, e)| format!("c = {c}: sup {:.3e}  c^-2 dt {:.3e}  dx {:.3e}", e.sup_err, e.sup_err_dtu, e.sup_err_dxu))
        .collect();
    if let Some(f) = r.fit {
        v.push(format!("slope {:.3} (ci {:.3}, {:.3})", f.slope, f.ci.0, f.ci.1));
    }
    v.extend(r.notes.iter().cloned());
    v
}

struct Example1;
impl Experiment for Example1 {
    fn name(&self) -> &'static str {
        "example1"
    }
    fn about(&self) -> &'static str {
        "fields, densities and currents at c = 1, 3, 6"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let b = run_example1(cfg, Some(out))?;
        let mut o = Outcome { files: b.files.clone(), ..Outcome::default() };
        for r in &b.rows {
            o.lines.push(format!(
                "c = {}: sup|u-v| = {:.3e}, sup|u| = {:.3e}{}",
                r.c,
                r.sup_err,
                r.sup_u,
                if r.non_asymptotic { "  (non-asymptotic regime)" } else { "" }
            ));
        }
        let at = |c: f64| b.rows.iter().find(|r| r.c == c).unwrap();
        o.bands.push(Band::new("c = 1 flagged non-asymptotic", at(1.0).non_asymptotic, format!("{:.3e}", at(1.0).sup_err)));
        o.bands.push(Band::new(
            "error shrinks from c = 3 to c = 6",
            at(6.0).sup_err < at(3.0).sup_err,
            format!("{:.3e} -> {:.3e}", at(3.0).sup_err, at(6.0).sup_err),
        ));
        Ok(o)
    }
}

struct Sweep;
impl Experiment for Sweep {
    fn name(&self) -> &'static str {
        "sweep"
    }
    fn about(&self) -> &'static str {
        "Cauchy-problem c-sweep with rate fits"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let r = c_sweep(cfg)?;
        let mut o = Outcome { lines: sweep_lines(&r), ..Outcome::default() };
        o.write(&r.table(), out.join("sweep.csv"))?;
        let even = kgnr_core::coeffs::preset_registry().build(&cfg.preset, cfg)?.with_v_inv_c(cfg.v_inv_c.0, cfg.v_inv_c.1).even_in_inv_c();
        let (lo, hi) = if even { (-2.4, -1.6) } else { (-1.4, -0.6) };
        o.bands.push(Band::within("sup|u-v| slope", r.fitted_slope(), lo, hi));
        Ok(o)
    }
}

struct Forced;
impl Experiment for Forced {
    fn name(&self) -> &'static str {
        "forced"
    }
    fn about(&self) -> &'static str {
        "retarded forced problem, sweep over c"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let r = run_forced(cfg)?;
        let mut o = Outcome { lines: sweep_lines(&r), ..Outcome::default() };
        o.write(&r.table(), out.join("forced.csv"))?;
        o.bands.push(Band::new("sup|u-v| slope <= -0.8", r.fitted_slope() <= -0.8, format!("{:.4}", r.fitted_slope())));
        Ok(o)
    }
}

struct Natural;
impl Experiment for Natural {
    fn name(&self) -> &'static str {
        "natural"
    }
    fn about(&self) -> &'static str {
        "dilated Cauchy data on [0, T/c^2] against the rescaled free solution"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let r = run_natural(cfg)?;
        let mut o = Outcome::default();
        let mut t = Table::new(["c", "sup_err"]);
        for (c, e) in r.c_values.iter().zip(&r.sup_err) {
            t.push(vec![*c, *e])?;
            o.lines.push(format!("c = {c}: sup|u-u0| = {e:.3e}"));
        }
        o.write(&t, out.join("natural.csv"))?;
        let slope = r.fit.map_or(f64::NAN, |f| f.slope);
        o.bands.push(Band::within("sup|u-u0| slope", slope, -1.5, -0.5));
        Ok(o)
    }
}

struct Trajectory;
impl Experiment for Trajectory {
    fn name(&self) -> &'static str {
        "trajectory"
    }
    fn about(&self) -> &'static str {
        "classical paths of both branches from rest at x = 0"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let coeffs = kgnr_core::coeffs::preset_registry().build(&cfg.preset, cfg)?;
        let opts = TrajectoryOptions {
            window: cfg.x_max.abs().max(cfg.x_min.abs()),
            wiring: AlephWiring::parse(&cfg.aleph_wiring)?,
            ..TrajectoryOptions::default()
        };
        let mut o = Outcome::default();
        for b in Branch::both() {
            let p = classical_trajectory(b, &coeffs, 0.0, 0.0, (cfg.t_min, cfg.t_max), opts)?;
            let mut t = Table::new(["t", "x", "xi"]);
            for k in 0..p.times.len() {
                t.push(vec![p.times[k], p.positions[k], p.momenta[k]])?;
            }
            o.lines.push(format!("branch {b}: x({}) = {:.4}", cfg.t_max, p.positions.last().unwrap()));
            o.write(&t, out.join(format!("trajectory_{}.csv", branch_tag(b))))?;
        }
        Ok(o)
    }
}

struct Orders;
impl Experiment for Orders {
    fn name(&self) -> &'static str {
        "orders"
    }
    fn about(&self) -> &'static str {
        "graded order memberships and normal operators"
    }
    fn run(&self, _cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let tab = verify_orders();
        let mut o = Outcome::default();
        let mut t = Table::new(["row", "m", "s", "l", "q_plus", "q_minus", "exact", "member"]);
        for (k, r) in tab.rows.iter().enumerate() {
            let c = r.computed.map_or("none".to_string(), |c| c.to_string());
            o.bands.push(Band::new(
                format!("order of {}", r.label),
                r.exact,
                format!("computed {c}, expected {}, member {}", r.expected, r.member),
            ));
            if let Some(m) = r.computed {
                t.push(vec![k as f64, m.m as f64, m.s as f64, m.l as f64, m.q_plus as f64, m.q_minus as f64, r.exact as u8 as f64, r.member as u8 as f64])?;
            }
        }
        for n in &tab.normal {
            o.bands.push(Band::new(n.label.clone(), n.pass, n.detail.clone()));
        }
        o.write(&t, out.join("orders.csv"))?;
        Ok(o)
    }
}

struct Free;
impl Experiment for Free {
    fn name(&self) -> &'static str {
        "free"
    }
    fn about(&self) -> &'static str {
        "spectral free-field branches against Schrodinger, raw and first-order corrected"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let n = cfg.nx.next_power_of_two();
        let dx = (cfg.x_max - cfg.x_min) / n as f64;
        let phi_s = kgnr_core::coeffs::parse_shape(&cfg.phi)?;
        let psi_s = kgnr_core::coeffs::parse_shape(&cfg.psi)?;
        let xs: Vec<f64> = (0..n).map(|j| cfg.x_min + j as f64 * dx).collect();
        let phi: Vec<Complex64> = xs.iter().map(|&x| phi_s.eval(0.0, x).into()).collect();
        let psi: Vec<Complex64> = xs.iter().map(|&x| psi_s.eval(0.0, x).into()).collect();
        let r = free_expansion(&phi, &psi, dx, &cfg.c_list, cfg.t_max)?;
        let mut o = Outcome::default();
        let mut t = Table::new(["c", "raw", "corrected"]);
        for k in 0..r.c_values.len() {
            t.push(vec![r.c_values[k], r.raw[k], r.corrected[k]])?;
        }
        o.write(&t, out.join("free.csv"))?;
        // snapshots at t_max for the largest c
        let c = cfg.c_list.iter().cloned().fold(f64::NAN, f64::max);
        let data = FreeData::from_samples(&phi, &psi, dx, c)?;
        for b in Branch::both() {
            let inf = data.inf(b)?;
            let u = free_evolve_modulated(&data, b, cfg.t_max);
            let v = free_schrodinger(&inf, b, cfg.t_max);
            let e: Vec<Vec<Complex64>> =
                (1..=3).map(|k| error_expansion_term(k, &inf, &data.psi_hat, b, cfg.t_max)).collect::<Result<_>>()?;
            let mut snap = Table::new([
                "x", "re_u", "im_u", "re_v", "im_v", "re_e1", "im_e1", "re_e2", "im_e2", "re_e3", "im_e3",
            ]);
            for j in (0..n).step_by(cfg.stride.max(1)) {
                snap.push(vec![
                    xs[j], u[j].re, u[j].im, v[j].re, v[j].im, e[0][j].re, e[0][j].im, e[1][j].re, e[1][j].im, e[2][j].re,
                    e[2][j].im,
                ])?;
            }
            o.write(&snap, out.join(format!("free_{}.csv", branch_tag(b))))?;
        }
        o.bands.push(Band::within("raw slope", r.raw_fit.map_or(f64::NAN, |f| f.slope), -2.2, -1.8));
        o.bands.push(Band::within("corrected slope", r.corrected_fit.map_or(f64::NAN, |f| f.slope), -4.4, -3.6));
        Ok(o)
    }
}

struct Greens;
impl Experiment for Greens {
    fn name(&self) -> &'static str {
        "greens"
    }
    fn about(&self) -> &'static str {
        "retarded Green's function quadrature against the time-domain solver"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let fine = cfg.grid()?;
        let c = cfg.c_list[0];
        let coarse_x = (fine.x_max - fine.x_min) * 0.3;
        let coarse = kgnr_core::make_grid(-coarse_x, coarse_x, 49, fine.t_min, fine.t_max, 21)?;
        let r = greens_check(c, default_greens_forcing(), &fine, &coarse, Default::default())?;
        let mut o = Outcome::default();
        let mut t = Table::new(["c", "rel_l2"]);
        t.push(vec![c, r.rel_l2])?;
        o.write(&t, out.join("greens.csv"))?;
        let mut k = Table::new(["t", "x", "g_plus"]);
        let mut cmp = Table::new(["t", "x", "re_kg", "im_kg", "re_conv", "im_conv"]);
        for n in 0..coarse.nt {
            for i in 0..coarse.nx {
                let (tt, x) = (coarse.t(n), coarse.x(i));
                k.push(vec![tt, x, greens_1d(tt, x, c, Branch::Plus)])?;
                let (a, b) = (r.kg.at(n, i), r.conv.at(n, i));
                cmp.push(vec![tt, x, a.re, a.im, b.re, b.im])?;
            }
        }
        o.write(&k, out.join("greens_kernel.csv"))?;
        o.write(&cmp, out.join("greens_compare.csv"))?;
        o.bands.push(Band::new("relative L2 <= 0.02", r.rel_l2 <= 0.02, format!("{:.3e}", r.rel_l2)));
        o.bands.push(Band::new("G_+ parity", r.parity_ok, "even in x, G_-(t) = G_+(-t)"));
        o.bands.push(Band::new("G_+ support", r.support_ok, "zero outside the closed forward cone"));
        Ok(o)
    }
}

fn field_table(u: &kgnr_core::ComplexField, name: &str, stride: usize) -> Result<Table> {
    let g = u.grid();
    let mut t = Table::new(["t".to_string(), "x".to_string(), format!("re_{name}"), format!("im_{name}")]);
    for n in (0..g.nt).step_by(stride) {
        for i in (0..g.nx).step_by(stride) {
            let z = u.at(n, i);
            t.push(vec![g.t(n), g.x(i), z.re, z.im])?;
        }
    }
    Ok(t)
}

struct Kg;
impl Experiment for Kg {
    fn name(&self) -> &'static str {
        "kg"
    }
    fn about(&self) -> &'static str {
        "Klein-Gordon solve at each c with energy report"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let s = Setup::from_config(cfg)?;
        let (phi, psi) = initial_data(cfg, &s.grid)?;
        let mut o = Outcome::default();
        for &c in &cfg.c_list {
            let sol = solve_kg(&KGProblem::cauchy(s.coeffs.clone(), c, s.grid.clone(), phi.clone(), psi.clone()))?;
            let e = kg_energy(&sol, c);
            o.lines.push(format!(
                "c = {c}: sup|u| {:.4}, energy {:.6} -> {:.6}, boundary {:.2e}",
                sol.u.max_abs(),
                e[0],
                e[e.len() - 1],
                sol.max_boundary()
            ));
            o.bands.push(Band::new(format!("c = {c} stays off the walls"), !sol.domain_warning, format!("{:.2e}", sol.max_boundary())));
            o.write(&field_table(&sol.u, "u", cfg.stride)?, out.join(format!("kg_c{c}.csv")))?;
        }
        Ok(o)
    }
}

struct Schrodinger;
impl Experiment for Schrodinger {
    fn name(&self) -> &'static str {
        "schrodinger"
    }
    fn about(&self) -> &'static str {
        "one Schrodinger branch with l2-norm drift"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let s = Setup::from_config(cfg)?;
        let (phi, psi) = initial_data(cfg, &s.grid)?;
        let (plus, minus) = split_cauchy_data(&phi, &psi)?;
        let b = if cfg.branch == "minus" { Branch::Minus } else { Branch::Plus };
        let ic = if b == Branch::Plus { plus } else { minus };
        let p = SchrodingerProblem::cauchy(b, s.coeffs.clone(), s.grid.clone(), ic).with_wiring(s.wiring);
        let v = solve_schrodinger(&p)?;
        let norm = |n: usize| v.row(n).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let n0 = norm(0);
        let drift = (0..v.rows()).map(|n| (norm(n) - n0).abs()).fold(0.0, f64::max) / n0.max(f64::MIN_POSITIVE);
        let span = (s.grid.t_max - s.grid.t_min).max(1.0);
        let mut o = Outcome::default();
        o.bands.push(Band::new("relative l2 drift per unit time < 1e-10", drift / span < 1e-10, format!("{:.2e}", drift / span)));
        o.write(&field_table(&v, "v", cfg.stride)?, out.join(format!("schrodinger_{}.csv", cfg.branch)))?;
        Ok(o)
    }
}

struct Current;
impl Experiment for Current {
    fn name(&self) -> &'static str {
        "current"
    }
    fn about(&self) -> &'static str {
        "charge and current errors with and without the interference term"
    }
    fn run(&self, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
        let s = Setup::from_config(cfg)?;
        let br = solve_branches(&s)?;
        let mut o = Outcome::default();
        let mut t = Table::new(["c", "rho_err", "j_sub_err", "j_raw_err"]);
        let cl = nr_current(&br.v_minus, &br.v_plus)?;
        for &c in &cfg.c_list {
            let run = run_pipeline(&s, &br, c)?;
            let rel = four_current(&run.kg.u, &run.kg.dtu, c)?;
            let zb = zitterbewegung(&br.v_minus, &br.v_plus, c)?;
            let g = &s.grid;
            let mut snap = Table::new(["t", "x", "rho", "rho_cl", "j", "j_cl", "j_zb"]);
            for n in (0..g.nt).step_by(cfg.stride.max(1)) {
                for i in (0..g.nx).step_by(cfg.stride.max(1)) {
                    snap.push(vec![g.t(n), g.x(i), rel.rho.at(n, i), cl.rho.at(n, i), rel.j.at(n, i), cl.j.at(n, i), zb.at(n, i)])?;
                }
            }
            o.write(&snap, out.join(format!("current_c{c}.csv")))?;
            let e = sweep_errors(&run, s.window, s.epsilon)?;
            o.lines.push(format!("c = {c}: rho {:.3e}  j-j_zb-j_cl {:.3e}  j-j_cl {:.3e}", e.rho_err, e.j_sub_err, e.j_raw_err));
            t.push(vec![c, e.rho_err, e.j_sub_err, e.j_raw_err])?;
        }
        o.write(&t, out.join("current.csv"))?;
        if let (Some(a), Some(b)) = (t.rows.first(), t.rows.last()) {
            let (c0, c1) = (a[0], b[0]);
            if c1 > c0 {
                let q = |k: usize| a[k] / b[k];
                o.bands.push(Band::new(format!("rho error drops 3x from c = {c0} to {c1}"), q(1) >= 3.0, format!("ratio {:.3}", q(1))));
                o.bands.push(Band::new(format!("j - j_zb - j_cl drops 3x from c = {c0} to {c1}"), q(2) >= 3.0, format!("ratio {:.3}", q(2))));
                o.bands.push(Band::new("j - j_cl changes by less than 3x", q(3) < 3.0 && q(3) > 1.0 / 3.0, format!("ratio {:.3}", q(3))));
            }
        }
        Ok(o)
    }
}

