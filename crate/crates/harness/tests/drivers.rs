use std::sync::Arc;

use kgnr_core::coeffs::{CoefficientSet, CompactBump, Shape};
use kgnr_core::config::RunConfig;
use kgnr_core::kg::Forcing;
use kgnr_core::make_grid;
use kgnr_harness::experiments::Registry;
use kgnr_harness::natural::{natural_sweep, NaturalSpec, NATURAL_C};
use kgnr_harness::pipeline::{run_pipeline, solve_branches, Setup, Source};
use kgnr_harness::sweep::{c_sweep, run_example1, run_forced};
use num_complex::Complex64;

fn cfg(lines: &[(&str, &str)]) -> RunConfig {
    let mut c = RunConfig::default();
    for (k, v) in lines {
        c.set(k, v).unwrap();
    }
    c
}

fn zero_forcing() -> Forcing {
    Arc::new(|_, _| Complex64::new(0.0, 0.0))
}

#[test]
fn registry_has_every_subcommand() {
    let r = Registry::builtin();
    let names = [
        "example1", "sweep", "forced", "natural", "trajectory", "orders", "free", "greens", "kg", "schrodinger", "current",
    ];
    for n in names {
        assert!(r.get(n).is_some(), "{n} missing");
    }
    assert_eq!(r.iter().count(), names.len());
}

#[test]
fn zero_forcing_gives_zero_fields() {
    let g = make_grid(-10.0, 10.0, 401, 0.0, 1.0, 21).unwrap();
    let mut s = Setup::cauchy(CoefficientSet::example1(), g, Vec::new(), Vec::new());
    s.source = Source::Forced { f_minus: zero_forcing(), f_plus: zero_forcing() };
    let br = solve_branches(&s).unwrap();
    let run = run_pipeline(&s, &br, 3.0).unwrap();
    assert_eq!(run.kg.u.max_abs(), 0.0);
    assert_eq!(run.ansatz.v.max_abs(), 0.0);
}

#[test]
fn forced_fields_vanish_before_the_source() {
    let g = make_grid(-10.0, 10.0, 801, 0.0, 1.0, 51).unwrap();
    let bump = CompactBump { a: 1.0, t0: 0.5, rt: 0.3, x0: 0.0, rx: 1.5 };
    let fp: Forcing = Arc::new(move |t, x| Complex64::new((-(x * x)).exp() * bump.eval(t, 0.0), 0.0));
    let mut s = Setup::cauchy(CoefficientSet::free(), g.clone(), Vec::new(), Vec::new());
    s.source = Source::Forced { f_minus: zero_forcing(), f_plus: fp };
    let br = solve_branches(&s).unwrap();
    let run = run_pipeline(&s, &br, 4.0).unwrap();
    for n in 0..g.nt {
        if g.t(n) < 0.2 {
            assert!(run.kg.u.row(n).iter().all(|z| *z == Complex64::new(0.0, 0.0)), "t = {}", g.t(n));
            assert!(br.v_plus.row(n).iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        }
    }
    assert!(run.kg.u.max_abs() > 1e-3);
}

#[test]
fn example1_bundle() {
    let c = cfg(&[("nt", "201")]);
    let dir = tempfile::tempdir().unwrap();
    let b = run_example1(&c, Some(dir.path())).unwrap();
    assert_eq!(b.rows.len(), 3);
    assert!(b.rows[0].non_asymptotic, "c = 1 should be flagged");
    assert!(b.rows[2].sup_err < b.rows[1].sup_err);
    assert_eq!(b.files.len(), 3);
    // psi = 0: both branches start from phi / 2
    let s = Setup::from_config(&c).unwrap();
    let br = solve_branches(&s).unwrap();
    let g = &s.grid;
    for i in 0..g.nx {
        let half = 0.5 * (-g.x(i) * g.x(i)).exp();
        assert_eq!(br.v_plus.at(0, i), Complex64::new(half, 0.0));
        assert_eq!(br.v_minus.at(0, i), Complex64::new(half, 0.0));
    }
    // identical configuration, identical bytes
    let again = tempfile::tempdir().unwrap();
    let b2 = run_example1(&c, Some(again.path())).unwrap();
    for (f1, f2) in b.files.iter().zip(&b2.files) {
        assert_eq!(f1.file_name(), f2.file_name());
        assert_eq!(std::fs::read(f1).unwrap(), std::fs::read(f2).unwrap());
    }
}

#[test]
fn example1_sweep_is_monotone() {
    let r = c_sweep(&RunConfig::default()).unwrap();
    let e = r.column("sup_err");
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
}

#[test]
fn free_sweep_rate() {
    // same e^{-x^2/2} pair as the free expansion check
    let c = cfg(&[
        ("preset", "free"),
        ("phi", "gaussian(1,0,1.41421356)"),
        ("psi", "gaussian(1,0,1.41421356)"),
        ("c_list", "2,3,4,6,8"),
    ]);
    let s = c_sweep(&c).unwrap().fitted_slope();
    assert!((-2.4..=-1.6).contains(&s), "slope {s}");
}

#[test]
fn odd_inverse_c_coefficient_gives_first_order() {
    // the extra phase 16/c over [0, 2] saturates the error for c <= 8
    let c = cfg(&[("v_inv_c", "1, 0"), ("c_list", "6,8,12,16"), ("nt", "801")]);
    let s = c_sweep(&c).unwrap().fitted_slope();
    assert!((-1.4..=-0.6).contains(&s), "slope {s}");
}

#[test]
fn forced_example1_rate() {
    let r = run_forced(&RunConfig::default()).unwrap();
    let s = r.fitted_slope();
    assert!(s <= -0.8, "slope {s}");
}

#[test]
fn natural_slope_does_not_depend_on_the_horizon() {
    let spec = |t: &str, nt: &str| NaturalSpec::from_config(&cfg(&[("t_max", t), ("nt", nt), ("x_min", "-40"), ("x_max", "40"), ("nx", "1601")])).unwrap();
    let a = natural_sweep(&spec("1", "101"), &NATURAL_C).unwrap();
    let b = natural_sweep(&spec("2", "201"), &NATURAL_C).unwrap();
    let (fa, fb) = (a.fit.unwrap(), b.fit.unwrap());
    assert!((fa.slope - fb.slope).abs() <= fa.stderr.hypot(fb.stderr) * 2.0 + 0.1, "{} vs {}", fa.slope, fb.slope);
    assert!(b.sup_err[0] > a.sup_err[0]);
}
