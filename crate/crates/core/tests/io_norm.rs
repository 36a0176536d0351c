use kgnr_core::config::RunConfig;
use kgnr_core::norm::{weighted_norm, Exponent, WeightSpec};
use kgnr_core::table::{emit_csv, read_csv, Table};
use kgnr_core::{make_grid, ComplexField, Error};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn weighted_norm_is_homogeneous(ar in -5.0f64..5.0, ai in -5.0f64..5.0, seed in 0u64..1000, two in any::<bool>()) {
        let g = make_grid(-3.0, 3.0, 31, 0.0, 1.0, 6).unwrap();
        let s = seed as f64;
        let f = ComplexField::from_fn(&g, |t, x| Complex64::new((x * s + t).sin(), (x - s * t).cos()));
        let a = Complex64::new(ar, ai);
        let p = if two { Exponent::Two } else { Exponent::Inf };
        for w in [WeightSpec::sup(), WeightSpec::weighted(0.1, p)] {
            let n1 = weighted_norm(&f.scale(a), &w).unwrap();
            let n0 = weighted_norm(&f, &w).unwrap();
            prop_assert!((n1 - a.norm() * n0).abs() <= 1e-12 * (1.0 + n1));
        }
    }

    #[test]
    fn plain_sup_is_max_abs(seed in 0u64..1000) {
        let g = make_grid(-1.0, 2.0, 17, -1.0, 1.0, 9).unwrap();
        let s = seed as f64 * 0.37;
        let f = ComplexField::from_fn(&g, |t, x| Complex64::new((x * s).cos() * t, x + s));
        prop_assert_eq!(weighted_norm(&f, &WeightSpec::sup()).unwrap(), f.max_abs());
    }

    #[test]
    fn grid_end_point(a in -100.0f64..0.0, w in 0.1f64..100.0, nx in 3usize..5000) {
        let g = make_grid(a, a + w, nx, 0.0, 1.0, 2).unwrap();
        prop_assert!((g.x(nx - 1) - (a + w)).abs() <= 4.0 * f64::EPSILON * (a.abs() + w));
    }
}

#[test]
fn weighted_norm_of_constant() {
    let g = make_grid(-10.0, 10.0, 201, 0.0, 2.0, 21).unwrap();
    let f = ComplexField::from_fn(&g, |_, _| Complex64::new(1.0, 0.0));
    assert_eq!(weighted_norm(&f, &WeightSpec::sup()).unwrap(), 1.0);
    assert_eq!(weighted_norm(&f, &WeightSpec::weighted(0.1, Exponent::Inf)).unwrap(), 1.0);
    assert!(weighted_norm(&f, &WeightSpec::weighted(0.0, Exponent::Inf)).is_err());
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/sweep.csv");
    let mut t = Table::new(["c", "sup_err", "weighted_err", "sup_err_dtu", "sup_err_dxu"]);
    for k in 1..20 {
        let c = k as f64 * 0.7;
        t.push(vec![c, 1.0 / (c * c), (1.0 / 3.0) * c.sqrt(), 1e-300 * c, -std::f64::consts::PI / c]).unwrap();
    }
    emit_csv(&t, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.header, t.header);
    for (a, b) in t.rows.iter().zip(&back.rows) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-12 * x.abs());
        }
    }
    assert!(t.push(vec![1.0]).is_err());
}

#[test]
fn csv_shapes_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    emit_csv(&Table::new(["a", "b"]), &empty).unwrap();
    assert_eq!(std::fs::read_to_string(&empty).unwrap().lines().count(), 1);
    let one = dir.path().join("one.csv");
    let mut t = Table::new(["a"]);
    t.push(vec![2.5]).unwrap();
    emit_csv(&t, &one).unwrap();
    assert_eq!(std::fs::read_to_string(&one).unwrap(), "a\n2.5\n");
    match read_csv(&dir.path().join("missing.csv")) {
        Err(Error::Io { path, .. }) | Err(Error::Csv { path, .. }) => assert!(path.ends_with("missing.csv")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.cfg");
    std::fs::write(&p, "preset = gravity_bump\nm0 = 0.5\nc_list = 3, 4, 6\n").unwrap();
    let cfg = RunConfig::from_file(&p).unwrap();
    assert_eq!(cfg.preset, "gravity_bump");
    assert_eq!(cfg.c_list, vec![3.0, 4.0, 6.0]);
    cfg.validate().unwrap();
    assert!(RunConfig::parse_str("colour = red\n").is_err());
    assert!(RunConfig::parse_str("nx = many\n").is_err());
    // unknown presets are caught at parse time or at validation
    let bad = RunConfig::parse_str("preset = nothing\n");
    assert!(bad.map_or(true, |c| c.validate().is_err()));
}
