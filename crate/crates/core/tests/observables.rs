use kgnr_core::coeffs::CoefficientSet;
use kgnr_core::kg::{solve_kg, KGProblem};
use kgnr_core::observables::{error_field, four_current, nr_current, zitterbewegung, ErrorDerivative};
use kgnr_core::{make_grid, ComplexField};
use num_complex::Complex64;
use proptest::prelude::*;

fn z(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn plane_wave_currents() {
    let (c, k) = (2.0f64, 1.3f64);
    let omega = c * (k * k + c * c).sqrt();
    let g = make_grid(-1.0, 1.0, 2001, 0.0, 0.5, 6).unwrap();
    let u = ComplexField::from_fn(&g, |t, x| Complex64::cis(k * x - omega * t));
    let dtu = u.map(|v| v * z(0.0, -omega));
    let cp = four_current(&u, &dtu, c).unwrap();
    for n in 0..g.nt {
        for i in 1..g.nx - 1 {
            assert!((cp.rho.at(n, i) + omega / (c * c)).abs() < 1e-6);
            assert!((cp.j.at(n, i) - k).abs() < 1e-6);
        }
    }
    let zero = ComplexField::zeros(&g);
    let vp = ComplexField::from_fn(&g, |_, x| Complex64::cis(k * x));
    let nr = nr_current(&zero, &vp).unwrap();
    for n in 0..g.nt {
        for i in 1..g.nx - 1 {
            assert!((nr.rho.at(n, i) - 1.0).abs() < 1e-12);
            assert!((nr.j.at(n, i) - k).abs() < 1e-6);
        }
    }
}

#[test]
fn real_fields_carry_nothing() {
    let g = make_grid(-3.0, 3.0, 61, 0.0, 1.0, 5).unwrap();
    let u = ComplexField::from_fn(&g, |t, x| z((x * t).sin() + x * x, 0.0));
    let du = ComplexField::from_fn(&g, |t, x| z(x * (x * t).cos(), 0.0));
    let cp = four_current(&u, &du, 3.0).unwrap();
    assert_eq!(cp.rho.max_abs(), 0.0);
    assert_eq!(cp.j.max_abs(), 0.0);
    let nr = nr_current(&u, &u).unwrap();
    assert_eq!(nr.rho.max_abs(), 0.0);
}

#[test]
fn zitterbewegung_needs_both_branches() {
    let c = 2.0;
    let g = make_grid(-3.0, 3.0, 61, 0.0, 1.0, 5).unwrap();
    let zero = ComplexField::zeros(&g);
    let v = ComplexField::from_fn(&g, |t, x| z((-x * x).exp(), t * x));
    assert_eq!(zitterbewegung(&zero, &v, c).unwrap().max_abs(), 0.0);
    assert_eq!(zitterbewegung(&v, &zero, c).unwrap().max_abs(), 0.0);
    // e^{2ic^2 t} = 1 at t = pi / c^2 and real branches interfere to zero
    let t1 = std::f64::consts::PI / (c * c);
    let g1 = make_grid(-3.0, 3.0, 61, 0.0, t1, 2).unwrap();
    let a = ComplexField::from_fn(&g1, |_, x| z((-x * x).exp(), 0.0));
    let b = ComplexField::from_fn(&g1, |_, x| z(x * (-x * x).exp(), 0.0));
    let zb = zitterbewegung(&a, &b, c).unwrap();
    for i in 0..g1.nx {
        assert!(zb.at(1, i).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn constant_phase_leaves_currents_unchanged(theta in -3.2f64..3.2, seed in 0.0f64..10.0) {
        let g = make_grid(-3.0, 3.0, 61, 0.0, 1.0, 5).unwrap();
        let u = ComplexField::from_fn(&g, |t, x| z((x + seed).sin() * (-x * x).exp(), (t * x - seed).cos()));
        let du = ComplexField::from_fn(&g, |t, x| z(x * t, seed * (x).cos()));
        let ph = Complex64::cis(theta);
        let a = four_current(&u, &du, 1.7).unwrap();
        let b = four_current(&u.scale(ph), &du.scale(ph), 1.7).unwrap();
        prop_assert!(a.rho.sub(&b.rho).unwrap().max_abs() < 1e-12);
        prop_assert!(a.j.sub(&b.j).unwrap().max_abs() < 1e-12);
        let c = nr_current(&u.scale(ph), &du.scale(ph)).unwrap();
        let d = nr_current(&u, &du).unwrap();
        prop_assert!(c.rho.sub(&d.rho).unwrap().max_abs() < 1e-12);
        prop_assert!(c.j.sub(&d.j).unwrap().max_abs() < 1e-12);
    }
}

/// L2 norm of `d_t rho - d_x j` at the middle record, by central differences.
/// With these definitions `d_t rho = c^{-2} Im(conj(u) u_tt) = Im(conj(u) u_xx) = d_x j`.
fn conservation_residual(nx: usize) -> f64 {
    let c = 1.0;
    let g = make_grid(-15.0, 15.0, nx, 0.0, 1.0, 2 * (nx - 1) / 30 + 1).unwrap();
    let phi: Vec<Complex64> = g.xs().iter().map(|&x| z((-x * x).exp(), 0.0)).collect();
    let psi: Vec<Complex64> = g.xs().iter().map(|&x| z(0.0, 0.5 * (-(x - 0.5) * (x - 0.5)).exp())).collect();
    let sol = solve_kg(&KGProblem::cauchy(CoefficientSet::free(), c, g.clone(), phi, psi)).unwrap();
    let cp = four_current(&sol.u, &sol.dtu, c).unwrap();
    let n = g.nt / 2;
    let mut acc = 0.0;
    for i in 1..g.nx - 1 {
        let dr = (cp.rho.at(n + 1, i) - cp.rho.at(n - 1, i)) / (2.0 * g.dt);
        let dj = (cp.j.at(n, i + 1) - cp.j.at(n, i - 1)) / (2.0 * g.dx);
        acc += (dr - dj).powi(2) * g.dx;
    }
    acc.sqrt()
}

#[test]
fn charge_conservation_improves_at_second_order() {
    let r: Vec<f64> = [301, 601, 1201].iter().map(|&n| conservation_residual(n)).collect();
    for w in r.windows(2) {
        let q = w[0] / w[1];
        assert!(q > 3.5 && q < 4.5, "{r:?}");
    }
}

#[test]
fn error_field_variants() {
    let c = 2.0;
    let g = make_grid(-3.0, 3.0, 61, 0.0, 1.0, 5).unwrap();
    let u = ComplexField::from_fn(&g, |t, x| z(x.sin(), t));
    let v = ComplexField::from_fn(&g, |t, x| z(x.cos(), -t * x));
    assert_eq!(error_field(&u, &u, ErrorDerivative::None, c).unwrap().max_abs(), 0.0);
    assert_eq!(error_field(&u, &u, ErrorDerivative::Dx, c).unwrap().max_abs(), 0.0);
    let d = error_field(&u, &v, ErrorDerivative::None, c).unwrap();
    assert_eq!(d.data(), u.sub(&v).unwrap().data());
    let other = make_grid(-3.0, 3.0, 62, 0.0, 1.0, 5).unwrap();
    assert!(error_field(&u, &ComplexField::zeros(&other), ErrorDerivative::None, c).is_err());
}
