//! Retarded Green's-function cross-check of the time-domain solver.

use std::sync::Arc;

use kgnr_core::coeffs::{CoefficientSet, CompactBump, Shape};
use kgnr_core::free_kg::{greens_1d, greens_convolve, GreensQuadrature};
use kgnr_core::kg::{solve_kg, Forcing, KGProblem};
use kgnr_core::{make_grid, Branch, ComplexField, Error, Result, SpaceTimeGrid, Support};
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct GreensReport {
    pub c: f64,
    /// `||u_kg - u_conv|| / ||u_kg||` over the coarse nodes.
    pub rel_l2: f64,
    pub norm_kg: f64,
    pub parity_ok: bool,
    pub support_ok: bool,
    /// Quadrature solution on the coarse grid.
    pub conv: ComplexField,
    /// Time-domain solution restricted to the coarse nodes.
    pub kg: ComplexField,
}

pub fn default_greens_forcing() -> Forcing {
    let b = CompactBump { a: 1.0, t0: 0.6, rt: 0.4, x0: 0.0, rx: 1.5 };
    Arc::new(move |t, x| Complex64::new(b.eval(t, x), 0.0))
}

/// `G(t, x) = G(t, -x)`, `G_-(t, x) = G_+(-t, x)` and zero outside the
/// closed forward cone, on a deterministic lattice of probe points.
pub fn greens_invariants(c: f64) -> (bool, bool) {
    let mut parity = true;
    let mut support = true;
    for a in -40..=40 {
        for b in -40..=40 {
            let t = a as f64 * 0.037;
            let x = b as f64 * 0.053;
            let gp = greens_1d(t, x, c, Branch::Plus);
            parity &= gp == greens_1d(t, -x, c, Branch::Plus);
            parity &= greens_1d(-t, x, c, Branch::Minus) == gp;
            let inside = t >= 0.0 && c * c * t * t - x * x >= 0.0;
            support &= inside || gp == 0.0;
        }
    }
    (parity, support)
}

/// Solve `P_0 u = F` on `fine` by the time-domain solver and by quadrature
/// on `coarse`, whose nodes must be nodes of `fine`.
pub fn greens_check(c: f64, f: Forcing, fine: &SpaceTimeGrid, coarse: &SpaceTimeGrid, q: GreensQuadrature) -> Result<GreensReport> {
    let kg = solve_kg(&KGProblem::forced(CoefficientSet::free(), c, fine.clone(), f.clone(), Support::Retarded))?;
    let conv = greens_convolve(&f, c, coarse, q)?;
    let node = |v: f64, lo: f64, h: f64| -> Result<usize> {
        let k = ((v - lo) / h).round();
        if ((lo + k * h) - v).abs() > 1e-9 {
            return Err(Error::GridMismatch);
        }
        Ok(k as usize)
    };
    let (mut num, mut den) = (0.0, 0.0);
    let mut rows = Vec::with_capacity(coarse.nt);
    for n in 0..coarse.nt {
        let nf = node(coarse.t(n), fine.t_min, fine.dt)?;
        let mut row = Vec::with_capacity(coarse.nx);
        for i in 0..coarse.nx {
            let i_f = node(coarse.x(i), fine.x_min, fine.dx)?;
            let a = kg.u.at(nf, i_f);
            num += (a - conv.at(n, i)).norm_sqr();
            den += a.norm_sqr();
            row.push(a);
        }
        rows.push(row);
    }
    let (parity_ok, support_ok) = greens_invariants(c);
    let kg = ComplexField::from_rows(coarse, rows)?;
    Ok(GreensReport { c, rel_l2: (num / den).sqrt(), norm_kg: den.sqrt(), parity_ok, support_ok, conv, kg })
}

/// The standard configuration: `c = 2`, fine grid `[-10, 10] x [0, 2]`,
/// comparison on `[-6, 6]` every 0.25 in `x` and 0.1 in `t`.
pub fn default_greens_check(c: f64) -> Result<GreensReport> {
    let fine = make_grid(-10.0, 10.0, 2001, 0.0, 2.0, 201)?;
    let coarse = make_grid(-6.0, 6.0, 49, 0.0, 2.0, 21)?;
    greens_check(c, default_greens_forcing(), &fine, &coarse, GreensQuadrature::default())
}
