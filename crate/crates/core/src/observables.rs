//! Charge and current densities, the interference (Zitterbewegung) current
//! and error fields between `u` and the ansatz.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::{ComplexField, FieldKind, RealField};
use crate::stencil::d1;

#[derive(Clone, Debug)]
pub struct CurrentPair {
    pub rho: RealField,
    pub j: RealField,
}

fn rows_to_field(like: &ComplexField, rows: Vec<Vec<f64>>) -> Result<RealField> {
    let g = like.grid();
    match like.kind() {
        FieldKind::History => RealField::from_rows(g, rows),
        FieldKind::Snapshot { t } => RealField::snapshot(g, t, rows.into_iter().next().unwrap()),
    }
}

fn dx_rows(f: &ComplexField) -> Vec<Vec<Complex64>> {
    (0..f.rows()).map(|n| d1(f.row(n), f.grid().dx)).collect()
}

/// `rho = c^{-2} Im(conj(u) u_t)`, `j = Im(conj(u) D_x u)`.
pub fn four_current(u: &ComplexField, dtu: &ComplexField, c: f64) -> Result<CurrentPair> {
    u.check_compatible(dtu)?;
    let inv = 1.0 / (c * c);
    let rho = u.zip_with(dtu, |a, b| inv * (a.conj() * b).im)?;
    let du = dx_rows(u);
    let rows = (0..u.rows())
        .map(|n| u.row(n).iter().zip(&du[n]).map(|(a, d)| (a.conj() * d).im).collect())
        .collect();
    Ok(CurrentPair { rho, j: rows_to_field(u, rows)? })
}

/// `rho_cl = |v_+|^2 - |v_-|^2`, `j_cl = Im(conj(v_+) D_x v_+) + Im(conj(v_-) D_x v_-)`.
pub fn nr_current(v_minus: &ComplexField, v_plus: &ComplexField) -> Result<CurrentPair> {
    v_minus.check_compatible(v_plus)?;
    let rho = v_plus.zip_with(v_minus, |p, m| p.norm_sqr() - m.norm_sqr())?;
    let dp = dx_rows(v_plus);
    let dm = dx_rows(v_minus);
    let rows = (0..v_plus.rows())
        .map(|n| {
            (0..v_plus.grid().nx)
                .map(|i| (v_plus.at(n, i).conj() * dp[n][i]).im + (v_minus.at(n, i).conj() * dm[n][i]).im)
                .collect()
        })
        .collect();
    Ok(CurrentPair { rho, j: rows_to_field(v_plus, rows)? })
}

/// `j_zb = Im(e^{-2ic^2 t} conj(v_+) D_x v_- + e^{2ic^2 t} conj(v_-) D_x v_+)`.
pub fn zitterbewegung(v_minus: &ComplexField, v_plus: &ComplexField, c: f64) -> Result<RealField> {
    v_minus.check_compatible(v_plus)?;
    let dp = dx_rows(v_plus);
    let dm = dx_rows(v_minus);
    let c2 = c * c;
    let rows = (0..v_plus.rows())
        .map(|n| {
            let e = Complex64::cis(2.0 * c2 * v_plus.time(n));
            (0..v_plus.grid().nx)
                .map(|i| (e.conj() * v_plus.at(n, i).conj() * dm[n][i] + e * v_minus.at(n, i).conj() * dp[n][i]).im)
                .collect()
        })
        .collect();
    rows_to_field(v_plus, rows)
}

/// Which operator `L` to apply to `u - v`.
#[derive(Clone, Copy, Debug)]
pub enum ErrorDerivative<'a> {
    None,
    /// `c^{-2} dt`, from solver-provided `u_t` and the ansatz's `c^{-2} v_t`.
    InvC2Dt { dtu: &'a ComplexField, inv_c2_dtv: &'a ComplexField },
    Dx,
}

pub fn error_field(u: &ComplexField, v: &ComplexField, derivative: ErrorDerivative<'_>, c: f64) -> Result<ComplexField> {
    u.check_compatible(v)?;
    match derivative {
        ErrorDerivative::None => u.sub(v),
        ErrorDerivative::InvC2Dt { dtu, inv_c2_dtv } => {
            u.check_compatible(dtu)?;
            u.check_compatible(inv_c2_dtv)?;
            let inv = 1.0 / (c * c);
            dtu.zip_with(inv_c2_dtv, |a, b| a * inv - b)
        }
        ErrorDerivative::Dx => {
            let d = u.sub(v)?;
            let rows = dx_rows(&d);
            let g = d.grid();
            match d.kind() {
                FieldKind::History => ComplexField::from_rows(g, rows),
                FieldKind::Snapshot { t } => ComplexField::snapshot(g, t, rows.into_iter().next().unwrap()),
            }
        }
    }
}
