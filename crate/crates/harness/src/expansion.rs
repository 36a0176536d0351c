//! Free-field comparison of `e^{-+ic^2 t} u_+-` with `v_+-`, with and without
//! the first correction term.

use kgnr_core::free_kg::{error_expansion_term, free_evolve_modulated, free_schrodinger, FreeData};
use kgnr_core::{Branch, Result};
use num_complex::Complex64;

use crate::rate::{fit_rate, RateFit};

#[derive(Clone, Debug)]
pub struct ExpansionReport {
    pub c_values: Vec<f64>,
    /// `sup_x |e^{-+ic^2 t} u_+- - v_+-|`, max over both branches.
    pub raw: Vec<f64>,
    /// Same after subtracting `c^{-2} E_1`.
    pub corrected: Vec<f64>,
    pub raw_fit: Option<RateFit>,
    pub corrected_fit: Option<RateFit>,
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Periodic samples with spacing `dx`; evaluation at time `t`.
pub fn free_expansion(phi: &[Complex64], psi: &[Complex64], dx: f64, cs: &[f64], t: f64) -> Result<ExpansionReport> {
    let mut raw = Vec::new();
    let mut corrected = Vec::new();
    for &c in cs {
        let data = FreeData::from_samples(phi, psi, dx, c)?;
        let (mut r, mut k) = (0.0f64, 0.0f64);
        for b in Branch::both() {
            let inf = data.inf(b)?;
            let u = free_evolve_modulated(&data, b, t);
            let v = free_schrodinger(&inf, b, t);
            let e1 = error_expansion_term(1, &inf, &data.psi_hat, b, t)?;
            let v1: Vec<Complex64> = v.iter().zip(&e1).map(|(a, e)| a + e / (c * c)).collect();
            r = r.max(sup_diff(&u, &v));
            k = k.max(sup_diff(&u, &v1));
        }
        raw.push(r);
        corrected.push(k);
    }
    Ok(ExpansionReport {
        c_values: cs.to_vec(),
        raw_fit: fit_rate(cs, &raw).ok(),
        corrected_fit: fit_rate(cs, &corrected).ok(),
        raw,
        corrected,
    })
}
