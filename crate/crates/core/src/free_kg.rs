//! Exact Fourier-side formulas for the free Klein-Gordon equation
//! `c^{-2} u_tt - u_xx + c^2 u = 0` on a periodic window, plus the
//! one-dimensional retarded Green's function.
//!
//! Frequency integrals `(2 pi)^{-1} int e^{ix xi} m(xi) phi_hat(xi) d xi` are
//! evaluated as inverse DFTs of `m(xi_k)` times the DFT of the samples.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bessel::j0_unchecked;
use crate::dft::{boundary_guard, dft_forward, dft_inverse, Spectrum, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::field::{ComplexField, FieldKind};
use crate::grid::SpaceTimeGrid;
use crate::kg::Forcing;
use crate::Branch;

/// `c sqrt(xi^2 + c^2) - c^2`, written to avoid cancellation.
#[inline]
pub fn translated_dispersion(xi: f64, c: f64) -> f64 {
    c * xi * xi / ((xi * xi + c * c).sqrt() + c)
}

/// `phi_hat_+-(xi; c) = (phi_hat -+ i c (xi^2 + c^2)^{-1/2} psi_hat)/2`, as `(plus, minus)`.
pub fn free_phi_pm(phi_hat: &Spectrum, psi_hat: &Spectrum, c: f64) -> Result<(Spectrum, Spectrum)> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
    }
    let i = Complex64::new(0.0, 1.0);
    let m = |xi: f64| c / (xi * xi + c * c).sqrt();
    let plus = phi_hat.zip(psi_hat, |xi, f, g| (f - i * m(xi) * g) * 0.5)?;
    let minus = phi_hat.zip(psi_hat, |xi, f, g| (f + i * m(xi) * g) * 0.5)?;
    Ok((plus, minus))
}

/// `c -> infinity` limit of [`free_phi_pm`]: `(phi_hat -+ i psi_hat)/2`.
pub fn phi_pm_inf(phi_hat: &Spectrum, psi_hat: &Spectrum) -> Result<(Spectrum, Spectrum)> {
    let i = Complex64::new(0.0, 1.0);
    Ok((phi_hat.zip(psi_hat, |_, f, g| (f - i * g) * 0.5)?, phi_hat.zip(psi_hat, |_, f, g| (f + i * g) * 0.5)?))
}

/// Branch spectra of the free solution at a given `c`.
#[derive(Clone, Debug)]
pub struct FreeData {
    pub plus: Spectrum,
    pub minus: Spectrum,
    pub phi_hat: Spectrum,
    pub psi_hat: Spectrum,
    pub c: f64,
}

impl FreeData {
    /// Transform periodic samples of `(phi, psi)` (with `u_t(0) = c^2 psi`).
    /// Both profiles must vanish at the window edges.
    pub fn from_samples(phi: &[Complex64], psi: &[Complex64], dx: f64, c: f64) -> Result<Self> {
        boundary_guard(phi, BOUNDARY_TOL)?;
        boundary_guard(psi, BOUNDARY_TOL)?;
        let phi_hat = dft_forward(phi, dx)?;
        let psi_hat = dft_forward(psi, dx)?;
        let (plus, minus) = free_phi_pm(&phi_hat, &psi_hat, c)?;
        Ok(FreeData { plus, minus, phi_hat, psi_hat, c })
    }

    pub fn branch(&self, b: Branch) -> &Spectrum {
        match b {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }

    /// Branch data at `c = infinity`.
    pub fn inf(&self, b: Branch) -> Result<Spectrum> {
        let (p, m) = phi_pm_inf(&self.phi_hat, &self.psi_hat)?;
        Ok(match b {
            Branch::Plus => p,
            Branch::Minus => m,
        })
    }
}

/// Spectrum of `u_+-(t)`: bins multiplied by `e^{+-i c t sqrt(xi^2+c^2)}`.
pub fn evolve_spectrum(data: &FreeData, b: Branch, t: f64) -> Spectrum {
    let c = data.c;
    let s = b.sign();
    data.branch(b).apply(|xi| Complex64::cis(s * c * t * (xi * xi + c * c).sqrt()))
}

/// `(u_+(t), u_-(t))` with `u = u_+ + u_-`.
pub fn free_evolve(data: &FreeData, t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    (dft_inverse(&evolve_spectrum(data, Branch::Plus, t)), dft_inverse(&evolve_spectrum(data, Branch::Minus, t)))
}

/// `e^{-+ic^2 t} u_+-(t)` computed with the translated dispersion, so the
/// large phase `c^2 t` never appears.
pub fn free_evolve_modulated(data: &FreeData, b: Branch, t: f64) -> Vec<Complex64> {
    let c = data.c;
    let s = b.sign();
    dft_inverse(&data.branch(b).apply(|xi| Complex64::cis(s * t * translated_dispersion(xi, c))))
}

/// Free Schrodinger evolution `v_+-(t)`: bins multiplied by `e^{+-i t xi^2/2}`.
pub fn free_schrodinger(spec_inf: &Spectrum, b: Branch, t: f64) -> Vec<Complex64> {
    let s = b.sign();
    dft_inverse(&spec_inf.apply(|xi| Complex64::cis(s * t * xi * xi * 0.5)))
}

/// Relative spectral energy in the top octave `|xi| > xi_nyq/2`.
pub fn top_octave_fraction(s: &Spectrum) -> f64 {
    let nyq = std::f64::consts::PI / s.dx;
    let (mut top, mut all) = (0.0, 0.0);
    for (k, c) in s.coeffs.iter().enumerate() {
        let e = c.norm_sqr();
        all += e;
        if s.xi(k).abs() > 0.5 * nyq {
            top += e;
        }
    }
    if all == 0.0 {
        0.0
    } else {
        top / all
    }
}

pub const TOP_OCTAVE_TOL: f64 = 1e-8;

/// Bins below this fraction of the largest data coefficient are treated as
/// zero by [`error_expansion_term`].
pub const EXPANSION_NOISE_FLOOR: f64 = 1e-13;

/// Coefficient of `c^{-2k}` in `e^{-+ic^2 t} u_+- - v_+-` for `k = 1, 2, 3`.
/// `phi_inf` is the branch spectrum at `c = infinity`, `psi_hat` the
/// spectrum of `psi`.
pub fn error_expansion_term(k: u32, phi_inf: &Spectrum, psi_hat: &Spectrum, b: Branch, t: f64) -> Result<Vec<Complex64>> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidArgument(format!("expansion order {k} not available")));
    }
    for (name, s) in [("phi", phi_inf), ("psi", psi_hat)] {
        let f = top_octave_fraction(s);
        if f >= TOP_OCTAVE_TOL {
            return Err(Error::Dft(format!("{name} is not band-limited enough: top-octave fraction {f:e}")));
        }
    }
    let s = b.sign();
    let i = Complex64::new(0.0, 1.0);
    // the multipliers grow like xi^{4k}; round-off in empty bins would swamp the result
    let floor = EXPANSION_NOISE_FLOOR
        * phi_inf.coeffs.iter().chain(&psi_hat.coeffs).fold(0.0f64, |m, z| m.max(z.norm()));
    let clean = |z: Complex64| if z.norm() <= floor { Complex64::new(0.0, 0.0) } else { z };
    let spec = phi_inf.zip(psi_hat, |xi, f, g| {
        let (f, g) = (clean(f), clean(g));
        let x2 = xi * xi;
        let tx = t * x2;
        let m = match k {
            1 => s * i * 0.25 * x2 * (g - f * (0.5 * tx)),
            2 => {
                0.5 * x2 * x2 * (f * tx * (s * i / 8.0 - tx / 64.0) + g * (0.5 * tx - s * 3.0 * i) / 8.0)
            }
            _ => {
                let x6 = x2 * x2 * x2;
                x6 / 32.0
                    * (f * tx * (-s * 1.25 * i + 0.25 * tx + s * i * tx * tx / 96.0)
                        + g * (s * 5.0 * i - 1.25 * tx - s * i * tx * tx / 16.0))
            }
        };
        m * Complex64::cis(s * 0.5 * tx)
    })?;
    Ok(dft_inverse(&spec))
}

/// Retarded (`Plus`) or advanced (`Minus`) fundamental solution of
/// `c^{-2} dt^2 - dx^2 + c^2`:
/// `(c/2) H(+-t) H(c^2 t^2 - x^2) J0(c sqrt(c^2 t^2 - x^2))`.
/// On the light cone the value is the limit `c/2`.
pub fn greens_1d(t: f64, x: f64, c: f64, b: Branch) -> f64 {
    if b.sign() * t < 0.0 {
        return 0.0;
    }
    let s = c * c * t * t - x * x;
    if s < 0.0 {
        return 0.0;
    }
    0.5 * c * j0_unchecked(c * s.sqrt())
}

/// Sign relating the convolution `G_+ * F` to the solution of `P_0 u = F`,
/// where `P_0 = -c^{-2} dt^2 + dx^2 - c^2`.
pub const GREENS_NORMALIZATION: f64 = -1.0;

#[derive(Clone, Copy, Debug)]
pub struct GreensQuadrature {
    /// Trapezoid nodes in `s` per unit time.
    pub s_per_unit: usize,
    /// Trapezoid nodes across each light-cone slice.
    pub ny: usize,
}

impl Default for GreensQuadrature {
    fn default() -> Self {
        GreensQuadrature { s_per_unit: 200, ny: 200 }
    }
}

fn trapezoid(n: usize, f: impl Fn(usize) -> Complex64, h: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let w = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
        acc += f(k) * w;
    }
    acc * h
}

/// Retarded solution of `P_0 u = f` by direct quadrature against `G_+`.
/// `f` must vanish near the spatial edges and at `t_min`.
pub fn greens_convolve(f: &Forcing, c: f64, grid: &SpaceTimeGrid, q: GreensQuadrature) -> Result<ComplexField> {
    // sampled support in x
    let xs = grid.xs();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for n in 0..grid.nt {
        let t = grid.t(n);
        for (i, &x) in xs.iter().enumerate() {
            if f(t, x).norm() > 0.0 {
                if i == 0 || i + 1 == grid.nx || n == 0 {
                    return Err(Error::Domain(format!("forcing support touches the window at t={t}, x={x}")));
                }
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    if !lo.is_finite() {
        return Ok(ComplexField::zeros(grid));
    }
    let (lo, hi) = (lo - grid.dx, hi + grid.dx);
    let t0 = grid.t_min;
    let pts: Vec<(usize, usize)> = (0..grid.nt).flat_map(|n| (0..grid.nx).map(move |i| (n, i))).collect();
    let vals: Vec<Complex64> = pts
        .par_iter()
        .map(|&(n, i)| {
            let t = grid.t(n);
            let x = xs[i];
            let span = t - t0;
            if span <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let ns = ((span * q.s_per_unit as f64).ceil() as usize).max(2) + 1;
            let ds = span / (ns - 1) as f64;
            let inner = |k: usize| {
                let s = t0 + k as f64 * ds;
                let tau = t - s;
                let a = (x - c * tau).max(lo);
                let b = (x + c * tau).min(hi);
                if b <= a {
                    return Complex64::new(0.0, 0.0);
                }
                let dy = (b - a) / (q.ny - 1) as f64;
                trapezoid(q.ny, |m| {
                    let y = a + m as f64 * dy;
                    f(s, y) * greens_1d(tau, x - y, c, Branch::Plus)
                }, dy)
            };
            trapezoid(ns, inner, ds) * GREENS_NORMALIZATION
        })
        .collect();
    Ok(ComplexField::from_parts(grid.clone(), FieldKind::History, vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greens_support_and_values() {
        let c = 2.0;
        assert_eq!(greens_1d(-0.5, 0.0, c, Branch::Plus), 0.0);
        assert_eq!(greens_1d(0.5, 1.01, c, Branch::Plus), 0.0);
        assert_eq!(greens_1d(0.5, 1.0, c, Branch::Plus), 1.0);
        let t = 0.3;
        let want = 0.5 * c * crate::bessel::bessel_j0(c * c * t).unwrap();
        assert_eq!(greens_1d(t, 0.0, c, Branch::Plus), want);
        assert_eq!(greens_1d(-t, 0.0, c, Branch::Minus), want);
    }

    #[test]
    fn translated_dispersion_matches_direct() {
        let c: f64 = 3.0;
        for xi in [0.0f64, 0.5, 2.0, 10.0] {
            let direct = c * (xi * xi + c * c).sqrt() - c * c;
            assert!((translated_dispersion(xi, c) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_pm_zero_mode() {
        let s = Spectrum { coeffs: vec![Complex64::new(2.0, 0.0); 4], dx: 1.0 };
        let g = Spectrum { coeffs: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)], dx: 1.0 };
        let (p, m) = free_phi_pm(&s, &g, 5.0).unwrap();
        assert_eq!(p.coeffs[0], Complex64::new(1.0, 0.0));
        assert_eq!(m.coeffs[0], Complex64::new(1.0, 0.0));
        let g0 = Spectrum { coeffs: vec![Complex64::new(4.0, 0.0); 4], dx: 1.0 };
        let (p, _) = free_phi_pm(&s, &g0, 5.0).unwrap();
        assert_eq!(p.coeffs[0], Complex64::new(1.0, -2.0));
    }

    #[test]
    fn expansion_order_checked() {
        let s = Spectrum { coeffs: vec![Complex64::new(0.0, 0.0); 4], dx: 1.0 };
        assert!(error_expansion_term(4, &s, &s, Branch::Plus, 0.0).is_err());
    }
}
