//! Radix-2 discrete Fourier transform and Fourier multipliers.
//!
//! Forward transform is unnormalised, `X_k = sum_j x_j e^{-2 pi i jk/n}`;
//! the inverse carries the `1/n`. Bin `k` has angular frequency
//! `xi_k = 2 pi k / (n dx)` with `k` taken in `[-n/2, n/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest boundary magnitude tolerated by periodic spectral operations.
pub const BOUNDARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub coeffs: Vec<Complex64>,
    pub dx: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Padding {
    /// Lengths that are not a power of two are an error.
    Strict,
    /// Zero-extend to the next power of two.
    ZeroExtend,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn xi(&self, k: usize) -> f64 {
        freq(k, self.n(), self.dx)
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.xi(k)).collect()
    }

    /// Multiply every bin by `m(xi_k)`.
    pub fn apply(&self, m: impl Fn(f64) -> Complex64) -> Spectrum {
        let coeffs = self.coeffs.iter().enumerate().map(|(k, &c)| c * m(self.xi(k))).collect();
        Spectrum { coeffs, dx: self.dx }
    }

    pub fn zip(&self, other: &Spectrum, f: impl Fn(f64, Complex64, Complex64) -> Complex64) -> Result<Spectrum> {
        if self.n() != other.n() {
            return Err(Error::LengthMismatch { left: self.n(), right: other.n() });
        }
        let coeffs = (0..self.n()).map(|k| f(self.xi(k), self.coeffs[k], other.coeffs[k])).collect();
        Ok(Spectrum { coeffs, dx: self.dx })
    }
}

#[inline]
pub fn freq(k: usize, n: usize, dx: f64) -> f64 {
    let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * PI * kk / (n as f64 * dx)
}

fn fft_in_place(a: &mut [Complex64], inverse: bool) {
    let n = a.len();
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            a.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        // twiddles computed directly rather than by recurrence to keep
        // round-off at the level of a single cis evaluation
        let w: Vec<Complex64> =
            (0..half).map(|k| Complex64::cis(sign * 2.0 * PI * k as f64 / len as f64)).collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = a[start + k];
                let v = a[start + k + half] * w[k];
                a[start + k] = u + v;
                a[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

pub fn dft_forward(samples: &[Complex64], dx: f64) -> Result<Spectrum> {
    dft_forward_with(samples, dx, Padding::Strict)
}

pub fn dft_forward_with(samples: &[Complex64], dx: f64, pad: Padding) -> Result<Spectrum> {
    if samples.is_empty() {
        return Err(Error::Dft("empty input".into()));
    }
    if !(dx > 0.0) {
        return Err(Error::Dft(format!("sample spacing must be positive, got {dx}")));
    }
    let n = samples.len();
    let mut a = samples.to_vec();
    if !n.is_power_of_two() {
        match pad {
            Padding::Strict => {
                return Err(Error::Dft(format!("length {n} is not a power of two")));
            }
            Padding::ZeroExtend => a.resize(n.next_power_of_two(), Complex64::new(0.0, 0.0)),
        }
    }
    fft_in_place(&mut a, false);
    Ok(Spectrum { coeffs: a, dx })
}

pub fn dft_inverse(s: &Spectrum) -> Vec<Complex64> {
    let mut a = s.coeffs.clone();
    fft_in_place(&mut a, true);
    let inv = 1.0 / a.len() as f64;
    a.iter_mut().for_each(|v| *v *= inv);
    a
}

/// `max(|x_0|, |x_{n-1}|)`.
pub fn boundary_magnitude(samples: &[Complex64]) -> f64 {
    match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => a.norm().max(b.norm()),
        _ => 0.0,
    }
}

/// Error unless the samples are numerically zero at both ends.
pub fn boundary_guard(samples: &[Complex64], tol: f64) -> Result<()> {
    let b = boundary_magnitude(samples);
    if b >= tol {
        return Err(Error::Dft(format!("boundary magnitude {b:e} exceeds {tol:e}; enlarge the window")));
    }
    Ok(())
}

/// Inverse DFT of `m(xi_k)` times the forward coefficients.
pub fn fourier_multiplier(samples: &[Complex64], dx: f64, m: impl Fn(f64) -> Complex64) -> Result<Vec<Complex64>> {
    let s = dft_forward(samples, dx)?;
    let mut out = Vec::with_capacity(s.n());
    for k in 0..s.n() {
        let mk = m(s.xi(k));
        if !(mk.re.is_finite() && mk.im.is_finite()) {
            return Err(Error::Dft(format!("multiplier is not finite at xi = {}", s.xi(k))));
        }
        out.push(s.coeffs[k] * mk);
    }
    Ok(dft_inverse(&Spectrum { coeffs: out, dx }))
}

/// Spectral derivative of order 1 or 2. For odd orders the Nyquist bin is
/// dropped so that real input stays real.
pub fn spectral_derivative(samples: &[Complex64], dx: f64, order: u32) -> Result<Vec<Complex64>> {
    if !(1..=2).contains(&order) {
        return Err(Error::Dft(format!("derivative order {order} not supported")));
    }
    let n = samples.len();
    let nyq = -PI / dx;
    fourier_multiplier(samples, dx, |xi| {
        if order % 2 == 1 && n > 1 && (xi - nyq).abs() < 1e-9 * xi.abs() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, xi).powu(order)
        }
    })
}

/// Band-limited interpolant of periodic samples `x_j = x0 + j dx`, evaluated
/// by direct summation at arbitrary `x`. The Nyquist bin is split evenly
/// between `+-pi/dx` so the interpolant of real data is real.
pub fn trig_interpolate(s: &Spectrum, x0: f64, points: &[f64]) -> Vec<Complex64> {
    let n = s.n();
    let inv = 1.0 / n as f64;
    points
        .iter()
        .map(|&x| {
            let y = x - x0;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let xi = s.xi(k);
                if n > 1 && k == n / 2 {
                    acc += s.coeffs[k] * (xi * y).cos();
                } else {
                    acc += s.coeffs[k] * Complex64::cis(xi * y);
                }
            }
            acc * inv
        })
        .collect()
}
