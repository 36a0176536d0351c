//! Bessel function of the first kind, order zero.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

const SWITCH: f64 = 12.0;

/// `J0(z)` for `z >= 0`, absolute error below `1e-8`.
pub fn bessel_j0(z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::InvalidArgument(format!("bessel_j0 needs z >= 0, got {z}")));
    }
    Ok(j0_unchecked(z))
}

#[inline]
pub(crate) fn j0_unchecked(z: f64) -> f64 {
    if z < SWITCH {
        series(z)
    } else {
        hankel(z)
    }
}

fn series(z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-3) {
            break;
        }
        k += 1.0;
    }
    sum
}

// J0(z) = sqrt(2/(pi z)) (P cos chi - Q sin chi), chi = z - pi/4, with the
// asymptotic series truncated at the smallest term.
fn hankel(z: f64) -> f64 {
    let inv8z = 1.0 / (8.0 * z);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let m = (2 * k - 1) as f64;
        let next = a * m * m * inv8z / k as f64;
        if next.abs() >= last {
            break;
        }
        last = next.abs();
        a = next;
        // a_k / z^k with the signs of P and Q interleaved
        match k % 4 {
            1 => q -= a,
            2 => p -= a,
            3 => q += a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = z - FRAC_PI_4;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn negative_rejected() {
        assert!(bessel_j0(-1.0).is_err());
        assert!(bessel_j0(f64::NAN).is_err());
    }

    #[test]
    fn continuous_at_switch() {
        let a = series(SWITCH);
        let b = hankel(SWITCH);
        assert!((a - b).abs() < 1e-9, "{a} {b}");
    }
}
