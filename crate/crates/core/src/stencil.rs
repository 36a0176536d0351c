//! Second-order finite differences shared by both time-domain solvers.

use num_complex::Complex64;

/// Tridiagonal rows of the discrete `(i d/dx + A)^2` on interior node `i`,
/// as `(lower, diag, upper)`. The matrix is Hermitian for real `A`.
#[inline]
pub fn kinetic_row(a: &[f64], i: usize, dx: f64) -> (Complex64, Complex64, Complex64) {
    let inv2 = 1.0 / (dx * dx);
    let half = 0.5 / dx;
    let lower = Complex64::new(-inv2, -(a[i] + a[i - 1]) * half);
    let upper = Complex64::new(-inv2, (a[i] + a[i + 1]) * half);
    let diag = Complex64::new(2.0 * inv2 + a[i] * a[i], 0.0);
    (lower, diag, upper)
}

/// `out_i = ((i d/dx + A)^2 u)_i` on interior nodes, zero on the walls.
/// `a = None` means `A = 0`.
pub fn apply_kinetic(u: &[Complex64], a: Option<&[f64]>, dx: f64, out: &mut [Complex64]) {
    let n = u.len();
    out[0] = Complex64::new(0.0, 0.0);
    out[n - 1] = Complex64::new(0.0, 0.0);
    let inv2 = 1.0 / (dx * dx);
    match a {
        None => {
            for i in 1..n - 1 {
                out[i] = (2.0 * u[i] - u[i - 1] - u[i + 1]) * inv2;
            }
        }
        Some(a) => {
            for i in 1..n - 1 {
                let (l, d, r) = kinetic_row(a, i, dx);
                out[i] = l * u[i - 1] + d * u[i] + r * u[i + 1];
            }
        }
    }
}

/// Centred first difference on interior nodes, one-sided on the walls.
pub fn d1(u: &[Complex64], dx: f64) -> Vec<Complex64> {
    let n = u.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    for i in 1..n - 1 {
        out[i] = (u[i + 1] - u[i - 1]) / (2.0 * dx);
    }
    out[0] = (u[1] - u[0]) / dx;
    out[n - 1] = (u[n - 1] - u[n - 2]) / dx;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinetic_is_hermitian() {
        let n = 12;
        let a: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        for i in 1..n - 2 {
            let (_, _, up) = kinetic_row(&a, i, 0.1);
            let (lo, _, _) = kinetic_row(&a, i + 1, 0.1);
            assert!((up - lo.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn kinetic_on_plane_wave_with_constant_a() {
        // (i d/dx + A)^2 e^{ikx} = (A - k)^2 e^{ikx} up to O(dx^2)
        let n = 401;
        let dx = 0.01;
        let k = 2.0;
        let a0 = 0.5;
        let u: Vec<_> = (0..n).map(|i| Complex64::cis(k * i as f64 * dx)).collect();
        let a = vec![a0; n];
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        apply_kinetic(&u, Some(&a), dx, &mut out);
        let want = (a0 - k).powi(2);
        for i in 1..n - 1 {
            assert!((out[i] - u[i] * want).norm() < 1e-3);
        }
    }
}
