use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solve `a_i y_{i-1} + b_i y_i + c_i y_{i+1} = d_i` by the Thomas algorithm.
/// `a[0]` and `c[n-1]` are ignored.
pub fn solve_tridiagonal(a: &[Complex64], b: &[Complex64], c: &[Complex64], d: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = b.len();
    if a.len() != n || c.len() != n || d.len() != n {
        return Err(Error::LengthMismatch { left: n, right: a.len().min(c.len()).min(d.len()) });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut cp = vec![Complex64::new(0.0, 0.0); n];
    let mut dp = vec![Complex64::new(0.0, 0.0); n];
    let mut denom = b[0];
    for i in 0..n {
        if i > 0 {
            denom = b[i] - a[i] * cp[i - 1];
        }
        if denom.norm() < 1e-300 || !denom.re.is_finite() || !denom.im.is_finite() {
            return Err(Error::Domain(format!("tridiagonal solve broke down at row {i}")));
        }
        cp[i] = if i + 1 < n { c[i] / denom } else { Complex64::new(0.0, 0.0) };
        dp[i] = if i == 0 { d[0] / denom } else { (d[i] - a[i] * dp[i - 1]) / denom };
    }
    let mut y = dp;
    for i in (0..n - 1).rev() {
        let next = y[i + 1];
        y[i] -= cp[i] * next;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_random_diagonally_dominant() {
        let n = 50;
        let z = |a: f64, b: f64| Complex64::new(a, b);
        let a: Vec<_> = (0..n).map(|i| z((i as f64).sin(), 0.3)).collect();
        let c: Vec<_> = (0..n).map(|i| z(0.2, (i as f64).cos())).collect();
        let b: Vec<_> = (0..n).map(|i| z(4.0 + i as f64 * 0.01, -1.0)).collect();
        let y: Vec<_> = (0..n).map(|i| z(i as f64, 1.0 / (1.0 + i as f64))).collect();
        let d: Vec<_> = (0..n)
            .map(|i| {
                let mut s = b[i] * y[i];
                if i > 0 {
                    s += a[i] * y[i - 1];
                }
                if i + 1 < n {
                    s += c[i] * y[i + 1];
                }
                s
            })
            .collect();
        let sol = solve_tridiagonal(&a, &b, &c, &d).unwrap();
        for i in 0..n {
            assert!((sol[i] - y[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn breakdown_detected() {
        let z = Complex64::new(0.0, 0.0);
        assert!(solve_tridiagonal(&[z], &[z], &[z], &[z]).is_err());
    }
}
