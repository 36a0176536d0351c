use kgnr_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// `slope -+ 2 stderr`.
    pub ci: (f64, f64),
}

/// Ordinary least squares of `log err` against `log c`.
pub fn fit_rate(cs: &[f64], errs: &[f64]) -> Result<RateFit> {
    if cs.len() != errs.len() {
        return Err(Error::LengthMismatch { left: cs.len(), right: errs.len() });
    }
    if cs.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 points for a rate, got {}", cs.len())));
    }
    if let Some(e) = errs.iter().chain(cs).find(|&&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate fit needs positive finite values, got {e}")));
    }
    let x: Vec<f64> = cs.iter().map(|c| c.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("rate fit needs distinct c values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(RateFit { slope, intercept, stderr, ci: (slope - 2.0 * stderr, slope + 2.0 * stderr) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let cs = [2.0, 3.0, 4.0, 6.0, 8.0];
        let e2: Vec<f64> = cs.iter().map(|c| 3.0 / (c * c)).collect();
        let f = fit_rate(&cs, &e2).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        let e1: Vec<f64> = cs.iter().map(|c| 0.5 / c).collect();
        assert!((fit_rate(&cs, &e1).unwrap().slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_rate(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_rate(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]).is_err());
        assert!(fit_rate(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
