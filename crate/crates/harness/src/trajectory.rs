//! Classical paths `x' = xi`, `xi' = -dx V_eff(t, x)`.

use kgnr_core::coeffs::CoefficientSet;
use kgnr_core::schrodinger::AlephWiring;
use kgnr_core::{Branch, Error, Result};

pub const GRADIENT_STEP: f64 = 1e-4;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Clone, Debug, Default)]
pub struct ClassicalPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub momenta: Vec<f64>,
}

/// `V_eff = -+V - W/2 + wiring * aleph/2` at `c = infinity`.
pub fn v_eff(branch: Branch, coeffs: &CoefficientSet, wiring: AlephWiring, t: f64, x: f64) -> f64 {
    -branch.sign() * coeffs.v(t, x, 0.0) - 0.5 * coeffs.w(t, x, 0.0) + 0.5 * wiring.sign() * coeffs.aleph(t, x)
}

#[derive(Clone, Copy, Debug)]
pub struct TrajectoryOptions {
    pub dt: f64,
    /// Integration stops with an error once `|x|` exceeds `10 * window`.
    pub window: f64,
    pub wiring: AlephWiring,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        TrajectoryOptions { dt: DEFAULT_DT, window: 10.0, wiring: AlephWiring::Plus }
    }
}

pub fn classical_trajectory(
    branch: Branch,
    coeffs: &CoefficientSet,
    x0: f64,
    xi0: f64,
    t_range: (f64, f64),
    opts: TrajectoryOptions,
) -> Result<ClassicalPath> {
    let (t0, t1) = t_range;
    if !(t1 >= t0) || !(opts.dt > 0.0) {
        return Err(Error::InvalidArgument(format!("bad time range {t_range:?} or step {}", opts.dt)));
    }
    let force = |t: f64, x: f64| {
        let h = GRADIENT_STEP;
        -(v_eff(branch, coeffs, opts.wiring, t, x + h) - v_eff(branch, coeffs, opts.wiring, t, x - h)) / (2.0 * h)
    };
    let steps = ((t1 - t0) / opts.dt).round().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let mut path = ClassicalPath::default();
    let (mut x, mut p) = (x0, xi0);
    path.times.push(t0);
    path.positions.push(x);
    path.momenta.push(p);
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let (k1x, k1p) = (p, force(t, x));
        let (k2x, k2p) = (p + 0.5 * h * k1p, force(t + 0.5 * h, x + 0.5 * h * k1x));
        let (k3x, k3p) = (p + 0.5 * h * k2p, force(t + 0.5 * h, x + 0.5 * h * k2x));
        let (k4x, k4p) = (p + h * k3p, force(t + h, x + h * k3x));
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if !x.is_finite() || x.abs() > 10.0 * opts.window {
            return Err(Error::Domain(format!("classical path left |x| <= {} at t = {}", 10.0 * opts.window, t + h)));
        }
        path.times.push(t0 + (n + 1) as f64 * h);
        path.positions.push(x);
        path.momenta.push(p);
    }
    Ok(path)
}
