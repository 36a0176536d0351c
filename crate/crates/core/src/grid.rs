use crate::error::{Error, Result};

/// Uniform space-time grid. Both endpoints are grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
}

pub fn make_grid(
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_min: f64,
    t_max: f64,
    nt: usize,
) -> Result<SpaceTimeGrid> {
    if ![x_min, x_max, t_min, t_max].iter().all(|v| v.is_finite()) {
        return Err(Error::Grid("non-finite bounds".into()));
    }
    if nx < 3 {
        return Err(Error::Grid(format!("nx must be at least 3, got {nx}")));
    }
    if nt < 2 {
        return Err(Error::Grid(format!("nt must be at least 2, got {nt}")));
    }
    if x_max <= x_min {
        return Err(Error::Grid("degenerate spatial interval".into()));
    }
    if t_max <= t_min {
        return Err(Error::Grid("degenerate time interval".into()));
    }
    Ok(SpaceTimeGrid {
        x_min,
        x_max,
        nx,
        t_min,
        t_max,
        nt,
        dx: (x_max - x_min) / (nx - 1) as f64,
        dt: (t_max - t_min) / (nt - 1) as f64,
    })
}

impl SpaceTimeGrid {
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    #[inline]
    pub fn t(&self, n: usize) -> f64 {
        self.t_min + n as f64 * self.dt
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.nt).map(|n| self.t(n)).collect()
    }

    /// Index of the time node closest to `t`, if it lies within `tol*dt`.
    pub fn time_index(&self, t: f64, tol: f64) -> Option<usize> {
        let s = ((t - self.t_min) / self.dt).round();
        if s < 0.0 || s > (self.nt - 1) as f64 {
            return None;
        }
        let n = s as usize;
        ((self.t(n) - t).abs() <= tol * self.dt).then_some(n)
    }

    /// Indices of space nodes within `[a, b]`.
    pub fn x_range(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let eps = 1e-9 * self.dx;
        let lo = (0..self.nx).find(|&i| self.x(i) >= a - eps).unwrap_or(self.nx);
        let hi = (0..self.nx).rev().find(|&i| self.x(i) <= b + eps).map_or(0, |i| i + 1);
        lo..hi.max(lo)
    }

    /// Indices of time nodes within `[a, b]`.
    pub fn t_range(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let eps = 1e-9 * self.dt;
        let lo = (0..self.nt).find(|&n| self.t(n) >= a - eps).unwrap_or(self.nt);
        let hi = (0..self.nt).rev().find(|&n| self.t(n) <= b + eps).map_or(0, |n| n + 1);
        lo..hi.max(lo)
    }

    pub fn same_shape(&self, other: &SpaceTimeGrid) -> bool {
        self == other
    }
}
