use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpaceTimeGrid;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldKind {
    /// One row per time node of the grid.
    History,
    /// A single row at time `t`.
    Snapshot { t: f64 },
}

/// Samples over a [`SpaceTimeGrid`], stored row-major as (time, space).
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: SpaceTimeGrid,
    kind: FieldKind,
    data: Vec<T>,
}

pub type ComplexField = Field<Complex64>;
pub type RealField = Field<f64>;

/// Magnitude used by norms and finiteness checks.
pub trait Sample: Copy + Send + Sync {
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl Sample for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Sample for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<T: Sample + Default> Field<T> {
    pub fn zeros(grid: &SpaceTimeGrid) -> Self {
        Field {
            grid: grid.clone(),
            kind: FieldKind::History,
            data: vec![T::default(); grid.nt * grid.nx],
        }
    }

    pub fn from_fn(grid: &SpaceTimeGrid, mut f: impl FnMut(f64, f64) -> T) -> Self {
        let mut data = Vec::with_capacity(grid.nt * grid.nx);
        for n in 0..grid.nt {
            let t = grid.t(n);
            for i in 0..grid.nx {
                data.push(f(t, grid.x(i)));
            }
        }
        Field { grid: grid.clone(), kind: FieldKind::History, data }
    }
}

impl<T: Sample> Field<T> {
    pub fn from_rows(grid: &SpaceTimeGrid, rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.len() != grid.nt {
            return Err(Error::LengthMismatch { left: rows.len(), right: grid.nt });
        }
        let mut data = Vec::with_capacity(grid.nt * grid.nx);
        for r in rows {
            if r.len() != grid.nx {
                return Err(Error::LengthMismatch { left: r.len(), right: grid.nx });
            }
            data.extend(r);
        }
        Ok(Field { grid: grid.clone(), kind: FieldKind::History, data })
    }

    pub fn snapshot(grid: &SpaceTimeGrid, t: f64, row: Vec<T>) -> Result<Self> {
        if row.len() != grid.nx {
            return Err(Error::LengthMismatch { left: row.len(), right: grid.nx });
        }
        Ok(Field { grid: grid.clone(), kind: FieldKind::Snapshot { t }, data: row })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Number of stored rows: `nt` for a history, 1 for a snapshot.
    pub fn rows(&self) -> usize {
        self.data.len() / self.grid.nx
    }

    pub fn time(&self, n: usize) -> f64 {
        match self.kind {
            FieldKind::History => self.grid.t(n),
            FieldKind::Snapshot { t } => t,
        }
    }

    pub fn row(&self, n: usize) -> &[T] {
        let nx = self.grid.nx;
        &self.data[n * nx..(n + 1) * nx]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [T] {
        let nx = self.grid.nx;
        &mut self.data[n * nx..(n + 1) * nx]
    }

    #[inline]
    pub fn at(&self, n: usize, i: usize) -> T {
        self.data[n * self.grid.nx + i]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Row `n` of a history as a snapshot.
    pub fn snapshot_at(&self, n: usize) -> Field<T> {
        Field {
            grid: self.grid.clone(),
            kind: FieldKind::Snapshot { t: self.time(n) },
            data: self.row(n).to_vec(),
        }
    }

    pub fn map<U: Sample>(&self, mut f: impl FnMut(T) -> U) -> Field<U> {
        Field { grid: self.grid.clone(), kind: self.kind, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise map that also receives `(t, x)`.
    pub fn map_txy<U: Sample>(&self, mut f: impl FnMut(f64, f64, T) -> U) -> Field<U> {
        let nx = self.grid.nx;
        let mut data = Vec::with_capacity(self.data.len());
        for n in 0..self.rows() {
            let t = self.time(n);
            for i in 0..nx {
                data.push(f(t, self.grid.x(i), self.data[n * nx + i]));
            }
        }
        Field { grid: self.grid.clone(), kind: self.kind, data }
    }

    pub fn zip_with<U: Sample, V: Sample>(
        &self,
        other: &Field<U>,
        mut f: impl FnMut(T, U) -> V,
    ) -> Result<Field<V>> {
        self.check_compatible(other)?;
        Ok(Field {
            grid: self.grid.clone(),
            kind: self.kind,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn check_compatible<U: Sample>(&self, other: &Field<U>) -> Result<()> {
        if !self.grid.same_shape(&other.grid) || self.kind != other.kind {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.finite())
    }

    pub fn ensure_finite(&self, what: &str) -> Result<()> {
        match self.data.iter().position(|v| !v.finite()) {
            None => Ok(()),
            Some(k) => {
                let nx = self.grid.nx;
                Err(Error::NonFinite(format!(
                    "{what} at t={}, x={}",
                    self.time(k / nx),
                    self.grid.x(k % nx)
                )))
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.magnitude()))
    }

    /// Max of |f| over a rectangular sub-window.
    pub fn max_abs_in(&self, t_a: f64, t_b: f64, x_a: f64, x_b: f64) -> f64 {
        let xr = self.grid.x_range(x_a, x_b);
        let mut m: f64 = 0.0;
        for n in 0..self.rows() {
            let t = self.time(n);
            if t < t_a - 1e-12 || t > t_b + 1e-12 {
                continue;
            }
            for &v in &self.row(n)[xr.clone()] {
                m = m.max(v.magnitude());
            }
        }
        m
    }

    /// Restrict a history to the time window `[a, b]`, producing a new grid.
    pub fn restrict_time(&self, a: f64, b: f64) -> Result<Field<T>> {
        if self.kind != FieldKind::History {
            return Err(Error::InvalidArgument("restrict_time needs a history".into()));
        }
        let r = self.grid.t_range(a, b);
        if r.len() < 2 {
            return Err(Error::Grid("time window holds fewer than 2 nodes".into()));
        }
        let g = &self.grid;
        let sub = crate::grid::make_grid(g.x_min, g.x_max, g.nx, g.t(r.start), g.t(r.end - 1), r.len())?;
        let nx = g.nx;
        Ok(Field { grid: sub, kind: FieldKind::History, data: self.data[r.start * nx..r.end * nx].to_vec() })
    }

    pub(crate) fn from_parts(grid: SpaceTimeGrid, kind: FieldKind, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len() % grid.nx, 0);
        Field { grid, kind, data }
    }
}

impl ComplexField {
    pub fn scale(&self, a: Complex64) -> ComplexField {
        self.map(|v| v * a)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn abs(&self) -> RealField {
        self.map(|v| v.norm())
    }
}

impl RealField {
    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn to_complex(&self) -> ComplexField {
        self.map(|v| Complex64::new(v, 0.0))
    }
}
