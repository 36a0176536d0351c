use crate::error::{Error, Result};
use crate::field::{Field, FieldKind, Sample};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    PlainSup,
    /// Weight `(1 + x^2 + t^2)^(-3/4 - epsilon)`.
    SpacetimeWeighted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Two,
    Inf,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub epsilon: f64,
    pub p: Exponent,
}

impl WeightSpec {
    pub fn sup() -> Self {
        WeightSpec { kind: WeightKind::PlainSup, epsilon: 0.1, p: Exponent::Inf }
    }

    pub fn weighted(epsilon: f64, p: Exponent) -> Self {
        WeightSpec { kind: WeightKind::SpacetimeWeighted, epsilon, p }
    }

    pub fn weight(&self, t: f64, x: f64) -> f64 {
        match self.kind {
            WeightKind::PlainSup => 1.0,
            WeightKind::SpacetimeWeighted => (1.0 + x * x + t * t).powf(-0.75 - self.epsilon),
        }
    }
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::sup()
    }
}

fn trap(n: usize, len: usize, h: f64) -> f64 {
    if len == 1 {
        1.0
    } else if n == 0 || n + 1 == len {
        0.5 * h
    } else {
        h
    }
}

/// Weighted L^inf or trapezoid L^2 norm. Snapshots are integrated in `x` only.
pub fn weighted_norm<T: Sample>(f: &Field<T>, w: &WeightSpec) -> Result<f64> {
    if !(w.epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", w.epsilon)));
    }
    f.ensure_finite("weighted_norm input")?;
    let g = f.grid();
    let rows = f.rows();
    let dt_w = match f.kind() {
        FieldKind::History => g.dt,
        FieldKind::Snapshot { .. } => 1.0,
    };
    match w.p {
        Exponent::Inf => {
            let mut m: f64 = 0.0;
            for n in 0..rows {
                let t = f.time(n);
                for (i, v) in f.row(n).iter().enumerate() {
                    m = m.max(w.weight(t, g.x(i)) * v.magnitude());
                }
            }
            Ok(m)
        }
        Exponent::Two => {
            let mut s = 0.0;
            for n in 0..rows {
                let t = f.time(n);
                let qt = trap(n, rows, dt_w);
                for (i, v) in f.row(n).iter().enumerate() {
                    let a = w.weight(t, g.x(i)) * v.magnitude();
                    s += qt * trap(i, g.nx, g.dx) * a * a;
                }
            }
            Ok(s.sqrt())
        }
    }
}
