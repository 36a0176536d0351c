//! Variable coefficients V, A, W and aleph of the Klein-Gordon operator.
//!
//! Coefficients are built from named shapes held in a [`ShapeRegistry`];
//! complete coefficient sets come from a [`PresetRegistry`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::config::RunConfig;
use crate::error::{Error, Result};

/// A real function of `(t, x)`.
pub trait Shape: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn eval(&self, t: f64, x: f64) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct Zero;

impl Shape for Zero {
    fn name(&self) -> &str {
        "zero"
    }
    fn eval(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl Shape for Constant {
    fn name(&self) -> &str {
        "constant"
    }
    fn eval(&self, _t: f64, _x: f64) -> f64 {
        self.0
    }
}

/// `a / (1 + (x - x0 + v t)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct Lorentzian {
    pub a: f64,
    pub x0: f64,
    pub v: f64,
}

impl Shape for Lorentzian {
    fn name(&self) -> &str {
        "lorentzian"
    }
    fn eval(&self, t: f64, x: f64) -> f64 {
        let y = x - self.x0 + self.v * t;
        self.a / (1.0 + y * y)
    }
}

/// `a exp(-((x - x0)/s)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian {
    pub a: f64,
    pub x0: f64,
    pub s: f64,
}

impl Shape for Gaussian {
    fn name(&self) -> &str {
        "gaussian"
    }
    fn eval(&self, _t: f64, x: f64) -> f64 {
        let y = (x - self.x0) / self.s;
        self.a * (-y * y).exp()
    }
}

/// `a exp(-((t - t0)/st)^2 - ((x - x0)/sx)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct BumpTX {
    pub a: f64,
    pub t0: f64,
    pub st: f64,
    pub x0: f64,
    pub sx: f64,
}

impl Shape for BumpTX {
    fn name(&self) -> &str {
        "bump_in_t_and_x"
    }
    fn eval(&self, t: f64, x: f64) -> f64 {
        let a = (t - self.t0) / self.st;
        let b = (x - self.x0) / self.sx;
        self.a * (-a * a - b * b).exp()
    }
}

/// Smooth bump supported in `|t - t0| < rt`, `|x - x0| < rx`.
#[derive(Debug, Clone, Copy)]
pub struct CompactBump {
    pub a: f64,
    pub t0: f64,
    pub rt: f64,
    pub x0: f64,
    pub rx: f64,
}

/// `exp(1 - 1/(1 - y^2))` on `|y| < 1`, zero outside; equals 1 at `y = 0`.
pub fn unit_bump(y: f64) -> f64 {
    let s = 1.0 - y * y;
    if s <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / s).exp()
    }
}

impl Shape for CompactBump {
    fn name(&self) -> &str {
        "compact_bump"
    }
    fn eval(&self, t: f64, x: f64) -> f64 {
        self.a * unit_bump((t - self.t0) / self.rt) * unit_bump((x - self.x0) / self.rx)
    }
}

/// `m0 / sqrt(1 + (x - x0)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct InvSqrt {
    pub m0: f64,
    pub x0: f64,
}

impl Shape for InvSqrt {
    fn name(&self) -> &str {
        "inv_sqrt"
    }
    fn eval(&self, _t: f64, x: f64) -> f64 {
        let y = x - self.x0;
        self.m0 / (1.0 + y * y).sqrt()
    }
}

/// A shape backed by a closure.
#[derive(Clone)]
pub struct FnShape {
    pub label: String,
    pub f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl FnShape {
    pub fn new(label: &str, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        FnShape { label: label.to_string(), f: Arc::new(f) }
    }
}

impl fmt::Debug for FnShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnShape({})", self.label)
    }
}

impl Shape for FnShape {
    fn name(&self) -> &str {
        &self.label
    }
    fn eval(&self, t: f64, x: f64) -> f64 {
        (self.f)(t, x)
    }
}

type ShapeCtor = fn(&[f64]) -> Arc<dyn Shape>;

/// Named shape constructors with fixed arity.
pub struct ShapeRegistry {
    entries: BTreeMap<&'static str, (usize, ShapeCtor)>,
}

impl ShapeRegistry {
    pub fn empty() -> Self {
        ShapeRegistry { entries: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, arity: usize, ctor: ShapeCtor) {
        self.entries.insert(name, (arity, ctor));
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("zero", 0, |_| Arc::new(Zero));
        r.register("constant", 1, |p| Arc::new(Constant(p[0])));
        r.register("lorentzian", 3, |p| Arc::new(Lorentzian { a: p[0], x0: p[1], v: p[2] }));
        r.register("gaussian", 3, |p| Arc::new(Gaussian { a: p[0], x0: p[1], s: p[2] }));
        r.register("bump_in_t_and_x", 5, |p| {
            Arc::new(BumpTX { a: p[0], t0: p[1], st: p[2], x0: p[3], sx: p[4] })
        });
        r.register("compact_bump", 5, |p| {
            Arc::new(CompactBump { a: p[0], t0: p[1], rt: p[2], x0: p[3], rx: p[4] })
        });
        r.register("inv_sqrt", 2, |p| Arc::new(InvSqrt { m0: p[0], x0: p[1] }));
        r
    }

    pub fn names(&self) -> impl Iterator<Item = &&'static str> {
        self.entries.keys()
    }

    /// Parse `name` or `name(p1, p2, ...)`.
    pub fn parse(&self, spec: &str) -> Result<Arc<dyn Shape>> {
        let spec = spec.trim();
        let (name, params) = match spec.find('(') {
            None => (spec, Vec::new()),
            Some(k) => {
                let inner = spec[k + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Config(format!("shape '{spec}': missing ')'")))?;
                let params = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .ok()
                                .filter(|v| v.is_finite())
                                .ok_or_else(|| Error::Config(format!("shape '{spec}': bad parameter '{}'", s.trim())))
                        })
                        .collect::<Result<Vec<_>>>()?
                };
                (spec[..k].trim(), params)
            }
        };
        let (arity, ctor) = self
            .entries
            .get(name)
            .ok_or_else(|| Error::Config(format!("unknown shape '{name}'")))?;
        if params.len() != *arity {
            return Err(Error::Config(format!("shape '{name}' takes {arity} parameters, got {}", params.len())));
        }
        let widths_ok = match name {
            "gaussian" => params[2] != 0.0,
            "bump_in_t_and_x" | "compact_bump" => params[2] != 0.0 && params[4] != 0.0,
            _ => true,
        };
        if !widths_ok {
            return Err(Error::Config(format!("shape '{spec}': zero width")));
        }
        Ok(ctor(&params))
    }
}

pub fn parse_shape(spec: &str) -> Result<Arc<dyn Shape>> {
    ShapeRegistry::builtin().parse(spec)
}

/// A shape times `1 + a h + b h^2` where `h = 1/c`.
#[derive(Clone, Debug)]
pub struct Coefficient {
    pub shape: Arc<dyn Shape>,
    pub inv_c: (f64, f64),
}

impl Coefficient {
    pub fn new(shape: Arc<dyn Shape>) -> Self {
        Coefficient { shape, inv_c: (0.0, 0.0) }
    }

    pub fn zero() -> Self {
        Self::new(Arc::new(Zero))
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64, h: f64) -> f64 {
        let s = self.shape.eval(t, x);
        if self.inv_c == (0.0, 0.0) {
            s
        } else {
            s * (1.0 + self.inv_c.0 * h + self.inv_c.1 * h * h)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.shape.name() == "zero"
    }
}

/// V, A, W (functions of `t, x, 1/c`) and aleph (function of `t, x`).
#[derive(Clone, Debug)]
pub struct CoefficientSet {
    pub v: Coefficient,
    pub a: Coefficient,
    pub w: Coefficient,
    pub aleph: Arc<dyn Shape>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffValues {
    pub v: f64,
    pub a: f64,
    pub w: f64,
    pub aleph: f64,
}

/// Step of the centred difference used for time derivatives of V.
pub const VDOT_STEP: f64 = 1e-5;

impl CoefficientSet {
    pub fn free() -> Self {
        CoefficientSet { v: Coefficient::zero(), a: Coefficient::zero(), w: Coefficient::zero(), aleph: Arc::new(Zero) }
    }

    pub fn example1() -> Self {
        Self::free().with_v(Arc::new(Lorentzian { a: 8.0, x0: 1.0, v: 1.0 }))
    }

    pub fn gravity_bump(m0: f64) -> Self {
        Self::free().with_aleph(Arc::new(InvSqrt { m0, x0: 0.0 }))
    }

    pub fn with_v(mut self, s: Arc<dyn Shape>) -> Self {
        self.v = Coefficient::new(s);
        self
    }

    pub fn with_a(mut self, s: Arc<dyn Shape>) -> Self {
        self.a = Coefficient::new(s);
        self
    }

    pub fn with_w(mut self, s: Arc<dyn Shape>) -> Self {
        self.w = Coefficient::new(s);
        self
    }

    pub fn with_aleph(mut self, s: Arc<dyn Shape>) -> Self {
        self.aleph = s;
        self
    }

    /// Scale V by `1 + a/c + b/c^2`.
    pub fn with_v_inv_c(mut self, a: f64, b: f64) -> Self {
        self.v.inv_c = (a, b);
        self
    }

    /// True when no coefficient carries an odd power of `1/c`.
    pub fn even_in_inv_c(&self) -> bool {
        [&self.v, &self.a, &self.w].iter().all(|c| c.inv_c.0 == 0.0)
    }

    #[inline]
    pub fn v(&self, t: f64, x: f64, h: f64) -> f64 {
        self.v.eval(t, x, h)
    }

    #[inline]
    pub fn a(&self, t: f64, x: f64, h: f64) -> f64 {
        self.a.eval(t, x, h)
    }

    #[inline]
    pub fn w(&self, t: f64, x: f64, h: f64) -> f64 {
        self.w.eval(t, x, h)
    }

    #[inline]
    pub fn aleph(&self, t: f64, x: f64) -> f64 {
        self.aleph.eval(t, x)
    }

    /// Centred-difference time derivative of V.
    #[inline]
    pub fn v_dot(&self, t: f64, x: f64, h: f64) -> f64 {
        (self.v(t + VDOT_STEP, x, h) - self.v(t - VDOT_STEP, x, h)) / (2.0 * VDOT_STEP)
    }

    pub fn v_is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn a_is_zero(&self) -> bool {
        self.a.is_zero()
    }

    pub fn is_free(&self) -> bool {
        self.v.is_zero() && self.a.is_zero() && self.w.is_zero() && self.aleph.name() == "zero"
    }

    /// Build the coefficient set described by a run configuration.
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let set = preset_registry().build(&cfg.preset, cfg)?;
        Ok(set.with_v_inv_c(cfg.v_inv_c.0, cfg.v_inv_c.1))
    }
}

pub fn eval_coeffs(set: &CoefficientSet, t: f64, x: f64, inv_c: f64) -> Result<CoeffValues> {
    if !(0.0..1.0).contains(&inv_c) {
        return Err(Error::InvalidArgument(format!("inv_c must lie in [0, 1), got {inv_c}")));
    }
    let vals = CoeffValues { v: set.v(t, x, inv_c), a: set.a(t, x, inv_c), w: set.w(t, x, inv_c), aleph: set.aleph(t, x) };
    for (name, v) in [("V", vals.v), ("A", vals.a), ("W", vals.w), ("aleph", vals.aleph)] {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} at t={t}, x={x}, inv_c={inv_c}")));
        }
    }
    Ok(vals)
}

/// Rectangular `(t, x)` window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub t: (f64, f64),
    pub x: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub pass: bool,
    pub worst_ratio: f64,
    /// Largest fitted slope of `log(|coef| R)` against `log R`.
    pub slope: f64,
}

/// Slope of a least-squares line through `(x, y)`.
pub(crate) fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub const DECAY_SLOPE_MAX: f64 = 0.1;

/// Screen each coefficient for `|coef| <= C (1 + t^2 + x^2)^{-1/2}` on an
/// `n x n` sample lattice: fit `log(|coef| R)` against `log R` over the
/// nonzero samples and flag growth when the slope exceeds 0.1.
pub fn check_decay(set: &CoefficientSet, window: Window, n_samples: usize) -> DecayReport {
    let n = n_samples.max(2);
    let mut worst: f64 = 0.0;
    let mut slope = f64::NEG_INFINITY;
    let evals: [&dyn Fn(f64, f64) -> f64; 4] = [
        &|t, x| set.v(t, x, 0.0),
        &|t, x| set.a(t, x, 0.0),
        &|t, x| set.w(t, x, 0.0),
        &|t, x| set.aleph(t, x),
    ];
    for f in evals {
        let mut lr = Vec::new();
        let mut lq = Vec::new();
        for a in 0..n {
            let t = window.t.0 + (window.t.1 - window.t.0) * a as f64 / (n - 1) as f64;
            for b in 0..n {
                let x = window.x.0 + (window.x.1 - window.x.0) * b as f64 / (n - 1) as f64;
                let r = (1.0 + t * t + x * x).sqrt();
                let q = f(t, x).abs() * r;
                worst = worst.max(q);
                if q > 0.0 && q.is_finite() {
                    lr.push(r.ln());
                    lq.push(q.ln());
                }
            }
        }
        if lr.len() >= 3 {
            slope = slope.max(ls_slope(&lr, &lq));
        }
    }
    let slope = if slope.is_finite() { slope } else { 0.0 };
    DecayReport { pass: slope <= DECAY_SLOPE_MAX, worst_ratio: worst, slope }
}

/// Ratio test for absence of an `O(1/c)` term at one point: for each of
/// V, A, W the increments at `h = 0.1` and `h = 0.05` must shrink by a
/// factor in `[3, 5]` (quadratic in `h`) or both vanish.
pub fn check_even_at(set: &CoefficientSet, t: f64, x: f64) -> bool {
    [&set.v, &set.a, &set.w].iter().all(|c| {
        let f0 = c.eval(t, x, 0.0);
        let d1 = (c.eval(t, x, 0.1) - f0).abs();
        let d2 = (c.eval(t, x, 0.05) - f0).abs();
        if d1 <= 1e-300 && d2 <= 1e-300 {
            return true;
        }
        let r = d1 / d2;
        (3.0..=5.0).contains(&r)
    })
}

/// A named recipe for a [`CoefficientSet`].
pub trait Preset: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn build(&self, cfg: &RunConfig) -> Result<CoefficientSet>;
}

struct FreePreset;
struct Example1Preset;
struct GravityBumpPreset;
struct CustomPreset;

impl Preset for FreePreset {
    fn name(&self) -> &'static str {
        "free"
    }
    fn description(&self) -> &'static str {
        "V = A = W = aleph = 0"
    }
    fn build(&self, _cfg: &RunConfig) -> Result<CoefficientSet> {
        Ok(CoefficientSet::free())
    }
}

impl Preset for Example1Preset {
    fn name(&self) -> &'static str {
        "example1"
    }
    fn description(&self) -> &'static str {
        "V = 8/(1+(x-1+t)^2), A = W = aleph = 0"
    }
    fn build(&self, _cfg: &RunConfig) -> Result<CoefficientSet> {
        Ok(CoefficientSet::example1())
    }
}

impl Preset for GravityBumpPreset {
    fn name(&self) -> &'static str {
        "gravity_bump"
    }
    fn description(&self) -> &'static str {
        "aleph = m0/sqrt(1+x^2), V = A = W = 0"
    }
    fn build(&self, cfg: &RunConfig) -> Result<CoefficientSet> {
        Ok(CoefficientSet::gravity_bump(cfg.m0))
    }
}

impl Preset for CustomPreset {
    fn name(&self) -> &'static str {
        "custom"
    }
    fn description(&self) -> &'static str {
        "V, A, W, aleph from the shape menu"
    }
    fn build(&self, cfg: &RunConfig) -> Result<CoefficientSet> {
        let reg = ShapeRegistry::builtin();
        Ok(CoefficientSet::free()
            .with_v(reg.parse(&cfg.v_shape)?)
            .with_a(reg.parse(&cfg.a_shape)?)
            .with_w(reg.parse(&cfg.w_shape)?)
            .with_aleph(reg.parse(&cfg.aleph_shape)?))
    }
}

pub struct PresetRegistry {
    presets: BTreeMap<&'static str, Box<dyn Preset>>,
}

impl PresetRegistry {
    pub fn empty() -> Self {
        PresetRegistry { presets: BTreeMap::new() }
    }

    pub fn register(&mut self, p: Box<dyn Preset>) {
        self.presets.insert(p.name(), p);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.presets.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<&dyn Preset> {
        self.presets.get(name).map(|b| b.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Preset> {
        self.presets.values().map(|b| b.as_ref())
    }

    pub fn build(&self, name: &str, cfg: &RunConfig) -> Result<CoefficientSet> {
        self.get(name)
            .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?
            .build(cfg)
    }
}

pub fn preset_registry() -> PresetRegistry {
    let mut r = PresetRegistry::empty();
    r.register(Box::new(FreePreset));
    r.register(Box::new(Example1Preset));
    r.register(Box::new(GravityBumpPreset));
    r.register(Box::new(CustomPreset));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_values() {
        let s = CoefficientSet::example1();
        for h in [0.0, 0.3, 0.9] {
            let v = eval_coeffs(&s, 0.0, 1.0, h).unwrap();
            assert_eq!(v, CoeffValues { v: 8.0, a: 0.0, w: 0.0, aleph: 0.0 });
        }
    }

    #[test]
    fn free_is_zero() {
        let v = eval_coeffs(&CoefficientSet::free(), 1.3, -2.0, 0.5).unwrap();
        assert_eq!(v, CoeffValues { v: 0.0, a: 0.0, w: 0.0, aleph: 0.0 });
    }

    #[test]
    fn gravity_bump_values() {
        let s = CoefficientSet::gravity_bump(1.0);
        assert_eq!(eval_coeffs(&s, 0.0, 0.0, 0.0).unwrap().aleph, 1.0);
        assert!((eval_coeffs(&s, 0.0, 3f64.sqrt(), 0.0).unwrap().aleph - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inv_c_out_of_range() {
        assert!(eval_coeffs(&CoefficientSet::free(), 0.0, 0.0, 1.0).is_err());
        assert!(eval_coeffs(&CoefficientSet::free(), 0.0, 0.0, -0.1).is_err());
    }

    #[test]
    fn nan_from_custom_reported() {
        let s = CoefficientSet::free().with_w(Arc::new(FnShape::new("bad", |_, x| if x > 1.0 { f64::NAN } else { 0.0 })));
        let e = eval_coeffs(&s, 0.5, 2.0, 0.0).unwrap_err().to_string();
        assert!(e.contains("W") && e.contains("x=2"), "{e}");
    }

    #[test]
    fn decay_examples() {
        let w = Window { t: (-20.0, 20.0), x: (-20.0, 20.0) };
        assert!(check_decay(&CoefficientSet::example1(), w, 81).pass);
        let c1 = CoefficientSet::free().with_v(Arc::new(Constant(1.0)));
        let r = check_decay(&c1, w, 81);
        assert!(!r.pass && (r.slope - 1.0).abs() < 1e-9);
        let f = check_decay(&CoefficientSet::free(), w, 81);
        assert!(f.pass);
        assert_eq!(f.worst_ratio, 0.0);
    }

    #[test]
    fn evenness() {
        let s = CoefficientSet::example1();
        assert!(check_even_at(&s, 0.0, 0.3));
        assert!(s.even_in_inv_c());
        let odd = CoefficientSet::example1().with_v_inv_c(1.0, 0.0);
        assert!(!check_even_at(&odd, 0.0, 0.3));
        assert!(!odd.even_in_inv_c());
        let even = CoefficientSet::example1().with_v_inv_c(0.0, 2.0);
        assert!(check_even_at(&even, 0.0, 0.3));
    }

    #[test]
    fn shape_parsing() {
        let reg = ShapeRegistry::builtin();
        let l = reg.parse("lorentzian(8, 1, 1)").unwrap();
        assert_eq!(l.eval(0.0, 1.0), 8.0);
        assert_eq!(reg.parse("zero").unwrap().eval(1.0, 1.0), 0.0);
        assert!(reg.parse("lorentzian(8,1)").is_err());
        assert!(reg.parse("gaussian(1,0,0)").is_err());
        assert!(reg.parse("cubic(1)").is_err());
        assert!(reg.parse("gaussian(1,0,1").is_err());
        let b = reg.parse("compact_bump(1,0.5,0.3,0,1)").unwrap();
        assert_eq!(b.eval(0.5, 0.0), 1.0);
        assert_eq!(b.eval(0.1, 0.0), 0.0);
    }

    #[test]
    fn vdot_matches_closed_form() {
        let s = CoefficientSet::example1();
        let (t, x) = (0.4, 0.2);
        let y: f64 = x - 1.0 + t;
        let exact = -16.0 * y / (1.0 + y * y).powi(2);
        assert!((s.v_dot(t, x, 0.0) - exact).abs() < 1e-8);
    }

    #[test]
    fn presets_registered() {
        let r = preset_registry();
        for n in ["free", "example1", "gravity_bump", "custom"] {
            assert!(r.contains(n));
        }
        let mut cfg = RunConfig::default();
        cfg.m0 = 2.0;
        assert_eq!(r.build("gravity_bump", &cfg).unwrap().aleph(0.0, 0.0), 2.0);
        cfg.v_shape = "constant(3)".into();
        assert_eq!(r.build("custom", &cfg).unwrap().v(0.0, 0.0, 0.0), 3.0);
    }
}
