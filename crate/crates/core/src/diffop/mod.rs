//! Polynomials in `d/dt`, `d/dx` and `h = 1/c` with exact complex-rational
//! coefficients and symbol-valued multipliers, graded by five face orders.
//!
//! A monomial `coeff * S_1...S_r * h^p * dt^j * dx^k` acts on `u` with the
//! derivatives applied first. Symbols are opaque functions of `(t, x)` that
//! carry a decay order at spacetime infinity and a record of the derivatives
//! that landed on them through the product rule. Sign conventions used
//! throughout: `box = -h^2 dt^2 + dx^2` and `Delta = -dx^2`.

pub mod golden;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};

pub type Coef = Complex<Rational64>;

pub fn rat(n: i64, d: i64) -> Coef {
    Complex::new(Rational64::new(n, d), Rational64::zero())
}

pub fn int(n: i64) -> Coef {
    rat(n, 1)
}

pub fn imag(n: i64, d: i64) -> Coef {
    Complex::new(Rational64::zero(), Rational64::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolFactor {
    pub name: String,
    /// Order at spacetime infinity before differentiation (`-1` for `S^{-1}`).
    pub bf_decay: i32,
    pub dt: u32,
    pub dx: u32,
}

impl SymbolFactor {
    pub fn new(name: &str, bf_decay: i32) -> Self {
        SymbolFactor { name: name.to_string(), bf_decay, dt: 0, dx: 0 }
    }

    /// Each derivative on a symbol lowers its decay order by one.
    pub fn bf_order(&self) -> i32 {
        self.bf_decay - self.dt as i32 - self.dx as i32
    }
}

impl fmt::Display for SymbolFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.dt + self.dx > 0 {
            write!(f, "_")?;
            for _ in 0..self.dt {
                f.write_str("t")?;
            }
            for _ in 0..self.dx {
                f.write_str("x")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Key {
    j: u32,
    k: u32,
    p: i32,
    symbols: Vec<SymbolFactor>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub j: u32,
    pub k: u32,
    pub p: i32,
    pub coeff: Coef,
    pub symbols: Vec<SymbolFactor>,
}

impl Monomial {
    pub fn df(&self) -> i32 {
        (self.j + self.k) as i32
    }

    pub fn bf(&self) -> i32 {
        self.symbols.iter().map(SymbolFactor::bf_order).sum()
    }

    /// `dt` counts 2, `dx` counts 1, each `1/c` counts -1.
    pub fn natural(&self) -> i32 {
        self.k as i32 + 2 * self.j as i32 - self.p
    }
}

/// Normalised operator: equal keys merged, zero coefficients dropped.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DiffOp {
    terms: BTreeMap<Key, Coef>,
}

/// Orders at (df, bf, natural face; pf+, pf-).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MultiOrder {
    pub m: i32,
    pub s: i32,
    pub l: i32,
    pub q_plus: i32,
    pub q_minus: i32,
}

impl MultiOrder {
    pub const fn new(m: i32, s: i32, l: i32, q_plus: i32, q_minus: i32) -> Self {
        MultiOrder { m, s, l, q_plus, q_minus }
    }

    fn as_array(&self) -> [i32; 5] {
        [self.m, self.s, self.l, self.q_plus, self.q_minus]
    }

    /// Componentwise `<=`: membership in the class of order `other`.
    pub fn le(&self, other: &MultiOrder) -> bool {
        self.as_array().iter().zip(other.as_array()).all(|(a, b)| *a <= b)
    }

    pub fn max(&self, o: &MultiOrder) -> MultiOrder {
        MultiOrder::new(
            self.m.max(o.m),
            self.s.max(o.s),
            self.l.max(o.l),
            self.q_plus.max(o.q_plus),
            self.q_minus.max(o.q_minus),
        )
    }
}

impl Add for MultiOrder {
    type Output = MultiOrder;
    fn add(self, o: MultiOrder) -> MultiOrder {
        MultiOrder::new(self.m + o.m, self.s + o.s, self.l + o.l, self.q_plus + o.q_plus, self.q_minus + o.q_minus)
    }
}

impl fmt::Display for MultiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{};{},{})", self.m, self.s, self.l, self.q_plus, self.q_minus)
    }
}

fn binom(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k as i64 {
        r = r * (n as i64 - i) / (i + 1);
    }
    r
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn scalar(c: Coef) -> Self {
        Self::monomial(c, 0, 0, 0, Vec::new())
    }

    pub fn one() -> Self {
        Self::scalar(Coef::one())
    }

    pub fn monomial(coeff: Coef, j: u32, k: u32, p: i32, mut symbols: Vec<SymbolFactor>) -> Self {
        symbols.sort();
        let mut d = DiffOp::zero();
        d.insert(Key { j, k, p, symbols }, coeff);
        d
    }

    pub fn dt() -> Self {
        Self::monomial(Coef::one(), 1, 0, 0, Vec::new())
    }

    pub fn dx() -> Self {
        Self::monomial(Coef::one(), 0, 1, 0, Vec::new())
    }

    /// Multiplication by `h^p = c^{-p}`.
    pub fn inv_c(p: i32) -> Self {
        Self::monomial(Coef::one(), 0, 0, p, Vec::new())
    }

    /// Multiplication by a symbol of the given decay order.
    pub fn symbol(name: &str, bf_decay: i32) -> Self {
        Self::monomial(Coef::one(), 0, 0, 0, vec![SymbolFactor::new(name, bf_decay)])
    }

    fn insert(&mut self, key: Key, c: Coef) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = *e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.terms.values().all(|c| !c.is_zero())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(k, c)| Monomial { j: k.j, k: k.k, p: k.p, coeff: *c, symbols: k.symbols.clone() })
    }

    pub fn scale(&self, c: Coef) -> DiffOp {
        let mut out = DiffOp::zero();
        for (k, v) in &self.terms {
            out.insert(k.clone(), *v * c);
        }
        out
    }

    /// `d/dt` composed on the left, with the product rule on symbols.
    fn left_dt(&self) -> DiffOp {
        self.left_derivative(true)
    }

    fn left_dx(&self) -> DiffOp {
        self.left_derivative(false)
    }

    fn left_derivative(&self, time: bool) -> DiffOp {
        let mut out = DiffOp::zero();
        for (key, c) in &self.terms {
            let mut plain = key.clone();
            if time {
                plain.j += 1;
            } else {
                plain.k += 1;
            }
            out.insert(plain, *c);
            for f in 0..key.symbols.len() {
                let mut syms = key.symbols.clone();
                if time {
                    syms[f].dt += 1;
                } else {
                    syms[f].dx += 1;
                }
                syms.sort();
                out.insert(Key { j: key.j, k: key.k, p: key.p, symbols: syms }, *c);
            }
        }
        out
    }

    /// Operator product `self o other`, expanding derivatives that land on
    /// symbols of `other` by the Leibniz rule.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        for (key, c) in &self.terms {
            let mut inner = other.clone();
            for _ in 0..key.k {
                inner = inner.left_dx();
            }
            for _ in 0..key.j {
                inner = inner.left_dt();
            }
            for (ik, ic) in inner.terms {
                let mut syms = key.symbols.clone();
                syms.extend(ik.symbols);
                syms.sort();
                out.insert(Key { j: ik.j, k: ik.k, p: ik.p + key.p, symbols: syms }, *c * ic);
            }
        }
        out
    }

    /// `e^{-s i c^2 t} A e^{s i c^2 t}`: substitute `dt -> dt + s i h^{-2}`.
    pub fn conjugate(&self, sign: i32) -> DiffOp {
        assert!(sign == 1 || sign == -1, "conjugation sign must be +1 or -1");
        let si = imag(sign as i64, 1);
        let mut out = DiffOp::zero();
        for (key, c) in &self.terms {
            let mut pw = Coef::one();
            // a = power of dt kept; (j - a) factors of s i h^{-2}
            for r in 0..=key.j {
                let a = key.j - r;
                let coef = *c * int(binom(key.j, a)) * pw;
                out.insert(Key { j: a, k: key.k, p: key.p - 2 * r as i32, symbols: key.symbols.clone() }, coef);
                pw *= si;
            }
        }
        out
    }

    /// Componentwise max of per-monomial orders; `None` for the zero operator.
    pub fn multi_order(&self) -> Option<MultiOrder> {
        let first = self.terms().next()?;
        let mut m = first.df();
        let mut s = first.bf();
        let mut l = first.natural();
        for t in self.terms() {
            m = m.max(t.df());
            s = s.max(t.bf());
            l = l.max(t.natural());
        }
        let pf = |sign| self.conjugate(sign).terms().map(|t| -t.p).max().unwrap_or(i32::MIN);
        Some(MultiOrder::new(m, s, l, pf(1), pf(-1)))
    }

    /// Scalar `k` with `self = k * other`, if one exists.
    pub fn proportional_to(&self, other: &DiffOp) -> Option<Coef> {
        if self.terms.len() != other.terms.len() {
            return None;
        }
        if self.is_zero() {
            return Some(Coef::one());
        }
        let (k0, v0) = other.terms.iter().next()?;
        let ratio = *self.terms.get(k0)? / *v0;
        for (k, v) in &other.terms {
            if *self.terms.get(k)? != *v * ratio {
                return None;
            }
        }
        Some(ratio)
    }

    /// Terms with the given derivative powers, as a multiplication operator.
    pub fn coefficient_of(&self, j: u32, k: u32) -> DiffOp {
        let mut out = DiffOp::zero();
        for (key, c) in &self.terms {
            if key.j == j && key.k == k {
                out.insert(Key { j: 0, k: 0, ..key.clone() }, *c);
            }
        }
        out
    }

    /// Evaluate a multiplication operator (no derivatives, no `1/c`) with
    /// symbols `V`, `A`, `W`, `aleph` frozen from `coeffs` at `c = infinity`.
    /// Derivatives on symbols are taken by centred differences.
    pub fn eval_multiplier(&self, coeffs: &CoefficientSet, t: f64, x: f64) -> Result<num_complex::Complex64> {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for m in self.terms() {
            if m.j != 0 || m.k != 0 || m.p != 0 {
                return Err(Error::Order("eval_multiplier needs a multiplication operator".into()));
            }
            let mut val = num_complex::Complex64::new(to_f64(m.coeff.re), to_f64(m.coeff.im));
            for s in &m.symbols {
                val *= eval_symbol(s, coeffs, t, x)?;
            }
            acc += val;
        }
        Ok(acc)
    }
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn eval_symbol(s: &SymbolFactor, coeffs: &CoefficientSet, t: f64, x: f64) -> Result<f64> {
    let base = |t: f64, x: f64| -> Result<f64> {
        Ok(match s.name.as_str() {
            "V" => coeffs.v(t, x, 0.0),
            "A" => coeffs.a(t, x, 0.0),
            "W" => coeffs.w(t, x, 0.0),
            "aleph" => coeffs.aleph(t, x),
            other => return Err(Error::Order(format!("symbol '{other}' has no evaluator"))),
        })
    };
    fn deriv(f: &dyn Fn(f64, f64) -> Result<f64>, t: f64, x: f64, dt: u32, dx: u32) -> Result<f64> {
        const H: f64 = 1e-4;
        if dt > 0 {
            let g = |t, x| deriv(f, t, x, dt - 1, dx);
            return Ok((g(t + H, x)? - g(t - H, x)?) / (2.0 * H));
        }
        if dx > 0 {
            let g = |t, x| deriv(f, t, x, 0, dx - 1);
            return Ok((g(t, x + H)? - g(t, x - H)?) / (2.0 * H));
        }
        f(t, x)
    }
    deriv(&base, t, x, s.dt, s.dx)
}

/// Conjugate, keep the monomials of parabolic order 0 (no power of `1/c`).
/// Fails if any conjugated monomial still carries a positive power of `c`.
pub fn normal_operator(a: &DiffOp, sign: i32) -> Result<DiffOp> {
    let conj = a.conjugate(sign);
    if let Some(bad) = conj.terms().find(|t| t.p < 0) {
        return Err(Error::Order(format!(
            "conjugated operator grows like c^{} at the parabolic face; rescale first",
            -bad.p
        )));
    }
    let mut out = DiffOp::zero();
    for (k, c) in &conj.terms {
        if k.p == 0 {
            out.insert(k.clone(), *c);
        }
    }
    Ok(out)
}

impl Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.insert(k.clone(), *v);
        }
        out
    }
}

impl Add for DiffOp {
    type Output = DiffOp;
    fn add(self, o: DiffOp) -> DiffOp {
        &self + &o
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale(int(-1))
    }
}

impl Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        -&self
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, o: &DiffOp) -> DiffOp {
        self + &(-o)
    }
}

impl Sub for DiffOp {
    type Output = DiffOp;
    fn sub(self, o: DiffOp) -> DiffOp {
        &self - &o
    }
}

impl Mul for &DiffOp {
    type Output = DiffOp;
    fn mul(self, o: &DiffOp) -> DiffOp {
        self.compose(o)
    }
}

impl Mul for DiffOp {
    type Output = DiffOp;
    fn mul(self, o: DiffOp) -> DiffOp {
        self.compose(&o)
    }
}

fn fmt_rat(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_coef(c: &Coef) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => fmt_rat(&c.re),
        (true, false) => {
            if c.im == Rational64::one() {
                "i".into()
            } else if c.im == -Rational64::one() {
                "-i".into()
            } else {
                format!("{}i", fmt_rat(&c.im))
            }
        }
        _ => format!("({}+{}i)", fmt_rat(&c.re), fmt_rat(&c.im)),
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        // highest derivative order first
        let mut terms: Vec<Monomial> = self.terms().collect();
        terms.sort_by_key(|m| (std::cmp::Reverse(m.j + m.k), std::cmp::Reverse(m.j), m.p));
        for m in terms {
            let mut parts: Vec<String> = Vec::new();
            let c = fmt_coef(&m.coeff);
            let bare = m.symbols.is_empty() && m.p == 0 && m.j == 0 && m.k == 0;
            if c != "1" || bare {
                parts.push(c);
            }
            for s in &m.symbols {
                parts.push(s.to_string());
            }
            if m.p != 0 {
                parts.push(format!("c^{}", -m.p));
            }
            match m.j {
                0 => {}
                1 => parts.push("dt".into()),
                n => parts.push(format!("dt^{n}")),
            }
            match m.k {
                0 => {}
                1 => parts.push("dx".into()),
                n => parts.push(format!("dx^{n}")),
            }
            let s = parts.join("*");
            if first {
                f.write_str(&s)?;
                first = false;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {s}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(p: i32) -> DiffOp {
        DiffOp::inv_c(p)
    }

    #[test]
    fn compose_constant() {
        let dx2 = DiffOp::dx() * DiffOp::dx();
        assert_eq!(dx2, DiffOp::monomial(int(1), 0, 2, 0, vec![]));
        assert_eq!(dx2.multi_order().unwrap(), MultiOrder::new(2, 0, 2, 0, 0));
        let a = h(2) * DiffOp::dt();
        assert_eq!(&a * &a, h(4) * DiffOp::dt() * DiffOp::dt());
    }

    #[test]
    fn leibniz_on_symbols() {
        // dx o V = V dx + V_x
        let v = DiffOp::symbol("V", -1);
        let lhs = DiffOp::dx() * v.clone();
        let mut vx = SymbolFactor::new("V", -1);
        vx.dx = 1;
        let rhs = &(&v * &DiffOp::dx()) + &DiffOp::monomial(int(1), 0, 0, 0, vec![vx.clone()]);
        assert_eq!(lhs, rhs);
        assert_eq!(vx.bf_order(), -2);
        // dt^2 o V = V dt^2 + 2 V_t dt + V_tt
        let l2 = DiffOp::dt() * DiffOp::dt() * v;
        assert_eq!(l2.len(), 3);
    }

    #[test]
    fn conjugate_single() {
        let a = h(2) * DiffOp::dt();
        let want = &a + &DiffOp::scalar(imag(1, 1));
        assert_eq!(a.conjugate(1), want);
    }

    #[test]
    fn free_kg_conjugation_cancels_mass() {
        let p0 = golden::p0();
        for s in [1, -1] {
            let c = p0.conjugate(s);
            assert!(c.terms().all(|m| !(m.j == 0 && m.k == 0 && m.symbols.is_empty() && m.p == -2)));
            assert!(c.terms().all(|m| m.p >= 0));
        }
    }

    #[test]
    fn orders_of_generators() {
        assert_eq!((h(4) * DiffOp::dt() * DiffOp::dt()).multi_order().unwrap(), MultiOrder::new(2, 0, 0, 0, 0));
        assert_eq!((h(3) * DiffOp::dt() * DiffOp::dx()).multi_order().unwrap(), MultiOrder::new(2, 0, 0, -1, -1));
        assert_eq!(DiffOp::dx().multi_order().unwrap(), MultiOrder::new(1, 0, 1, 0, 0));
        assert_eq!((h(2) * DiffOp::dt()).multi_order().unwrap(), MultiOrder::new(1, 0, 0, 0, 0));
        assert_eq!(h(1).multi_order().unwrap(), MultiOrder::new(0, 0, -1, -1, -1));
        assert_eq!(golden::p0().multi_order().unwrap(), MultiOrder::new(2, 0, 2, 0, 0));
        assert!(DiffOp::zero().multi_order().is_none());
    }

    #[test]
    fn normal_operator_rejects_growth() {
        assert!(normal_operator(&DiffOp::dt(), 1).is_err());
        assert!(normal_operator(&h(-1), 1).is_err());
    }

    #[test]
    fn proportional() {
        let a = golden::p0();
        let b = a.scale(rat(-1, 2));
        assert_eq!(b.proportional_to(&a), Some(rat(-1, 2)));
        assert_eq!(a.proportional_to(&DiffOp::dx()), None);
    }

    #[test]
    fn display() {
        let n = normal_operator(&golden::p0(), 1).unwrap();
        assert_eq!(n.to_string(), "dx^2 - 2i*dt");
    }

    #[test]
    fn eval_multiplier_freezes_symbols() {
        let set = CoefficientSet::example1();
        let op = DiffOp::symbol("V", -1).scale(int(2));
        let v = op.eval_multiplier(&set, 0.0, 1.0).unwrap();
        assert!((v.re - 16.0).abs() < 1e-12);
        assert!(DiffOp::dx().eval_multiplier(&set, 0.0, 0.0).is_err());
        assert!(DiffOp::symbol("Q", -1).eval_multiplier(&set, 0.0, 0.0).is_err());
    }
}
