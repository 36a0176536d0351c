//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Recognised keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `preset` | coefficient preset (`free`, `example1`, `gravity_bump`, `custom`) | `example1` |
//! | `x_min`, `x_max`, `nx` | spatial grid | `-10`, `10`, `2001` |
//! | `t_min`, `t_max`, `nt` | time grid | `0`, `2`, `401` |
//! | `c_list` | comma-separated light speeds | `3,4,6,8` |
//! | `scheme` | time stepper for the Klein-Gordon solve (`rk4_mol`) | `rk4_mol` |
//! | `epsilon` | exponent offset of the space-time weight | `0.1` |
//! | `out_dir` | output directory | `out` |
//! | `m0` | strength of the `gravity_bump` preset | `1` |
//! | `V`, `A`, `W`, `aleph` | shapes for the `custom` preset | `zero` |
//! | `v_inv_c` | `a,b`: multiply V by `1 + a/c + b/c^2` | `0,0` |
//! | `aleph_wiring` | sign of aleph in the effective potential (`plus`, `minus`) | `plus` |
//! | `phi`, `psi` | Cauchy data shapes in `x` | `gaussian(1,0,1)`, `zero` |
//! | `stride` | row stride of snapshot CSV output | `10` |
//! | `branch` | Schrodinger branch for single runs (`plus`, `minus`) | `plus` |
//!
//! Shapes use the menu of [`crate::coeffs::parse_shape`].

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: String,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
    pub c_list: Vec<f64>,
    pub scheme: String,
    pub epsilon: f64,
    pub out_dir: PathBuf,
    pub m0: f64,
    pub v_shape: String,
    pub a_shape: String,
    pub w_shape: String,
    pub aleph_shape: String,
    pub v_inv_c: (f64, f64),
    pub aleph_wiring: String,
    pub phi: String,
    pub psi: String,
    pub stride: usize,
    pub branch: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: "example1".into(),
            x_min: -10.0,
            x_max: 10.0,
            nx: 2001,
            t_min: 0.0,
            t_max: 2.0,
            nt: 401,
            c_list: vec![3.0, 4.0, 6.0, 8.0],
            scheme: "rk4_mol".into(),
            epsilon: 0.1,
            out_dir: PathBuf::from("out"),
            m0: 1.0,
            v_shape: "zero".into(),
            a_shape: "zero".into(),
            w_shape: "zero".into(),
            aleph_shape: "zero".into(),
            v_inv_c: (0.0, 0.0),
            aleph_wiring: "plus".into(),
            phi: "gaussian(1,0,1)".into(),
            psi: "zero".into(),
            stride: 10,
            branch: "plus".into(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "preset", "x_min", "x_max", "nx", "t_min", "t_max", "nt", "c_list", "scheme", "epsilon",
    "out_dir", "m0", "V", "A", "W", "aleph", "v_inv_c", "aleph_wiring", "phi", "psi", "stride",
    "branch",
];

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}' as a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}' as a count")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

impl RunConfig {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse_str(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "preset" => self.preset = v.to_string(),
            "x_min" => self.x_min = num(key, v)?,
            "x_max" => self.x_max = num(key, v)?,
            "nx" => self.nx = count(key, v)?,
            "t_min" => self.t_min = num(key, v)?,
            "t_max" => self.t_max = num(key, v)?,
            "nt" => self.nt = count(key, v)?,
            "c_list" => self.c_list = list(key, v)?,
            "scheme" => self.scheme = v.to_string(),
            "epsilon" => self.epsilon = num(key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "m0" => self.m0 = num(key, v)?,
            "V" => self.v_shape = v.to_string(),
            "A" => self.a_shape = v.to_string(),
            "W" => self.w_shape = v.to_string(),
            "aleph" => self.aleph_shape = v.to_string(),
            "v_inv_c" => {
                let l = list(key, v)?;
                if l.len() != 2 {
                    return Err(Error::Config("v_inv_c: expected two numbers a,b".into()));
                }
                self.v_inv_c = (l[0], l[1]);
            }
            "aleph_wiring" => self.aleph_wiring = v.to_string(),
            "phi" => self.phi = v.to_string(),
            "psi" => self.psi = v.to_string(),
            "stride" => self.stride = count(key, v)?,
            "branch" => self.branch = v.to_string(),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        crate::grid::make_grid(self.x_min, self.x_max, self.nx, self.t_min, self.t_max, self.nt)
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.c_list.is_empty() || self.c_list.iter().any(|&c| c <= 0.0) {
            return Err(Error::Config("c_list must hold positive values".into()));
        }
        if self.scheme != "rk4_mol" {
            return Err(Error::Config(format!("unknown scheme '{}'", self.scheme)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if !matches!(self.aleph_wiring.as_str(), "plus" | "minus") {
            return Err(Error::Config("aleph_wiring must be plus or minus".into()));
        }
        if !matches!(self.branch.as_str(), "plus" | "minus") {
            return Err(Error::Config("branch must be plus or minus".into()));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be positive".into()));
        }
        if !crate::coeffs::preset_registry().contains(&self.preset) {
            return Err(Error::Config(format!("unknown preset '{}'", self.preset)));
        }
        for (k, s) in [
            ("V", &self.v_shape),
            ("A", &self.a_shape),
            ("W", &self.w_shape),
            ("aleph", &self.aleph_shape),
            ("phi", &self.phi),
            ("psi", &self.psi),
        ] {
            crate::coeffs::parse_shape(s).map_err(|e| Error::Config(format!("{k}: {e}")))?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<crate::grid::SpaceTimeGrid> {
        crate::grid::make_grid(self.x_min, self.x_max, self.nx, self.t_min, self.t_max, self.nt)
    }
}
