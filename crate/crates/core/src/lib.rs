//! Numerical tools for studying the non-relativistic limit of the
//! Klein-Gordon equation in one space dimension.
//!
//! The crate holds the grid and field types, a radix-2 DFT, the coefficient
//! model, a small operator algebra for multi-graded orders, a Klein-Gordon
//! solver, a Crank-Nicolson Schrodinger solver, exact free-field formulas
//! and current observables.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod coeffs;
pub mod config;
pub mod dft;
pub mod diffop;
pub mod error;
pub mod field;
pub mod free_kg;
pub mod grid;
pub mod kg;
pub mod norm;
pub mod observables;
pub mod schrodinger;
pub mod stencil;
pub mod table;
pub mod tridiag;

pub use error::{Error, Result};
pub use field::{ComplexField, Field, FieldKind, RealField};
pub use grid::{make_grid, SpaceTimeGrid};

/// Branch selector for the two Schrodinger fields. `Plus` carries the
/// `e^{+ic^2 t}` modulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn both() -> [Branch; 2] {
        [Branch::Plus, Branch::Minus]
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// Time support of an inhomogeneous problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// Data prescribed at `t = 0`.
    Cauchy,
    /// Zero in the past of the window.
    Retarded,
    /// Zero in the future of the window.
    Advanced,
}
