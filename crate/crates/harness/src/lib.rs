//! Experiment drivers for the Klein-Gordon non-relativistic limit lab.
//!
//! Each driver runs the relativistic solve and its Schrodinger
//! approximation over a list of light speeds and reports error norms,
//! fitted log-log rates and pass/fail bands. The [`experiments`] module
//! exposes every driver behind a common trait, selectable by name.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiments;
pub mod expansion;
pub mod greens;
pub mod natural;
pub mod orders;
pub mod pipeline;
pub mod rate;
pub mod sweep;
pub mod trajectory;

pub use kgnr_core::{Error, Result};
pub use rate::{fit_rate, RateFit};
