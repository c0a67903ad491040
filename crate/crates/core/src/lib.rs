//! Numerics for ergodic series `Σ aₙ f(Tⁿx)` over the expanding circle map
//! `Tx = qx mod 1`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: trigonometric polynomials on the circle, the transfer
//! operator and its martingale decomposition, Monte-Carlo checks of moment
//! and maximal inequalities, Toeplitz/Riesz diagnostics, Gibbs measures for
//! Ruelle operators, and the Weierstrass-type differentiability experiments.
//! File formats, configuration and the command line live in the `ergseries`
//! crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod gibbs;
mod linalg;
pub mod orbit;
mod poly;
pub mod riesz;
pub mod rng;
pub mod series;
pub mod stats;
pub mod torusfn;
pub mod transfer;
pub mod weierstrass;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64;
pub use orbit::OrbitPoint;
pub use series::CoefficientSequence;
pub use torusfn::TorusFunction;
pub use transfer::ExpandingMap;

pub(crate) const TAU: f64 = core::f64::consts::TAU;
pub(crate) const PI: f64 = core::f64::consts::PI;
