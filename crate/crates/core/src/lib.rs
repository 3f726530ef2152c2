//! Exact and Monte Carlo tools for finite-dimensional Gaussian integrals,
//! Feynman-graph expansions, gauge fixing, and configuration-space knot
//! invariants.

#![allow(clippy::needless_range_loop)]

pub mod cs;
pub mod error;
pub mod gaugefix;
pub mod gauss;
pub mod graph;
pub mod jacobi;
pub mod knot;
pub mod grassmann;
pub mod linalg;
pub mod mc;
pub mod perturb;
pub mod quad;
pub mod rational;
pub mod selftest;
pub mod series;
pub mod wick;

pub use error::{Error, Result};
