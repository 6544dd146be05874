//! Numerical laboratory for the fractional p-Laplacian `(-Δ_{p,K})^s`.
//!
//! Functions live on uniform grids over `[-L, L]^N` (`N ∈ {1, 2}`) together
//! with a symbolic exterior rule, so that nonlocal tails can be integrated
//! analytically instead of being sampled on an ever larger box.
//!
//! The crate builds without `std` (it needs `alloc`); the default `std`
//! feature only adds thread parallelism through rayon. All parallel
//! reductions are ordered, so results are bit-identical for any worker count.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod diffops;
pub mod error;
pub mod fit;
pub mod grid;
pub mod kernel;
mod math;
pub mod nonlinear;
mod par;
pub mod quad;
pub mod regularity;
pub mod report;
pub mod rng;
pub mod seminorms;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{Ball, ExteriorRule, Grid, GridFunction, Point, TestFunction};
pub use kernel::{FractionalParams, Kernel, Modulation};
pub use report::VerificationReport;
