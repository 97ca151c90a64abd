//! minsurf: a verification laboratory for closed surfaces minimally immersed
//! in round spheres.
//!
//! The crate constructs the classical extremal immersions (equator, Clifford
//! torus, Veronese and generalized Veronese surfaces, the degree-`s` harmonic
//! family), differentiates them exactly with truncated Taylor jets, builds
//! adapted moving frames and the second fundamental form, normalizes normal
//! frames into canonical form, and numerically certifies the pointwise
//! curvature identities and pinching classifications that single these
//! surfaces out.
//!
//! Modules, bottom-up:
//!
//! * [`jet`] — truncated bivariate Taylor arithmetic (orders 0..=4);
//! * [`catalog`] — chart-parametrized immersions into `S^n`;
//! * [`geometry`] — frames, second fundamental form, curvatures, covariant
//!   derivatives, Laplace-Beltrami;
//! * [`normalizer`] — normal-frame rotations into canonical shape operators;
//! * [`identities`] — the named pointwise identity checks over sample grids;
//! * [`classifier`] — pinching windows and the classification verdicts;
//! * [`report`]/[`cli`] — deterministic JSON/CSV reports and the CLI.

// Tensor index arithmetic reads better as explicit loops, and NaN-safe
// comparisons are written in negated form on purpose.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod classifier;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod identities;
pub mod jet;
pub mod linalg;
pub mod normalizer;
pub mod report;

pub use error::{Error, Result};
