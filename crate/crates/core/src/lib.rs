//! Numerical verification of Hardy-type inequalities.
//!
//! * [`grid`]: staggered grids, midpoint and singular-weight quadrature, norms.
//! * [`spectral`]: fractional Laplacian, Riesz potential and gradient as
//!   Fourier multipliers, plus a direct Riesz kernel sum for cross-checks.
//! * [`maximal`]: Hardy–Littlewood maximal operators and empirical type constants.
//! * [`hardy`]: the inequality checks and the near/far kernel-split operators.
//! * [`testfam`]: deterministic test functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod hardy;
pub mod maximal;
pub mod spectral;
pub mod testfam;

pub use error::{Error, Result};
pub use grid::{Exponents, GridFunction, GridSpec, HalfLineFunction, HalfLineGrid};
pub use hardy::{HardyResult, SplitConfig};
pub use maximal::MaximalConfig;
pub use testfam::TestFunction;
