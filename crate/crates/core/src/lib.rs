//! Goodness-of-fit tests for the Weibull, Pareto (type I) and Fréchet
//! families based on the min-characteristic function `Ψ_X(t) = E min{1, tX}`.
//!
//! The data are standardized with the maximum-likelihood estimates,
//! `Ŷ_j = (X_j/ĉ)^φ̂`, which makes the null distribution of the statistic
//! free of `(c, φ)`; that null law is then tabulated by Monte Carlo.
//!
//! ```
//! use mincf::{estimation, families::{FamilyId, Sample}, statistic};
//!
//! let x = Sample::new(vec![0.3, 1.2, 0.8, 2.4, 0.1, 1.7, 0.9]).unwrap();
//! let y = estimation::fit_and_standardize(FamilyId::Weibull, &x).unwrap();
//! let t = statistic::statistic(FamilyId::Weibull, &y, 1.0).unwrap();
//! assert!(t.value >= 0.0);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Tabulated constants keep their published digits.
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod error;
pub mod estimation;
pub mod families;
pub mod simulation;
pub mod special;
pub mod statistic;

pub use error::{Error, Result};
