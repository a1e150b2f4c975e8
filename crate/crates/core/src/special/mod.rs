//! Special functions and one-dimensional quadrature.

mod bessel;
mod expint;
pub mod quadrature;

pub use bessel::bessel_k;
pub use expint::{exp_integral_e1, E1_UNDERFLOW};
pub use quadrature::{integrate, integrate_vec, integrate_vec_with_breaks, integrate_with_breaks, Integral, QuadratureSpec};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;
