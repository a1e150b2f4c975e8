//! Closed form of `Λ_γ(z₁, z₂) = ∫₀^∞ min{1,tz₁} min{1,tz₂} e^{−γt} dt`.
//!
//! For `z₁ ≤ z₂`, with `a = γ/z₂` and `b = γ/z₁`,
//!
//! `Λ_γ = (z₁/γ²) [ 2P(3,a)/a − P(2,a) + (1 − e^{−b}) ]`
//!
//! where `P(k,·)` is the regularized lower incomplete gamma function. This is
//! the textbook closed form regrouped so that no term cancels for large
//! arguments, and it splits into a part depending only on the larger argument
//! and a part depending only on the smaller one.

use crate::error::{Error, Result};

/// `P(k, a) = 1 − e^{−a} Σ_{j<k} a^j/j!` for small integer `k`.
pub(crate) fn lower_regularized_gamma_int(k: u32, a: f64) -> f64 {
    if a < 1.0 {
        // e^{−a} Σ_{j≥k} a^j/j!
        let mut term = 1.0;
        for j in 1..=k {
            term *= a / j as f64;
        }
        let mut sum = 0.0;
        let mut j = k;
        while term > 1e-18 * sum || sum == 0.0 {
            sum += term;
            j += 1;
            term *= a / j as f64;
            if term == 0.0 {
                break;
            }
        }
        (-a).exp() * sum
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..k {
            term *= a / j as f64;
            sum += term;
        }
        1.0 - (-a).exp() * sum
    }
}

/// Per-point factors of the kernel at weight `gamma`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelFactors {
    /// Used when the point is the larger argument.
    pub upper: f64,
    /// Used when the point is the smaller argument.
    pub lower: f64,
}

pub(crate) fn kernel_factors(gamma: f64, z: f64) -> KernelFactors {
    let a = gamma / z;
    KernelFactors {
        upper: 2.0 * lower_regularized_gamma_int(3, a) / a - lower_regularized_gamma_int(2, a),
        lower: -(-a).exp_m1(),
    }
}

fn check(gamma: f64, z1: f64, z2: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("weight parameter must be positive, got {gamma}")));
    }
    if !(z1 > 0.0 && z2 > 0.0 && z1.is_finite() && z2.is_finite()) {
        return Err(Error::Domain(format!("kernel arguments must be positive, got ({z1}, {z2})")));
    }
    Ok(())
}

/// `Λ_γ(z₁, z₂)`; symmetric in its arguments.
pub fn kernel_lambda(gamma: f64, z1: f64, z2: f64) -> Result<f64> {
    check(gamma, z1, z2)?;
    let (lo, hi) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
    let f_lo = kernel_factors(gamma, lo);
    let f_hi = kernel_factors(gamma, hi);
    Ok(lo / (gamma * gamma) * (f_hi.upper + f_lo.lower))
}

/// `Σ_j Σ_k Λ_γ(z_j, z_k)` for values sorted ascending, via prefix sums.
pub(crate) fn kernel_double_sum_sorted(gamma: f64, sorted: &[f64]) -> f64 {
    let g2 = gamma * gamma;
    let n = sorted.len();
    let mut diag = 0.0;
    let mut off = 0.0;
    let mut prefix_z = 0.0; // Σ_{j<k} z_j
    for (k, &z) in sorted.iter().enumerate() {
        let f = kernel_factors(gamma, z);
        diag += z * (f.upper + f.lower);
        // Pairs (j, k) with j < k: z_j ≤ z_k, so z_k plays the larger role...
        off += prefix_z * f.upper;
        // ...and pairs (k, m) with m > k use z_k as the smaller argument.
        off += z * f.lower * (n - 1 - k) as f64;
        prefix_z += z;
    }
    (diag + 2.0 * off) / g2
}

/// Printed form of the kernel as a sum of three fractions; kept as an
/// independent reference.
#[cfg(test)]
pub(crate) fn kernel_lambda_textbook(gamma: f64, z1: f64, z2: f64) -> f64 {
    let (z1, z2) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
    let g = gamma;
    let e2 = (-g / z2).exp();
    let e1 = (-g / z1).exp();
    z1 / z2 * (2.0 * z2 * z2 - e2 * (2.0 * z2 * z2 + 2.0 * g * z2 + g * g)) / g.powi(3)
        + z1 / z2 * e2 * (g + z2) / (g * g)
        - z1 * e1 / (g * g)
}
