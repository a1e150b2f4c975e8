use crate::error::{Error, Result};
use crate::special::EULER_GAMMA;

/// Above this argument `E₁` is returned as 0.
pub const E1_UNDERFLOW: f64 = 700.0;

/// Exponential integral `E₁(z) = ∫_z^∞ e^{-u}/u du` for `z > 0`.
///
/// Power series for `z ≤ 1`, Lentz continued fraction above.
pub fn exp_integral_e1(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("E1 requires z > 0, got {z}")));
    }
    if z > E1_UNDERFLOW {
        return Ok(0.0);
    }
    if z <= 1.0 {
        Ok(series(z))
    } else {
        Ok(continued_fraction(z))
    }
}

fn series(z: f64) -> f64 {
    // Σ_{k≥1} (-1)^{k+1} z^k / (k·k!)
    let mut sum = 0.0;
    let mut term = 1.0; // (-1)^{k+1} z^k / k!
    for k in 1..60 {
        let kf = k as f64;
        term *= if k == 1 { z } else { -z / kf };
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() + sum
}

fn continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}
