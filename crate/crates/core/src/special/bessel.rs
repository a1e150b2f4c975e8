use crate::error::{Error, Result};
use crate::special::quadrature::{integrate, QuadratureSpec};

/// Modified Bessel function of the second kind, `K_ν(z)`, from its integral
/// representation
///
/// `K_ν(z) = ½ (z/2)^ν ∫₀^∞ exp(-t - z²/(4t)) t^{-(ν+1)} dt`.
///
/// The integral is evaluated after the substitution `t = e^s`, which turns it
/// into a smooth, doubly-exponentially decaying integrand on ℝ; it is scaled by
/// its peak value so that only the final product can overflow.
pub fn bessel_k(order: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("bessel_k requires 0 < z < ∞, got {z}")));
    }
    if !(order >= 0.0) || !order.is_finite() {
        return Err(Error::Domain(format!("bessel_k requires order ≥ 0, got {order}")));
    }
    let nu = order;
    let q = 0.25 * z * z;
    let log_integrand = |s: f64| -s.exp() - q * (-s).exp() - nu * s;

    let peak_x = 0.5 * (nu.hypot(z) - nu);
    let peak = if peak_x > 0.0 {
        peak_x.ln()
    } else {
        // ν ≫ z: x* ≈ z²/(4ν)
        (q / nu).ln()
    };
    let top = log_integrand(peak);
    const DROP: f64 = 60.0;
    let mut lo = peak - 1.0;
    while log_integrand(lo) - top > -DROP {
        lo -= 1.0;
    }
    let mut hi = peak + 1.0;
    while log_integrand(hi) - top > -DROP {
        hi += 1.0;
    }

    let spec = QuadratureSpec {
        relative_tolerance: 1e-13,
        absolute_tolerance: 1e-300,
        max_subdivisions: 400,
    };
    let inner = integrate(|s| (log_integrand(s) - top).exp(), lo, hi, &spec)?.value;
    let log_prefactor = nu * (0.5 * z).ln() + top;
    let value = 0.5 * log_prefactor.exp() * inner;
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::Range(format!("K_{nu}({z}) is not representable")));
    }
    Ok(value)
}
