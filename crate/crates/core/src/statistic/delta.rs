//! Population counterpart of `𝒯_{n,γ}/n` under a fixed alternative:
//! `Δ = ∫₀^∞ (ψ_X(t) − ψ₀(t))² e^{−γt} dt`, with `ψ_X` the min-CF of
//! `(X/c_X)^{φ_X}` and `(c_X, φ_X)` the probability limit of the MLE.

use super::lambda::check_gamma;
use crate::error::{Error, Result};
use crate::estimation::{newton_shape_in, Profile, GUMBEL_SD};
use crate::families::{null_min_cf, AlternativeSpec, FamilyId, ParamPair};
use crate::special::{integrate_vec_with_breaks, integrate_with_breaks, QuadratureSpec};

fn inner_spec() -> QuadratureSpec {
    QuadratureSpec {
        relative_tolerance: 1e-11,
        absolute_tolerance: 1e-12,
        max_subdivisions: 4000,
    }
}

fn support_breaks(alt: &AlternativeSpec) -> Vec<f64> {
    let lo = alt.support_start();
    vec![lo, lo + 1.0, lo + 4.0, f64::INFINITY]
}

/// Probability limit of the MLE of `family` when the data follow `alt`:
/// the maximiser of `E[log f_{c,φ}(X)]`.
pub fn limit_params(family: FamilyId, alt: &AlternativeSpec) -> Result<ParamPair> {
    alt.validate()?;
    let spec = inner_spec();
    let breaks = support_breaks(alt);
    match family {
        FamilyId::Pareto => {
            let c = alt.support_start();
            if !(c > 0.0) {
                return Err(Error::Domain(format!("{alt} has no positive lower support bound; the Pareto MLE diverges")));
            }
            let mean_log = integrate_with_breaks(|x| alt.density(x) * (x / c).ln(), &breaks, &spec)?.value;
            ParamPair::new(c, 1.0 / mean_log)
        }
        FamilyId::Weibull | FamilyId::Frechet => {
            let sign = if family == FamilyId::Weibull { 1.0 } else { -1.0 };
            let [m1, m2] = integrate_vec_with_breaks(
                |x| {
                    let f = alt.density(x);
                    if f == 0.0 {
                        return [0.0, 0.0];
                    }
                    let u = sign * x.ln();
                    [u * f, u * u * f]
                },
                &breaks,
                &spec,
            )?;
            let mean = m1.value;
            let sd = (m2.value - mean * mean).max(0.0).sqrt();
            let eval = |phi: f64| -> Result<Profile> {
                let [w0, w1, w2] = integrate_vec_with_breaks(
                    |x| {
                        let f = alt.density(x);
                        if f == 0.0 {
                            return [0.0; 3];
                        }
                        let v = sign * x.ln() - mean;
                        let w = (phi * v).exp() * f;
                        [w, v * w, v * v * w]
                    },
                    &breaks,
                    &spec,
                )?;
                let mw = w1.value / w0.value;
                Ok(Profile {
                    score: mw - 1.0 / phi,
                    slope: (w2.value / w0.value - mw * mw).max(0.0) + 1.0 / (phi * phi),
                    log_mean_exp: w0.value.ln(),
                })
            };
            // The population score overflows at the sample bracket ends for
            // heavy tails, so the bracket is grown outwards from the start.
            let start = GUMBEL_SD / sd;
            let (mut lo, mut hi) = (start, start);
            let mut steps = 0;
            while eval(lo)?.score > 0.0 {
                lo *= 0.5;
                steps += 1;
                if steps > 60 {
                    return Err(Error::Convergence { iterations: steps, last: lo, residual: f64::NAN });
                }
            }
            while eval(hi)?.score < 0.0 {
                hi *= 2.0;
                steps += 1;
                if steps > 60 {
                    return Err(Error::Convergence { iterations: steps, last: hi, residual: f64::NAN });
                }
            }
            let (phi, last, _) = newton_shape_in(eval, start, (lo, hi))?;
            let log_scale = mean + last.log_mean_exp / phi;
            ParamPair::new((sign * log_scale).exp(), phi)
        }
    }
}

/// `ψ_X(t) = E min{1, t (X/c)^φ}` for `X ~ alt`.
pub fn min_cf_of_alternative(alt: &AlternativeSpec, params: ParamPair, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("min-CF argument must be positive, got {t}")));
    }
    let ParamPair { c, phi } = params;
    let lo = alt.support_start();
    // t (x/c)^φ = 1 at x = c t^{-1/φ}
    let kink = c * t.powf(-1.0 / phi);
    let mut breaks = support_breaks(alt);
    if kink > lo && kink.is_finite() {
        breaks.push(kink);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
    }
    let integrand = |x: f64| {
        let f = alt.density(x);
        if f == 0.0 {
            0.0
        } else {
            (t * (x / c).powf(phi)).min(1.0) * f
        }
    };
    Ok(integrate_with_breaks(integrand, &breaks, &inner_spec())?.value)
}

/// `Δ = ‖ψ_X − ψ₀‖²` in `L²(e^{−γt})`, given the MLE limit `limit`.
pub fn population_delta(family: FamilyId, alt: &AlternativeSpec, gamma: f64, limit: ParamPair) -> Result<f64> {
    check_gamma(gamma)?;
    ParamPair::new(limit.c, limit.phi)?;
    let outer = QuadratureSpec {
        relative_tolerance: 1e-8,
        absolute_tolerance: 1e-16,
        max_subdivisions: 2000,
    };
    let pts = [0.0, 1.0, f64::INFINITY];
    let failure = std::cell::RefCell::new(None);
    let value = integrate_with_breaks(
        |t| match (min_cf_of_alternative(alt, limit, t), null_min_cf(family, t)) {
            (Ok(a), Ok(b)) => (a - b).powi(2) * (-gamma * t).exp(),
            (Err(e), _) | (_, Err(e)) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        &pts,
        &outer,
    )?
    .value;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value)
}
