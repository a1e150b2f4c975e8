//! Maximum-likelihood fitting of `(c, φ)` and the standardization
//! `Ŷ_j = (X_j/ĉ)^φ̂`.
//!
//! Because every supported family is closed under `x ↦ a·x^{1/b}` and the MLE
//! is equivariant under that map, refitting a standardized sample returns
//! exactly `(1, 1)` and any statistic of `Ŷ` is parameter-free.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyId, ParamPair, Sample};

/// Bracket for the shape parameter.
pub const SHAPE_BRACKET: (f64, f64) = (1e-3, 1e3);
pub const MAX_ITERATIONS: usize = 100;
/// Score tolerance for the Newton iteration.
pub const SCORE_TOLERANCE: f64 = 1e-12;
/// Residual accepted when the iteration stalls at machine precision.
pub const STALL_TOLERANCE: f64 = 1e-10;

// π/√6: the standard deviation of a standard Gumbel variable.
pub(crate) const GUMBEL_SD: f64 = 1.282_549_830_161_864;

/// Fitted parameters with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub params: ParamPair,
    pub iterations: usize,
    pub converged: bool,
    pub log_likelihood: f64,
    /// Profile score at the returned shape (0 for the closed-form Pareto fit).
    pub score_residual: f64,
}

/// Sample mapped through `x ↦ (x/ĉ)^φ̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedSample {
    values: Vec<f64>,
    source_estimate: Estimate,
}

impl StandardizedSample {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_estimate(&self) -> &Estimate {
        &self.source_estimate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Wraps already-standardized values (e.g. data known to come from the
    /// standard member). The estimate is recorded as `(1, 1)`.
    pub fn assume_standard(values: Vec<f64>) -> Result<Self> {
        let sample = Sample::new(values)?;
        Ok(Self {
            values: sample.into_values(),
            source_estimate: Estimate {
                params: ParamPair::STANDARD,
                iterations: 0,
                converged: true,
                log_likelihood: f64::NAN,
                score_residual: 0.0,
            },
        })
    }

    pub fn as_sample(&self) -> Sample {
        Sample::new(self.values.clone()).expect("standardized values are positive")
    }
}

/// Log-likelihood `Σ log f_{c,φ}(x_j)`; the Pareto support is taken closed at `c`.
pub fn log_likelihood(family: FamilyId, params: ParamPair, values: &[f64]) -> f64 {
    let ParamPair { c, phi } = params;
    let n = values.len() as f64;
    let mut acc = n * (phi / c).ln();
    for &x in values {
        let lr = (x / c).ln();
        let y = (phi * lr).exp();
        let log_f0 = match family {
            FamilyId::Weibull => -y,
            FamilyId::Pareto => {
                if y < 1.0 {
                    return f64::NEG_INFINITY;
                }
                -2.0 * phi * lr
            }
            FamilyId::Frechet => -1.0 / y - 2.0 * phi * lr,
        };
        acc += (phi - 1.0) * lr + log_f0;
    }
    acc
}

fn check_sample(sample: &Sample) -> Result<()> {
    let v = sample.values();
    if v.len() < 3 {
        return Err(Error::DegenerateSample(format!("need at least 3 observations, got {}", v.len())));
    }
    if v.iter().all(|&x| x == v[0]) {
        return Err(Error::DegenerateSample("all observations are equal".into()));
    }
    Ok(())
}

/// Maximum-likelihood estimate of `(c, φ)` for `family`.
pub fn mle(family: FamilyId, sample: &Sample) -> Result<Estimate> {
    check_sample(sample)?;
    let x = sample.values();
    let n = x.len() as f64;
    let (params, iterations, score_residual) = match family {
        FamilyId::Pareto => {
            let c = x.iter().copied().fold(f64::INFINITY, f64::min);
            let s: f64 = x.iter().map(|&v| (v / c).ln()).sum();
            (ParamPair::new(c, n / s)?, 0, 0.0)
        }
        FamilyId::Weibull | FamilyId::Frechet => {
            let sign = if family == FamilyId::Weibull { 1.0 } else { -1.0 };
            let logs: Vec<f64> = x.iter().map(|&v| sign * v.ln()).collect();
            let fit = solve_profile_shape(&logs)?;
            (ParamPair::new((sign * fit.log_scale).exp(), fit.shape)?, fit.iterations, fit.residual)
        }
    };
    Ok(Estimate {
        params,
        iterations,
        converged: true,
        log_likelihood: log_likelihood(family, params, x),
        score_residual,
    })
}

struct ShapeFit {
    shape: f64,
    log_scale: f64,
    iterations: usize,
    residual: f64,
}

/// Profile score of the shape at one value of `φ`, for centred log-data `v`:
/// `score = E_w[v] − 1/φ` under weights `w ∝ e^{φv}`, `slope = Var_w[v] + 1/φ²`,
/// `log_mean_exp = log E[e^{φv}]`.
pub(crate) struct Profile {
    pub score: f64,
    pub slope: f64,
    pub log_mean_exp: f64,
}

fn profile(v: &[f64], phi: f64) -> Profile {
    let m = v.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(phi * x));
    let (mut sw, mut swv, mut swv2) = (0.0, 0.0, 0.0);
    for &x in v {
        let w = (phi * x - m).exp();
        sw += w;
        swv += w * x;
        swv2 += w * x * x;
    }
    let mean = swv / sw;
    let var = (swv2 / sw - mean * mean).max(0.0);
    Profile {
        score: mean - 1.0 / phi,
        slope: var + 1.0 / (phi * phi),
        log_mean_exp: m + (sw / v.len() as f64).ln(),
    }
}

/// Solves the Weibull profile score `Σ u e^{φu}/Σ e^{φu} − 1/φ − ū = 0` for
/// log-data `u` by Newton's method safeguarded by bisection.
fn solve_profile_shape(u: &[f64]) -> Result<ShapeFit> {
    let n = u.len() as f64;
    let mean = u.iter().sum::<f64>() / n;
    let v: Vec<f64> = u.iter().map(|x| x - mean).collect();
    let sd = (v.iter().map(|x| x * x).sum::<f64>() / (n - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample("log-observations have zero spread".into()));
    }
    let (phi, last, iterations) = newton_shape(|phi| Ok(profile(&v, phi)), GUMBEL_SD / sd)?;
    Ok(finish(mean, phi, &last, iterations))
}

/// Safeguarded Newton iteration for the root of an increasing profile score
/// inside [`SHAPE_BRACKET`].
pub(crate) fn newton_shape<P>(eval: P, start: f64) -> Result<(f64, Profile, usize)>
where
    P: FnMut(f64) -> Result<Profile>,
{
    newton_shape_in(eval, start, SHAPE_BRACKET)
}

/// Newton on the profile score inside a bracket whose endpoints must have
/// scores of opposite sign.
pub(crate) fn newton_shape_in<P>(mut eval: P, start: f64, bracket: (f64, f64)) -> Result<(f64, Profile, usize)>
where
    P: FnMut(f64) -> Result<Profile>,
{
    let (mut lo, mut hi) = bracket;
    let s_hi = eval(hi)?.score;
    if s_hi < 0.0 {
        return Err(Error::Convergence {
            iterations: 0,
            last: hi,
            residual: s_hi,
        });
    }
    let s_lo = eval(lo)?.score;
    if s_lo > 0.0 {
        return Err(Error::Convergence {
            iterations: 0,
            last: lo,
            residual: s_lo,
        });
    }

    let mut phi = start.clamp(lo, hi);
    let mut last = eval(phi)?;
    for it in 1..=MAX_ITERATIONS {
        if last.score.abs() <= SCORE_TOLERANCE {
            return Ok((phi, last, it - 1));
        }
        if last.score < 0.0 {
            lo = phi;
        } else {
            hi = phi;
        }
        let newton = phi - last.score / last.slope;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - phi).abs() <= 4.0 * f64::EPSILON * phi {
            if last.score.abs() <= STALL_TOLERANCE {
                return Ok((phi, last, it));
            }
            break;
        }
        phi = next;
        last = eval(phi)?;
    }
    if last.score.abs() <= SCORE_TOLERANCE {
        return Ok((phi, last, MAX_ITERATIONS));
    }
    Err(Error::Convergence {
        iterations: MAX_ITERATIONS,
        last: phi,
        residual: last.score,
    })
}

fn finish(mean: f64, phi: f64, p: &Profile, iterations: usize) -> ShapeFit {
    ShapeFit {
        shape: phi,
        log_scale: mean + p.log_mean_exp / phi,
        iterations,
        residual: p.score,
    }
}

/// `Ŷ_j = (X_j/ĉ)^φ̂`, order preserved.
pub fn standardize(sample: &Sample, estimate: &Estimate) -> Result<StandardizedSample> {
    if !estimate.converged {
        return Err(Error::Domain("cannot standardize with an unconverged estimate".into()));
    }
    let ParamPair { c, phi } = estimate.params;
    let values: Vec<f64> = sample.values().iter().map(|&x| (x / c).powf(phi)).collect();
    let checked = Sample::new(values)?;
    Ok(StandardizedSample {
        values: checked.into_values(),
        source_estimate: *estimate,
    })
}

/// [`mle`] followed by [`standardize`].
pub fn fit_and_standardize(family: FamilyId, sample: &Sample) -> Result<StandardizedSample> {
    let est = mle(family, sample)?;
    standardize(sample, &est)
}
