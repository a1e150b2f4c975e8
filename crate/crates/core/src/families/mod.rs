//! Null families of the form `F_{c,φ}(x) = F₀((x/c)^φ)` and the alternative
//! laws used in power studies.

mod alternative;

pub use alternative::{AlternativeKind, AlternativeSpec};

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{exp_integral_e1, EULER_GAMMA};

/// Null family under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyId {
    /// `F₀(x) = 1 − e^{−x}`, `x > 0`.
    Weibull,
    /// `F₀(x) = 1 − 1/x`, `x > 1`.
    Pareto,
    /// `F₀(x) = e^{−1/x}`, `x > 0`.
    Frechet,
}

impl FamilyId {
    pub const ALL: [FamilyId; 3] = [FamilyId::Weibull, FamilyId::Pareto, FamilyId::Frechet];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Weibull => "weibull",
            FamilyId::Pareto => "pareto",
            FamilyId::Frechet => "frechet",
        }
    }

    /// Lower end of the support of the standard member.
    pub fn standard_support_start(self) -> f64 {
        match self {
            FamilyId::Pareto => 1.0,
            _ => 0.0,
        }
    }

    /// `F₀(x)`.
    pub fn standard_cdf(self, x: f64) -> f64 {
        match self {
            FamilyId::Weibull if x > 0.0 => -(-x).exp_m1(),
            FamilyId::Pareto if x > 1.0 => 1.0 - 1.0 / x,
            FamilyId::Frechet if x > 0.0 => (-1.0 / x).exp(),
            _ => 0.0,
        }
    }

    /// `f₀(x)`.
    pub fn standard_density(self, x: f64) -> f64 {
        match self {
            FamilyId::Weibull if x > 0.0 => (-x).exp(),
            FamilyId::Pareto if x > 1.0 => 1.0 / (x * x),
            FamilyId::Frechet if x > 0.0 => (-1.0 / x).exp() / (x * x),
            _ => 0.0,
        }
    }

    /// Inverse of `F₀` on `(0, 1)`.
    pub fn standard_quantile(self, u: f64) -> f64 {
        match self {
            FamilyId::Weibull => -(-u).ln_1p(),
            FamilyId::Pareto => (-(-u).ln_1p()).exp(),
            FamilyId::Frechet => -1.0 / u.ln(),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weibull" | "w" => Ok(FamilyId::Weibull),
            "pareto" | "p" => Ok(FamilyId::Pareto),
            "frechet" | "fréchet" | "f" => Ok(FamilyId::Frechet),
            other => Err(Error::Config(format!("unknown family '{other}'"))),
        }
    }
}

/// Scale `c` and shape `φ` of a family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPair {
    pub c: f64,
    pub phi: f64,
}

impl ParamPair {
    pub const STANDARD: ParamPair = ParamPair { c: 1.0, phi: 1.0 };

    pub fn new(c: f64, phi: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && phi > 0.0 && phi.is_finite()) {
            return Err(Error::Domain(format!("parameters must be positive and finite (c={c}, phi={phi})")));
        }
        Ok(Self { c, phi })
    }
}

/// A sample of positive observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("a sample needs at least one value".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("sample value #{} is not a positive finite number: {v}", i + 1)));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Applies `x ↦ a·x^{1/b}` to every value.
    pub fn power_transform(&self, a: f64, b: f64) -> Result<Sample> {
        Sample::new(self.values.iter().map(|x| a * x.powf(1.0 / b)).collect())
    }
}

/// Min-characteristic function `ψ₀(t) = E min{1, tX}` of the standard member.
pub fn null_min_cf(family: FamilyId, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("min-CF argument must be positive, got {t}")));
    }
    Ok(match family {
        FamilyId::Weibull => {
            if t.is_infinite() {
                1.0
            } else {
                -t * (-1.0 / t).exp_m1()
            }
        }
        FamilyId::Pareto => {
            if t <= 1.0 {
                t * (1.0 - t.ln())
            } else {
                1.0
            }
        }
        FamilyId::Frechet => {
            let t_e1 = if t < 1e-10 {
                t * (-EULER_GAMMA - t.ln())
            } else if t.is_infinite() {
                0.0
            } else {
                t * exp_integral_e1(t)?
            };
            -(-t).exp_m1() + t_e1
        }
    })
}

/// Distribution function `F_{c,φ}(x)`.
pub fn null_cdf(family: FamilyId, params: ParamPair, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    family.standard_cdf((x / params.c).powf(params.phi))
}

/// Density `f_{c,φ}(x) = (φ/c)(x/c)^{φ−1} f₀((x/c)^φ)`; 0 outside the support.
pub fn null_density(family: FamilyId, params: ParamPair, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let r = x / params.c;
    let y = r.powf(params.phi);
    let f0 = family.standard_density(y);
    if f0 == 0.0 {
        return 0.0;
    }
    params.phi / params.c * r.powf(params.phi - 1.0) * f0
}

/// Inverse distribution function of `F_{c,φ}` at `u ∈ (0, 1)`.
pub fn null_quantile(family: FamilyId, params: ParamPair, u: f64) -> f64 {
    params.c * family.standard_quantile(u).powf(1.0 / params.phi)
}

/// Draws `n` values from `F_{c,φ}` by inversion, one uniform per variate.
pub fn sample_null<R: Rng + ?Sized>(family: FamilyId, params: ParamPair, n: usize, rng: &mut R) -> Result<Sample> {
    ParamPair::new(params.c, params.phi)?;
    if n == 0 {
        return Err(Error::Domain("sample size must be at least 1".into()));
    }
    let mut values = Vec::with_capacity(n);
    while values.len() < n {
        let u: f64 = rng.sample(Open01);
        let x = null_quantile(family, params, u);
        // Rounding can put a Pareto draw exactly on c, or underflow a Weibull one.
        let lower = params.c * family.standard_support_start();
        if x > lower && x.is_finite() {
            values.push(x);
        }
    }
    Sample::new(values)
}
