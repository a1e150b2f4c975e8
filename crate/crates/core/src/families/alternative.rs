//! Alternative distributions for power studies, written in the usual
//! notation `W(φ,c)`, `P(φ,c)`, `Γ(φ,c)`, `LN(σ)` / `LN(μ,σ)`, `HN(θ)`,
//! `LFR(θ)`, `CH(θ)`, `F(φ,c)`, optionally followed by `+shift`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::Sample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlternativeKind {
    Weibull { shape: f64, scale: f64 },
    Pareto { shape: f64, scale: f64 },
    Gamma { shape: f64, scale: f64 },
    Lognormal { mu: f64, sigma: f64 },
    Halfnormal { theta: f64 },
    /// Linear failure rate, hazard `1 + θx`.
    Lfr { theta: f64 },
    /// Chen law with `F(x) = 1 − exp(2(1 − e^{x^θ}))`.
    Chen { theta: f64 },
    Frechet { shape: f64, scale: f64 },
}

/// An alternative law plus a nonnegative location shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AlternativeSpec {
    pub kind: AlternativeKind,
    pub shift: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl AlternativeSpec {
    pub fn new(kind: AlternativeKind, shift: f64) -> Result<Self> {
        let spec = Self { kind, shift };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shift >= 0.0 && self.shift.is_finite()) {
            return Err(Error::Config(format!("shift must be nonnegative, got {}", self.shift)));
        }
        use AlternativeKind::*;
        match self.kind {
            Weibull { shape, scale } | Pareto { shape, scale } | Gamma { shape, scale } | Frechet { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
            }
            Lognormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::Config(format!("lognormal mu must be finite, got {mu}")));
                }
                positive("sigma", sigma)?;
            }
            Halfnormal { theta } | Chen { theta } => {
                positive("theta", theta)?;
            }
            Lfr { theta } => {
                if !(theta >= 0.0 && theta.is_finite()) {
                    return Err(Error::Config(format!("LFR theta must be nonnegative, got {theta}")));
                }
            }
        }
        Ok(())
    }

    /// Infimum of the support, shift included.
    pub fn support_start(&self) -> f64 {
        match self.kind {
            AlternativeKind::Pareto { scale, .. } => scale + self.shift,
            _ => self.shift,
        }
    }

    /// Density of the shifted law; 0 outside the support.
    pub fn density(&self, x: f64) -> f64 {
        let y = x - self.shift;
        if !(y > 0.0) {
            return 0.0;
        }
        use AlternativeKind::*;
        match self.kind {
            Weibull { shape, scale } => {
                let r = y / scale;
                shape / scale * r.powf(shape - 1.0) * (-r.powf(shape)).exp()
            }
            Pareto { shape, scale } => {
                if y <= scale {
                    0.0
                } else {
                    shape * scale.powf(shape) / y.powf(shape + 1.0)
                }
            }
            Gamma { shape, scale } => {
                ((shape - 1.0) * y.ln() - y / scale - shape * scale.ln() - ln_gamma(shape)).exp()
            }
            Lognormal { mu, sigma } => {
                let z = (y.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (y * sigma * (2.0 * PI).sqrt())
            }
            Halfnormal { theta } => (2.0 / PI).sqrt() / theta * (-0.5 * (y / theta).powi(2)).exp(),
            Lfr { theta } => (1.0 + theta * y) * (-y - 0.5 * theta * y * y).exp(),
            Chen { theta } => {
                let p = y.powf(theta);
                let e = p.exp();
                if !e.is_finite() {
                    return 0.0;
                }
                2.0 * theta * y.powf(theta - 1.0) * (p + 2.0 * (1.0 - e)).exp()
            }
            Frechet { shape, scale } => {
                let r = y / scale;
                shape / scale * r.powf(-1.0 - shape) * (-r.powf(-shape)).exp()
            }
        }
    }

    /// One variate from the unshifted law.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use AlternativeKind::*;

        match self.kind {
            Weibull { shape, scale } => scale * (-(-unif(rng)).ln_1p()).powf(1.0 / shape),
            Pareto { shape, scale } => loop {
                let x = scale * (-(-unif(rng)).ln_1p() / shape).exp();
                if x > scale {
                    break x;
                }
            },
            Frechet { shape, scale } => scale * (-unif(rng).ln()).powf(-1.0 / shape),
            Lfr { theta } => {
                let e = -(-unif(rng)).ln_1p();
                // (√(1+2θE) − 1)/θ, rationalised for small θ.
                2.0 * e / (1.0 + (1.0 + 2.0 * theta * e).sqrt())
            }
            Chen { theta } => {
                let e = -(-unif(rng)).ln_1p();
                (0.5 * e).ln_1p().powf(1.0 / theta)
            }
            Gamma { shape, scale } => {
                let g = rand_distr::Gamma::new(shape, scale).expect("validated gamma parameters");
                g.sample(rng)
            }
            Lognormal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu + sigma * z).exp()
            }
            Halfnormal { theta } => {
                let z: f64 = rng.sample(StandardNormal);
                theta * z.abs()
            }
        }
    }

    /// Draws `n` shifted variates.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        self.validate()?;
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let mut values = Vec::with_capacity(n);
        while values.len() < n {
            let x = self.draw(rng);
            // Zero draws (underflow) are not admissible observations.
            if x > 0.0 && x.is_finite() {
                values.push(x + self.shift);
            }
        }
        Sample::new(values)
    }
}

fn unif<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl fmt::Display for AlternativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AlternativeKind::*;
        let body = match self.kind {
            Weibull { shape, scale } => format!("W({},{})", fmt_num(shape), fmt_num(scale)),
            Pareto { shape, scale } => format!("P({},{})", fmt_num(shape), fmt_num(scale)),
            Gamma { shape, scale } => format!("G({},{})", fmt_num(shape), fmt_num(scale)),
            Lognormal { mu: 0.0, sigma } => format!("LN({})", fmt_num(sigma)),
            Lognormal { mu, sigma } => format!("LN({},{})", fmt_num(mu), fmt_num(sigma)),
            Halfnormal { theta } => format!("HN({})", fmt_num(theta)),
            Lfr { theta } => format!("LFR({})", fmt_num(theta)),
            Chen { theta } => format!("CH({})", fmt_num(theta)),
            Frechet { shape, scale } => format!("F({},{})", fmt_num(shape), fmt_num(scale)),
        };
        if self.shift > 0.0 {
            write!(f, "{body}+{}", fmt_num(self.shift))
        } else {
            f.write_str(&body)
        }
    }
}

impl FromStr for AlternativeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Config(format!("invalid alternative spec '{s}': {why}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let open = compact.find('(').ok_or_else(|| bad("missing '('"))?;
        let close = compact.rfind(')').ok_or_else(|| bad("missing ')'"))?;
        if close < open {
            return Err(bad("unbalanced parentheses"));
        }
        let name = compact[..open].to_lowercase();
        let args: Vec<f64> = compact[open + 1..close]
            .split(',')
            .map(|a| a.parse::<f64>().map_err(|_| bad(&format!("'{a}' is not a number"))))
            .collect::<Result<_>>()?;
        let rest = &compact[close + 1..];
        let shift = if rest.is_empty() {
            0.0
        } else if let Some(v) = rest.strip_prefix('+') {
            v.parse::<f64>().map_err(|_| bad(&format!("'{v}' is not a valid shift")))?
        } else {
            return Err(bad(&format!("unexpected trailing '{rest}'")));
        };

        let two = |args: &[f64]| -> Result<(f64, f64)> {
            match *args {
                [a, b] => Ok((a, b)),
                _ => Err(bad("expected two parameters")),
            }
        };
        let one = |args: &[f64]| -> Result<f64> {
            match *args {
                [a] => Ok(a),
                _ => Err(bad("expected one parameter")),
            }
        };
        use AlternativeKind::*;
        let kind = match name.as_str() {
            "w" | "weibull" => {
                let (shape, scale) = two(&args)?;
                Weibull { shape, scale }
            }
            "p" | "pareto" => {
                let (shape, scale) = two(&args)?;
                Pareto { shape, scale }
            }
            "g" | "gamma" | "γ" => {
                let (shape, scale) = two(&args)?;
                Gamma { shape, scale }
            }
            "f" | "frechet" | "fréchet" => {
                let (shape, scale) = two(&args)?;
                Frechet { shape, scale }
            }
            "ln" | "lognormal" => match *args.as_slice() {
                [sigma] => Lognormal { mu: 0.0, sigma },
                [mu, sigma] => Lognormal { mu, sigma },
                _ => return Err(bad("expected LN(sigma) or LN(mu,sigma)")),
            },
            "hn" | "halfnormal" => Halfnormal { theta: one(&args)? },
            "lfr" => Lfr { theta: one(&args)? },
            "ch" | "chen" => Chen { theta: one(&args)? },
            other => return Err(bad(&format!("unknown distribution '{other}'"))),
        };
        AlternativeSpec::new(kind, shift).map_err(|e| match e {
            Error::Config(m) => bad(&m),
            other => other,
        })
    }
}

impl TryFrom<String> for AlternativeSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AlternativeSpec> for String {
    fn from(a: AlternativeSpec) -> String {
        a.to_string()
    }
}
