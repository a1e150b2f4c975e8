//! Family constants `𝓛_γ = ∫ψ₀²e^{−γt}` and the cross terms
//! `λ_γ(z) = ∫ min{1,tz} ψ₀(t) e^{−γt} dt`.
//!
//! The closed-form parts are evaluated directly; the remaining integrals
//! (`M_{γ,1}`, `M_{γ,2}`, `I_γ`) go through adaptive quadrature. For a batch
//! of points the `M` integrals are accumulated over the panels between
//! consecutive breakpoints `1/z`, so each piece of the half-line is integrated
//! once per sample instead of once per point.

use super::kernel::lower_regularized_gamma_int;
use crate::error::{Error, Result};
use crate::families::FamilyId;
use crate::special::{bessel_k, exp_integral_e1, integrate, integrate_vec, QuadratureSpec, EULER_GAMMA};

/// Tolerances used for the `λ` and `𝓛` quadratures.
pub fn statistic_quadrature() -> QuadratureSpec {
    QuadratureSpec {
        relative_tolerance: 1e-10,
        absolute_tolerance: 1e-15,
        max_subdivisions: 2000,
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("weight parameter must be positive and finite, got {gamma}")))
    }
}

/// `𝓛_γ` for `family`.
pub fn l_constant(family: FamilyId, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let g = gamma;
    let spec = statistic_quadrature();
    Ok(match family {
        FamilyId::Weibull => {
            let k8 = bessel_k(3.0, (8.0 * g).sqrt())?;
            let k4 = bessel_k(3.0, (4.0 * g).sqrt())?;
            2.0 / g.powi(3) + (4.0 * 2f64.sqrt() * k8 - 4.0 * k4) / g.powf(1.5)
        }
        FamilyId::Pareto => {
            let i_p = integrate(|t| t * t * t.ln().powi(2) * (-g * t).exp(), 0.0, 1.0, &spec)?.value;
            let eg = (-g).exp();
            eg / g + (eg * (4.0 - g * g) + 4.0 * (g.ln() + exp_integral_e1(g)? + EULER_GAMMA - 1.0)) / g.powi(3) + i_p
        }
        FamilyId::Frechet => {
            let i_f = integrate(
                |t| {
                    let e1 = exp_integral_e1(t).unwrap_or(0.0);
                    t * t * e1 * e1 * (-g * t).exp()
                },
                0.0,
                f64::INFINITY,
                &spec,
            )?
            .value;
            let g1 = 1.0 + g;
            let g2 = 2.0 + g;
            1.0 / g2 + (g + 2.0 * (g1.ln() + 1.0 / g1 - 1.0)) / (g * g) - 2.0 * (g1 + g2.ln() + 1.0 / g2 - 1.0) / (g1 * g1)
                + i_f
        }
    })
}

/// Precomputed per-(family, γ) data for evaluating `λ_γ`.
#[derive(Debug, Clone)]
pub struct LambdaEvaluator {
    family: FamilyId,
    gamma: f64,
    /// Slope of the Pareto branch `z ≤ 1` (linear part).
    pareto_slope: f64,
    spec: QuadratureSpec,
}

impl LambdaEvaluator {
    pub fn new(family: FamilyId, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let g = gamma;
        let pareto_slope = if family == FamilyId::Pareto {
            let eg = (-g).exp();
            ((2.0 - eg * (2.0 + 2.0 * g + g * g)) - (3.0 - 2.0 * EULER_GAMMA - eg * (3.0 + g) - 2.0 * exp_integral_e1(g)? - 2.0 * g.ln()))
                / g.powi(3)
                + eg * (1.0 + g) / (g * g)
        } else {
            0.0
        };
        Ok(Self {
            family,
            gamma,
            pareto_slope,
            spec: statistic_quadrature(),
        })
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `λ_γ(z)` for a single point.
    pub fn eval(&self, z: f64) -> Result<f64> {
        Ok(self.eval_sorted(&[z])?[0])
    }

    /// `λ_γ(z_j)` for strictly increasing positive `z`.
    pub fn eval_sorted(&self, z: &[f64]) -> Result<Vec<f64>> {
        for w in z.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Domain("points must be strictly increasing".into()));
            }
        }
        if let Some(&bad) = z.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("lambda argument must be positive, got {bad}")));
        }
        let g = self.gamma;
        match self.family {
            FamilyId::Weibull => {
                let h = |t: f64| (-(1.0 / t + g * t)).exp();
                let (m1, m2) = self.cumulative_m(z, f64::INFINITY, |t| {
                    let w = h(t);
                    [t * t * w, t * w]
                })?;
                Ok(z.iter()
                    .enumerate()
                    .map(|(j, &zj)| {
                        let a = g / zj;
                        // (2z − e^{−γ/z}(γ + 2z))/γ³
                        let head = zj * (-2.0 * (-a).exp_m1() - a * (-a).exp()) / g.powi(3);
                        head - (zj * m1[j] + m2[j])
                    })
                    .collect())
            }
            FamilyId::Frechet => {
                let (m1, m2) = self.cumulative_m(z, f64::INFINITY, |t| {
                    let w = exp_integral_e1(t).unwrap_or(0.0) * (-g * t).exp();
                    [t * t * w, t * w]
                })?;
                let g1 = 1.0 + g;
                Ok(z.iter()
                    .enumerate()
                    .map(|(j, &zj)| {
                        zj * (-(-g / zj).exp_m1()) / (g * g) - zj * (-(-g1 / zj).exp_m1()) / (g1 * g1) + zj * m1[j] + m2[j]
                    })
                    .collect())
            }
            FamilyId::Pareto => {
                let split = z.partition_point(|&v| v <= 1.0);
                let mut out: Vec<f64> = z[..split]
                    .iter()
                    .map(|&zj| zj * self.pareto_slope + zj * (-(-g / zj).exp()) / (g * g))
                    .collect();
                if split < z.len() {
                    let upper = &z[split..];
                    let (m1, m2) = self.cumulative_m(upper, 1.0, |t| {
                        let w = t * t.ln() * (-g * t).exp();
                        [t * w, w]
                    })?;
                    let eg = (-g).exp();
                    for (j, &zj) in upper.iter().enumerate() {
                        let a = g / zj;
                        let v = 2.0 * zj / g.powi(3) * lower_regularized_gamma_int(3, a) + (-a).exp() * (1.0 + a) / (g * g)
                            - eg / (g * g)
                            - zj * m1[j]
                            - m2[j];
                        out.push(v);
                    }
                }
                Ok(out)
            }
        }
    }

    /// For increasing `z`, returns `M₁(z_j) = ∫₀^{1/z_j} f₁` and
    /// `M₂(z_j) = ∫_{1/z_j}^{upper} f₂`, where `f(t) = [f₁(t), f₂(t)]`.
    fn cumulative_m<F>(&self, z: &[f64], upper: f64, f: F) -> Result<(Vec<f64>, Vec<f64>)>
    where
        F: Fn(f64) -> [f64; 2] + Copy,
    {
        let k = z.len();
        // Breakpoints 1/z in increasing order.
        let breaks: Vec<f64> = z.iter().rev().map(|v| 1.0 / v).collect();
        let mut first = Vec::with_capacity(k + 1);
        let mut second = Vec::with_capacity(k + 1);
        let mut lo = 0.0;
        for &b in breaks.iter().chain(std::iter::once(&upper)) {
            let (p1, p2) = if b > lo {
                let [r1, r2] = integrate_vec(f, lo, b, &self.spec)?;
                (r1.value, r2.value)
            } else {
                (0.0, 0.0)
            };
            first.push(p1);
            second.push(p2);
            lo = b;
        }
        // Piece i covers [breaks[i-1], breaks[i]]; breaks[i] = 1/z[k-1-i].
        let mut m1 = vec![0.0; k];
        let mut m2 = vec![0.0; k];
        let mut acc = 0.0;
        for i in 0..k {
            acc += first[i];
            m1[k - 1 - i] = acc;
        }
        let mut acc = 0.0;
        for i in (0..k).rev() {
            acc += second[i + 1];
            m2[k - 1 - i] = acc;
        }
        Ok((m1, m2))
    }
}

/// `λ_γ(z)` for one point.
pub fn small_lambda(family: FamilyId, gamma: f64, z: f64) -> Result<f64> {
    LambdaEvaluator::new(family, gamma)?.eval(z)
}
