//! The weighted L² statistic
//!
//! `𝒯_{n,γ} = n ∫₀^∞ (ψ_n(t) − ψ₀(t))² e^{−γt} dt
//!          = (1/n) Σ_j Σ_k Λ_γ(Ŷ_j, Ŷ_k) + n𝓛_γ − 2 Σ_j λ_γ(Ŷ_j)`,
//!
//! where `ψ_n(t) = (1/n) Σ min{1, tŶ_j}` is the empirical min-characteristic
//! function of the standardized sample.

mod delta;
mod kernel;
mod lambda;

pub use delta::{limit_params, min_cf_of_alternative, population_delta};
pub use kernel::kernel_lambda;
pub use lambda::{l_constant, small_lambda, statistic_quadrature, LambdaEvaluator};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::StandardizedSample;
use crate::families::{null_min_cf, FamilyId, Sample};
use crate::special::{integrate_with_breaks, QuadratureSpec};
use lambda::check_gamma;

/// Weight `w(t) = e^{−γt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub gamma: f64,
}

impl WeightConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { gamma })
    }

    pub fn weight(&self, t: f64) -> f64 {
        (-self.gamma * t).exp()
    }
}

/// The three terms of the closed-form statistic and their combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticBreakdown {
    /// `(1/n) Σ_j Σ_k Λ_γ(Ŷ_j, Ŷ_k)`
    pub double_sum: f64,
    /// `n 𝓛_γ`
    pub n_times_l: f64,
    /// `2 Σ_j λ_γ(Ŷ_j)`
    pub lambda_sum: f64,
    /// `double_sum + n_times_l − lambda_sum`
    pub value: f64,
}

/// Evaluates `𝒯_{n,γ}` for one `(family, γ)`; holds `𝓛_γ` and the
/// `λ_γ` setup so that repeated evaluations (Monte Carlo) share them.
#[derive(Debug, Clone)]
pub struct StatisticEvaluator {
    family: FamilyId,
    gamma: f64,
    l_constant: f64,
    lambda: LambdaEvaluator,
}

impl StatisticEvaluator {
    pub fn new(family: FamilyId, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            family,
            gamma,
            l_constant: l_constant(family, gamma)?,
            lambda: LambdaEvaluator::new(family, gamma)?,
        })
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn l_constant(&self) -> f64 {
        self.l_constant
    }

    pub fn evaluate(&self, standardized: &StandardizedSample) -> Result<StatisticBreakdown> {
        self.evaluate_values(standardized.values())
    }

    /// Statistic of values that are already standardized.
    pub fn evaluate_values(&self, values: &[f64]) -> Result<StatisticBreakdown> {
        if values.is_empty() {
            return Err(Error::Domain("statistic needs at least one observation".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("standardized values must be positive, got {bad}")));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;

        let double_sum = kernel::kernel_double_sum_sorted(self.gamma, &sorted) / n;

        let mut distinct = sorted.clone();
        distinct.dedup();
        let lambdas = self.lambda.eval_sorted(&distinct)?;
        let mut lambda_sum = 0.0;
        let mut it = sorted.iter().peekable();
        for (z, l) in distinct.iter().zip(&lambdas) {
            while it.next_if(|v| **v == *z).is_some() {
                lambda_sum += l;
            }
        }
        lambda_sum *= 2.0;

        let n_times_l = n * self.l_constant;
        Ok(StatisticBreakdown {
            double_sum,
            n_times_l,
            lambda_sum,
            value: double_sum + n_times_l - lambda_sum,
        })
    }
}

/// `𝒯_{n,γ}` from the closed-form decomposition.
pub fn statistic(family: FamilyId, standardized: &StandardizedSample, gamma: f64) -> Result<StatisticBreakdown> {
    StatisticEvaluator::new(family, gamma)?.evaluate(standardized)
}

/// Empirical min-characteristic function `(1/n) Σ min{1, t x_j}`.
pub fn empirical_min_cf(sample: &Sample, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("min-CF argument must be positive, got {t}")));
    }
    let v = sample.values();
    Ok(v.iter().map(|&x| (t * x).min(1.0)).sum::<f64>() / v.len() as f64)
}

/// Sorted values with prefix sums, for `O(log n)` evaluation of `ψ_n`.
struct EmpiricalCurve {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl EmpiricalCurve {
    fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        prefix.push(0.0);
        for v in &sorted {
            prefix.push(prefix.last().unwrap() + v);
        }
        Self { sorted, prefix }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.sorted.len();
        // Points with t·x < 1 contribute t·x, the rest contribute 1.
        let k = self.sorted.partition_point(|&x| t * x < 1.0);
        (t * self.prefix[k] + (n - k) as f64) / n as f64
    }
}

fn direct_quadrature() -> QuadratureSpec {
    QuadratureSpec {
        relative_tolerance: 1e-12,
        absolute_tolerance: 1e-300,
        max_subdivisions: 20_000,
    }
}

/// `∫₀^∞ (curve(t) − ψ₀(t))² e^{−γt} dt`, with extra panel breaks at `kinks`.
pub fn weighted_distance_to_null<F>(family: FamilyId, gamma: f64, kinks: &[f64], curve: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_gamma(gamma)?;
    let mut pts: Vec<f64> = kinks.iter().copied().filter(|t| *t > 0.0 && t.is_finite()).collect();
    if family == FamilyId::Pareto {
        pts.push(1.0);
    }
    pts.push(0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.push(f64::INFINITY);
    let integrand = |t: f64| {
        let d = curve(t) - null_min_cf(family, t).unwrap_or(f64::NAN);
        d * d * (-gamma * t).exp()
    };
    Ok(integrate_with_breaks(integrand, &pts, &direct_quadrature())?.value)
}

/// `𝒯_{n,γ}` by direct quadrature of `n ∫ (ψ_n − ψ₀)² e^{−γt} dt`.
pub fn statistic_direct(family: FamilyId, standardized: &StandardizedSample, gamma: f64) -> Result<f64> {
    let values = standardized.values();
    let curve = EmpiricalCurve::new(values);
    let kinks: Vec<f64> = curve.sorted.iter().map(|z| 1.0 / z).collect();
    let n = values.len() as f64;
    Ok(n * weighted_distance_to_null(family, gamma, &kinks, |t| curve.eval(t))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::fit_and_standardize;
    use crate::families::{sample_null, ParamPair};
    use crate::special::integrate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn psi_quadrature(family: FamilyId, gamma: f64, g: impl Fn(f64) -> f64, kink: Option<f64>) -> f64 {
        let spec = QuadratureSpec::new(1e-13, 1e-300, 5000).unwrap();
        let mut pts = vec![0.0];
        if let Some(k) = kink {
            pts.push(k);
        }
        if family == FamilyId::Pareto && kink != Some(1.0) {
            pts.push(1.0);
        }
        pts.sort_by(f64::total_cmp);
        pts.push(f64::INFINITY);
        integrate_with_breaks(|t| g(t) * null_min_cf(family, t).unwrap() * (-gamma * t).exp(), &pts, &spec)
            .unwrap()
            .value
    }

    #[test]
    fn weibull_l_constant_closed_form() {
        let l = l_constant(FamilyId::Weibull, 1.0).unwrap();
        let q = psi_quadrature(FamilyId::Weibull, 1.0, |t| null_min_cf(FamilyId::Weibull, t).unwrap(), None);
        assert!((l - q).abs() < 1e-8 * q, "{l} {q}");
        assert!((l - 0.308_262_524_253_847_92).abs() < 1e-12);
    }

    #[test]
    fn l_constants_match_quadrature() {
        for fam in FamilyId::ALL {
            for &g in &[0.5, 1.0, 5.0] {
                let l = l_constant(fam, g).unwrap();
                let q = psi_quadrature(fam, g, |t| null_min_cf(fam, t).unwrap(), None);
                assert!((l - q).abs() < 1e-8 * q, "{fam} γ={g}: {l} vs {q}");
            }
        }
    }

    #[test]
    fn pareto_l_constant_by_pieces() {
        let spec = QuadratureSpec::default();
        let q = integrate(|t| (t * (1.0 - t.ln())).powi(2) * (-t).exp(), 0.0, 1.0, &spec).unwrap().value
            + (-1.0f64).exp();
        assert!((l_constant(FamilyId::Pareto, 1.0).unwrap() - q).abs() < 1e-8 * q);
    }

    #[test]
    fn small_lambda_matches_definition() {
        for fam in FamilyId::ALL {
            for &g in &[0.5, 1.0, 5.0] {
                for &z in &[0.05, 0.3, 1.0, 1.7, 4.0, 40.0] {
                    let v = small_lambda(fam, g, z).unwrap();
                    let q = psi_quadrature(fam, g, |t| (t * z).min(1.0), Some(1.0 / z));
                    assert!((v - q).abs() < 1e-8 * q, "{fam} γ={g} z={z}: {v} vs {q}");
                }
            }
        }
    }

    #[test]
    fn batch_lambda_matches_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for fam in FamilyId::ALL {
            let ev = LambdaEvaluator::new(fam, 1.0).unwrap();
            let mut z: Vec<f64> = (0..30).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect();
            z.push(1.0);
            z.sort_by(f64::total_cmp);
            let batch = ev.eval_sorted(&z).unwrap();
            for (zj, b) in z.iter().zip(&batch) {
                let single = ev.eval(*zj).unwrap();
                assert!((b - single).abs() < 1e-10 * single, "{fam} z={zj}");
            }
        }
    }

    #[test]
    fn pareto_branches_are_continuous() {
        let ev = LambdaEvaluator::new(FamilyId::Pareto, 0.5).unwrap();
        let v = ev.eval_sorted(&[1.0, 1.0 + 1e-9]).unwrap();
        assert!((v[0] - v[1]).abs() < 1e-8, "{v:?}");
    }

    #[test]
    fn small_lambda_vanishes_at_origin() {
        for fam in FamilyId::ALL {
            for &g in &[0.5, 1.0, 5.0] {
                assert!(small_lambda(fam, g, 1e-9).unwrap().abs() < 1e-8, "{fam} γ={g}");
            }
        }
    }

    #[test]
    fn cauchy_schwarz_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for fam in FamilyId::ALL {
            let gammas = [0.3, 0.5, 1.0, 2.0, 5.0, 9.0];
            for &g in &gammas {
                let ev = LambdaEvaluator::new(fam, g).unwrap();
                let l = l_constant(fam, g).unwrap();
                for _ in 0..56 {
                    let z = 10f64.powf(rng.random_range(-2.0..2.0));
                    let lam = ev.eval(z).unwrap();
                    let k = kernel_lambda(g, z, z).unwrap();
                    assert!(lam * lam <= k * l * (1.0 + 1e-9), "{fam} γ={g} z={z}");
                }
            }
        }
    }

    #[test]
    fn empirical_min_cf_basics() {
        let s = Sample::new(vec![1.0]).unwrap();
        assert_eq!(empirical_min_cf(&s, 0.5).unwrap(), 0.5);
        assert_eq!(empirical_min_cf(&s, 2.0).unwrap(), 1.0);
        assert!(empirical_min_cf(&s, 0.0).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x = sample_null(FamilyId::Weibull, ParamPair::STANDARD, 100_000, &mut rng).unwrap();
        let v = empirical_min_cf(&x, 1.0).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 0.01);

        let small = sample_null(FamilyId::Frechet, ParamPair::STANDARD, 25, &mut rng).unwrap();
        let ts: Vec<f64> = (1..400).map(|i| i as f64 * 0.02).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| empirical_min_cf(&small, t).unwrap()).collect();
        for w in vals.windows(3) {
            assert!(w[1] >= w[0]);
            assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-12);
        }
        let curve = EmpiricalCurve::new(small.values());
        for &t in &ts {
            assert!((curve.eval(t) - empirical_min_cf(&small, t).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn three_equal_points() {
        let y = StandardizedSample::assume_standard(vec![1.0; 3]).unwrap();
        let s = statistic(FamilyId::Weibull, &y, 1.0).unwrap();
        let expected = 3.0
            * (kernel_lambda(1.0, 1.0, 1.0).unwrap() + l_constant(FamilyId::Weibull, 1.0).unwrap()
                - 2.0 * small_lambda(FamilyId::Weibull, 1.0, 1.0).unwrap());
        assert!((s.value - expected).abs() < 1e-12);
        let d = statistic_direct(FamilyId::Weibull, &y, 1.0).unwrap();
        assert!((s.value - d).abs() < 1e-6 * d);
    }

    #[test]
    fn zero_distance_when_curve_is_null() {
        for fam in FamilyId::ALL {
            let v = weighted_distance_to_null(fam, 1.0, &[], |t| null_min_cf(fam, t).unwrap()).unwrap();
            assert!(v.abs() < 1e-20, "{fam}: {v}");
        }
    }

    #[test]
    fn closed_form_matches_direct_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for fam in FamilyId::ALL {
            for &n in &[5usize, 20] {
                for &g in &[0.5, 1.0, 5.0] {
                    let x = sample_null(fam, ParamPair::new(2.0, 1.3).unwrap(), n, &mut rng).unwrap();
                    let y = fit_and_standardize(fam, &x).unwrap();
                    let s = statistic(fam, &y, g).unwrap();
                    let d = statistic_direct(fam, &y, g).unwrap();
                    assert!(s.value >= -1e-9);
                    let rel = (s.value - d).abs() / s.value.max(1e-12);
                    assert!(rel <= 1e-6, "{fam} n={n} γ={g}: {} vs {d}", s.value);
                    assert_eq!(s.value, s.double_sum + s.n_times_l - s.lambda_sum);
                }
            }
        }
    }

    #[test]
    fn weight_config_validation() {
        assert!(WeightConfig::new(0.0).is_err());
        assert!(WeightConfig::new(-1.0).is_err());
        assert_eq!(WeightConfig::new(2.0).unwrap().weight(0.0), 1.0);
    }
}
