//! Monte Carlo engine: null distributions, critical values, p-values and
//! power.
//!
//! Because the statistic is computed from MLE-standardized data, its null law
//! does not depend on `(c, φ)` and is tabulated once per `(family, n, γ)` by
//! simulating the standard member. One replicate sample feeds every `γ`, so
//! the nulls of a `γ` list share their draws.

mod cache;
mod stream;

pub use cache::{NullCache, STATISTIC_VERSION};
pub use stream::{derive_seed, replicate_rng};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{fit_and_standardize, Estimate, StandardizedSample};
use crate::families::{sample_null, AlternativeKind, AlternativeSpec, FamilyId, ParamPair, Sample};
use crate::statistic::StatisticEvaluator;

/// Redraws allowed for a single replicate before the run is abandoned.
const MAX_REDRAWS_PER_REPLICATE: usize = 50;

pub const DEFAULT_GAMMAS: [f64; 3] = [0.5, 1.0, 5.0];

/// Execution settings that never influence results.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers: workers.max(1) }
    }

    fn run<T, F>(&self, replicates: usize, job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Simulation(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..replicates as u64).into_par_iter().map(&job).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDistribution {
    pub family: FamilyId,
    pub n: usize,
    pub gamma: f64,
    pub replicates: usize,
    pub sorted_stats: Vec<f64>,
    pub seed: u64,
    /// Degenerate draws that were replaced.
    pub redraws: usize,
}

impl NullDistribution {
    /// Empirical `(1 − α)` quantile, `sorted[⌈(1−α)(N+1)⌉ − 1]` clamped to the
    /// available order statistics.
    pub fn critical_value(&self, alpha: f64) -> Result<f64> {
        critical_value(&self.sorted_stats, alpha)
    }

    /// `(1 + #{T_i ≥ observed}) / (N + 1)`.
    pub fn p_value(&self, observed: f64) -> Result<f64> {
        p_value(&self.sorted_stats, observed)
    }
}

pub fn critical_value(sorted_stats: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if sorted_stats.is_empty() {
        return Err(Error::Domain("empty null distribution".into()));
    }
    let m = sorted_stats.len();
    let rank = ((1.0 - alpha) * (m as f64 + 1.0)).ceil() as usize;
    Ok(sorted_stats[rank.clamp(1, m) - 1])
}

pub fn p_value(sorted_stats: &[f64], observed: f64) -> Result<f64> {
    if !observed.is_finite() {
        return Err(Error::Domain(format!("observed statistic must be finite, got {observed}")));
    }
    let below = sorted_stats.partition_point(|s| *s < observed);
    let exceed = sorted_stats.len() - below;
    Ok((1 + exceed) as f64 / (sorted_stats.len() + 1) as f64)
}

/// Seed of the null run for `(family, n)` under a user seed. Every command
/// derives it the same way so cached nulls are shared.
pub fn null_seed(base: u64, family: FamilyId, n: usize) -> u64 {
    derive_seed(base, &["null", family.name(), &n.to_string()])
}

/// The standard member of a family written as an alternative, for size runs.
pub fn null_member(family: FamilyId) -> AlternativeSpec {
    let kind = match family {
        FamilyId::Weibull => AlternativeKind::Weibull { shape: 1.0, scale: 1.0 },
        FamilyId::Pareto => AlternativeKind::Pareto { shape: 1.0, scale: 1.0 },
        FamilyId::Frechet => AlternativeKind::Frechet { shape: 1.0, scale: 1.0 },
    };
    AlternativeSpec { kind, shift: 0.0 }
}

fn evaluators(family: FamilyId, gammas: &[f64]) -> Result<Vec<StatisticEvaluator>> {
    if gammas.is_empty() {
        return Err(Error::Config("at least one gamma is required".into()));
    }
    gammas.iter().map(|&g| StatisticEvaluator::new(family, g)).collect()
}

fn is_degenerate(e: &Error) -> bool {
    matches!(e, Error::DegenerateSample(_) | Error::Convergence { .. })
}

/// Draw-fit-evaluate loop of one replicate; degenerate fits are redrawn from
/// the same stream.
fn replicate<D>(
    family: FamilyId,
    seed: u64,
    index: u64,
    evaluators: &[StatisticEvaluator],
    mut draw: D,
) -> Result<(Vec<f64>, usize)>
where
    D: FnMut(&mut rand_chacha::ChaCha8Rng) -> Result<Sample>,
{
    let mut rng = replicate_rng(seed, index);
    for redraws in 0..=MAX_REDRAWS_PER_REPLICATE {
        let sample = draw(&mut rng)?;
        match fit_and_standardize(family, &sample) {
            Ok(y) => {
                let stats = evaluators
                    .iter()
                    .map(|ev| ev.evaluate(&y).map(|b| b.value))
                    .collect::<Result<Vec<_>>>()?;
                return Ok((stats, redraws));
            }
            Err(e) if is_degenerate(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Simulation(format!(
        "replicate {index} produced {MAX_REDRAWS_PER_REPLICATE} consecutive degenerate samples"
    )))
}

fn check_redraws(redraws: usize, replicates: usize) -> Result<()> {
    if redraws * 100 > replicates {
        return Err(Error::Simulation(format!(
            "{redraws} of {replicates} replicates needed a redraw (limit 1%)"
        )));
    }
    if redraws > 0 {
        log::info!("{redraws} degenerate draws replaced");
    }
    Ok(())
}

fn check_size(n: usize, replicates: usize, min_replicates: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Config(format!("sample size must be at least 3, got {n}")));
    }
    if replicates < min_replicates {
        return Err(Error::Config(format!("at least {min_replicates} replicates are required, got {replicates}")));
    }
    Ok(())
}

/// Null distributions for every `γ` in `gammas` from one set of replicates.
/// `params` selects the member the samples are drawn from; any member gives
/// the same law, the standard one is the default.
pub fn build_nulls_from(
    family: FamilyId,
    params: ParamPair,
    n: usize,
    gammas: &[f64],
    replicates: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<NullDistribution>> {
    check_size(n, replicates, 100)?;
    let evs = evaluators(family, gammas)?;
    let rows = opts.run(replicates, |i| {
        replicate(family, seed, i, &evs, |rng| sample_null(family, params, n, rng))
    })?;
    let redraws = rows.iter().map(|r| r.1).sum();
    check_redraws(redraws, replicates)?;
    Ok(gammas
        .iter()
        .enumerate()
        .map(|(g, &gamma)| {
            let mut sorted_stats: Vec<f64> = rows.iter().map(|r| r.0[g]).collect();
            sorted_stats.sort_by(f64::total_cmp);
            NullDistribution {
                family,
                n,
                gamma,
                replicates,
                sorted_stats,
                seed,
                redraws,
            }
        })
        .collect())
}

pub fn build_nulls(
    family: FamilyId,
    n: usize,
    gammas: &[f64],
    replicates: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<NullDistribution>> {
    build_nulls_from(family, ParamPair::STANDARD, n, gammas, replicates, seed, opts)
}

pub fn build_null(
    family: FamilyId,
    n: usize,
    gamma: f64,
    replicates: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<NullDistribution> {
    Ok(build_nulls(family, n, &[gamma], replicates, seed, opts)?.remove(0))
}

/// Like [`build_nulls`], reading from and writing to `cache` when given.
pub fn build_nulls_cached(
    cache: Option<&NullCache>,
    family: FamilyId,
    n: usize,
    gammas: &[f64],
    replicates: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<NullDistribution>> {
    let Some(cache) = cache else {
        return build_nulls(family, n, gammas, replicates, seed, opts);
    };
    let hits: Vec<Option<NullDistribution>> = gammas
        .iter()
        .map(|&g| cache.load(family, n, g, replicates, seed))
        .collect::<Result<_>>()?;
    if hits.iter().all(Option::is_some) {
        return Ok(hits.into_iter().flatten().collect());
    }
    let built = build_nulls(family, n, gammas, replicates, seed, opts)?;
    for null in &built {
        cache.store(null)?;
    }
    Ok(built)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub family: FamilyId,
    pub n: usize,
    pub gamma: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub estimate: Estimate,
}

/// Tests one dataset against nulls of matching `(family, n)`.
pub fn test_sample(family: FamilyId, sample: &Sample, nulls: &[NullDistribution]) -> Result<Vec<TestResult>> {
    let y: StandardizedSample = fit_and_standardize(family, sample)?;
    nulls
        .iter()
        .map(|null| {
            if null.family != family || null.n != sample.len() {
                return Err(Error::Config(format!(
                    "null for ({}, n={}) does not match ({family}, n={})",
                    null.family,
                    null.n,
                    sample.len()
                )));
            }
            let statistic = StatisticEvaluator::new(family, null.gamma)?.evaluate(&y)?.value;
            Ok(TestResult {
                family,
                n: null.n,
                gamma: null.gamma,
                statistic,
                p_value: null.p_value(statistic)?,
                estimate: *y.source_estimate(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub family: FamilyId,
    pub alternative: AlternativeSpec,
    pub n: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub critical_value: f64,
    pub rejections: usize,
    pub replicates: usize,
    pub rate: f64,
    pub redraws: usize,
}

/// Rejection counts of `replicates` samples from `alt`, one result per null
/// (all nulls must share `family` and `n`). A sample is rejected when its
/// statistic exceeds the critical value.
pub fn power(
    alt: &AlternativeSpec,
    nulls: &[NullDistribution],
    alpha: f64,
    replicates: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<PowerResult>> {
    let first = nulls.first().ok_or_else(|| Error::Config("power needs at least one null distribution".into()))?;
    let (family, n) = (first.family, first.n);
    if nulls.iter().any(|d| d.family != family || d.n != n) {
        return Err(Error::Config("null distributions must share family and sample size".into()));
    }
    check_size(n, replicates, 1)?;
    alt.validate()?;
    let crit = nulls
        .iter()
        .map(|d| d.critical_value(alpha))
        .collect::<Result<Vec<_>>>()?;
    let gammas: Vec<f64> = nulls.iter().map(|d| d.gamma).collect();
    let evs = evaluators(family, &gammas)?;
    let rows = opts.run(replicates, |i| replicate(family, seed, i, &evs, |rng| alt.sample(n, rng)))?;
    let redraws = rows.iter().map(|r| r.1).sum();
    check_redraws(redraws, replicates)?;
    Ok(nulls
        .iter()
        .enumerate()
        .map(|(g, d)| {
            let rejections = rows.iter().filter(|r| r.0[g] > crit[g]).count();
            PowerResult {
                family,
                alternative: *alt,
                n,
                gamma: d.gamma,
                alpha,
                critical_value: crit[g],
                rejections,
                replicates,
                rate: rejections as f64 / replicates as f64,
                redraws,
            }
        })
        .collect())
}

/// Statistics of `replicates` samples from `alt` (no null needed), for
/// checking convergence of `𝒯_n / n`.
pub fn alternative_statistics(
    family: FamilyId,
    alt: &AlternativeSpec,
    n: usize,
    gamma: f64,
    replicates: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<f64>> {
    check_size(n, replicates, 1)?;
    alt.validate()?;
    let evs = evaluators(family, &[gamma])?;
    let rows = opts.run(replicates, |i| replicate(family, seed, i, &evs, |rng| alt.sample(n, rng)))?;
    check_redraws(rows.iter().map(|r| r.1).sum(), replicates)?;
    Ok(rows.into_iter().map(|r| r.0[0]).collect())
}

fn default_gammas() -> Vec<f64> {
    DEFAULT_GAMMAS.to_vec()
}

fn default_sizes() -> Vec<usize> {
    vec![20, 50]
}

fn default_alpha() -> f64 {
    0.05
}

fn default_replicates() -> usize {
    10_000
}

/// A power study: every alternative against every `(family, n, γ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub families: Vec<FamilyId>,
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    #[serde(default = "default_sizes")]
    pub sample_sizes: Vec<usize>,
    pub alternatives: Vec<AlternativeSpec>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Null replicates; defaults to twice `replicates`.
    #[serde(default)]
    pub crit_replicates: Option<usize>,
    pub seed: u64,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.gammas.is_empty() || self.sample_sizes.is_empty() || self.alternatives.is_empty() {
            return Err(Error::Config("families, gammas, sample_sizes and alternatives must be nonempty".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        for &g in &self.gammas {
            crate::statistic::WeightConfig::new(g).map_err(|e| Error::Config(e.to_string()))?;
        }
        for &n in &self.sample_sizes {
            check_size(n, self.crit_replicates(), 100)?;
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be positive".into()));
        }
        for alt in &self.alternatives {
            alt.validate()?;
        }
        Ok(())
    }

    pub fn crit_replicates(&self) -> usize {
        self.crit_replicates.unwrap_or(2 * self.replicates)
    }

    /// Copy with every default made explicit.
    pub fn resolved(&self) -> Self {
        Self {
            crit_replicates: Some(self.crit_replicates()),
            ..self.clone()
        }
    }

    pub fn null_seed(&self, family: FamilyId, n: usize) -> u64 {
        null_seed(self.seed, family, n)
    }

    pub fn power_seed(&self, family: FamilyId, alt: &AlternativeSpec, n: usize) -> u64 {
        derive_seed(self.seed, &["power", family.name(), &alt.to_string(), &n.to_string()])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub family: FamilyId,
    pub alternative: Option<AlternativeSpec>,
    pub n: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub results: Vec<PowerResult>,
    pub failures: Vec<CellFailure>,
    /// Critical values keyed by `"family/n/gamma"`.
    pub critical_values: BTreeMap<String, f64>,
}

/// Runs a study. Failing cells are recorded and the rest of the table is
/// still produced.
pub fn run_study(config: &StudyConfig, cache: Option<&NullCache>, opts: &RunOptions) -> Result<StudyReport> {
    config.validate()?;
    let config = config.resolved();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut critical_values = BTreeMap::new();
    for &family in &config.families {
        for &n in &config.sample_sizes {
            let nulls = match build_nulls_cached(
                cache,
                family,
                n,
                &config.gammas,
                config.crit_replicates(),
                config.null_seed(family, n),
                opts,
            ) {
                Ok(v) => v,
                Err(e) => {
                    failures.push(CellFailure {
                        family,
                        alternative: None,
                        n,
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            for d in &nulls {
                critical_values.insert(format!("{family}/{n}/{}", d.gamma), d.critical_value(config.alpha)?);
            }
            for alt in &config.alternatives {
                let seed = config.power_seed(family, alt, n);
                match power(alt, &nulls, config.alpha, config.replicates, seed, opts) {
                    Ok(rows) => results.extend(rows),
                    Err(e) => failures.push(CellFailure {
                        family,
                        alternative: Some(*alt),
                        n,
                        message: e.to_string(),
                    }),
                }
            }
        }
    }
    Ok(StudyReport {
        config,
        results,
        failures,
        critical_values,
    })
}
