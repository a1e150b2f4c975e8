//! Command-line front end.

mod data;

pub use data::{parse_values, DataFile};

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{fit_and_standardize, Estimate};
use crate::families::FamilyId;
use crate::simulation::{
    build_nulls_cached, null_seed, run_study, test_sample, NullCache, RunOptions, StudyConfig, StudyReport,
    STATISTIC_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::Io(_) => EXIT_INPUT,
        Error::Range(_)
        | Error::Quadrature { .. }
        | Error::DegenerateSample(_)
        | Error::Convergence { .. }
        | Error::Simulation(_) => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "mincf", version, about = "Min-characteristic-function goodness-of-fit tests for Weibull, Pareto and Fréchet data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a dataset against a family, with Monte Carlo p-values.
    Test(TestArgs),
    /// Tabulate Monte Carlo critical values.
    Critvals(CritvalsArgs),
    /// Run a power study described by a JSON config.
    PowerStudy(PowerStudyArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Directory for cached null distributions; no caching when absent.
    #[arg(long, env = "MINCF_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Write a JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> RunOptions {
        self.workers.map(RunOptions::with_workers).unwrap_or_default()
    }

    fn cache(&self) -> Option<NullCache> {
        self.cache_dir.as_ref().map(NullCache::new)
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub family: FamilyId,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 5.0])]
    pub gamma: Vec<f64>,
    /// Null replicates.
    #[arg(long, default_value_t = 10_000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CritvalsArgs {
    #[arg(long)]
    pub family: FamilyId,
    /// Sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 5.0])]
    pub gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.10])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 20_000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PowerStudyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Rejection-rate table; defaults to the config path with a `.csv` extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Serialize)]
pub struct DataSummary {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

impl DataSummary {
    fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let m = v.len();
        let median = if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) };
        Self {
            min: v[0],
            median,
            mean: v.iter().sum::<f64>() / m as f64,
            max: v[m - 1],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TestRow {
    pub gamma: f64,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub command: &'static str,
    pub version: &'static str,
    pub family: FamilyId,
    pub data: PathBuf,
    pub n: usize,
    pub gammas: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub null_seed: u64,
    pub estimate: Estimate,
    pub standardized: DataSummary,
    pub results: Vec<TestRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CritvalRow {
    pub n: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub critical_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CritvalsReport {
    pub command: &'static str,
    pub version: &'static str,
    pub family: FamilyId,
    pub sample_sizes: Vec<usize>,
    pub gammas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub table: Vec<CritvalRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyManifest<'a> {
    pub command: &'static str,
    pub version: &'static str,
    pub config_file: &'a Path,
    pub csv: &'a Path,
    #[serde(flatten)]
    pub report: &'a StudyReport,
}

/// Output of a command: text for the terminal and the JSON report.
pub struct Outcome {
    pub text: String,
    pub json: String,
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(format!("cannot serialize report: {e}")))
}

fn write_out(path: Option<&Path>, json: &str) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, json).map_err(|e| Error::Io(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

pub fn cmd_test(args: &TestArgs) -> Result<Outcome> {
    let data = DataFile::read(&args.data)?;
    let sample = data.sample()?;
    let n = sample.len();
    if n < 3 {
        return Err(Error::Config(format!("at least 3 observations are required, found {n}")));
    }
    // Fit before the (expensive) null so a degenerate sample fails fast.
    let y = fit_and_standardize(args.family, &sample)?;
    let seed = null_seed(args.seed, args.family, n);
    let cache = args.common.cache();
    let nulls = build_nulls_cached(
        cache.as_ref(),
        args.family,
        n,
        &args.gamma,
        args.replicates,
        seed,
        &args.common.options(),
    )?;
    let results = test_sample(args.family, &sample, &nulls)?;
    let report = TestReport {
        command: "test",
        version: STATISTIC_VERSION,
        family: args.family,
        data: args.data.clone(),
        n,
        gammas: args.gamma.clone(),
        replicates: args.replicates,
        seed: args.seed,
        null_seed: seed,
        estimate: *y.source_estimate(),
        standardized: DataSummary::of(y.values()),
        results: results
            .iter()
            .map(|r| TestRow {
                gamma: r.gamma,
                statistic: r.statistic,
                p_value: r.p_value,
            })
            .collect(),
    };

    let mut text = String::new();
    let e = &report.estimate;
    let _ = writeln!(text, "{} test for {} (n = {n})", args.family, args.data.display());
    let _ = writeln!(
        text,
        "MLE: c = {:.6}, phi = {:.6} ({} iterations, log-likelihood {:.4})",
        e.params.c, e.params.phi, e.iterations, e.log_likelihood
    );
    let s = &report.standardized;
    let _ = writeln!(
        text,
        "standardized data: min {:.4}, median {:.4}, mean {:.4}, max {:.4}",
        s.min, s.median, s.mean, s.max
    );
    let _ = writeln!(text, "null: {} replicates, seed {}", args.replicates, args.seed);
    let _ = writeln!(text, "{:>8}  {:>14}  {:>8}", "gamma", "statistic", "p-value");
    for r in &report.results {
        let _ = writeln!(text, "{:>8}  {:>14.6e}  {:>8.4}", r.gamma, r.statistic, r.p_value);
    }
    let json = to_json(&report)?;
    write_out(args.common.out.as_deref(), &json)?;
    Ok(Outcome { text, json })
}

pub fn cmd_critical_values(args: &CritvalsArgs) -> Result<Outcome> {
    for &a in &args.alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {a}")));
        }
    }
    let cache = args.common.cache();
    let opts = args.common.options();
    let mut table = Vec::new();
    for &n in &args.n {
        let nulls = build_nulls_cached(
            cache.as_ref(),
            args.family,
            n,
            &args.gamma,
            args.replicates,
            null_seed(args.seed, args.family, n),
            &opts,
        )?;
        for null in &nulls {
            for &alpha in &args.alpha {
                table.push(CritvalRow {
                    n,
                    gamma: null.gamma,
                    alpha,
                    critical_value: null.critical_value(alpha)?,
                });
            }
        }
    }
    let report = CritvalsReport {
        command: "critvals",
        version: STATISTIC_VERSION,
        family: args.family,
        sample_sizes: args.n.clone(),
        gammas: args.gamma.clone(),
        alphas: args.alpha.clone(),
        replicates: args.replicates,
        seed: args.seed,
        table,
    };
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} critical values ({} replicates, seed {})",
        args.family, args.replicates, args.seed
    );
    let _ = writeln!(text, "{:>6}  {:>6}  {:>6}  {:>14}", "n", "gamma", "alpha", "critical");
    for r in &report.table {
        let _ = writeln!(text, "{:>6}  {:>6}  {:>6}  {:>14.6e}", r.n, r.gamma, r.alpha, r.critical_value);
    }
    let json = to_json(&report)?;
    write_out(args.common.out.as_deref(), &json)?;
    Ok(Outcome { text, json })
}

pub fn read_study_config(path: &Path) -> Result<StudyConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let config: StudyConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

pub fn study_csv(report: &StudyReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(format!("cannot write table: {e}"));
    w.write_record(["family", "alternative", "n", "gamma", "rate_percent"]).map_err(io)?;
    for r in &report.results {
        w.write_record([
            r.family.to_string(),
            r.alternative.to_string(),
            r.n.to_string(),
            r.gamma.to_string(),
            (100.0 * r.rate).to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(format!("cannot write table: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn cmd_power_study(args: &PowerStudyArgs) -> Result<Outcome> {
    let mut config = read_study_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let cache = args.common.cache();
    let report = run_study(&config, cache.as_ref(), &args.common.options())?;
    let csv_path = args.csv.clone().unwrap_or_else(|| args.config.with_extension("csv"));
    fs::write(&csv_path, study_csv(&report)?).map_err(|e| Error::Io(format!("cannot write {}: {e}", csv_path.display())))?;
    let manifest = StudyManifest {
        command: "power-study",
        version: STATISTIC_VERSION,
        config_file: &args.config,
        csv: &csv_path,
        report: &report,
    };
    let json = to_json(&manifest)?;
    let manifest_path = args.common.out.clone().unwrap_or_else(|| args.config.with_extension("manifest.json"));
    write_out(Some(&manifest_path), &json)?;

    let mut text = String::new();
    let c = &report.config;
    let _ = writeln!(
        text,
        "power study: {} replicates ({} for nulls), alpha {}, seed {}",
        c.replicates,
        c.crit_replicates(),
        c.alpha,
        c.seed
    );
    let _ = writeln!(text, "{:>8}  {:>14}  {:>4}  {:>5}  {:>6}", "family", "alternative", "n", "gamma", "rate%");
    for r in &report.results {
        let _ = writeln!(
            text,
            "{:>8}  {:>14}  {:>4}  {:>5}  {:>6.1}",
            r.family.name(),
            r.alternative.to_string(),
            r.n,
            r.gamma,
            100.0 * r.rate
        );
    }
    for f in &report.failures {
        let alt = f.alternative.map(|a| a.to_string()).unwrap_or_else(|| "(null)".into());
        let _ = writeln!(text, "FAILED {} {} n={}: {}", f.family, alt, f.n, f.message);
    }
    let _ = writeln!(text, "table: {}\nmanifest: {}", csv_path.display(), manifest_path.display());
    Ok(Outcome { text, json })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Critvals(a) => cmd_critical_values(a),
        Command::PowerStudy(a) => cmd_power_study(a),
    }
}
