//! On-disk null distributions.
//!
//! One text file per `(family, n, γ, N, seed)`:
//!
//! ```text
//! mincf-null <version>
//! family weibull
//! n 20
//! gamma 0.5
//! replicates 20000
//! seed 42
//! redraws 0
//! <N lines, ascending statistics>
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so a load returns
//! exactly what was stored. Files with another version tag are ignored.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::NullDistribution;
use crate::error::{Error, Result};
use crate::families::FamilyId;

/// Bumped whenever a change could alter any simulated statistic.
pub const STATISTIC_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "-t1");

const MAGIC: &str = "mincf-null";

#[derive(Debug, Clone)]
pub struct NullCache {
    dir: PathBuf,
}

impl NullCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, family: FamilyId, n: usize, gamma: f64, replicates: usize, seed: u64) -> PathBuf {
        self.dir.join(format!(
            "{family}_n{n}_g{gamma}_N{replicates}_s{seed}_v{STATISTIC_VERSION}.null"
        ))
    }

    /// `Ok(None)` when there is no usable entry.
    pub fn load(
        &self,
        family: FamilyId,
        n: usize,
        gamma: f64,
        replicates: usize,
        seed: u64,
    ) -> Result<Option<NullDistribution>> {
        let path = self.path(family, n, gamma, replicates, seed);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let null = match parse(&text) {
            Ok(Some(d)) => d,
            Ok(None) => return Ok(None),
            Err(e) => {
                log::warn!("ignoring unreadable cache file {}: {e}", path.display());
                return Ok(None);
            }
        };
        let matches = null.family == family
            && null.n == n
            && null.gamma.to_bits() == gamma.to_bits()
            && null.replicates == replicates
            && null.seed == seed;
        Ok(matches.then_some(null))
    }

    pub fn store(&self, null: &NullDistribution) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(null.family, null.n, null.gamma, null.replicates, null.seed);
        // Write-then-rename so concurrent readers never see a partial file.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            write(&mut w, null)?;
            w.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}

fn write<W: Write>(w: &mut W, d: &NullDistribution) -> std::io::Result<()> {
    writeln!(w, "{MAGIC} {STATISTIC_VERSION}")?;
    writeln!(w, "family {}", d.family)?;
    writeln!(w, "n {}", d.n)?;
    writeln!(w, "gamma {}", d.gamma)?;
    writeln!(w, "replicates {}", d.replicates)?;
    writeln!(w, "seed {}", d.seed)?;
    writeln!(w, "redraws {}", d.redraws)?;
    for s in &d.sorted_stats {
        writeln!(w, "{s}")?;
    }
    Ok(())
}

fn field<'a>(lines: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<&'a str> {
    let line = lines.next().ok_or_else(|| Error::Io(format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::Io(format!("expected `{key}`, found `{line}`")))
}

fn num<T: std::str::FromStr>(s: &str, key: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Io(format!("bad {key} `{s}`")))
}

fn parse(text: &str) -> Result<Option<NullDistribution>> {
    let mut lines = text.lines();
    let version = field(&mut lines, MAGIC)?;
    if version != STATISTIC_VERSION {
        return Ok(None);
    }
    let family: FamilyId = num(field(&mut lines, "family")?, "family")?;
    let n = num(field(&mut lines, "n")?, "n")?;
    let gamma = num(field(&mut lines, "gamma")?, "gamma")?;
    let replicates = num(field(&mut lines, "replicates")?, "replicates")?;
    let seed = num(field(&mut lines, "seed")?, "seed")?;
    let redraws = num(field(&mut lines, "redraws")?, "redraws")?;
    let sorted_stats = lines.map(|l| num::<f64>(l, "statistic")).collect::<Result<Vec<_>>>()?;
    if sorted_stats.len() != replicates {
        return Err(Error::Io(format!("expected {replicates} statistics, found {}", sorted_stats.len())));
    }
    if !sorted_stats.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::Io("statistics are not sorted".into()));
    }
    Ok(Some(NullDistribution {
        family,
        n,
        gamma,
        replicates,
        sorted_stats,
        seed,
        redraws,
    }))
}
