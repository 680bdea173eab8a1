//! Monte-Carlo critical values for the Mahalanobis exceedance test.
//!
//! No closed form exists for the null distribution of the running maximum,
//! so the critical value is simulated: each replication draws two
//! independent standard Gaussian random walks (one per detector component),
//! evaluates the second-order walk increment functional over a bandwidth
//! grid and all admissible centers, and records the maximum of the
//! two-component Euclidean norm. The critical value is an upper order
//! statistic of those maxima and is shared by all detector kinds.
//!
//! The simulated quantile lives on the component (unsquared) scale; squared
//! Mahalanobis traces are compared against [`exceedance_threshold`] of it.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seeds;
use crate::{Error, Result};

/// Smallest admissible auto-generated grid bandwidth.
const GRID_MIN: usize = 25;
/// Largest admissible auto-generated grid bandwidth.
const GRID_MAX: usize = 200;

/// A fully specified threshold computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRequest {
    /// Series length the threshold will be applied to.
    pub n: usize,
    /// Significance level.
    pub alpha: f64,
    /// Monte-Carlo replications.
    pub replications: usize,
    /// Master seed; replication b uses a derived child seed.
    pub seed: u64,
    /// Bandwidth grid over which the running maximum is taken.
    pub grid: Vec<usize>,
}

impl ThresholdRequest {
    /// Builds a request with the default grid `25..=min((n-1)/2, 200)`.
    pub fn new(n: usize, alpha: f64, replications: usize, seed: u64) -> Result<Self> {
        let upper = ((n.saturating_sub(1)) / 2).min(GRID_MAX);
        let grid: Vec<usize> = (GRID_MIN..=upper).collect();
        Self::with_grid(n, alpha, replications, seed, grid)
    }

    /// Builds a request with an explicit grid; entries with an empty center
    /// range `[g, n-g]` are clipped out.
    pub fn with_grid(
        n: usize,
        alpha: f64,
        replications: usize,
        seed: u64,
        grid: Vec<usize>,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        if replications < 100 {
            return Err(Error::InvalidConfig(format!(
                "threshold replications must be >= 100, got {replications}"
            )));
        }
        let mut grid: Vec<usize> = grid.into_iter().filter(|&g| g >= 1 && 2 * g <= n).collect();
        grid.sort_unstable();
        grid.dedup();
        if grid.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "bandwidth grid is empty after clipping to n={n}"
            )));
        }
        Ok(Self {
            n,
            alpha,
            replications,
            seed,
            grid,
        })
    }

    /// Cache key: every field that determines the value.
    pub fn fingerprint(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for &g in &self.grid {
            hash ^= g as u64;
            hash = hash.wrapping_mul(0x1000_0000_01b3);
        }
        format!(
            "n={};alpha={};b={};seed={};grid={}-{}#{:016x}",
            self.n,
            self.alpha,
            self.replications,
            self.seed,
            self.grid.first().unwrap(),
            self.grid.last().unwrap(),
            hash
        )
    }
}

/// Maximum of the two-walk functional for one replication.
///
/// The walks extend `max(grid)` steps past `n` so the functional can be
/// evaluated at every center `h in [g, n]`.
fn replication_max(req: &ThresholdRequest, b: usize) -> f64 {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seeds::derive(req.seed, seeds::STREAM_THRESHOLD, b as u64));
    let max_g = *req.grid.last().unwrap();
    let len = req.n + max_g;
    // Walks as running sums with w[0] = 0.
    let mut draw_walk = || {
        let mut walk = Vec::with_capacity(len + 1);
        walk.push(0.0f64);
        let mut acc = 0.0;
        for _ in 0..len {
            acc += rng.sample::<f64, _>(StandardNormal);
            walk.push(acc);
        }
        walk
    };
    let w1 = draw_walk();
    let w2 = draw_walk();

    let mut best = 0.0f64;
    for &g in &req.grid {
        let norm = (2.0 * g as f64).sqrt();
        for h in g..=req.n {
            let t1 = (w1[h + g] - 2.0 * w1[h] + w1[h - g]) / norm;
            let t2 = (w2[h + g] - 2.0 * w2[h] + w2[h - g]) / norm;
            let s = (t1 * t1 + t2 * t2).sqrt();
            if s > best {
                best = s;
            }
        }
    }
    best
}

/// Simulates the critical value: the `ceil((1-alpha)*B)`-th smallest of the
/// replication maxima, on the component scale.
pub fn simulate_threshold(req: &ThresholdRequest) -> Result<f64> {
    if 2 * req.grid.last().unwrap() > req.n {
        return Err(Error::InvalidConfig(
            "bandwidth grid exceeds the series length".into(),
        ));
    }
    let mut maxima: Vec<f64> = (0..req.replications)
        .into_par_iter()
        .map(|b| replication_max(req, b))
        .collect();
    maxima.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((1.0 - req.alpha) * req.replications as f64).ceil() as usize;
    let rank = rank.clamp(1, req.replications);
    Ok(maxima[rank - 1])
}

/// Converts the simulated component-scale quantile to the squared scale on
/// which Mahalanobis traces are compared.
pub fn exceedance_threshold(d_n: f64) -> f64 {
    d_n * d_n
}

/// How a cached value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    /// Returned from the cache without recomputation.
    Hit,
    /// Computed fresh and persisted.
    Computed,
    /// The cache file existed but could not be parsed; the value was
    /// recomputed and the file rewritten.
    RecoveredCorrupt,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CacheEntry {
    value: f64,
    n: usize,
    alpha: f64,
    replications: usize,
    seed: u64,
    grid_lo: usize,
    grid_hi: usize,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CacheFile {
    entries: BTreeMap<String, CacheEntry>,
}

/// A persistent JSON cache of simulated critical values, keyed by the full
/// request fingerprint.
#[derive(Debug)]
pub struct ThresholdCache {
    path: PathBuf,
    file: CacheFile,
    corrupt_on_load: bool,
}

impl ThresholdCache {
    /// Opens (or initializes) a cache at `path`. A corrupt file is noted and
    /// will be overwritten on the next store.
    pub fn open(path: &Path) -> Self {
        let (file, corrupt_on_load) = match std::fs::read_to_string(path) {
            Ok(text) => match serde_json::from_str::<CacheFile>(&text) {
                Ok(file) => (file, false),
                Err(_) => (CacheFile::default(), true),
            },
            Err(_) => (CacheFile::default(), false),
        };
        Self {
            path: path.to_path_buf(),
            file,
            corrupt_on_load,
        }
    }

    /// True when the file on disk existed but failed to parse.
    pub fn was_corrupt(&self) -> bool {
        self.corrupt_on_load
    }

    /// Number of cached values.
    pub fn len(&self) -> usize {
        self.file.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.file.entries.is_empty()
    }

    /// Cached value for `req`, if present.
    pub fn lookup(&self, req: &ThresholdRequest) -> Option<f64> {
        self.file.entries.get(&req.fingerprint()).map(|e| e.value)
    }

    /// Iterates cached entries as `(fingerprint, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.file.entries.iter().map(|(k, e)| (k.as_str(), e.value))
    }

    /// Returns the cached value or simulates, persists, and returns it.
    pub fn get_or_compute(&mut self, req: &ThresholdRequest) -> Result<(f64, CacheOutcome)> {
        let key = req.fingerprint();
        if let Some(entry) = self.file.entries.get(&key) {
            return Ok((entry.value, CacheOutcome::Hit));
        }
        let value = simulate_threshold(req)?;
        self.file.entries.insert(
            key,
            CacheEntry {
                value,
                n: req.n,
                alpha: req.alpha,
                replications: req.replications,
                seed: req.seed,
                grid_lo: *req.grid.first().unwrap(),
                grid_hi: *req.grid.last().unwrap(),
            },
        );
        self.persist()?;
        let outcome = if self.corrupt_on_load {
            self.corrupt_on_load = false;
            CacheOutcome::RecoveredCorrupt
        } else {
            CacheOutcome::Computed
        };
        Ok((value, outcome))
    }

    /// Drops every cached entry and rewrites the file.
    pub fn clear(&mut self) -> Result<()> {
        self.file.entries.clear();
        self.persist()
    }

    fn persist(&self) -> Result<()> {
        if let Some(parent) = self.path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut handle = std::fs::File::create(&self.path)?;
        let text = serde_json::to_string_pretty(&self.file)?;
        handle.write_all(text.as_bytes())?;
        Ok(())
    }
}
