use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use hotspot_core::critical_values::{CacheOutcome, ThresholdCache, ThresholdRequest};

use crate::config::CACHE_DIR_ENV;

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Series length the critical value is for.
    #[arg(long)]
    pub n: Option<usize>,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Monte-Carlo replications.
    #[arg(long, default_value_t = 1000)]
    pub threshold_reps: usize,
    /// Simulation seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cache directory; falls back to HOTSPOT_CACHE_DIR, then `./cache`.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Drop every cached value before doing anything else.
    #[arg(long)]
    pub rebuild: bool,
    /// List the cached entries.
    #[arg(long)]
    pub show: bool,
}

pub fn run(args: CacheArgs) -> Result<()> {
    let dir = args
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cache"));
    let path = dir.join("thresholds.json");
    let mut cache = ThresholdCache::open(&path);
    if cache.was_corrupt() {
        eprintln!("warning: cache file was unreadable and will be rewritten");
    }
    if args.rebuild {
        cache.clear()?;
        println!("cache cleared: {}", path.display());
    }
    if let Some(n) = args.n {
        let request = ThresholdRequest::new(n, args.alpha, args.threshold_reps, args.seed)?;
        let (value, outcome) = cache.get_or_compute(&request)?;
        let label = match outcome {
            CacheOutcome::Hit => "cached",
            CacheOutcome::Computed => "computed",
            CacheOutcome::RecoveredCorrupt => "recomputed after corruption",
        };
        println!(
            "n={n} alpha={} B={} seed={} -> critical value {value:.6} ({label})",
            args.alpha, args.threshold_reps, args.seed
        );
    }
    if args.show {
        if cache.is_empty() {
            println!("cache is empty: {}", path.display());
        } else {
            for (fingerprint, value) in cache.entries() {
                println!("{fingerprint} -> {value:.6}");
            }
        }
    }
    Ok(())
}
