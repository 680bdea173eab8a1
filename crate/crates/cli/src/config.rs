//! Shared run configuration: every output file embeds the resolved values
//! so a run can be reproduced exactly.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use hotspot_core::critical_values::{CacheOutcome, ThresholdCache, ThresholdRequest};
use hotspot_core::detectors::DetectorKind;
use hotspot_core::local_stats::WindowConfig;
use hotspot_core::series::{
    load_csv, to_continuous, ColumnKind, ContinuousSeries, LoadedSeries, TransformRecord,
};
use serde::Serialize;

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "HOTSPOT_CACHE_DIR";

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input CSV file (header row required, rows in time order).
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding the stress series (the anchor series Y).
    #[arg(long)]
    pub stress_col: String,
    /// Column holding the paired sensing series X.
    #[arg(long)]
    pub sensing_col: Option<String>,
    /// Treat the stress column as ordinal codes and map it to a continuous
    /// latent series before analysis.
    #[arg(long)]
    pub discrete: bool,
    /// Seed of the discrete-to-continuous transform (kept separate from the
    /// analysis seed so the transform can be frozen across runs).
    #[arg(long, default_value_t = 1)]
    pub transform_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct AnalysisArgs {
    /// MOSUM bandwidth G.
    #[arg(long, short = 'G')]
    pub bandwidth: usize,
    /// Significance level for the critical value and the intervals.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Screening fraction: change points are local maxima over windows of
    /// half-width ceil(eta * G).
    #[arg(long, default_value_t = 0.2)]
    pub eta: f64,
    /// Monte-Carlo replications of the critical-value simulation.
    #[arg(long, default_value_t = 1000)]
    pub threshold_reps: usize,
    /// Master analysis seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory of the critical-value cache; falls back to the
    /// HOTSPOT_CACHE_DIR environment variable, then to `<out>/cache`.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Recompute the critical value even when cached.
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Resolved configuration embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<String>,
    pub stress_col: Option<String>,
    pub sensing_col: Option<String>,
    pub discrete: bool,
    pub transform_seed: Option<u64>,
    pub n: usize,
    pub bandwidth: usize,
    pub alpha: f64,
    pub eta: f64,
    pub threshold_reps: usize,
    pub bootstrap_reps: Option<usize>,
    pub seed: u64,
    pub kinds: Vec<String>,
    pub mode: Option<String>,
    pub critical_value: f64,
}

/// Loaded and transformed input series.
pub struct LoadedInputs {
    pub y: ContinuousSeries,
    pub x: Option<ContinuousSeries>,
    pub transform: Option<TransformRecord>,
}

pub fn load_inputs(args: &InputArgs) -> Result<LoadedInputs> {
    let kind = if args.discrete {
        ColumnKind::Discrete
    } else {
        ColumnKind::Continuous
    };
    let stress = load_csv(&args.input, &args.stress_col, kind)
        .with_context(|| format!("loading stress column '{}'", args.stress_col))?;
    let (y, transform) = match stress {
        LoadedSeries::Continuous(series) => (series, None),
        LoadedSeries::Discrete(series) => {
            let (latent, record) = to_continuous(&series, args.transform_seed);
            (latent, Some(record))
        }
    };
    let x = match &args.sensing_col {
        None => None,
        Some(col) => {
            let loaded = load_csv(&args.input, col, ColumnKind::Continuous)
                .with_context(|| format!("loading sensing column '{col}'"))?;
            match loaded {
                LoadedSeries::Continuous(series) => Some(series),
                LoadedSeries::Discrete(_) => unreachable!("continuous kind requested"),
            }
        }
    };
    if let Some(x) = &x {
        if x.len() != y.len() {
            bail!(
                "stress and sensing columns have different lengths: {} vs {}",
                y.len(),
                x.len()
            );
        }
    }
    Ok(LoadedInputs { y, x, transform })
}

pub fn window_config(n: usize, analysis: &AnalysisArgs) -> Result<WindowConfig> {
    Ok(WindowConfig::new(
        n,
        analysis.bandwidth,
        analysis.eta,
        analysis.alpha,
    )?)
}

/// Resolves the cache location and returns the critical value, reporting
/// cache activity on stderr.
pub fn critical_value(n: usize, analysis: &AnalysisArgs, out_dir: &Path) -> Result<f64> {
    let request = ThresholdRequest::new(n, analysis.alpha, analysis.threshold_reps, analysis.seed)?;
    if analysis.no_cache {
        return Ok(hotspot_core::critical_values::simulate_threshold(&request)?);
    }
    let dir = analysis
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| out_dir.join("cache"));
    let mut cache = ThresholdCache::open(&dir.join("thresholds.json"));
    if cache.was_corrupt() {
        eprintln!("warning: threshold cache was unreadable; recomputing and rewriting it");
    }
    let (value, outcome) = cache.get_or_compute(&request)?;
    if outcome == CacheOutcome::Hit {
        eprintln!("critical value {value:.6} (cached)");
    } else {
        eprintln!(
            "critical value {value:.6} (computed, {} replications)",
            request.replications
        );
    }
    Ok(value)
}

/// Parses `--kinds` tokens; defaults to every kind computable from the
/// available inputs.
pub fn resolve_kinds(tokens: &Option<String>, has_sensing: bool) -> Result<Vec<DetectorKind>> {
    match tokens {
        None => Ok(if has_sensing {
            DetectorKind::all().to_vec()
        } else {
            vec![DetectorKind::UniY]
        }),
        Some(raw) => {
            let mut kinds = Vec::new();
            for token in raw.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let kind = DetectorKind::parse_token(token)
                    .with_context(|| format!("unknown detector kind '{token}' (expected one of: y, x, yx, yx2, y2x, y2x2)"))?;
                if kinds.contains(&kind) {
                    bail!("duplicate detector kind '{token}'");
                }
                if kind != DetectorKind::UniY && !has_sensing {
                    bail!("detector kind '{token}' needs --sensing-col");
                }
                kinds.push(kind);
            }
            if kinds.is_empty() {
                bail!("--kinds is empty");
            }
            Ok(kinds)
        }
    }
}
