//! Synthetic benchmark harness: scenario generation, detection metrics, and
//! the table runners.
//!
//! Scenarios are piecewise-stationary Gaussian series on `n = 100` points by
//! default. Each segment draws its mean level uniformly from `(-mu, mu)`
//! (so jump sizes vary between replications, down to invisibly small), and
//! segment standard deviations alternate `sigma_min, sigma_max, ...`, so
//! every change point carries a variance shift alongside its random mean
//! shift. Six signal-strength cases fix `(mu, sigma_min, sigma_max)`;
//! case 1 is the strongest signal and case 6 the weakest.
//!
//! Metrics: `Power(eta)` is the fraction of replications in which every true
//! point has an estimate within `eta`; `FDR(eta)` is, among replications
//! with at least one estimate, the fraction in which every estimate is
//! farther than `eta` from every true point. Hotspot quality is scored by
//! hit rate and by the length of the intervals covering the true points
//! (`n` charged on a miss, empty-hotspot replications excluded from the
//! length average only).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical_values::{exceedance_threshold, simulate_threshold, ThresholdRequest};
use crate::detectors::{joint_bivariate, joint_univariate, DetectorKind, DetectorTrace};
use crate::dist::{ks_critical_value, ks_statistic_standard_normal};
use crate::hotspots::{hotspots_ci, hotspots_threshold, CombinationSpec, HotspotMode, Interval};
use crate::local_stats::WindowConfig;
use crate::seeds;
use crate::segmentation::{bootstrap_cis, extract_changepoints, ChangePointSet};
use crate::series::{to_continuous, ContinuousSeries, DiscreteSeries};
use crate::{Error, Result};

/// Signal-strength parameters of one simulation case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub mu: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl CaseParams {
    /// Case 1 is the strongest signal, case 6 the weakest.
    pub fn from_case(case_id: u8) -> Result<Self> {
        let (mu, sigma_min, sigma_max) = match case_id {
            1 => (2.0, 0.1, 0.4),
            2 => (2.0, 0.1, 0.8),
            3 => (2.0, 0.4, 0.8),
            4 => (1.0, 0.1, 0.4),
            5 => (1.0, 0.1, 0.8),
            6 => (1.0, 0.4, 0.8),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "case id must be 1..=6, got {other}"
                )))
            }
        };
        Ok(Self {
            mu,
            sigma_min,
            sigma_max,
        })
    }
}

/// One synthetic scenario: series layouts, signal case, and replication plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// Length of every generated series.
    pub n: usize,
    /// Signal case, 1..=6.
    pub case_id: u8,
    /// Signal parameters, defaulting to the case values.
    pub params: CaseParams,
    /// True change points per series (one or two series). A change at `k`
    /// separates segments `..=k` and `k+1..`.
    pub true_points: Vec<Vec<usize>>,
    /// Offset added to the second series' change points.
    pub delta: usize,
    /// Replications to run.
    pub replications: usize,
    /// Master seed; every (series, replication) pair derives its own.
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(
        n: usize,
        case_id: u8,
        true_points: Vec<Vec<usize>>,
        delta: usize,
        replications: usize,
        seed: u64,
    ) -> Result<Self> {
        let params = CaseParams::from_case(case_id)?;
        Self::with_params(n, case_id, params, true_points, delta, replications, seed)
    }

    /// Builds a scenario with explicit signal parameters (the hotspot
    /// experiments double the mean-shift range of each case).
    #[allow(clippy::too_many_arguments)]
    pub fn with_params(
        n: usize,
        case_id: u8,
        params: CaseParams,
        true_points: Vec<Vec<usize>>,
        delta: usize,
        replications: usize,
        seed: u64,
    ) -> Result<Self> {
        CaseParams::from_case(case_id)?;
        if true_points.is_empty() || true_points.len() > 2 {
            return Err(Error::InvalidConfig(
                "a scenario holds one or two series".into(),
            ));
        }
        if replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if !(params.mu > 0.0 && params.sigma_min > 0.0 && params.sigma_max > params.sigma_min) {
            return Err(Error::InvalidConfig(format!(
                "invalid signal parameters: mu={}, sigma=[{}, {}]",
                params.mu, params.sigma_min, params.sigma_max
            )));
        }
        let spec = Self {
            n,
            case_id,
            params,
            true_points,
            delta,
            replications,
            seed,
        };
        for s in 0..spec.true_points.len() {
            let points = spec.shifted_points(s);
            for (i, &p) in points.iter().enumerate() {
                if p == 0 || p >= n {
                    return Err(Error::InvalidConfig(format!(
                        "true point {p} out of range 1..{n}"
                    )));
                }
                if i > 0 && points[i - 1] >= p {
                    return Err(Error::InvalidConfig(
                        "true points must be strictly increasing".into(),
                    ));
                }
            }
        }
        Ok(spec)
    }

    /// True points of series `s` with the asynchrony offset applied.
    pub fn shifted_points(&self, s: usize) -> Vec<usize> {
        let shift = if s == 1 { self.delta } else { 0 };
        self.true_points[s].iter().map(|&p| p + shift).collect()
    }
}

/// Mean and standard deviation of one generated segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentParams {
    pub mean: f64,
    pub sd: f64,
}

/// Generates the series of one replication along with the segment
/// parameters actually drawn (one list per series).
pub fn generate_with_params(
    spec: &ScenarioSpec,
    replication: usize,
) -> Result<(Vec<ContinuousSeries>, Vec<Vec<SegmentParams>>)> {
    let case = spec.params;
    let mut out = Vec::with_capacity(spec.true_points.len());
    let mut drawn = Vec::with_capacity(spec.true_points.len());
    for s in 0..spec.true_points.len() {
        let points = spec.shifted_points(s);
        let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(
            spec.seed,
            seeds::STREAM_SCENARIO + s as u64,
            replication as u64,
        ));
        // Mean levels are uniform on (-mu, mu); standard deviations take
        // one of the two case levels, each segment independently. Change
        // points therefore carry mean and variance shifts of varying and
        // possibly vanishing size.
        let params: Vec<SegmentParams> = (0..=points.len())
            .map(|_| SegmentParams {
                mean: rng.gen_range(-case.mu..case.mu),
                sd: if rng.gen::<bool>() {
                    case.sigma_max
                } else {
                    case.sigma_min
                },
            })
            .collect();
        let mut values = Vec::with_capacity(spec.n);
        let mut start = 1usize;
        for (segment, end) in points
            .iter()
            .copied()
            .chain(std::iter::once(spec.n))
            .enumerate()
        {
            let dist =
                Normal::new(params[segment].mean, params[segment].sd).expect("valid parameters");
            for _ in start..=end {
                values.push(rng.sample(dist));
            }
            start = end + 1;
        }
        out.push(ContinuousSeries::new(values)?);
        drawn.push(params);
    }
    Ok((out, drawn))
}

/// Generates the series of one replication.
pub fn generate(spec: &ScenarioSpec, replication: usize) -> Result<Vec<ContinuousSeries>> {
    generate_with_params(spec, replication).map(|(series, _)| series)
}

/// Power and FDR of per-replication estimates against the true points.
pub fn power_fdr(
    estimates: &[Vec<usize>],
    true_points: &[usize],
    eta_power: usize,
    eta_fdr: usize,
) -> (f64, f64) {
    assert!(!estimates.is_empty(), "need at least one replication");
    let mut power_hits = 0usize;
    let mut with_estimates = 0usize;
    let mut all_far = 0usize;
    for est in estimates {
        let covered = true_points
            .iter()
            .all(|t| est.iter().any(|e| e.abs_diff(*t) <= eta_power));
        if covered {
            power_hits += 1;
        }
        if !est.is_empty() {
            with_estimates += 1;
            let far = est
                .iter()
                .all(|e| true_points.iter().all(|t| e.abs_diff(*t) > eta_fdr));
            if far {
                all_far += 1;
            }
        }
    }
    let power = power_hits as f64 / estimates.len() as f64;
    let fdr = if with_estimates == 0 {
        0.0
    } else {
        all_far as f64 / with_estimates as f64
    };
    (power, fdr)
}

/// Hit rate and mean covering-interval length of per-replication hotspots.
///
/// Returns `(hit_rate, mean_length)`; the length is `None` when every
/// replication produced an empty hotspot set.
pub fn hit_rate_and_length(
    hotspots: &[Vec<Interval>],
    true_points: &[usize],
    n: usize,
) -> (f64, Option<f64>) {
    assert!(!hotspots.is_empty(), "need at least one replication");
    assert!(!true_points.is_empty(), "need at least one true point");
    let mut score_sum = 0.0;
    let mut length_sum = 0.0;
    let mut length_count = 0usize;
    for hs in hotspots {
        let covering: Vec<&Interval> = true_points
            .iter()
            .filter_map(|&t| hs.iter().find(|iv| iv.contains(t)))
            .collect();
        score_sum += covering.len() as f64 / true_points.len() as f64;
        if hs.is_empty() {
            continue;
        }
        length_count += 1;
        if covering.len() < true_points.len() {
            length_sum += n as f64;
        } else {
            let mut seen: Vec<(usize, usize)> = Vec::new();
            for iv in covering {
                if !seen.contains(&(iv.lo, iv.hi)) {
                    seen.push((iv.lo, iv.hi));
                    length_sum += iv.len() as f64;
                }
            }
        }
    }
    let hit_rate = score_sum / hotspots.len() as f64;
    let mean_length = (length_count > 0).then(|| length_sum / length_count as f64);
    (hit_rate, mean_length)
}

/// Pools screened points from several detectors, keeping the larger distance
/// when two points fall within `radius` of each other.
pub fn pool_estimates(candidates: &[(usize, f64)], radius: usize) -> Vec<usize> {
    let mut sorted = candidates.to_vec();
    sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut kept: Vec<usize> = Vec::new();
    for (k, _) in sorted {
        if kept.iter().all(|&p| p.abs_diff(k) > radius) {
            kept.push(k);
        }
    }
    kept.sort_unstable();
    kept
}

/// Per-replication audit record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: usize,
    /// Screened (pooled, for ensembles) change-point estimates.
    pub estimates: Vec<usize>,
    /// Hotspot intervals, empty for change-point-only runs.
    pub intervals: Vec<Interval>,
}

/// Metrics of one scenario cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fdr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_interval_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_power: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_fdr: Option<usize>,
    pub replications: usize,
    pub records: Vec<RepRecord>,
}

/// Shared knobs of every benchmark cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n: usize,
    pub eta: f64,
    pub alpha: f64,
    pub replications: usize,
    pub threshold_replications: usize,
    pub bootstrap_replications: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n: 100,
            eta: 0.2,
            alpha: 0.05,
            replications: 500,
            threshold_replications: 1000,
            bootstrap_replications: 1000,
            seed: 0,
        }
    }
}

/// Deterministic per-cell seed from the cell's identity.
fn cell_seed(master: u64, g: usize, case_id: u8, delta: usize, points: &[Vec<usize>]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut mix = |v: u64| {
        hash ^= v;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    };
    mix(g as u64);
    mix(case_id as u64);
    mix(delta as u64);
    for series in points {
        mix(0xffff);
        for &p in series {
            mix(p as u64);
        }
    }
    seeds::derive(master, seeds::STREAM_SCENARIO, hash)
}

fn eta_power_default() -> usize {
    5
}

/// Joint detection of a single series: Power(5) and FDR(5).
pub fn joint_power_fdr(
    cfg: &BenchConfig,
    g: usize,
    true_points: &[usize],
    case_id: u8,
    d_n: f64,
) -> Result<MetricReport> {
    let wcfg = WindowConfig::new(cfg.n, g, cfg.eta, cfg.alpha)?;
    let threshold = exceedance_threshold(d_n);
    let spec = ScenarioSpec::new(
        cfg.n,
        case_id,
        vec![true_points.to_vec()],
        0,
        cfg.replications,
        cell_seed(cfg.seed, g, case_id, 0, &[true_points.to_vec()]),
    )?;
    let records: Vec<RepRecord> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let series = generate(&spec, rep).expect("validated spec");
            let trace =
                joint_univariate(&series[0], &wcfg, DetectorKind::UniY).expect("validated config");
            let cps = extract_changepoints(&trace, threshold);
            RepRecord {
                rep,
                estimates: cps.points,
                intervals: Vec::new(),
            }
        })
        .collect();
    let estimates: Vec<Vec<usize>> = records.iter().map(|r| r.estimates.clone()).collect();
    let (power, fdr) = power_fdr(&estimates, true_points, eta_power_default(), 5);
    Ok(MetricReport {
        power: Some(power),
        fdr: Some(fdr),
        hit_rate: None,
        mean_interval_length: None,
        eta_power: Some(5),
        eta_fdr: Some(5),
        replications: cfg.replications,
        records,
    })
}

fn cross_traces(
    y: &ContinuousSeries,
    x: &ContinuousSeries,
    wcfg: &WindowConfig,
) -> Vec<DetectorTrace> {
    DetectorKind::cross_kinds()
        .into_iter()
        .map(|kind| joint_bivariate(y, x, kind, wcfg).expect("validated config"))
        .collect()
}

/// Cross-series ensemble of all four combinations: Power(5) and FDR(0) on
/// the pooled true and estimated points of both series.
pub fn cross_power_fdr(
    cfg: &BenchConfig,
    g: usize,
    first_points: &[usize],
    second_points: &[usize],
    case_id: u8,
    d_n: f64,
) -> Result<MetricReport> {
    let wcfg = WindowConfig::new(cfg.n, g, cfg.eta, cfg.alpha)?;
    let threshold = exceedance_threshold(d_n);
    let layout = vec![first_points.to_vec(), second_points.to_vec()];
    let spec = ScenarioSpec::new(
        cfg.n,
        case_id,
        layout.clone(),
        0,
        cfg.replications,
        cell_seed(cfg.seed, g, case_id, 0, &layout),
    )?;
    let mut merged_true: Vec<usize> = first_points
        .iter()
        .chain(second_points.iter())
        .copied()
        .collect();
    merged_true.sort_unstable();
    merged_true.dedup();

    let radius = wcfg.screening_radius();
    let records: Vec<RepRecord> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let series = generate(&spec, rep).expect("validated spec");
            let mut candidates: Vec<(usize, f64)> = Vec::new();
            for trace in cross_traces(&series[0], &series[1], &wcfg) {
                let cps = extract_changepoints(&trace, threshold);
                for p in cps.points {
                    candidates.push((p, trace.d2[p - 1]));
                }
            }
            RepRecord {
                rep,
                estimates: pool_estimates(&candidates, radius),
                intervals: Vec::new(),
            }
        })
        .collect();
    let estimates: Vec<Vec<usize>> = records.iter().map(|r| r.estimates.clone()).collect();
    let (power, fdr) = power_fdr(&estimates, &merged_true, eta_power_default(), 0);
    Ok(MetricReport {
        power: Some(power),
        fdr: Some(fdr),
        hit_rate: None,
        mean_interval_length: None,
        eta_power: Some(5),
        eta_fdr: Some(0),
        replications: cfg.replications,
        records,
    })
}

/// Hotspot metrics of the full four-kind combination under both rules:
/// `(thresholding, confidence-interval)`.
///
/// The first series plays X, the second plays the anchor Y; Y's change
/// points sit `delta` after X's, and hit rate / interval length are scored
/// against Y's true points.
pub fn hotspot_metrics(
    cfg: &BenchConfig,
    g: usize,
    base_points: &[usize],
    delta: usize,
    case_id: u8,
    d_n: f64,
) -> Result<(MetricReport, MetricReport)> {
    let wcfg = WindowConfig::new(cfg.n, g, cfg.eta, cfg.alpha)?;
    let threshold = exceedance_threshold(d_n);
    let layout = vec![base_points.to_vec(), base_points.to_vec()];
    // The hotspot experiments double the mean-shift range of each case.
    let mut params = CaseParams::from_case(case_id)?;
    params.mu *= 2.0;
    let spec = ScenarioSpec::with_params(
        cfg.n,
        case_id,
        params,
        layout.clone(),
        delta,
        cfg.replications,
        cell_seed(cfg.seed, g, case_id, delta, &layout),
    )?;
    let y_true = spec.shifted_points(1);
    let thrs_spec = CombinationSpec::full(HotspotMode::Threshold);
    let ci_spec = CombinationSpec::full(HotspotMode::Ci);

    let per_rep: Vec<(RepRecord, RepRecord)> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let series = generate(&spec, rep).expect("validated spec");
            let (x, y) = (&series[0], &series[1]);

            let anchor_trace =
                joint_univariate(y, &wcfg, DetectorKind::UniY).expect("validated config");
            let mut traces = cross_traces(y, x, &wcfg);
            traces.push(anchor_trace);
            let refs: Vec<&DetectorTrace> = traces.iter().collect();

            let thrs =
                hotspots_threshold(&refs, threshold, &thrs_spec).expect("all traces supplied");

            let mut sets: Vec<ChangePointSet> = Vec::with_capacity(traces.len());
            for (i, trace) in traces.iter().enumerate() {
                let mut cps = extract_changepoints(trace, threshold);
                let paired = trace.kind.is_cross().then_some(x);
                let cis = bootstrap_cis(
                    y,
                    paired,
                    trace.kind,
                    &cps.points,
                    &wcfg,
                    cfg.bootstrap_replications,
                    seeds::derive(spec.seed, seeds::STREAM_BOOTSTRAP + i as u64, rep as u64),
                )
                .expect("validated inputs");
                cps.cis = Some(cis);
                cps.ci_alpha = Some(cfg.alpha);
                sets.push(cps);
            }
            let set_refs: Vec<&ChangePointSet> = sets.iter().collect();
            let ci = hotspots_ci(&set_refs, &ci_spec, cfg.alpha, cfg.n)
                .expect("all sets carry intervals");

            let pooled: Vec<usize> = sets.iter().flat_map(|s| s.points.iter().copied()).collect();
            (
                RepRecord {
                    rep,
                    estimates: pooled.clone(),
                    intervals: thrs.intervals,
                },
                RepRecord {
                    rep,
                    estimates: pooled,
                    intervals: ci.intervals,
                },
            )
        })
        .collect();

    let build = |records: Vec<RepRecord>| -> MetricReport {
        let hs: Vec<Vec<Interval>> = records.iter().map(|r| r.intervals.clone()).collect();
        let (hit, len) = hit_rate_and_length(&hs, &y_true, cfg.n);
        MetricReport {
            power: None,
            fdr: None,
            hit_rate: Some(hit),
            mean_interval_length: len,
            eta_power: None,
            eta_fdr: None,
            replications: cfg.replications,
            records,
        }
    };
    let (thrs_records, ci_records): (Vec<_>, Vec<_>) = per_rep.into_iter().unzip();
    Ok((build(thrs_records), build(ci_records)))
}

/// Fraction of pure-noise replications with at least one detection.
pub fn null_detection_rate(cfg: &BenchConfig, g: usize, case_id: u8, d_n: f64) -> Result<f64> {
    let wcfg = WindowConfig::new(cfg.n, g, cfg.eta, cfg.alpha)?;
    let threshold = exceedance_threshold(d_n);
    let spec = ScenarioSpec::new(
        cfg.n,
        case_id,
        vec![Vec::new()],
        0,
        cfg.replications,
        cell_seed(cfg.seed, g, case_id, 0, &[Vec::new()]),
    )?;
    let detections: usize = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let series = generate(&spec, rep).expect("validated spec");
            let trace =
                joint_univariate(&series[0], &wcfg, DetectorKind::UniY).expect("validated config");
            usize::from(!extract_changepoints(&trace, threshold).points.is_empty())
        })
        .sum();
    Ok(detections as f64 / cfg.replications as f64)
}

/// Fraction of seeded trials in which the transformed i.i.d. categorical
/// series passes a KS test against the standard normal at `level`.
pub fn transform_ks_pass_rate(pmf: &[f64], n: usize, trials: usize, level: f64, seed: u64) -> f64 {
    assert!(!pmf.is_empty() && n > 0 && trials > 0);
    let critical = ks_critical_value(level, n);
    let passes: usize = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(
                seed,
                seeds::STREAM_TRANSFORM,
                trial as u64,
            ));
            let values: Vec<u32> = (0..n)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    for (idx, &p) in pmf.iter().enumerate() {
                        acc += p;
                        if u < acc {
                            return idx as u32 + 1;
                        }
                    }
                    pmf.len() as u32
                })
                .collect();
            let series =
                DiscreteSeries::with_levels(values, pmf.len() as u32).expect("valid draws");
            let (z, _) = to_continuous(&series, rng.gen());
            usize::from(ks_statistic_standard_normal(z.values()) <= critical)
        })
        .sum();
    passes as f64 / trials as f64
}

/// Configuration of a full table run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    /// Which benchmark table layout to run (1, 2, or 3).
    pub table: u8,
    pub bench: BenchConfig,
    /// Bandwidths, one row group per value.
    pub bandwidths: Vec<usize>,
    /// Signal cases to evaluate (columns).
    pub cases: Vec<u8>,
}

impl TableConfig {
    pub fn new(table: u8, bench: BenchConfig) -> Result<Self> {
        if !(1..=3).contains(&table) {
            return Err(Error::InvalidConfig(format!(
                "table must be 1, 2, or 3, got {table}"
            )));
        }
        Ok(Self {
            table,
            bench,
            bandwidths: vec![20, 40],
            cases: (1..=6).collect(),
        })
    }
}

/// One labeled row of a table grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub cases: Vec<u8>,
    pub reports: Vec<MetricReport>,
}

/// A full benchmark grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableGrid {
    pub table: u8,
    pub config: TableConfig,
    /// Critical value shared by every cell, component scale.
    pub critical_value: f64,
    pub rows: Vec<TableRow>,
}

impl TableGrid {
    /// Renders the grid as CSV: one line per row and metric, one column per
    /// case. Missing values render empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,metric");
        for case in &self.config.cases {
            out.push_str(&format!(",case_{case}"));
        }
        out.push('\n');
        type MetricGetter = fn(&MetricReport) -> Option<f64>;
        let metrics: &[(&str, MetricGetter)] = &[
            ("power", |r| r.power),
            ("fdr", |r| r.fdr),
            ("hit_rate", |r| r.hit_rate),
            ("length", |r| r.mean_interval_length),
        ];
        for row in &self.rows {
            for (name, get) in metrics {
                if row.reports.iter().all(|r| get(r).is_none()) {
                    continue;
                }
                out.push_str(&format!("{},{name}", row.label));
                for report in &row.reports {
                    match get(report) {
                        Some(v) => out.push_str(&format!(",{v:.4}")),
                        None => out.push(','),
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Jump layouts of the univariate table.
pub fn univariate_jump_layouts() -> [Vec<usize>; 3] {
    [vec![50], vec![40, 60], vec![25, 50, 75]]
}

/// Jump layouts of the bivariate table: (first series, second series).
pub fn bivariate_jump_layouts() -> [(Vec<usize>, Vec<usize>); 3] {
    [
        (vec![40], vec![60]),
        (vec![50], vec![40, 60]),
        (vec![40, 60], vec![30, 70]),
    ]
}

/// Base layouts of the hotspot table (X's points; Y adds delta).
pub fn hotspot_jump_layouts() -> [Vec<usize>; 2] {
    [vec![50], vec![40, 60]]
}

/// Runs a full table grid.
pub fn run_table(cfg: &TableConfig) -> Result<TableGrid> {
    let req = ThresholdRequest::new(
        cfg.bench.n,
        cfg.bench.alpha,
        cfg.bench.threshold_replications,
        cfg.bench.seed,
    )?;
    let d_n = simulate_threshold(&req)?;

    let mut rows = Vec::new();
    match cfg.table {
        1 => {
            for &g in &cfg.bandwidths {
                for points in univariate_jump_layouts() {
                    let mut reports = Vec::new();
                    for &case in &cfg.cases {
                        reports.push(joint_power_fdr(&cfg.bench, g, &points, case, d_n)?);
                    }
                    rows.push(TableRow {
                        label: format!("joint_g{g}_jumps{}", points.len()),
                        cases: cfg.cases.clone(),
                        reports,
                    });
                }
            }
        }
        2 => {
            for &g in &cfg.bandwidths {
                for (first, second) in bivariate_jump_layouts() {
                    let mut reports = Vec::new();
                    for &case in &cfg.cases {
                        reports.push(cross_power_fdr(&cfg.bench, g, &first, &second, case, d_n)?);
                    }
                    rows.push(TableRow {
                        label: format!("bi_g{g}_jumps{}_{}", first.len(), second.len()),
                        cases: cfg.cases.clone(),
                        reports,
                    });
                }
            }
        }
        3 => {
            for &g in &cfg.bandwidths {
                for points in hotspot_jump_layouts() {
                    for delta in [0usize, 5] {
                        let mut thrs_reports = Vec::new();
                        let mut ci_reports = Vec::new();
                        for &case in &cfg.cases {
                            let (thrs, ci) =
                                hotspot_metrics(&cfg.bench, g, &points, delta, case, d_n)?;
                            thrs_reports.push(thrs);
                            ci_reports.push(ci);
                        }
                        rows.push(TableRow {
                            label: format!("thrs_g{g}_jumps{}_delta{delta}", points.len()),
                            cases: cfg.cases.clone(),
                            reports: thrs_reports,
                        });
                        rows.push(TableRow {
                            label: format!("ci_g{g}_jumps{}_delta{delta}", points.len()),
                            cases: cfg.cases.clone(),
                            reports: ci_reports,
                        });
                    }
                }
            }
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "table must be 1, 2, or 3, got {other}"
            )))
        }
    }
    Ok(TableGrid {
        table: cfg.table,
        config: cfg.clone(),
        critical_value: d_n,
        rows,
    })
}
