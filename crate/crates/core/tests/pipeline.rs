//! End-to-end statistical behavior on illustration-style scenarios: a
//! discrete stress series transformed to its latent scale, paired with a
//! continuous sensing series, pushed through detection and both hotspot
//! rules.

mod common;

use hotspot_core::critical_values::{exceedance_threshold, simulate_threshold, ThresholdRequest};
use hotspot_core::detectors::{joint_bivariate, joint_univariate, DetectorKind, DetectorTrace};
use hotspot_core::hotspots::{hotspots_ci, hotspots_threshold, CombinationSpec, HotspotMode};
use hotspot_core::local_stats::WindowConfig;
use hotspot_core::segmentation::{bootstrap_cis, extract_changepoints, ChangePointSet};
use hotspot_core::series::{to_continuous, ContinuousSeries, DiscreteSeries};
use hotspot_core::simbench::transform_ks_pass_rate;
use rand::prelude::*;

fn draw_categorical(rng: &mut StdRng, pmf: &[f64]) -> u32 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u32 + 1;
        }
    }
    pmf.len() as u32
}

fn likert_series(rng: &mut StdRng, segments: &[(usize, [f64; 5])]) -> DiscreteSeries {
    let mut values = Vec::new();
    for (len, pmf) in segments {
        for _ in 0..*len {
            values.push(draw_categorical(rng, pmf));
        }
    }
    DiscreteSeries::with_levels(values, 5).unwrap()
}

fn gaussian_segments(rng: &mut StdRng, segments: &[(usize, f64, f64)]) -> ContinuousSeries {
    let mut values = Vec::new();
    for (len, mean, sd) in segments {
        for _ in 0..*len {
            values.push(mean + sd * common::normal_draw(rng));
        }
    }
    ContinuousSeries::new(values).unwrap()
}

fn all_traces(
    y: &ContinuousSeries,
    x: &ContinuousSeries,
    cfg: &WindowConfig,
) -> Vec<DetectorTrace> {
    let mut traces = vec![joint_univariate(y, cfg, DetectorKind::UniY).unwrap()];
    for kind in DetectorKind::cross_kinds() {
        traces.push(joint_bivariate(y, x, kind, cfg).unwrap());
    }
    traces
}

/// Mean jump in the stress series at 50, mean+variance change in the
/// sensing series at 55: the thresholding-rule hotspot covers the stress
/// change point in a large majority of seeds.
#[test]
fn threshold_rule_covers_a_lagged_mean_shift() {
    let n = 100;
    let cfg = WindowConfig::new(n, 20, 0.2, 0.05).unwrap();
    let d_n = simulate_threshold(&ThresholdRequest::new(n, 0.05, 1000, 31).unwrap()).unwrap();
    let threshold = exceedance_threshold(d_n);
    let spec = CombinationSpec::full(HotspotMode::Threshold);

    let low = [0.60, 0.30, 0.08, 0.02, 0.0];
    let high = [0.0, 0.02, 0.08, 0.30, 0.60];
    let mut covered = 0;
    let mut widths = Vec::new();
    let seeds = 100;
    for seed in 0..seeds {
        let mut rng = StdRng::seed_from_u64(9_000 + seed);
        let stress = likert_series(&mut rng, &[(50, low), (50, high)]);
        let (y, _) = to_continuous(&stress, 4_000 + seed);
        let x = gaussian_segments(&mut rng, &[(55, 0.0, 0.3), (45, 2.0, 0.8)]);
        let traces = all_traces(&y, &x, &cfg);
        let refs: Vec<&DetectorTrace> = traces.iter().collect();
        let hs = hotspots_threshold(&refs, threshold, &spec).unwrap();
        if let Some(interval) = hs.intervals.iter().find(|iv| iv.contains(50)) {
            covered += 1;
            widths.push(interval.len());
        }
    }
    assert!(
        covered >= 80,
        "thresholding hotspot covered the stress change in {covered}/{seeds} seeds"
    );
    let mean_width = widths.iter().sum::<usize>() as f64 / widths.len() as f64;
    assert!(
        (5.0..=60.0).contains(&mean_width),
        "covering interval width {mean_width}"
    );
}

/// Variance changes in the stress series at 40 and 60 with a lagged
/// sensing series: the confidence-interval-rule hotspot covers both true
/// points in most seeds.
#[test]
fn ci_rule_covers_double_variance_changes() {
    let n = 100;
    let cfg = WindowConfig::new(n, 20, 0.2, 0.05).unwrap();
    let d_n = simulate_threshold(&ThresholdRequest::new(n, 0.05, 1000, 31).unwrap()).unwrap();
    let threshold = exceedance_threshold(d_n);
    let spec = CombinationSpec::full(HotspotMode::Ci);

    let narrow = [0.02, 0.08, 0.80, 0.08, 0.02];
    let wide = [0.45, 0.04, 0.02, 0.04, 0.45];
    let mut both_covered = 0;
    let seeds = 60;
    for seed in 0..seeds {
        let mut rng = StdRng::seed_from_u64(21_000 + seed);
        let stress = likert_series(&mut rng, &[(40, narrow), (20, wide), (40, narrow)]);
        let (y, _) = to_continuous(&stress, 6_000 + seed);
        let x = gaussian_segments(&mut rng, &[(45, 0.0, 0.1), (20, 0.0, 0.8), (35, 0.0, 0.1)]);
        let traces = all_traces(&y, &x, &cfg);
        let mut sets: Vec<ChangePointSet> = Vec::new();
        for (i, trace) in traces.iter().enumerate() {
            let mut cps = extract_changepoints(trace, threshold);
            let paired = trace.kind.is_cross().then_some(&x);
            let cis = bootstrap_cis(
                &y,
                paired,
                trace.kind,
                &cps.points,
                &cfg,
                300,
                40_000 + seed * 8 + i as u64,
            )
            .unwrap();
            cps.cis = Some(cis);
            cps.ci_alpha = Some(cfg.alpha);
            sets.push(cps);
        }
        let refs: Vec<&ChangePointSet> = sets.iter().collect();
        let hs = hotspots_ci(&refs, &spec, cfg.alpha, n).unwrap();
        if hs.contains(40) && hs.contains(60) {
            both_covered += 1;
        }
    }
    assert!(
        both_covered >= 42,
        "CI hotspot covered both variance changes in {both_covered}/{seeds} seeds"
    );
}

/// Pointwise bootstrap intervals cover a strong mean jump.
#[test]
fn bootstrap_interval_covers_the_true_jump() {
    let n = 100;
    let cfg = WindowConfig::new(n, 40, 0.2, 0.05).unwrap();
    let d_n = simulate_threshold(&ThresholdRequest::new(n, 0.05, 1000, 31).unwrap()).unwrap();
    let threshold = exceedance_threshold(d_n);
    let mut covered = 0;
    let mut detected = 0;
    let reps = 200;
    for rep in 0..reps {
        let mut rng = StdRng::seed_from_u64(55_000 + rep);
        let y = gaussian_segments(&mut rng, &[(50, -2.0, 0.1), (50, 2.0, 0.4)]);
        let trace = joint_univariate(&y, &cfg, DetectorKind::UniY).unwrap();
        let cps = extract_changepoints(&trace, threshold);
        if cps.points.is_empty() {
            continue;
        }
        detected += 1;
        let cis = bootstrap_cis(&y, None, DetectorKind::UniY, &cps.points, &cfg, 300, rep).unwrap();
        if cis.iter().any(|ci| ci.lo <= 50 && 50 <= ci.hi) {
            covered += 1;
        }
    }
    assert!(detected >= reps * 9 / 10, "detected {detected}/{reps}");
    assert!(
        covered * 10 >= reps * 9,
        "bootstrap CI covered the jump in {covered}/{reps} replications"
    );
}

/// The randomized inverse-CDF transform produces standard-normal latents.
#[test]
fn transformed_likert_passes_normality_screening() {
    let rate = transform_ks_pass_rate(&[0.1, 0.25, 0.3, 0.2, 0.15], 200, 200, 0.01, 8);
    assert!(rate >= 0.95, "KS pass rate {rate}");
}
