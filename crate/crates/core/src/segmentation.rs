//! From Mahalanobis traces to screened change points with bootstrap CIs.
//!
//! Exceedance of the critical value yields initial candidates; screening
//! keeps the candidates that are local maxima of the distance trace over
//! their own `+- ceil(eta * G)` window, so emitted points are separated by
//! more than that radius. Confidence intervals come from resampling whole
//! time-aligned tuples independently within the segments between change
//! points, re-locating each point as the argmax of the recomputed distance
//! near its original position, and taking an upper order statistic of the
//! absolute displacements.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::{joint_bivariate, joint_univariate, DetectorKind, DetectorTrace};
use crate::local_stats::WindowConfig;
use crate::seeds;
use crate::series::ContinuousSeries;
use crate::{Error, Result};

/// Pointwise confidence interval for one change point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCi {
    /// The screened change point.
    pub point: usize,
    /// Upper order statistic of the bootstrap displacements.
    pub radius: usize,
    /// Lower endpoint, clipped to 1.
    pub lo: usize,
    /// Upper endpoint, clipped to n.
    pub hi: usize,
    /// True when an adjacent segment was too short to resample meaningfully.
    pub degenerate: bool,
}

/// Screened change points of one detector kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePointSet {
    pub kind: DetectorKind,
    /// Squared-scale threshold the trace was compared against.
    pub threshold: f64,
    /// Screened change-point locations, sorted ascending.
    pub points: Vec<usize>,
    /// All 1-based time points whose distance exceeds the threshold.
    pub exceedance: Vec<usize>,
    /// Pointwise confidence intervals, present once a bootstrap has run.
    pub cis: Option<Vec<PointCi>>,
    /// Level of the attached intervals.
    pub ci_alpha: Option<f64>,
}

impl ChangePointSet {
    /// Maximal runs of consecutive exceedance points as `(lo, hi)` pairs.
    pub fn exceedance_runs(&self) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        let mut iter = self.exceedance.iter().copied();
        let Some(first) = iter.next() else {
            return runs;
        };
        let (mut lo, mut hi) = (first, first);
        for k in iter {
            if k == hi + 1 {
                hi = k;
            } else {
                runs.push((lo, hi));
                lo = k;
                hi = k;
            }
        }
        runs.push((lo, hi));
        runs
    }
}

/// Thresholds a trace and screens exceedances to local maxima.
///
/// `threshold` is on the squared (Mahalanobis) scale. A candidate survives
/// when its full `+- ceil(eta * G)` screening window fits inside `[1, n]`
/// and it is the maximum of the distance trace over that window; plateaus
/// keep their leftmost point. Emitted points are therefore separated by
/// more than the screening radius.
pub fn extract_changepoints(trace: &DetectorTrace, threshold: f64) -> ChangePointSet {
    let n = trace.len();
    let exceedance: Vec<usize> = trace
        .d2
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > threshold)
        .map(|(i, _)| i + 1)
        .collect();

    let radius = trace.cfg.screening_radius();
    let points: Vec<usize> = exceedance
        .iter()
        .copied()
        .filter(|&k| {
            k > radius
                && k + radius <= n
                && (k - radius..k).all(|j| trace.d2[j - 1] < trace.d2[k - 1])
                && (k + 1..=k + radius).all(|j| trace.d2[j - 1] <= trace.d2[k - 1])
        })
        .collect();

    ChangePointSet {
        kind: trace.kind,
        threshold,
        points,
        exceedance,
        cis: None,
        ci_alpha: None,
    }
}

/// Segments `1..=n` delimited by the change points.
fn segments(points: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(points.len() + 1);
    let mut start = 1;
    for &p in points {
        out.push((start, p));
        start = p + 1;
    }
    if start <= n {
        out.push((start, n));
    }
    out
}

fn recompute_trace(
    y: &[f64],
    x: Option<&[f64]>,
    kind: DetectorKind,
    cfg: &WindowConfig,
) -> DetectorTrace {
    let y = ContinuousSeries::new(y.to_vec()).expect("resampled series stays finite");
    match x {
        None => joint_univariate(&y, cfg, kind).expect("configuration already validated"),
        Some(x) => {
            let x = ContinuousSeries::new(x.to_vec()).expect("resampled series stays finite");
            joint_bivariate(&y, &x, kind, cfg).expect("configuration already validated")
        }
    }
}

/// Bootstrap pointwise confidence intervals for screened change points.
///
/// For univariate kinds pass `x = None`; cross kinds resample `(y, x)`
/// tuples so the pairing is preserved. Identical inputs and seed give
/// identical intervals.
pub fn bootstrap_cis(
    y: &ContinuousSeries,
    x: Option<&ContinuousSeries>,
    kind: DetectorKind,
    points: &[usize],
    cfg: &WindowConfig,
    replications: usize,
    seed: u64,
) -> Result<Vec<PointCi>> {
    if kind.is_cross() != x.is_some() {
        return Err(Error::InvalidKind {
            kind,
            reason: if kind.is_cross() {
                "cross kinds need the paired series".into()
            } else {
                "univariate kinds take no paired series".into()
            },
        });
    }
    if replications < 100 {
        return Err(Error::InvalidConfig(format!(
            "bootstrap replications must be >= 100, got {replications}"
        )));
    }
    cfg.check_series(y)?;
    if let Some(x) = x {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: x.len(),
            });
        }
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }

    let n = cfg.n;
    let g = cfg.bandwidth;
    let segs = segments(points, n);

    // Displacements per point across replications, replication-major so the
    // parallel collect stays order-stable.
    let displacements: Vec<Vec<usize>> = (0..replications)
        .into_par_iter()
        .map(|b| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seeds::derive(seed, seeds::STREAM_BOOTSTRAP, b as u64));
            let mut y_boot = vec![0.0; n];
            let mut x_boot = x.map(|_| vec![0.0; n]);
            for &(lo, hi) in &segs {
                for t in lo..=hi {
                    let pick = rng.gen_range(lo..=hi) - 1;
                    y_boot[t - 1] = y.values()[pick];
                    if let (Some(xb), Some(xs)) = (x_boot.as_mut(), x) {
                        xb[t - 1] = xs.values()[pick];
                    }
                }
            }
            let trace = recompute_trace(&y_boot, x_boot.as_deref(), kind, cfg);
            points
                .iter()
                .map(|&p| {
                    let lo = p.saturating_sub(g).max(1);
                    let hi = (p + g).min(n);
                    let argmax = (lo..=hi)
                        .max_by(|&a, &b| {
                            trace.d2[a - 1]
                                .partial_cmp(&trace.d2[b - 1])
                                .unwrap()
                                .then_with(|| b.cmp(&a))
                        })
                        .expect("non-empty window");
                    argmax.abs_diff(p)
                })
                .collect()
        })
        .collect();

    let rank = ((1.0 - cfg.alpha) * replications as f64).ceil() as usize;
    let rank = rank.clamp(1, replications);

    Ok(points
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let mut devs: Vec<usize> = displacements.iter().map(|row| row[j]).collect();
            devs.sort_unstable();
            let radius = devs[rank - 1];
            let left_short = segs[j].1 - segs[j].0 < 1;
            let right_short = segs[j + 1].1 - segs[j + 1].0 < 1;
            PointCi {
                point: p,
                radius,
                lo: p.saturating_sub(radius).max(1),
                hi: (p + radius).min(n),
                degenerate: left_short || right_short,
            }
        })
        .collect())
}
