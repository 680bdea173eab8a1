//! Hotspot identification: combining detector results into time intervals.
//!
//! A hotspot is a union of time intervals during which both a cross-series
//! detector and the anchor series detector indicate change. The thresholding
//! rule intersects exceedance regions; the confidence-interval rule
//! intersects unions of bootstrap CIs.

use serde::{Deserialize, Serialize};

use crate::detectors::{DetectorKind, DetectorTrace};
use crate::segmentation::ChangePointSet;
use crate::{Error, Result};

/// Which rule produced a hotspot set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HotspotMode {
    Threshold,
    Ci,
}

/// Detector combination evaluated by a hotspot rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationSpec {
    /// Cross kinds whose evidence is unioned; nonempty, no duplicates.
    pub cross_kinds: Vec<DetectorKind>,
    /// Univariate anchor intersected with the cross evidence.
    pub anchor: DetectorKind,
    pub mode: HotspotMode,
}

impl CombinationSpec {
    pub fn new(
        cross_kinds: Vec<DetectorKind>,
        anchor: DetectorKind,
        mode: HotspotMode,
    ) -> Result<Self> {
        if cross_kinds.is_empty() {
            return Err(Error::InvalidConfig(
                "a combination needs at least one cross kind".into(),
            ));
        }
        for (i, kind) in cross_kinds.iter().enumerate() {
            if !kind.is_cross() {
                return Err(Error::InvalidKind {
                    kind: *kind,
                    reason: "only cross kinds may appear in the combination".into(),
                });
            }
            if cross_kinds[..i].contains(kind) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate cross kind {kind} in combination"
                )));
            }
        }
        if anchor.is_cross() {
            return Err(Error::InvalidKind {
                kind: anchor,
                reason: "the anchor must be a univariate kind".into(),
            });
        }
        Ok(Self {
            cross_kinds,
            anchor,
            mode,
        })
    }

    /// The default full combination: all four cross kinds anchored on Y.
    pub fn full(mode: HotspotMode) -> Self {
        Self {
            cross_kinds: DetectorKind::cross_kinds().to_vec(),
            anchor: DetectorKind::UniY,
            mode,
        }
    }
}

/// A closed integer interval `[lo, hi]`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: usize) -> bool {
        (self.lo..=self.hi).contains(&k)
    }
}

/// A normalized union of hotspot intervals with per-interval provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotspotSet {
    pub mode: HotspotMode,
    pub spec: CombinationSpec,
    /// Sorted, disjoint, non-adjacent intervals within `[1, n]`.
    pub intervals: Vec<Interval>,
    /// Cross kinds contributing to each interval, same order as `intervals`.
    pub provenance: Vec<Vec<DetectorKind>>,
}

impl HotspotSet {
    pub fn contains(&self, k: usize) -> bool {
        self.intervals.iter().any(|iv| iv.contains(k))
    }

    /// Total number of covered time points.
    pub fn total_length(&self) -> usize {
        self.intervals.iter().map(Interval::len).sum()
    }
}

/// Sorts, merges (overlapping or adjacent), and clips intervals to `[1, n]`.
pub fn normalize(intervals: &[(usize, usize)], n: usize) -> Result<Vec<Interval>> {
    let mut clipped = Vec::with_capacity(intervals.len());
    for &(lo, hi) in intervals {
        if lo > hi {
            return Err(Error::InvalidInterval {
                lo: lo as i64,
                hi: hi as i64,
            });
        }
        let lo = lo.max(1);
        let hi = hi.min(n);
        if lo <= hi {
            clipped.push((lo, hi));
        }
    }
    clipped.sort_unstable();
    let mut out: Vec<Interval> = Vec::new();
    for (lo, hi) in clipped {
        match out.last_mut() {
            Some(last) if lo <= last.hi + 1 => last.hi = last.hi.max(hi),
            _ => out.push(Interval { lo, hi }),
        }
    }
    Ok(out)
}

fn find_trace<'a>(traces: &'a [&DetectorTrace], kind: DetectorKind) -> Result<&'a DetectorTrace> {
    traces
        .iter()
        .find(|t| t.kind == kind)
        .copied()
        .ok_or_else(|| Error::MissingInput {
            kind,
            reason: "no trace with this kind was supplied".into(),
        })
}

/// Thresholding rule: times where the best cross distance and the anchor
/// distance both exceed `threshold` (squared scale), as maximal runs.
pub fn hotspots_threshold(
    traces: &[&DetectorTrace],
    threshold: f64,
    spec: &CombinationSpec,
) -> Result<HotspotSet> {
    if spec.mode != HotspotMode::Threshold {
        return Err(Error::InvalidConfig(
            "combination spec mode must be `threshold` for the thresholding rule".into(),
        ));
    }
    let anchor = find_trace(traces, spec.anchor)?;
    let n = anchor.len();
    let mut cross = Vec::with_capacity(spec.cross_kinds.len());
    for &kind in &spec.cross_kinds {
        let trace = find_trace(traces, kind)?;
        if trace.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: trace.len(),
            });
        }
        cross.push(trace);
    }

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new(); // hotspot ks per run
    let mut current: Option<(usize, usize)> = None;
    for k in 1..=n {
        let cross_hit = cross.iter().any(|t| t.d2[k - 1] > threshold);
        let anchor_hit = anchor.d2[k - 1] > threshold;
        if cross_hit && anchor_hit {
            current = match current {
                Some((lo, _)) => Some((lo, k)),
                None => {
                    members.push(Vec::new());
                    Some((k, k))
                }
            };
            members.last_mut().unwrap().push(k);
        } else if let Some(run) = current.take() {
            runs.push(run);
        }
    }
    if let Some(run) = current {
        runs.push(run);
    }

    let provenance = members
        .iter()
        .map(|ks| {
            spec.cross_kinds
                .iter()
                .copied()
                .filter(|&kind| {
                    let trace = cross
                        .iter()
                        .find(|t| t.kind == kind)
                        .expect("validated above");
                    ks.iter().any(|&k| trace.d2[k - 1] > threshold)
                })
                .collect()
        })
        .collect();

    Ok(HotspotSet {
        mode: HotspotMode::Threshold,
        spec: spec.clone(),
        intervals: runs
            .into_iter()
            .map(|(lo, hi)| Interval { lo, hi })
            .collect(),
        provenance,
    })
}

fn find_cps<'a>(
    sets: &'a [&ChangePointSet],
    kind: DetectorKind,
    alpha: f64,
) -> Result<&'a ChangePointSet> {
    let cps = sets
        .iter()
        .find(|c| c.kind == kind)
        .copied()
        .ok_or_else(|| Error::MissingInput {
            kind,
            reason: "no change-point set with this kind was supplied".into(),
        })?;
    match cps.ci_alpha {
        Some(a) if (a - alpha).abs() < 1e-12 => Ok(cps),
        Some(a) => Err(Error::InvalidConfig(format!(
            "change-point set for {kind} carries CIs at alpha={a}, expected {alpha}"
        ))),
        None => Err(Error::MissingInput {
            kind,
            reason: "change-point set has no confidence intervals".into(),
        }),
    }
}

fn ci_union(cps: &ChangePointSet) -> Vec<(usize, usize)> {
    cps.cis
        .as_ref()
        .map(|cis| cis.iter().map(|ci| (ci.lo, ci.hi)).collect())
        .unwrap_or_default()
}

fn intersect(a: &[Interval], b: &[Interval]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let lo = x.lo.max(y.lo);
            let hi = x.hi.min(y.hi);
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Confidence-interval rule: the union of the cross kinds' CI unions
/// intersected with the anchor's CI union, normalized.
///
/// `n` bounds the reported intervals. Every supplied change-point set must
/// carry CIs at level `alpha`.
pub fn hotspots_ci(
    sets: &[&ChangePointSet],
    spec: &CombinationSpec,
    alpha: f64,
    n: usize,
) -> Result<HotspotSet> {
    if spec.mode != HotspotMode::Ci {
        return Err(Error::InvalidConfig(
            "combination spec mode must be `ci` for the confidence-interval rule".into(),
        ));
    }
    let anchor = find_cps(sets, spec.anchor, alpha)?;
    let anchor_union = normalize(&ci_union(anchor), n)?;

    let mut pieces: Vec<(usize, usize, DetectorKind)> = Vec::new();
    for &kind in &spec.cross_kinds {
        let cps = find_cps(sets, kind, alpha)?;
        let cross_union = normalize(&ci_union(cps), n)?;
        for (lo, hi) in intersect(&cross_union, &anchor_union) {
            pieces.push((lo, hi, kind));
        }
    }

    let intervals = normalize(
        &pieces
            .iter()
            .map(|&(lo, hi, _)| (lo, hi))
            .collect::<Vec<_>>(),
        n,
    )?;
    let provenance = intervals
        .iter()
        .map(|iv| {
            spec.cross_kinds
                .iter()
                .copied()
                .filter(|&kind| {
                    pieces
                        .iter()
                        .any(|&(lo, hi, k)| k == kind && lo <= iv.hi && hi >= iv.lo)
                })
                .collect()
        })
        .collect();

    Ok(HotspotSet {
        mode: HotspotMode::Ci,
        spec: spec.clone(),
        intervals,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_stats::WindowConfig;
    use crate::segmentation::PointCi;

    fn trace_with_d2(kind: DetectorKind, d2: Vec<f64>) -> DetectorTrace {
        let n = d2.len();
        DetectorTrace {
            kind,
            t1: vec![0.0; n],
            t2: vec![0.0; n],
            rho: vec![0.0; n],
            d2,
            cfg: WindowConfig::new(n, 20, 0.2, 0.05).unwrap(),
            degenerate: Vec::new(),
        }
    }

    fn step_d2(n: usize, lo: usize, hi: usize, level: f64) -> Vec<f64> {
        let mut d2 = vec![0.0; n];
        for k in lo..=hi {
            d2[k - 1] = level;
        }
        d2
    }

    fn cps_with_cis(kind: DetectorKind, cis: Vec<(usize, usize)>) -> ChangePointSet {
        ChangePointSet {
            kind,
            threshold: 10.0,
            points: cis.iter().map(|&(lo, hi)| (lo + hi) / 2).collect(),
            exceedance: Vec::new(),
            cis: Some(
                cis.iter()
                    .map(|&(lo, hi)| PointCi {
                        point: (lo + hi) / 2,
                        radius: (hi - lo) / 2,
                        lo,
                        hi,
                        degenerate: false,
                    })
                    .collect(),
            ),
            ci_alpha: Some(0.05),
        }
    }

    #[test]
    fn normalize_merges_adjacent_and_nested() {
        assert_eq!(
            normalize(&[(1, 3), (4, 6)], 100).unwrap(),
            vec![Interval { lo: 1, hi: 6 }]
        );
        assert_eq!(
            normalize(&[(10, 20), (15, 18)], 100).unwrap(),
            vec![Interval { lo: 10, hi: 20 }]
        );
        assert!(normalize(&[], 100).unwrap().is_empty());
        assert!(normalize(&[(5, 3)], 100).is_err());
        // Clipping to [1, n].
        assert_eq!(
            normalize(&[(0, 300)], 100).unwrap(),
            vec![Interval { lo: 1, hi: 100 }]
        );
    }

    #[test]
    fn threshold_rule_intersects_exceedance_regions() {
        let anchor = trace_with_d2(DetectorKind::UniY, step_d2(100, 45, 70, 20.0));
        let cross = trace_with_d2(DetectorKind::MeanVar, step_d2(100, 30, 60, 20.0));
        let spec = CombinationSpec::new(
            vec![DetectorKind::MeanVar],
            DetectorKind::UniY,
            HotspotMode::Threshold,
        )
        .unwrap();
        let set = hotspots_threshold(&[&anchor, &cross], 10.0, &spec).unwrap();
        assert_eq!(set.intervals, vec![Interval { lo: 45, hi: 60 }]);
        assert_eq!(set.provenance, vec![vec![DetectorKind::MeanVar]]);
    }

    #[test]
    fn threshold_rule_with_no_exceedance_is_empty() {
        let anchor = trace_with_d2(DetectorKind::UniY, vec![0.0; 100]);
        let cross = trace_with_d2(DetectorKind::MeanVar, vec![0.0; 100]);
        let spec = CombinationSpec::new(
            vec![DetectorKind::MeanVar],
            DetectorKind::UniY,
            HotspotMode::Threshold,
        )
        .unwrap();
        let set = hotspots_threshold(&[&anchor, &cross], 10.0, &spec).unwrap();
        assert!(set.intervals.is_empty());
    }

    #[test]
    fn threshold_rule_requires_every_named_trace() {
        let anchor = trace_with_d2(DetectorKind::UniY, vec![0.0; 100]);
        let spec = CombinationSpec::full(HotspotMode::Threshold);
        assert!(matches!(
            hotspots_threshold(&[&anchor], 10.0, &spec),
            Err(Error::MissingInput { .. })
        ));
    }

    #[test]
    fn lowering_the_threshold_never_shrinks_the_hotspot() {
        let anchor = trace_with_d2(DetectorKind::UniY, step_d2(100, 40, 75, 15.0));
        let cross = trace_with_d2(DetectorKind::MeanMean, step_d2(100, 35, 65, 12.0));
        let spec = CombinationSpec::new(
            vec![DetectorKind::MeanMean],
            DetectorKind::UniY,
            HotspotMode::Threshold,
        )
        .unwrap();
        let tight = hotspots_threshold(&[&anchor, &cross], 13.0, &spec).unwrap();
        let loose = hotspots_threshold(&[&anchor, &cross], 5.0, &spec).unwrap();
        for k in 1..=100 {
            if tight.contains(k) {
                assert!(loose.contains(k));
            }
        }
    }

    #[test]
    fn ci_rule_intersects_interval_unions() {
        let anchor = cps_with_cis(DetectorKind::UniY, vec![(45, 51)]);
        let cross = cps_with_cis(DetectorKind::MeanVar, vec![(47, 53)]);
        let spec = CombinationSpec::new(
            vec![DetectorKind::MeanVar],
            DetectorKind::UniY,
            HotspotMode::Ci,
        )
        .unwrap();
        let set = hotspots_ci(&[&anchor, &cross], &spec, 0.05, 100).unwrap();
        assert_eq!(set.intervals, vec![Interval { lo: 47, hi: 51 }]);
    }

    #[test]
    fn ci_rule_with_no_anchor_points_is_empty() {
        let anchor = cps_with_cis(DetectorKind::UniY, vec![]);
        let cross = cps_with_cis(DetectorKind::MeanVar, vec![(47, 53)]);
        let spec = CombinationSpec::new(
            vec![DetectorKind::MeanVar],
            DetectorKind::UniY,
            HotspotMode::Ci,
        )
        .unwrap();
        let set = hotspots_ci(&[&anchor, &cross], &spec, 0.05, 100).unwrap();
        assert!(set.intervals.is_empty());
    }

    #[test]
    fn ci_rule_rejects_sets_without_intervals() {
        let mut anchor = cps_with_cis(DetectorKind::UniY, vec![(45, 51)]);
        anchor.cis = None;
        anchor.ci_alpha = None;
        let cross = cps_with_cis(DetectorKind::MeanVar, vec![(47, 53)]);
        let spec = CombinationSpec::new(
            vec![DetectorKind::MeanVar],
            DetectorKind::UniY,
            HotspotMode::Ci,
        )
        .unwrap();
        assert!(matches!(
            hotspots_ci(&[&anchor, &cross], &spec, 0.05, 100),
            Err(Error::MissingInput { .. })
        ));
    }

    #[test]
    fn combination_spec_validation() {
        assert!(CombinationSpec::new(vec![], DetectorKind::UniY, HotspotMode::Ci).is_err());
        assert!(CombinationSpec::new(
            vec![DetectorKind::UniX],
            DetectorKind::UniY,
            HotspotMode::Ci
        )
        .is_err());
        assert!(CombinationSpec::new(
            vec![DetectorKind::MeanVar, DetectorKind::MeanVar],
            DetectorKind::UniY,
            HotspotMode::Ci
        )
        .is_err());
        assert!(CombinationSpec::new(
            vec![DetectorKind::MeanVar],
            DetectorKind::MeanMean,
            HotspotMode::Ci
        )
        .is_err());
        // Swapping the anchor to X is allowed.
        assert!(CombinationSpec::new(
            vec![DetectorKind::MeanVar],
            DetectorKind::UniX,
            HotspotMode::Ci
        )
        .is_ok());
    }
}
