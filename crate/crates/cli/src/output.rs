//! Output writers. JSON reports embed the run configuration; CSV files
//! carry it in leading `#` comment lines so every artifact is
//! self-describing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hotspot_core::detectors::DetectorTrace;
use hotspot_core::hotspots::HotspotSet;
use hotspot_core::local_stats::{region_of, LocalMoments, Region};
use hotspot_core::segmentation::ChangePointSet;
use serde::Serialize;

use crate::config::RunConfig;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn config_header(config: &RunConfig) -> String {
    format!(
        "# config: {}\n# seed: {}\n",
        serde_json::to_string(config).expect("config serializes"),
        config.seed
    )
}

fn region_token(region: Region) -> &'static str {
    match region {
        Region::LeftBoundary => "left_boundary",
        Region::Interior => "interior",
        Region::RightBoundary => "right_boundary",
    }
}

/// Detector trace as plot-ready CSV: k, t1, t2, rho, d2, region.
pub fn write_trace_csv(path: &Path, trace: &DetectorTrace, config: &RunConfig) -> Result<()> {
    let mut text = config_header(config);
    text.push_str("k,t1,t2,rho,d2,region\n");
    for i in 0..trace.len() {
        let k = i + 1;
        writeln!(
            text,
            "{k},{},{},{},{},{}",
            trace.t1[i],
            trace.t2[i],
            trace.rho[i],
            trace.d2[i],
            region_token(trace.region(k))
        )?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Rolling-moment dump for debugging: k, region, and all five arrays.
pub fn write_moments_csv(path: &Path, moments: &LocalMoments, config: &RunConfig) -> Result<()> {
    let mut text = config_header(config);
    text.push_str("k,region,d_mean,d_var,s_bar,v_bar,k_bar\n");
    for i in 0..moments.cfg.n {
        let k = i + 1;
        writeln!(
            text,
            "{k},{},{},{},{},{},{}",
            region_token(region_of(&moments.cfg, k)),
            moments.d_mean[i],
            moments.d_var[i],
            moments.s_bar[i],
            moments.v_bar[i],
            moments.k_bar[i]
        )?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Per-k shading export of a hotspot set: 1 where any interval covers k.
pub fn write_shading_csv(
    path: &Path,
    hotspots: &HotspotSet,
    n: usize,
    config: &RunConfig,
) -> Result<()> {
    let mut text = config_header(config);
    text.push_str("k,shaded\n");
    for k in 1..=n {
        writeln!(text, "{k},{}", u8::from(hotspots.contains(k)))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Change-point report serialized around a `ChangePointSet`.
#[derive(Serialize)]
pub struct ChangePointReport<'a> {
    pub config: &'a RunConfig,
    pub kind: String,
    /// Squared-scale threshold the trace was compared against.
    pub threshold: f64,
    pub points: &'a [usize],
    pub exceedance_runs: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cis: Option<&'a [hotspot_core::segmentation::PointCi]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_alpha: Option<f64>,
    /// Time points where a degenerate local scale forced the ratio
    /// convention.
    pub degenerate_ks: &'a [usize],
}

impl<'a> ChangePointReport<'a> {
    pub fn new(config: &'a RunConfig, cps: &'a ChangePointSet, trace: &'a DetectorTrace) -> Self {
        Self {
            config,
            kind: cps.kind.token().to_string(),
            threshold: cps.threshold,
            points: &cps.points,
            exceedance_runs: cps.exceedance_runs(),
            cis: cps.cis.as_deref(),
            ci_alpha: cps.ci_alpha,
            degenerate_ks: &trace.degenerate,
        }
    }
}

/// Flat CSV rendering of a change-point report.
pub fn write_changepoints_csv(path: &Path, cps: &ChangePointSet, config: &RunConfig) -> Result<()> {
    let mut text = config_header(config);
    text.push_str("kind,point,ci_lo,ci_hi,ci_radius\n");
    for (i, point) in cps.points.iter().enumerate() {
        match cps.cis.as_ref().and_then(|cis| cis.get(i)) {
            Some(ci) => writeln!(
                text,
                "{},{point},{},{},{}",
                cps.kind.token(),
                ci.lo,
                ci.hi,
                ci.radius
            )?,
            None => writeln!(text, "{},{point},,,", cps.kind.token())?,
        }
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Hotspot report: intervals, provenance, and the per-kind points that fed
/// the rule.
#[derive(Serialize)]
pub struct HotspotReport<'a> {
    pub config: &'a RunConfig,
    pub mode: String,
    pub hotspots: &'a HotspotSet,
    pub changepoints: Vec<KindPoints>,
}

#[derive(Serialize)]
pub struct KindPoints {
    pub kind: String,
    pub points: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cis: Option<Vec<(usize, usize)>>,
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
