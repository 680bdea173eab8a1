use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use hotspot_core::detectors::DetectorKind;
use hotspot_core::hotspots::{hotspots_ci, hotspots_threshold, CombinationSpec, HotspotMode};
use hotspot_core::seeds;
use hotspot_core::segmentation::{bootstrap_cis, ChangePointSet};

use crate::config::{AnalysisArgs, InputArgs};
use crate::output::{
    ensure_dir, out_path, write_json, write_shading_csv, write_trace_csv, HotspotReport, KindPoints,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Threshold,
    Ci,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Anchor {
    Y,
    X,
}

#[derive(Debug, Args)]
pub struct HotspotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Hotspot rule.
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Cross kinds entering the combination (subset of yx, yx2, y2x, y2x2);
    /// defaults to all four.
    #[arg(long)]
    pub kinds: Option<String>,
    /// Univariate anchor intersected with the cross evidence.
    #[arg(long, value_enum, default_value_t = Anchor::Y)]
    pub anchor: Anchor,
    /// Bootstrap replications for the confidence-interval rule.
    #[arg(long, default_value_t = 1000)]
    pub boot_reps: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn cross_kinds_from(tokens: &Option<String>) -> Result<Vec<DetectorKind>> {
    match tokens {
        None => Ok(DetectorKind::cross_kinds().to_vec()),
        Some(raw) => {
            let mut kinds = Vec::new();
            for token in raw.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let Some(kind) = DetectorKind::parse_token(token) else {
                    bail!("unknown detector kind '{token}'");
                };
                if !kind.is_cross() {
                    bail!("'{token}' is not a cross kind; the anchor is set via --anchor");
                }
                if kinds.contains(&kind) {
                    bail!("duplicate cross kind '{token}'");
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

pub fn run(args: HotspotArgs) -> Result<()> {
    if args.input.sensing_col.is_none() {
        bail!("hotspot identification needs --sensing-col (cross-series detectors)");
    }
    ensure_dir(&args.out)?;

    let cross = cross_kinds_from(&args.kinds)?;
    let anchor_kind = match args.anchor {
        Anchor::Y => DetectorKind::UniY,
        Anchor::X => DetectorKind::UniX,
    };
    let mut kind_tokens: Vec<&str> = cross.iter().map(|k| k.token()).collect();
    kind_tokens.push(anchor_kind.token());
    let kinds_arg = Some(kind_tokens.join(","));

    let mode_name = match args.mode {
        Mode::Threshold => "threshold",
        Mode::Ci => "ci",
    };
    let run = super::run_detection(
        "hotspot",
        &args.input,
        &args.analysis,
        &kinds_arg,
        &args.out,
        (args.mode == Mode::Ci).then_some(args.boot_reps),
        Some(mode_name.to_string()),
    )?;
    let n = run.cfg.n;

    for trace in &run.traces {
        write_trace_csv(
            &out_path(&args.out, &format!("trace_{}.csv", trace.kind.token())),
            trace,
            &run.config,
        )?;
    }
    if let Some(record) = &run.inputs.transform {
        write_json(&out_path(&args.out, "transform_record.json"), record)?;
    }

    let (hotspots, sets) = match args.mode {
        Mode::Threshold => {
            let spec = CombinationSpec::new(cross.clone(), anchor_kind, HotspotMode::Threshold)?;
            let refs: Vec<&_> = run.traces.iter().collect();
            (hotspots_threshold(&refs, run.threshold, &spec)?, run.sets)
        }
        Mode::Ci => {
            let spec = CombinationSpec::new(cross.clone(), anchor_kind, HotspotMode::Ci)?;
            let mut sets: Vec<ChangePointSet> = Vec::with_capacity(run.sets.len());
            for (i, cps) in run.sets.iter().enumerate() {
                let mut cps = cps.clone();
                let paired = cps
                    .kind
                    .is_cross()
                    .then_some(run.inputs.x.as_ref().expect("sensing column checked above"));
                let series = if cps.kind == DetectorKind::UniX {
                    run.inputs.x.as_ref().expect("checked above")
                } else {
                    &run.inputs.y
                };
                let cis = bootstrap_cis(
                    series,
                    paired,
                    cps.kind,
                    &cps.points,
                    &run.cfg,
                    args.boot_reps,
                    seeds::derive(args.analysis.seed, seeds::STREAM_BOOTSTRAP, i as u64),
                )?;
                cps.cis = Some(cis);
                cps.ci_alpha = Some(args.analysis.alpha);
                sets.push(cps);
            }
            let refs: Vec<&_> = sets.iter().collect();
            (hotspots_ci(&refs, &spec, args.analysis.alpha, n)?, sets)
        }
    };

    let changepoints: Vec<KindPoints> = sets
        .iter()
        .map(|cps| KindPoints {
            kind: cps.kind.token().to_string(),
            points: cps.points.clone(),
            cis: cps
                .cis
                .as_ref()
                .map(|cis| cis.iter().map(|ci| (ci.lo, ci.hi)).collect()),
        })
        .collect();

    let report = HotspotReport {
        config: &run.config,
        mode: mode_name.to_string(),
        hotspots: &hotspots,
        changepoints,
    };
    write_json(&out_path(&args.out, "hotspots.json"), &report)?;
    write_shading_csv(
        &out_path(&args.out, "shading.csv"),
        &hotspots,
        n,
        &run.config,
    )?;

    // Summary row: change points per kind, then the identified intervals.
    let per_kind: Vec<String> = sets
        .iter()
        .map(|cps| {
            let points: Vec<String> = cps.points.iter().map(|p| p.to_string()).collect();
            format!(
                "{}: {}",
                cps.kind.token(),
                if points.is_empty() {
                    "-".to_string()
                } else {
                    points.join(",")
                }
            )
        })
        .collect();
    let intervals: Vec<String> = hotspots
        .intervals
        .iter()
        .map(|iv| format!("[{},{}]", iv.lo, iv.hi))
        .collect();
    println!(
        "{} | hotspots ({mode_name}): {}",
        per_kind.join(" | "),
        if intervals.is_empty() {
            "-".to_string()
        } else {
            intervals.join(" ")
        }
    );
    Ok(())
}
