use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use hotspot_core::critical_values::{exceedance_threshold, simulate_threshold, ThresholdRequest};
use hotspot_core::detectors::{joint_bivariate, joint_univariate, DetectorKind, DetectorTrace};
use hotspot_core::hotspots::{hotspots_ci, hotspots_threshold, CombinationSpec, HotspotMode};
use hotspot_core::local_stats::WindowConfig;
use hotspot_core::seeds;
use hotspot_core::segmentation::{bootstrap_cis, extract_changepoints, ChangePointSet};
use hotspot_core::series::{to_continuous, ContinuousSeries, DiscreteSeries};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::output::{
    ensure_dir, out_path, write_json, write_shading_csv, write_trace_csv, ChangePointReport,
    HotspotReport, KindPoints,
};

/// Which synthetic story to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    /// One mean shift in the stress series at k=50; the sensing series
    /// shifts mean and variance five points later.
    Mean,
    /// Two variance changes in the stress series at k=40 and 60; the
    /// sensing series changes variance five points after each.
    Variance,
}

#[derive(Debug, Args)]
pub struct IllustrateArgs {
    #[arg(long, value_enum, default_value_t = Scenario::Mean)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// MOSUM bandwidth G.
    #[arg(long, short = 'G', default_value_t = 20)]
    pub bandwidth: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    pub eta: f64,
    #[arg(long, default_value_t = 1000)]
    pub threshold_reps: usize,
    #[arg(long, default_value_t = 500)]
    pub boot_reps: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

const N: usize = 100;

fn draw_categorical(rng: &mut ChaCha8Rng, pmf: &[f64; 5]) -> u32 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u32 + 1;
        }
    }
    5
}

fn likert(rng: &mut ChaCha8Rng, segments: &[(usize, [f64; 5])]) -> DiscreteSeries {
    let mut values = Vec::new();
    for (len, pmf) in segments {
        for _ in 0..*len {
            values.push(draw_categorical(rng, pmf));
        }
    }
    DiscreteSeries::with_levels(values, 5).expect("nonempty scenario")
}

fn gaussian(rng: &mut ChaCha8Rng, segments: &[(usize, f64, f64)]) -> ContinuousSeries {
    let mut values = Vec::new();
    for (len, mean, sd) in segments {
        let dist = rand_distr::Normal::new(*mean, *sd).expect("valid parameters");
        for _ in 0..*len {
            values.push(rng.sample(dist));
        }
    }
    ContinuousSeries::new(values).expect("nonempty scenario")
}

pub fn run(args: IllustrateArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(args.seed, seeds::STREAM_SCENARIO, 0));

    let low = [0.60, 0.30, 0.08, 0.02, 0.0];
    let high = [0.0, 0.02, 0.08, 0.30, 0.60];
    let narrow = [0.02, 0.08, 0.80, 0.08, 0.02];
    let wide = [0.45, 0.04, 0.02, 0.04, 0.45];
    let (stress, sensing, true_points) = match args.scenario {
        Scenario::Mean => (
            likert(&mut rng, &[(50, low), (50, high)]),
            gaussian(&mut rng, &[(55, 0.0, 0.3), (45, 2.0, 0.8)]),
            vec![50usize],
        ),
        Scenario::Variance => (
            likert(&mut rng, &[(40, narrow), (20, wide), (40, narrow)]),
            gaussian(&mut rng, &[(45, 0.0, 0.1), (20, 0.0, 0.8), (35, 0.0, 0.1)]),
            vec![40, 60],
        ),
    };
    let (y, transform) = to_continuous(
        &stress,
        seeds::derive(args.seed, seeds::STREAM_TRANSFORM, 0),
    );
    let x = sensing;

    // The generated pair as an ordinary input CSV.
    let mut data = String::from("t,stress,sensing\n");
    for t in 0..N {
        writeln!(data, "{},{},{}", t + 1, stress.values()[t], x.values()[t])?;
    }
    std::fs::write(out_path(&args.out, "data.csv"), data)?;
    write_json(&out_path(&args.out, "transform_record.json"), &transform)?;
    hotspot_core::series::write_csv(
        &out_path(&args.out, "stress_latent.csv"),
        "latent",
        y.values(),
    )?;

    let cfg = WindowConfig::new(N, args.bandwidth, args.eta, args.alpha)?;
    let request = ThresholdRequest::new(N, args.alpha, args.threshold_reps, args.seed)?;
    let d_n = simulate_threshold(&request)?;
    let threshold = exceedance_threshold(d_n);

    let config = RunConfig {
        command: "illustrate".into(),
        input: None,
        stress_col: Some("stress".into()),
        sensing_col: Some("sensing".into()),
        discrete: true,
        transform_seed: Some(seeds::derive(args.seed, seeds::STREAM_TRANSFORM, 0)),
        n: N,
        bandwidth: args.bandwidth,
        alpha: args.alpha,
        eta: args.eta,
        threshold_reps: args.threshold_reps,
        bootstrap_reps: Some(args.boot_reps),
        seed: args.seed,
        kinds: DetectorKind::all()
            .iter()
            .map(|k| k.token().into())
            .collect(),
        mode: None,
        critical_value: d_n,
    };

    let mut traces: Vec<DetectorTrace> = vec![
        joint_univariate(&y, &cfg, DetectorKind::UniY)?,
        joint_univariate(&x, &cfg, DetectorKind::UniX)?,
    ];
    for kind in DetectorKind::cross_kinds() {
        traces.push(joint_bivariate(&y, &x, kind, &cfg)?);
    }
    let mut sets: Vec<ChangePointSet> = Vec::new();
    for (i, trace) in traces.iter().enumerate() {
        let mut cps = extract_changepoints(trace, threshold);
        let paired = trace.kind.is_cross().then_some(&x);
        let series = if trace.kind == DetectorKind::UniX {
            &x
        } else {
            &y
        };
        let cis = bootstrap_cis(
            series,
            paired,
            trace.kind,
            &cps.points,
            &cfg,
            args.boot_reps,
            seeds::derive(args.seed, seeds::STREAM_BOOTSTRAP, i as u64),
        )?;
        cps.cis = Some(cis);
        cps.ci_alpha = Some(args.alpha);
        sets.push(cps);

        let token = trace.kind.token();
        write_trace_csv(
            &out_path(&args.out, &format!("trace_{token}.csv")),
            trace,
            &config,
        )?;
        write_json(
            &out_path(&args.out, &format!("changepoints_{token}.json")),
            &ChangePointReport::new(&config, &sets[i], trace),
        )?;
    }

    let kind_points = |sets: &[ChangePointSet]| -> Vec<KindPoints> {
        sets.iter()
            .map(|cps| KindPoints {
                kind: cps.kind.token().into(),
                points: cps.points.clone(),
                cis: cps
                    .cis
                    .as_ref()
                    .map(|cis| cis.iter().map(|ci| (ci.lo, ci.hi)).collect()),
            })
            .collect()
    };

    let thrs_spec = CombinationSpec::full(HotspotMode::Threshold);
    let trace_refs: Vec<&DetectorTrace> = traces.iter().collect();
    let thrs = hotspots_threshold(&trace_refs, threshold, &thrs_spec)?;
    write_json(
        &out_path(&args.out, "hotspots_threshold.json"),
        &HotspotReport {
            config: &config,
            mode: "threshold".into(),
            hotspots: &thrs,
            changepoints: kind_points(&sets),
        },
    )?;
    write_shading_csv(
        &out_path(&args.out, "shading_threshold.csv"),
        &thrs,
        N,
        &config,
    )?;

    let ci_spec = CombinationSpec::full(HotspotMode::Ci);
    let set_refs: Vec<&ChangePointSet> = sets.iter().collect();
    let ci = hotspots_ci(&set_refs, &ci_spec, args.alpha, N)?;
    write_json(
        &out_path(&args.out, "hotspots_ci.json"),
        &HotspotReport {
            config: &config,
            mode: "ci".into(),
            hotspots: &ci,
            changepoints: kind_points(&sets),
        },
    )?;
    write_shading_csv(&out_path(&args.out, "shading_ci.csv"), &ci, N, &config)?;

    let fmt_intervals = |set: &hotspot_core::hotspots::HotspotSet| {
        if set.intervals.is_empty() {
            "-".to_string()
        } else {
            set.intervals
                .iter()
                .map(|iv| format!("[{},{}]", iv.lo, iv.hi))
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    println!(
        "scenario {:?}: true stress change(s) at {true_points:?}; thresholding {}; ci {}",
        args.scenario,
        fmt_intervals(&thrs),
        fmt_intervals(&ci)
    );
    Ok(())
}
