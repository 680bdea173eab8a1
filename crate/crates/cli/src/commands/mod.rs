pub mod cache;
pub mod detect;
pub mod hotspot;
pub mod illustrate;
pub mod simulate;

use std::path::Path;

use anyhow::Result;
use hotspot_core::critical_values::exceedance_threshold;
use hotspot_core::detectors::{joint_bivariate, joint_univariate, DetectorKind, DetectorTrace};
use hotspot_core::segmentation::{extract_changepoints, ChangePointSet};

use crate::config::{
    critical_value, load_inputs, resolve_kinds, window_config, AnalysisArgs, InputArgs,
    LoadedInputs, RunConfig,
};

/// Everything the detect/hotspot commands share: loaded inputs, the
/// critical value, and per-kind traces with screened change points.
pub(crate) struct DetectionRun {
    pub config: RunConfig,
    pub cfg: hotspot_core::local_stats::WindowConfig,
    /// Squared-scale exceedance threshold.
    pub threshold: f64,
    pub inputs: LoadedInputs,
    pub traces: Vec<DetectorTrace>,
    pub sets: Vec<ChangePointSet>,
}

pub(crate) fn run_detection(
    command: &str,
    input: &InputArgs,
    analysis: &AnalysisArgs,
    kinds_raw: &Option<String>,
    out_dir: &Path,
    bootstrap_reps: Option<usize>,
    mode: Option<String>,
) -> Result<DetectionRun> {
    let inputs = load_inputs(input)?;
    let n = inputs.y.len();
    let cfg = window_config(n, analysis)?;
    let kinds = resolve_kinds(kinds_raw, inputs.x.is_some())?;
    let d_n = critical_value(n, analysis, out_dir)?;
    let threshold = exceedance_threshold(d_n);

    let mut traces = Vec::with_capacity(kinds.len());
    for &kind in &kinds {
        let trace = match kind {
            DetectorKind::UniY => joint_univariate(&inputs.y, &cfg, kind)?,
            DetectorKind::UniX => {
                let x = inputs
                    .x
                    .as_ref()
                    .expect("kind resolution guarantees the sensing series");
                joint_univariate(x, &cfg, kind)?
            }
            _ => {
                let x = inputs
                    .x
                    .as_ref()
                    .expect("kind resolution guarantees the sensing series");
                joint_bivariate(&inputs.y, x, kind, &cfg)?
            }
        };
        traces.push(trace);
    }
    let sets: Vec<ChangePointSet> = traces
        .iter()
        .map(|trace| extract_changepoints(trace, threshold))
        .collect();

    let config = RunConfig {
        command: command.to_string(),
        input: Some(input.input.display().to_string()),
        stress_col: Some(input.stress_col.clone()),
        sensing_col: input.sensing_col.clone(),
        discrete: input.discrete,
        transform_seed: input.discrete.then_some(input.transform_seed),
        n,
        bandwidth: analysis.bandwidth,
        alpha: analysis.alpha,
        eta: analysis.eta,
        threshold_reps: analysis.threshold_reps,
        bootstrap_reps,
        seed: analysis.seed,
        kinds: kinds.iter().map(|k| k.token().to_string()).collect(),
        mode,
        critical_value: d_n,
    };

    Ok(DetectionRun {
        config,
        cfg,
        threshold,
        inputs,
        traces,
        sets,
    })
}
