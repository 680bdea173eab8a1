use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use hotspot_core::local_stats::local_moments;

use crate::config::{AnalysisArgs, InputArgs, OutputFormat};
use crate::output::{
    ensure_dir, out_path, write_changepoints_csv, write_json, write_moments_csv, write_trace_csv,
    ChangePointReport,
};

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Comma-separated detector kinds (y, x, yx, yx2, y2x, y2x2); defaults
    /// to every kind computable from the inputs.
    #[arg(long)]
    pub kinds: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Report format for the change-point output.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Also dump the rolling moments of each input series.
    #[arg(long)]
    pub dump_moments: bool,
}

pub fn run(args: DetectArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let run = super::run_detection(
        "detect",
        &args.input,
        &args.analysis,
        &args.kinds,
        &args.out,
        None,
        None,
    )?;

    if let Some(record) = &run.inputs.transform {
        write_json(&out_path(&args.out, "transform_record.json"), record)?;
        hotspot_core::series::write_csv(
            &out_path(&args.out, "stress_latent.csv"),
            "latent",
            run.inputs.y.values(),
        )?;
    }

    for (trace, cps) in run.traces.iter().zip(&run.sets) {
        let token = trace.kind.token();
        write_trace_csv(
            &out_path(&args.out, &format!("trace_{token}.csv")),
            trace,
            &run.config,
        )?;
        match args.format {
            OutputFormat::Json => write_json(
                &out_path(&args.out, &format!("changepoints_{token}.json")),
                &ChangePointReport::new(&run.config, cps, trace),
            )?,
            OutputFormat::Csv => write_changepoints_csv(
                &out_path(&args.out, &format!("changepoints_{token}.csv")),
                cps,
                &run.config,
            )?,
        }
        println!(
            "{token}: {} change point(s) {:?}",
            cps.points.len(),
            cps.points
        );
    }

    if args.dump_moments {
        let moments = local_moments(&run.inputs.y, &run.cfg)?;
        write_moments_csv(&out_path(&args.out, "moments_y.csv"), &moments, &run.config)?;
        if let Some(x) = &run.inputs.x {
            let moments = local_moments(x, &run.cfg)?;
            write_moments_csv(&out_path(&args.out, "moments_x.csv"), &moments, &run.config)?;
        }
    }
    Ok(())
}
