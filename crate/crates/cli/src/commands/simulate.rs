use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use hotspot_core::simbench::{run_table, BenchConfig, TableConfig};

use crate::output::{ensure_dir, out_path, write_json};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Benchmark table layout to run.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub table: u8,
    /// Replications per scenario cell.
    #[arg(long, default_value_t = 500)]
    pub replications: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated bandwidths (one row group per value).
    #[arg(long, default_value = "20,40")]
    pub bandwidths: String,
    /// Comma-separated signal cases to evaluate.
    #[arg(long, default_value = "1,2,3,4,5,6")]
    pub cases: String,
    /// Series length.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Screening fraction.
    #[arg(long, default_value_t = 0.2)]
    pub eta: f64,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Monte-Carlo replications of the critical-value simulation.
    #[arg(long, default_value_t = 1000)]
    pub threshold_reps: usize,
    /// Bootstrap replications (confidence-interval rule, table 3).
    #[arg(long, default_value_t = 1000)]
    pub boot_reps: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the per-replication audit log as JSON.
    #[arg(long)]
    pub audit: bool,
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .with_context(|| format!("invalid {what} '{t}'"))
        })
        .collect()
}

pub fn run(args: SimulateArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let bench = BenchConfig {
        n: args.n,
        eta: args.eta,
        alpha: args.alpha,
        replications: args.replications,
        threshold_replications: args.threshold_reps,
        bootstrap_replications: args.boot_reps,
        seed: args.seed,
    };
    let mut cfg = TableConfig::new(args.table, bench)?;
    cfg.bandwidths = parse_list(&args.bandwidths, "bandwidth")?;
    cfg.cases = parse_list(&args.cases, "case")?;

    let start = Instant::now();
    let grid = run_table(&cfg)?;
    let elapsed = start.elapsed();

    let csv_path = out_path(&args.out, &format!("table{}.csv", args.table));
    let mut text = format!(
        "# config: {}\n# critical_value: {}\n",
        serde_json::to_string(&cfg)?,
        grid.critical_value
    );
    text.push_str(&grid.to_csv());
    std::fs::write(&csv_path, text).with_context(|| format!("writing {}", csv_path.display()))?;

    if args.audit {
        write_json(
            &out_path(&args.out, &format!("table{}_audit.json", args.table)),
            &grid,
        )?;
    }

    println!(
        "table {} done in {:.1?}: {} rows x {} cases, critical value {:.6}, replications {}",
        args.table,
        elapsed,
        grid.rows.len(),
        cfg.cases.len(),
        grid.critical_value,
        args.replications
    );
    println!("wrote {}", csv_path.display());
    Ok(())
}
