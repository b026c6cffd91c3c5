//! `lowdeg` — experiment runner for the low-degree testers.
//!
//! Subcommands:
//!   run            execute an experiment config, print the aggregate report
//!   check          run the empirical theory-check suite (exit 1 on violation)
//!   list-instances show the built-in instance catalog
//!
//! Execution is single-threaded; the `LOWDEG_WORKERS` environment variable is
//! accepted for compatibility and values above 1 are noted and ignored.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use lowdeg::harness::{
    instance_catalog, run_experiment, run_theory_suite, ExperimentConfig, OutputFormat,
    OutputSpec,
};

#[derive(Parser)]
#[command(name = "lowdeg", about = "Distribution-free low-degree tester experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config.
    Run {
        /// Path to the experiment config (see `list-instances --json` for
        /// ready-made examples of the schema).
        #[arg(long)]
        config: PathBuf,
        /// Override the number of runs.
        #[arg(long)]
        runs: Option<u32>,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the per-run table to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format for --out (default csv).
        #[arg(long, value_enum)]
        format: Option<CliFormat>,
    },
    /// Run the theory-check suite; nonzero exit iff any check records a
    /// violation.
    Check {
        /// "all" or a single check id.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// List the built-in instance catalog.
    ListInstances {
        /// Print the full example configs as JSON instead of the summary.
        #[arg(long)]
        json: bool,
    },
}

fn note_worker_env() {
    if let Ok(v) = std::env::var("LOWDEG_WORKERS") {
        match v.parse::<usize>() {
            Ok(n) if n > 1 => {
                eprintln!("note: LOWDEG_WORKERS={n} requested; execution is single-threaded")
            }
            Ok(_) => {}
            Err(_) => eprintln!("note: ignoring unparsable LOWDEG_WORKERS={v:?}"),
        }
    }
}

fn cmd_run(
    config: PathBuf,
    runs: Option<u32>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<CliFormat>,
) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&config)
        .with_context(|| format!("reading {}", config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(runs) = runs {
        cfg.runs = runs;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(out) = out {
        cfg.output = Some(OutputSpec {
            path: out.display().to_string(),
            format: match format.unwrap_or(CliFormat::Csv) {
                CliFormat::Csv => OutputFormat::Csv,
                CliFormat::Json => OutputFormat::Json,
            },
        });
    } else if format.is_some() {
        bail!("--format requires --out");
    }
    let report = run_experiment(&cfg)?;
    println!(
        "tester={} runs={} accepted={} rate={:.3} wilson95=[{:.3}, {:.3}]",
        report.tester,
        report.runs,
        report.accepts,
        report.acceptance_rate,
        report.wilson_lower,
        report.wilson_upper
    );
    println!(
        "queries: mean={:.1} max={} bound={:.1} ratio={:.1}",
        report.mean_queries, report.max_queries, report.query_bound, report.query_ratio
    );
    if let Some(far) = &report.far_instance {
        println!(
            "far instance: region_mass={:.4} theta={:.4} eps={}",
            far.region_mass, far.theta, far.eps
        );
    }
    for (site, count) in &report.reject_sites {
        println!("reject {site}: {count}");
    }
    if let Some(output) = &cfg.output {
        println!("wrote {}", output.path);
    }
    Ok(())
}

fn cmd_check(suite: &str, seed: u64) -> anyhow::Result<bool> {
    let reports = run_theory_suite(suite, seed)?;
    let mut all_green = true;
    for r in &reports {
        println!("{}", r.to_json_line());
        all_green &= r.passed();
    }
    Ok(all_green)
}

fn cmd_list_instances(json: bool) {
    for entry in instance_catalog() {
        if json {
            println!(
                "{}",
                serde_json::json!({
                    "id": entry.id,
                    "description": entry.description,
                    "config": serde_json::from_str::<serde_json::Value>(
                        &entry.config.to_json()
                    ).expect("config is JSON"),
                })
            );
        } else {
            println!("{:<24} {}", entry.id, entry.description);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    note_worker_env();
    match cli.command {
        Command::Run {
            config,
            runs,
            seed,
            out,
            format,
        } => match cmd_run(config, runs, seed, out, format) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
        Command::Check { suite, seed } => match cmd_check(&suite, seed) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("theory suite recorded violations");
                ExitCode::FAILURE
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
        Command::ListInstances { json } => {
            cmd_list_instances(json);
            ExitCode::SUCCESS
        }
    }
}
