use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use sartrust::experiment::VERSION;
use sartrust::output::STEPS_DIR;
use sartrust::{emit_outputs, load_config, report_from_csv, run_experiment};

#[derive(Parser)]
#[command(name = "sartrust", version, about = "Trust-aware multi-human multi-robot task allocation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid and write results.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.dir` from the config.
        #[arg(long, env = "SARTRUST_OUT_DIR")]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides `base_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Suppress progress output.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Check a config file and print the resolved grid.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute per-cell statistics from a runs.csv file.
    Report {
        #[arg(long)]
        runs: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, out, jobs, seed, quiet } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.base_seed = seed;
            }
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let steps = cfg.output.step_log.then(|| dir.join(STEPS_DIR));
            let progress = |done: usize, total: usize| {
                if !quiet && (done == total || done % (total / 20).max(1) == 0) {
                    eprint!("\r{done}/{total} episodes");
                    if done == total {
                        eprintln!();
                    }
                }
            };
            let report = run_experiment(&cfg, jobs, steps.as_deref(), &progress)?;
            emit_outputs(&report, &dir)?;
            let failed: usize = report.cells.iter().map(|c| c.failed).sum();
            if !quiet {
                eprintln!(
                    "wrote {} runs to {} in {:.1}s (sartrust {VERSION})",
                    report.rows.len(),
                    dir.display(),
                    report.wall_time.as_secs_f64()
                );
            }
            if failed > 0 {
                anyhow::bail!("{failed} episode(s) aborted; see summary.json");
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            println!(
                "ok: {} scenario(s) x {} model(s) x {} run(s) = {} episodes",
                cfg.scenarios.len(),
                cfg.models.len(),
                cfg.runs_per_cell,
                cfg.scenarios.len() * cfg.models.len() * cfg.runs_per_cell as usize
            );
            Ok(())
        }
        Command::Report { runs } => {
            let cells = report_from_csv(&runs)?;
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{}", serde_json::to_string_pretty(&cells)?).context("cannot write to stdout")?;
            Ok(())
        }
    }
}
