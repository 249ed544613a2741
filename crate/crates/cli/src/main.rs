//! `ebitsim`: run post-selected linear-optics entanglement experiments
//! from JSON configs.
//!
//! Exit codes: 0 success, 1 config error, 2 numerical failure.

mod config;
mod error;
mod report;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ebitsim_core::json::parse_complex_matrix;
use ebitsim_core::optics::{netlist_to_json, reck_decompose};
use ebitsim_core::protocol::{run_protocol, ProtocolSpec};
use ebitsim_core::Scalar;

use crate::config::{parse_config, ExperimentConfig, OutputFormat};
use crate::error::{CliError, CliResult};
use crate::report::{render_csv, render_json, ReportRow};

#[derive(Parser)]
#[command(name = "ebitsim", version, about = "Post-selected linear-optics entanglement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment from a JSON config.
    Run { config: PathBuf },
    /// Run a parameter sweep from a JSON config (requires a "sweep" block).
    Sweep { config: PathBuf },
    /// Decompose a unitary (JSON {"re":[[..]],"im":[[..]]}) into a
    /// beam-splitter/phase-shifter netlist.
    Decompose {
        unitary: PathBuf,
        /// Write the netlist here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the built-in oracle suites.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config, false),
        Command::Sweep { config } => cmd_run(&config, true),
        Command::Decompose { unitary, output } => cmd_decompose(&unitary, output.as_deref()),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_run(config_path: &Path, sweep_mode: bool) -> CliResult<()> {
    let text = std::fs::read_to_string(config_path)?;
    let config = parse_config(&text)?;
    if sweep_mode && config.sweep.is_none() {
        return Err(CliError::config(
            "sweep command needs a \"sweep\" block in the config",
        ));
    }
    if !sweep_mode && config.sweep.is_some() {
        return Err(CliError::config(
            "config has a \"sweep\" block; use `ebitsim sweep`",
        ));
    }

    let plan = config.run_plan()?;
    let rows = execute_plan(plan)?;
    for row in &rows {
        println!("{}", row.summary_line());
    }
    write_artifact(&config, &rows, sweep_mode)?;
    Ok(())
}

/// Executes the run plan; rows come back in input order. `EBITSIM_THREADS`
/// overrides parallelism (0 or 1 means serial).
fn execute_plan(plan: Vec<ProtocolSpec<Scalar>>) -> CliResult<Vec<ReportRow>> {
    let threads = std::env::var("EBITSIM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());

    let outcomes: Vec<_> = match threads {
        Some(0) | Some(1) => plan.iter().map(run_protocol).collect(),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::config(format!("EBITSIM_THREADS: {e}")))?;
            pool.install(|| {
                use rayon::prelude::*;
                plan.par_iter().map(run_protocol).collect()
            })
        }
        None => {
            use rayon::prelude::*;
            plan.par_iter().map(run_protocol).collect()
        }
    };

    plan.into_iter()
        .zip(outcomes)
        .map(|(spec, outcome)| {
            outcome
                .map(|outcome| ReportRow { spec, outcome })
                .map_err(CliError::from)
        })
        .collect()
}

fn write_artifact(config: &ExperimentConfig, rows: &[ReportRow], sweep: bool) -> CliResult<()> {
    let body = match config.format {
        OutputFormat::Json => render_json(rows, sweep),
        OutputFormat::Csv => render_csv(rows),
    };
    if let Some(dir) = config.output_path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(&config.output_path, body)?;
    Ok(())
}

fn cmd_decompose(unitary_path: &Path, output: Option<&Path>) -> CliResult<()> {
    let text = std::fs::read_to_string(unitary_path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("invalid JSON: {e}")))?;
    let matrix = parse_complex_matrix::<Scalar>(&value).map_err(CliError::from)?;
    let elements = reck_decompose(&matrix).map_err(CliError::from)?;
    let netlist = netlist_to_json(&elements);
    match output {
        Some(path) => std::fs::write(path, format!("{netlist}\n"))?,
        None => println!("{netlist}"),
    }
    Ok(())
}

fn cmd_selftest() -> CliResult<()> {
    if selftest::run_all() {
        println!("selftest: all suites passed");
        Ok(())
    } else {
        Err(CliError::Numerical("selftest suites failed".to_string()))
    }
}
