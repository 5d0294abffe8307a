use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mwgfem::adapt::CycleOutcome;
use mwgfem_cli::{config, runner};

#[derive(Parser)]
#[command(
    name = "mwgfem",
    about = "Adaptive modified weak Galerkin solver for 2D diffusion problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a config file and write its
    /// convergence history as CSV.
    Run {
        /// Path to a `key = value` config file (see the README).
        config: PathBuf,
        /// Run the identity-check suite on the finished cycle and append a
        /// PASS/FAIL block to standard output.
        #[arg(long)]
        verify: bool,
        /// Write the final mesh in the mesh text format into this directory.
        #[arg(long, value_name = "DIR")]
        mesh_out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            verify,
            mesh_out,
        } => match run(&config, verify, mesh_out.as_deref()) {
            Ok(outcome) => match outcome {
                CycleOutcome::TolReached => ExitCode::SUCCESS,
                CycleOutcome::MaxIterations => ExitCode::from(2),
            },
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::FAILURE
            }
        },
    }
}

fn run(
    config_path: &std::path::Path,
    verify: bool,
    mesh_out: Option<&std::path::Path>,
) -> Result<CycleOutcome, String> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| format!("cannot read config {}: {e}", config_path.display()))?;
    let config = config::parse_config(&text).map_err(|e| e.to_string())?;
    let artifacts = runner::execute(&config).map_err(|e| e.to_string())?;

    runner::write_history_csv(&config.output, &artifacts.run.records)
        .map_err(|e| e.to_string())?;
    let last = artifacts.run.records.last().expect("at least one record");
    println!(
        "{}: {} iterations, {} elements, eta = {:.6e} -> {}",
        config.problem,
        artifacts.run.records.len(),
        last.n_elements,
        last.eta_sq.sqrt(),
        config.output.display()
    );

    if let Some(dir) = mesh_out {
        let path = runner::write_final_mesh(dir, &artifacts).map_err(|e| e.to_string())?;
        println!("final mesh -> {}", path.display());
    }

    if verify {
        let report = runner::verify_run(&artifacts);
        print!("{}", runner::format_verify_block(&report));
    }

    Ok(artifacts.run.outcome)
}
