use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kahlerq::cli::{self, CliError};

/// Real Kähler-space quantum mechanics experiments.
#[derive(Parser)]
#[command(name = "kahlerq", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write report.json plus CSV artifacts.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (results do not depend on this).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write plot data files for a finished run.
    Plot { report_dir: PathBuf },
    /// Print the JSON schema of experiment configs.
    Schema,
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("kahlerq: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    match Args::parse().command {
        Command::Run { config, out, threads } => match cli::run(&config, out.as_deref(), threads) {
            Ok(outcome) => {
                for c in &outcome.report.checks {
                    let status = if c.pass { "PASS" } else { "FAIL" };
                    println!("{status}  {}  residual={:e} tol={:e}", c.name, c.residual, c.tolerance);
                }
                println!("report: {}", outcome.output_dir.join(cli::REPORT_FILE).display());
                ExitCode::from(outcome.exit_code() as u8)
            }
            Err(e) => fail(e),
        },
        Command::Plot { report_dir } => match cli::emit_plot_data(&report_dir) {
            Ok(files) => {
                for f in files {
                    println!("{}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&cli::config_schema()).expect("static schema"));
            ExitCode::SUCCESS
        }
    }
}
