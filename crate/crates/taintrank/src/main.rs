use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use taintrank::commands::{self, CommandError, IngestConfig, ReportConfig, ScenarioConfig, TaintConfig};

/// Builds transaction graphs from transfer records and scores nodes by
/// taint flowing from a root node.
#[derive(Parser)]
#[command(name = "taintrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a transaction graph from JSON transfer records.
    Ingest(IngestConfig),
    /// Score the nodes of a stored graph from a root node.
    Taint(TaintConfig),
    /// Summarize score files and stored graphs as CSV reports.
    Report(ReportConfig),
    /// Generate a synthetic transfer pattern with known ground truth.
    Scenario(ScenarioConfig),
}

fn dispatch(cmd: &Command) -> Result<String, CommandError> {
    let json = match cmd {
        Command::Ingest(cfg) => serde_json::to_string(&commands::run_ingest(cfg)?),
        Command::Taint(cfg) => serde_json::to_string(&commands::run_taint(cfg)?),
        Command::Report(cfg) => serde_json::to_string(&commands::run_report(cfg)?),
        Command::Scenario(cfg) => serde_json::to_string(&commands::run_scenario(cfg)?),
    };
    Ok(json.expect("summaries contain no non-serializable values"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code: u8 = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli.command) {
        Ok(json) => {
            println!("{json}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
