mod args;
mod report;
mod run;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use report::{emit, Report, RunConfig};
use run::{execute, RunError};

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("PLEGMA_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("PLEGMA_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("PLEGMA_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn replay_config(path: &Path) -> Result<RunConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
    let report: Report =
        serde_json::from_str(&text).map_err(|e| RunError::Usage(format!("{}: not a report: {e}", path.display())))?;
    Ok(report.run_config)
}

fn run(cli: Cli) -> Result<bool, RunError> {
    let (config, out) = match &cli.command {
        Command::Replay { report } => {
            // The embedded configuration is kept verbatim; only the destination may change.
            let config = replay_config(report)?;
            let out = cli.out.clone().or_else(|| config.out.clone());
            (config, out)
        }
        command => {
            let config = RunConfig { subcommand: command.name().into(), command: command.clone(), out: cli.out.clone() };
            (config, cli.out.clone())
        }
    };
    let outcome = execute(&config.command)?;
    let report = Report::new(config, &outcome);
    emit(&report, outcome.table.as_ref(), out.as_deref())
        .map_err(|e| RunError::Usage(format!("cannot write report: {e}")))?;
    for f in &report.verification.failures {
        eprintln!("verification failed [{}]: {}", f.tag, f.detail);
    }
    Ok(report.verification.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("usage error: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
