//! `cluesim` — run seeded deduction-game tournaments, replay logs, and build
//! metric reports.
//!
//! Exit codes are a stable scripting contract: 0 success, 2 configuration
//! error, 3 gateway error, 4 replay divergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cluesim_core::tournament::{read_tournament_logs, run_tournament, TournamentError};
use cluesim_core::{build_report, read_log, replay, EngineError, MockFixture, ReplayError};

mod spec_file;

use spec_file::load_spec;

const EXIT_CONFIG: u8 = 2;
const EXIT_GATEWAY: u8 = 3;
const EXIT_DIVERGENCE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cluesim",
    about = "Deterministic deduction-game simulator and evaluator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tournament from a spec file, writing logs and a report.
    Run {
        /// Tournament spec (TOML).
        #[arg(long)]
        spec: PathBuf,
        /// Output directory; logs land in <out>/<tournament_id>/.
        #[arg(long)]
        out: PathBuf,
        /// Maximum games running concurrently.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Mock transcript fixture (JSON); runs LLM seats offline.
        #[arg(long)]
        mock: Option<PathBuf>,
    },
    /// Re-execute a log and verify it regenerates event-for-event.
    Replay {
        #[arg(long)]
        log: PathBuf,
    },
    /// Rebuild the tournament report from the logs in a directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            spec,
            out,
            parallel,
            mock,
        } => cmd_run(spec, out, parallel, mock),
        Command::Replay { log } => cmd_replay(log),
        Command::Report { dir, format } => cmd_report(dir, format),
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn cmd_run(spec: PathBuf, out: PathBuf, parallel: usize, mock: Option<PathBuf>) -> ExitCode {
    let spec = match load_spec(&spec) {
        Ok(spec) => spec,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let fixture = match mock.map(|path| MockFixture::load(&path)).transpose() {
        Ok(fixture) => fixture,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    match run_tournament(&spec, &out, parallel, fixture.as_ref()) {
        Ok(outcome) => {
            for path in &outcome.log_paths {
                println!("wrote {}", path.display());
            }
            println!("report in {}", outcome.dir.display());
            print!("{}", outcome.report.summary_table());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = match &e {
                TournamentError::Gateway(_) => EXIT_GATEWAY,
                TournamentError::Engine {
                    source: EngineError::Agent { .. },
                    ..
                } => EXIT_GATEWAY,
                _ => EXIT_CONFIG,
            };
            fail(code, e)
        }
    }
}

fn cmd_replay(log_path: PathBuf) -> ExitCode {
    let log = match read_log(&log_path) {
        Ok(log) => log,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    match replay(&log) {
        Ok(result) => {
            println!(
                "replay clean: {} ({} events, winner {:?})",
                log_path.display(),
                log.records.len(),
                result.winner,
            );
            ExitCode::SUCCESS
        }
        Err(e @ ReplayError::Divergence { .. }) => fail(EXIT_DIVERGENCE, e),
        Err(e) => fail(EXIT_DIVERGENCE, e),
    }
}

fn cmd_report(dir: PathBuf, format: Format) -> ExitCode {
    let logs = match read_tournament_logs(&dir) {
        Ok(logs) if logs.is_empty() => {
            return fail(
                EXIT_CONFIG,
                format!("no game logs found in {}", dir.display()),
            )
        }
        Ok(logs) => logs,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let report = match build_report(&logs) {
        Ok(report) => report,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Err(e) = report.write_files(&dir) {
        return fail(EXIT_CONFIG, e);
    }
    match format {
        Format::Table => print!("{}", report.summary_table()),
        Format::Csv => print!("{}", report.summary_csv()),
    }
    ExitCode::SUCCESS
}
