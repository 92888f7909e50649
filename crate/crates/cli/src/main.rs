//! `mvno`: solve, sweep, analyse and verify MVNO pricing scenarios.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 no simultaneous-pricing
//! solution, 3 failed verification.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use commands::Outcome;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "mvno", version, about = "Wholesale and retail pricing for a two-MNO, one-MVNO market")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Optimal prices, flows and profits of one scenario.
    Solve,
    /// One row per value of a swept parameter.
    Sweep,
    /// Partnership payoff matrix and its pure equilibria.
    Game,
    /// Brute-force, KKT and curvature checks of every closed form.
    Verify,
}

/// Flags shared by every subcommand; they override the config's `run` block.
#[derive(Args, Debug, Default)]
pub struct Options {
    /// JSON config with `market` and optional `run` sections (default: reference market).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// part-nonpart-1 | part-nonpart-2 | part-part-fs | part-part-ps | nonpart-nonpart
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Leader of the sequential model (default: larger customer base).
    #[arg(long, global = true)]
    pub leader: Option<u8>,
    /// gamma | r0 | eps
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Points per round of every grid search.
    #[arg(long, global = true)]
    pub grid_resolution: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance of threshold and boundary comparisons.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Scales every closed-form wholesale price by (1 + x) before verification.
    #[arg(long, global = true, hide = true, allow_negative_numbers = true)]
    pub perturb_closed_form: Option<f64>,
}

fn run(command: Command, cfg: &RunConfig) -> Result<Outcome, commands::CliError> {
    match command {
        Command::Solve => commands::solve(cfg),
        Command::Sweep => commands::sweep(cfg),
        Command::Game => commands::game(cfg),
        Command::Verify => commands::verify(cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = RunConfig::from_options(&cli.options)
        .map_err(commands::CliError::from)
        .and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
