mod analyze;
mod classify;
mod common;
mod correlate;
mod economics;
mod simulate;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Cryptojacking analysis toolkit.
#[derive(Parser)]
#[command(name = "cryptolab", version, about)]
struct Cli {
    /// Worker threads for parallel steps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the 17 static features from a script corpus.
    Analyze(analyze::Args),
    /// Per-class correlation matrices and selected features.
    Correlate(correlate::Args),
    /// Evaluate the classifiers with repeated stratified holdout.
    Classify(classify::Args),
    /// Run a mining/detection scenario.
    Simulate(simulate::Args),
    /// Profit, loss and revenue estimates.
    #[command(subcommand)]
    Economics(economics::Command),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("cannot size thread pool: {e}");
        }
    }
    let result = match cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Correlate(a) => correlate::run(a),
        Command::Classify(a) => classify::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Economics(c) => economics::run(c),
    };
    match result {
        Ok(summary) => {
            if summary.report_on_stdout {
                eprintln!("{summary}");
            } else {
                let _ = writeln!(std::io::stdout(), "{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
