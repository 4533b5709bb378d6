//! `sepsolve`: run the series solver and its validation suites from a JSON
//! configuration. Exit codes: 0 success, 1 validation failure, 2 bad
//! configuration or I/O, 3 solver diagnosed divergence.

mod commands;
mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "sepsolve", version, about = "Series solver for planar elliptic systems")]
struct Args {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the configured one.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Suppress progress lines on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(outcome) => {
            if !args.quiet {
                for line in &outcome.lines {
                    println!("{line}");
                }
            }
            ExitCode::from(outcome.exit)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> Result<commands::Outcome, String> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("reading {}: {e}", args.config.display()))?;
    let cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", args.config.display()))?;
    let out_dir = args
        .output
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .ok_or("no output directory: set output_dir in the config or pass --output")?;
    fs::create_dir_all(&out_dir)
        .map_err(|e| format!("creating {}: {e}", out_dir.display()))?;
    commands::run(&cfg, &out_dir)
}
