//! `gaplab` command-line front end.
//!
//! Exit codes: 0 when every criterion passes, 1 when a criterion fails,
//! 2 on configuration or solver errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use gaplab::lab::{preset, run, write_artifacts, LabConfig, RunOutcome, PRESETS};
use gaplab::Execution;

#[derive(Parser)]
#[command(name = "gaplab", version, about = "Narrow-gap conductivity laboratory")]
struct Cli {
    /// Output root; artifacts go to `<out>/<run-id>/`.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Run sweep points on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration file.
    Run { config: PathBuf },
    /// Run the matrix property suite.
    MatrixCheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Print a built-in configuration, or run it with `--run`.
    Preset {
        /// Preset name; omit to list all presets.
        name: Option<String>,
        #[arg(long)]
        run: bool,
    },
}

fn execute(cfg: &LabConfig, cli: &Cli) -> anyhow::Result<RunOutcome> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let outcome = run(cfg, exec).with_context(|| format!("run `{}` failed", cfg.run_id()))?;
    let dir = cli.out.join(&outcome.run_id);
    write_artifacts(&outcome, &dir).with_context(|| format!("writing artifacts to {}", dir.display()))?;
    print!("{}", outcome.summary());
    println!("artifacts: {}", dir.display());
    Ok(outcome)
}

fn dispatch(cli: &Cli) -> anyhow::Result<Option<RunOutcome>> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = LabConfig::from_file(config).with_context(|| format!("loading {}", config.display()))?;
            execute(&cfg, cli).map(Some)
        }
        Command::MatrixCheck { seed } => {
            let mut cfg = preset("matrix-check").expect("built-in preset");
            cfg.sweep.seed = *seed;
            execute(&cfg, cli).map(Some)
        }
        Command::Preset { name: None, .. } => {
            for p in PRESETS {
                println!("{p}");
            }
            Ok(None)
        }
        Command::Preset { name: Some(name), run } => {
            let cfg = preset(name).ok_or_else(|| anyhow!("unknown preset `{name}`; known: {}", PRESETS.join(", ")))?;
            if *run {
                execute(&cfg, cli).map(Some)
            } else {
                println!("{}", cfg.to_json());
                Ok(None)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Some(outcome)) if !outcome.passed() => {
            for c in outcome.criteria().filter(|c| !c.passed) {
                eprintln!("{}", c.line());
            }
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
