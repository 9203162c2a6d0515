use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cxlab::error::ErrorClass;
use cxlab_cli::presets::PRESETS;
use cxlab_cli::{exit, run, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(
    name = "cxlab",
    version,
    about = "Volumes, growth and limits of complex curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run {
        config: PathBuf,
        /// Output directory (default: out/<config name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Replace the config's `budget` parameter.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Print the preset catalog.
    ListPresets {
        #[arg(long)]
        json: bool,
    },
}

/// LAB_THREADS caps the worker pool; results do not depend on it.
fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("LAB_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn list(json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(PRESETS).expect("presets serialize")
        );
        return;
    }
    for p in PRESETS {
        let flag = if p.non_algebraic {
            "  [non-algebraic]"
        } else {
            ""
        };
        println!(
            "{:<24} {:<10} {}{flag}",
            p.name,
            format!("{:?}", p.category).to_lowercase(),
            p.definition
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(exit::INPUT as u8);
    }
    let code = match cli.command {
        Command::ListPresets { json } => {
            list(json);
            exit::OK
        }
        Command::Run {
            config,
            out,
            seed,
            budget,
        } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(exit::IO as u8);
                }
            };
            let mut cfg = match text.parse::<ExperimentConfig>() {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::from(exit::INPUT as u8);
                }
            };
            if seed.is_some() {
                cfg.experiment.seed = seed;
            }
            if budget.is_some() {
                if !cfg.experiment.kind.params().contains(&"budget") {
                    eprintln!("error: kind {} has no budget", cfg.experiment.kind);
                    return ExitCode::from(exit::INPUT as u8);
                }
                cfg.params.budget = budget;
            }
            let dir = out
                .or_else(|| cfg.experiment.out.clone())
                .unwrap_or_else(|| {
                    PathBuf::from("out").join(config.file_stem().unwrap_or_default())
                });
            match run(&cfg, &dir) {
                Ok(o) => {
                    println!("wrote {}", dir.display());
                    match o.inconclusive {
                        Some(why) => {
                            eprintln!("inconclusive: {why}");
                            exit::INCONCLUSIVE
                        }
                        None => exit::OK,
                    }
                }
                Err(RunError::Lab(e)) => {
                    eprintln!("error: {e}");
                    match e.class() {
                        ErrorClass::Input => exit::INPUT,
                        ErrorClass::Numerical => exit::NUMERICAL,
                        ErrorClass::Inconclusive => exit::INCONCLUSIVE,
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit::IO
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
