use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffheat_core::config::{self, ModeSelection, RunConfig, SolverSelection};
use ffheat_core::experiment::run_experiment;
use ffheat_core::Error;

const DEFAULT_OUTPUT_DIR: &str = "ffheat-out";

/// Heat equation on an expanding box with a fast-forward driving protocol.
#[derive(Parser)]
#[command(name = "ffheat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write profile/flux CSVs plus a manifest.
    Run(RunArgs),
    /// Parse and validate a config, printing the resolved values.
    Validate(Source),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Path to a key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset.
    #[arg(long, value_parser = ["fig1", "fig2", "fig3"])]
    preset: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory (falls back to FFHEAT_OUTPUT_DIR).
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    mode: Option<ModeSelection>,
    #[arg(long)]
    solver: Option<SolverSelection>,
}

fn load(source: &Source) -> Result<RunConfig, Error> {
    match (&source.config, &source.preset) {
        (Some(path), _) => config::load_config(path),
        (None, Some(name)) => config::preset(name),
        (None, None) => unreachable!("clap enforces one source"),
    }
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config_error() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Validate(source) => match load(&source) {
            Ok(cfg) => {
                for line in cfg.resolved_lines() {
                    println!("{line}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("ffheat: {e}");
                ExitCode::from(1)
            }
        },
        Command::Run(args) => {
            let mut cfg = match load(&args.source) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("ffheat: {e}");
                    return ExitCode::from(1);
                }
            };
            if let Some(mode) = args.mode {
                cfg.set_mode(mode);
            }
            if let Some(solver) = args.solver {
                cfg.set_solver(solver);
            }
            let out = args
                .output_dir
                .or_else(|| cfg.output.dir.clone())
                .or_else(|| std::env::var_os("FFHEAT_OUTPUT_DIR").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
            cfg.set_output_dir(out.clone());
            match run_experiment(&cfg, &out) {
                Ok(summary) => {
                    for f in &summary.files {
                        println!("{}", f.display());
                    }
                    println!("{}", out.join("manifest.txt").display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("ffheat: {e}");
                    exit_code(&e)
                }
            }
        }
    }
}
