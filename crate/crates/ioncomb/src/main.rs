//! Command-line front end: validate configs, run experiments, run presets.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ioncomb::config::{preset, validate_config, OutputFormat, PRESET_NAMES};
use ioncomb::runner::{run_to_files, RunOptions};
use ioncomb::SimError;

#[derive(Parser)]
#[command(name = "ioncomb", version, about = "Frequency-comb trapped-ion qubit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunFlags {
    /// Override the output path from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the output format from the config.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Worker threads for scan parallelism (0 = all cores).
    #[arg(long, env = "IONCOMB_THREADS", default_value_t = 0)]
    threads: usize,
    /// Force the exact propagator in spectrum scans.
    #[arg(long)]
    exact: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run an experiment from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a bundled preset, or print its config with --dump.
    Preset {
        /// One of the bundled preset names; use --list to see them.
        name: Option<String>,
        /// List available presets and exit.
        #[arg(long)]
        list: bool,
        /// Print the preset TOML instead of running it.
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        flags: RunFlags,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format {other:?}; use csv or json")),
    }
}

fn exit_code_for(err: &SimError) -> ExitCode {
    match err {
        SimError::CutoffTooSmall { .. } => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn configure_threads(threads: usize) {
    if threads > 0 {
        // ignore failure: the global pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn run(raw: &str, flags: &RunFlags) -> ExitCode {
    configure_threads(flags.threads);
    let opts = RunOptions {
        exact: flags.exact,
        out_override: flags.out.clone(),
        format_override: flags.format,
    };
    match run_to_files(raw, &opts) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn read_config(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Validate { config } => {
            let raw = match read_config(&config) {
                Ok(r) => r,
                Err(code) => return code,
            };
            match validate_config(&raw) {
                Ok(cfg) => {
                    println!("ok: task = {}", cfg.task.as_str());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Run { config, flags } => {
            let raw = match read_config(&config) {
                Ok(r) => r,
                Err(code) => return code,
            };
            run(&raw, &flags)
        }
        Command::Preset { name, list, dump, flags } => {
            if list {
                for n in PRESET_NAMES {
                    println!("{n}");
                }
                return ExitCode::SUCCESS;
            }
            let Some(name) = name else {
                eprintln!("error: preset name required (or --list)");
                return ExitCode::from(2);
            };
            let Some(text) = preset(&name) else {
                eprintln!(
                    "error: unknown preset {name:?}; available: {}",
                    PRESET_NAMES.join(", ")
                );
                return ExitCode::from(2);
            };
            if dump {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
            run(text, &flags)
        }
    }
}
