//! `fiqsim` — reproducible experiment runner.
//!
//! Exit codes: 0 all verdicts pass, 1 some verdict failed, 2 config
//! error, 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use fiqsim_cli::config::{ConfigError, ExperimentConfig, OutputFormat, Scenario};
use fiqsim_cli::scenarios::run_experiment;

#[derive(Parser)]
#[command(
    name = "fiqsim",
    version,
    about = "Experiment runner for indeterministic classical mechanics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file (or scenario defaults).
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; optional when --scenario is given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario override: spread, wigner, einstein, entangle, chsh,
    /// noclone, hv-oracle.
    #[arg(long)]
    scenario: Option<String>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count override.
    #[arg(long)]
    trials: Option<u64>,
    /// Output path override.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(args) {
            Ok(all_pass) => {
                if all_pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(CliError::Config(e)) => {
                eprintln!("config error: {e}");
                ExitCode::from(2)
            }
            Err(CliError::Io { path, source }) => {
                eprintln!("i/o error writing {}: {source}", path.display());
                ExitCode::from(3)
            }
        },
    }
}

enum CliError {
    Config(ConfigError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

fn run(args: RunArgs) -> Result<bool, CliError> {
    let mut config = load_config(&args)?;
    if let Some(scenario) = &args.scenario {
        config.scenario = Scenario::from_str(scenario).map_err(CliError::Config)?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(output) = args.output {
        config.output_path = Some(output);
    }

    let (report, table) = run_experiment(&config)?;

    if let Some(path) = &config.output_path {
        let contents = match config.output_format {
            OutputFormat::Json => report.full_json(),
            OutputFormat::Csv => table.to_csv(),
        };
        std::fs::write(path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    println!("{}", report.full_json());
    Ok(report.body.pass)
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    match (&args.config, &args.scenario) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|source| {
                CliError::Config(ConfigError::Io {
                    path: path.clone(),
                    source,
                })
            })?;
            let config: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| CliError::Config(ConfigError::Parse(e)))?;
            Ok(config)
        }
        (None, Some(scenario)) => {
            let scenario = Scenario::from_str(scenario).map_err(CliError::Config)?;
            Ok(ExperimentConfig::with_defaults(scenario))
        }
        (None, None) => Err(CliError::Config(ConfigError::Invalid {
            violations: vec!["either --config or --scenario is required".to_owned()],
        })),
    }
}
