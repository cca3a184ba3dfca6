use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qhlab::cli::{cmd_ensemble, cmd_evolve, cmd_gaussian, cmd_verify};
use qhlab::config::RunConfig;
use qhlab::ensemble::CandidateLaw;

/// 1D quantum hydrodynamics laboratory.
///
/// Exit codes: 0 ok, 1 check failure, 2 config error, 3 numerical abort.
#[derive(Parser)]
#[command(name = "qhlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to the JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the ensemble RNG seed from the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report failures but exit 0 (diagnostic mode)
    #[arg(long, global = true)]
    no_strict: bool,

    /// Candidate law(s) for the ensemble command
    #[arg(long, global = true, value_enum, default_value_t = LawChoice::Both)]
    law: LawChoice,

    /// Suppress progress output
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LawChoice {
    Nelson,
    Bohm,
    Both,
}

impl LawChoice {
    fn laws(self) -> Vec<CandidateLaw> {
        match self {
            LawChoice::Nelson => vec![CandidateLaw::NelsonDiffusion],
            LawChoice::Bohm => vec![CandidateLaw::BohmianDrift],
            LawChoice::Both => vec![
                CandidateLaw::NelsonDiffusion,
                CandidateLaw::BohmianDrift,
            ],
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured state and export snapshots + diagnostic fields
    Evolve,
    /// Run every verification check the preset supports
    Verify,
    /// Propagate candidate-law ensembles and emit law reports
    Ensemble,
    /// Dump the closed-form Gaussian fields (no solver run)
    Gaussian,
}

fn load_config(cli: &Cli) -> qhlab::Result<RunConfig> {
    let Some(path) = &cli.config else {
        return Err(qhlab::Error::config("--config", "a config file is required"));
    };
    let mut config = RunConfig::from_path(path)?;
    if let Some(seed) = cli.seed {
        config.ensemble.seed = seed;
    }
    Ok(config)
}

fn run(cli: &Cli) -> qhlab::Result<u8> {
    let config = load_config(cli)?;
    match cli.command {
        Command::Evolve => {
            cmd_evolve(&config, &cli.out, cli.quiet)?;
            Ok(0)
        }
        Command::Verify => {
            let report = cmd_verify(&config, &cli.out, cli.quiet)?;
            if report.all_passed || cli.no_strict {
                Ok(0)
            } else {
                eprintln!("verify: failed checks: {}", report.failed_names().join(", "));
                Ok(1)
            }
        }
        Command::Ensemble => {
            let reports = cmd_ensemble(&config, &cli.out, &cli.law.laws(), cli.quiet)?;
            let failed: Vec<String> = reports
                .iter()
                .flat_map(|r| {
                    r.properties
                        .iter()
                        .filter(|p| p.passed == Some(false))
                        .map(move |p| format!("{}/{}", r.law.name(), p.name))
                })
                .collect();
            if failed.is_empty() || cli.no_strict {
                Ok(0)
            } else {
                eprintln!("ensemble: failed properties: {}", failed.join(", "));
                Ok(1)
            }
        }
        Command::Gaussian => {
            cmd_gaussian(&config, &cli.out, cli.quiet)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
