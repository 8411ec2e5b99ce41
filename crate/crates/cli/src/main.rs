use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rumorgame::SelectionRule;
use rumorgame_cli::config::{parse_config, ExperimentKind};
use rumorgame_cli::{describe_profile, parse_matrix, read_file, run, run_replications, solve_matrix, CliError};

#[derive(Parser)]
#[command(name = "rumorgame", version, about = "Information dissemination game experiments")]
struct Cli {
    /// Overrides the seed given in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a bimatrix game given as JSON.
    Solve {
        #[arg(long)]
        matrix: PathBuf,
        /// Pick the first equilibrium in enumeration order instead of the
        /// welfare-maximal one.
        #[arg(long)]
        first: bool,
    },
    /// Simulate information dissemination in a population.
    Disseminate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Independent runs with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        replications: usize,
    },
    /// Grow a friendship network by pruning unprofitable edges.
    Emerge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        replications: usize,
    },
}

fn experiment(
    kind: ExperimentKind,
    config: &Path,
    out: &Path,
    replications: usize,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let mut cfg = parse_config(&read_file(config)?, kind)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if replications > 1 {
        for (i, line) in run_replications(&cfg, out, replications)?.iter().enumerate() {
            println!("rep_{i}: {line}");
        }
    } else {
        println!("{}", run(&cfg, out)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RUMORGAME_LOG")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { matrix, first } => read_file(matrix)
            .and_then(|text| parse_matrix(&text))
            .and_then(|m| {
                let rule = if *first {
                    SelectionRule::First
                } else {
                    SelectionRule::Welfare
                };
                solve_matrix(&m, rule)
            })
            .map(|report| {
                for p in &report.equilibria {
                    println!("equilibrium: {}", describe_profile(p));
                }
                println!("selected: {}", describe_profile(&report.selected));
            }),
        Command::Disseminate {
            config,
            out,
            replications,
        } => experiment(ExperimentKind::Disseminate, config, out, *replications, cli.seed),
        Command::Emerge {
            config,
            out,
            replications,
        } => experiment(ExperimentKind::Emerge, config, out, *replications, cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
