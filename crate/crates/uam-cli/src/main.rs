use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use uam_cli::{cmd_compare, cmd_eval, cmd_print_config, cmd_train, FullConfig};
use uam_train::Mode;

/// Fleet-dispatch training and evaluation experiments.
#[derive(Parser)]
#[command(name = "uam", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file; unset keys take the reference defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> anyhow::Result<FullConfig> {
        match &self.config {
            Some(path) => FullConfig::load(path),
            None => {
                let config = FullConfig::default();
                config.validate()?;
                Ok(config)
            }
        }
    }
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<u64>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy over one or more seeds.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        /// Policy architecture: commnet or iql-dnn.
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        /// Comma-separated training seeds.
        #[arg(long, value_parser = parse_seeds, default_value = "1")]
        seeds: std::vec::Vec<u64>,
        /// Override trainer.episodes from the config.
        #[arg(long)]
        episodes: Option<u32>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a trained checkpoint greedily.
    Eval {
        #[command(flatten)]
        config: ConfigArgs,
        /// Checkpoint directory written by `train`.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Policy architecture stored in the checkpoint.
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        /// Evaluation episodes per seed.
        #[arg(long, default_value_t = 1)]
        episodes: u32,
        /// Comma-separated evaluation seeds.
        #[arg(long, value_parser = parse_seeds, default_value = "0")]
        seeds: std::vec::Vec<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and evaluate both modes on identical seeds and tabulate the
    /// differences.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated paired seeds.
        #[arg(long, value_parser = parse_seeds, default_value = "1,2,3,4,5")]
        seeds: std::vec::Vec<u64>,
        /// Override trainer.episodes from the config.
        #[arg(long)]
        episodes: Option<u32>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the effective default configuration as TOML.
    PrintConfig {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Train {
            config,
            mode,
            seeds,
            episodes,
            out,
        } => {
            let mut config = config.load()?;
            if let Some(episodes) = episodes {
                config.trainer.episodes = episodes;
            }
            config.validate()?;
            cmd_train(&config, mode, &seeds, &out)
        }
        Command::Eval {
            config,
            checkpoint,
            mode,
            episodes,
            seeds,
            out,
        } => {
            let config = config.load()?;
            cmd_eval(&config, &checkpoint, mode, episodes, &seeds, &out)
        }
        Command::Compare {
            config,
            seeds,
            episodes,
            out,
        } => {
            let mut config = config.load()?;
            if let Some(episodes) = episodes {
                config.trainer.episodes = episodes;
            }
            config.validate()?;
            cmd_compare(&config, &seeds, &out)
        }
        Command::PrintConfig { config } => {
            let config = config.load()?;
            print!("{}", cmd_print_config(&config));
            Ok(())
        }
    }
}
