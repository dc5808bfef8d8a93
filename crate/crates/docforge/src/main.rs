//! Thin CLI over the docforge pipeline. All logic lives in the library;
//! this binary only parses arguments, loads/overrides the config, runs one
//! command, prints its summary lines, and exits with its code.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use docforge::pipeline::{
    cmd_build_dataset, cmd_evaluate, cmd_extract, cmd_filter_repos, cmd_generate,
    cmd_sample_size, CommandOutcome,
};
use docforge::PipelineConfig;

#[derive(Parser)]
#[command(name = "docforge", version, about = "Mine Python corpora and compose parameter docstrings")]
struct Cli {
    /// TOML config file; the flags below override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// RNG seed for balancing and splitting.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for artifacts and manifests.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Root of the Python corpus to scan.
    #[arg(long, global = true, value_name = "DIR")]
    corpus_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the inclusion/exclusion criteria to repository metadata.
    FilterRepos {
        /// JSONL file, one repository metadata object per line.
        metadata: PathBuf,
    },
    /// Extract documented functions from every `.py` file in the corpus.
    Extract,
    /// Build the Formatted, Exploded, and PN datasets from extracted functions.
    BuildDataset {
        /// functions.jsonl produced by `extract`.
        functions: PathBuf,
    },
    /// Compose one docstring per function via directives.
    Generate {
        /// functions.jsonl produced by `extract`.
        functions: PathBuf,
        /// Install the composed docstrings into the corpus sources in place.
        #[arg(long)]
        rewrite: bool,
    },
    /// Score candidate docstrings (or labels) against references.
    Evaluate {
        /// JSONL of {"id", "text"} or {"id", "label"} lines.
        candidates: PathBuf,
        /// JSONL with the same ids.
        references: PathBuf,
    },
    /// Finite-population sample size for an annotation study.
    SampleSize {
        population: u64,
        /// Confidence level: 0.90, 0.95, or 0.99.
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Margin of error, strictly between 0 and 1.
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
    },
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Box<dyn std::error::Error>> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => {
            let mut config = PipelineConfig::default();
            config.apply_env_overrides();
            config
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(workers) = cli.workers {
        config.workers = Some(workers);
    }
    if let Some(dir) = &cli.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(root) = &cli.corpus_root {
        config.corpus_root = root.clone();
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    if let Command::SampleSize {
        population,
        confidence,
        margin,
    } = cli.command
    {
        println!("{}", cmd_sample_size(population, confidence, margin)?);
        return Ok(ExitCode::SUCCESS);
    }

    let config = load_config(&cli)?;
    let outcome: CommandOutcome = match &cli.command {
        Command::FilterRepos { metadata } => cmd_filter_repos(metadata, &config)?,
        Command::Extract => cmd_extract(&config)?,
        Command::BuildDataset { functions } => cmd_build_dataset(functions, &config)?,
        Command::Generate { functions, rewrite } => cmd_generate(functions, &config, *rewrite)?,
        Command::Evaluate {
            candidates,
            references,
        } => cmd_evaluate(candidates, references, &config)?,
        Command::SampleSize { .. } => unreachable!("handled above"),
    };
    for line in &outcome.lines {
        println!("{line}");
    }
    Ok(ExitCode::from(outcome.exit_code.clamp(0, 255) as u8))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(2)
        }
    }
}
