use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mrflab::commands::{cmd_check, cmd_response, cmd_sample, output_dir, Options};
use mrflab::config::{ExperimentConfig, CONFIG_VERSION};
use mrflab::presets::preset;
use mrflab::CliError;

#[derive(Parser)]
#[command(
    name = "mrflab",
    version,
    about = "Sample and profile Markov random fields on lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw configurations for every run and write one row per site.
    Sample(Common),
    /// Estimate response functions over the study grid.
    Response(Common),
    /// Estimate prior predictive response functions over the study grid.
    PriorResponse(Common),
    /// Compare samplers and gradients against exact enumeration.
    Check(Common),
    /// Run a figure study from its preset.
    Reproduce {
        figure: Figure,
        #[arg(long, value_enum, default_value_t = Scale::Paper)]
        scale: Scale,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON), or a manifest from an earlier run.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset: fig2, fig2-desk, fig4, fig4-desk.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, env = "MRFLAB_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig2,
    Fig4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Paper,
    Desk,
}

fn resolve(common: &Common, allow_empty: bool) -> Result<(ExperimentConfig, Options), CliError> {
    let mut config = match (&common.config, &common.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) if allow_empty => ExperimentConfig {
            version: CONFIG_VERSION,
            seed: 2024,
            runs: Vec::new(),
            study: None,
            sample: None,
            check: None,
            output: None,
        },
        (None, None) => return Err(CliError::Validation("pass --config <path> or --preset <name>".into())),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if common.workers == 0 {
        return Err(CliError::Validation("--workers must be at least 1".into()));
    }
    let out = output_dir(common.out.as_deref(), &config);
    Ok((
        config,
        Options {
            workers: common.workers,
            out,
        },
    ))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(c) => {
            let (config, opts) = resolve(&c, false)?;
            cmd_sample(&config, &opts)
        }
        Command::Response(c) => {
            let (config, opts) = resolve(&c, false)?;
            cmd_response(&config, &opts, false)
        }
        Command::PriorResponse(c) => {
            let (config, opts) = resolve(&c, false)?;
            cmd_response(&config, &opts, true)
        }
        Command::Check(c) => {
            let (config, opts) = resolve(&c, true)?;
            cmd_check(&config, &opts).map(|_| ())
        }
        Command::Reproduce {
            figure,
            scale,
            mut common,
        } => {
            if common.config.is_some() || common.preset.is_some() {
                return Err(CliError::Validation(
                    "reproduce picks its own preset; drop --config/--preset".into(),
                ));
            }
            let name = match (figure, scale) {
                (Figure::Fig2, Scale::Paper) => "fig2",
                (Figure::Fig2, Scale::Desk) => "fig2-desk",
                (Figure::Fig4, Scale::Paper) => "fig4",
                (Figure::Fig4, Scale::Desk) => "fig4-desk",
            };
            common.preset = Some(name.into());
            let (config, opts) = resolve(&common, false)?;
            cmd_response(&config, &opts, matches!(figure, Figure::Fig4))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mrflab: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
