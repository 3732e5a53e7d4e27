use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use synthgt::render::Modality;
use synthgt_cli::config::{JobConfig, OutputFormat, Overrides};
use synthgt_cli::{cmd_generate, cmd_replay, cmd_serve};

#[derive(Parser)]
#[command(name = "synthgt", version, about = "Synthetic ground-truth image generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scripted sequence and write images, sidecars and a sequence log.
    Generate(JobArgs),
    /// Re-render the frames of a sequence log.
    Replay {
        /// Sequence log written by `generate` or `save_log`.
        #[arg(long)]
        log: PathBuf,
        #[command(flatten)]
        job: JobArgs,
    },
    /// Serve the text command protocol over TCP.
    Serve {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        port: Option<u16>,
    },
}

#[derive(Args)]
struct JobArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    frames: Option<u64>,
    /// Comma-separated, e.g. `rgb,depth,instance`.
    #[arg(long, value_delimiter = ',')]
    modalities: Option<Vec<Modality>>,
    /// `png` or `pfm`.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "png" => Ok(OutputFormat::Png),
        "pfm" => Ok(OutputFormat::Pfm),
        _ => Err(format!("expected png or pfm, got {s:?}")),
    }
}

impl JobArgs {
    fn into_config(self) -> Result<JobConfig> {
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                bail!("--epsilon must be > 0");
            }
        }
        JobConfig::load(
            self.config.as_deref(),
            Overrides {
                scene: self.scene,
                out: self.out,
                frames: self.frames,
                modalities: self.modalities,
                format: self.format,
                epsilon: self.epsilon,
                seed: self.seed,
                port: None,
            },
        )
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(job) => {
            let s = cmd_generate(&job.into_config()?)?;
            eprintln!("wrote {} frames, {} files", s.frames.len(), s.files);
        }
        Command::Replay { log, job } => {
            let s = cmd_replay(&job.into_config()?, &log)?;
            eprintln!("replayed {} frames, {} files", s.frames.len(), s.files);
        }
        Command::Serve { scene, host, port } => {
            cmd_serve(&scene, &host, port, |addr| eprintln!("listening on {addr}"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
