use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orbitcount::{exit, run, Command, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "orbitcount", version, about = "Phase-space proxies versus discrete spectra")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check the configuration, the algebra and the degeneracy gate.
    Validate(Common),
    /// Eigenvalue counts against orbit volumes.
    Count(Common),
    /// Heat traces against orbit integrals.
    Heat(Common),
    /// Orbit volumes only.
    Volume(Common),
    /// Weighted Sobolev ratios over a random ensemble.
    Sobolev(Common),
    /// Family sweep over the builtin parameter.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long = "ceiling-c")]
    ceiling_c: Option<f64>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INVALID_INPUT as u8 } else { 0 });
        }
    };
    let (command, common) = match cli.command {
        Sub::Validate(c) => (Command::Validate, c),
        Sub::Count(c) => (Command::Count, c),
        Sub::Heat(c) => (Command::Heat, c),
        Sub::Volume(c) => (Command::Volume, c),
        Sub::Sobolev(c) => (Command::Sobolev, c),
        Sub::Sweep(c) => (Command::Sweep, c),
    };
    let result = ExperimentConfig::load(&common.config).and_then(|mut cfg| {
        cfg.apply(&Overrides {
            seed: common.seed,
            out: common.out,
            samples: common.samples,
            ceiling_c: common.ceiling_c,
            workers: common.workers,
        });
        run(command, &cfg)
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
