#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use anyhow::Result;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use config::ExperimentConfig;
use output::{sha256_hex, Manifest, Output, Versions};

/// Chebyshev–Padé approximants, equilibrium problems and convergence checks.
#[derive(Parser)]
#[command(name = "chebpade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` of the config.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Working precision in bits, overriding the config.
    #[arg(long, global = true)]
    precision: Option<u32>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Chebyshev coefficients of the function.
    Coeffs,
    /// Rational approximants for the configured types.
    Approx,
    /// Equilibrium measures for the configured θ values.
    Equilibrium,
    /// Stationary compact search.
    Scompact,
    /// Rate and pole checks; exit status 1 if a check fails.
    Verify,
    /// Pole distributions against the balayage.
    Poles,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Approx => "approx",
            Command::Equilibrium => "equilibrium",
            Command::Scompact => "scompact",
            Command::Verify => "verify",
            Command::Poles => "poles",
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use chebpade::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::UnsupportedFamily(_)
                | E::Parse(_)
                | E::InvalidFunction(_)
                | E::InvalidCompact(_)
                | E::Truncation { .. }
                | E::Json(_) => 2,
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn run(cli: &Cli) -> Result<bool> {
    let Some(config_path) = &cli.config else {
        anyhow::bail!(chebpade::Error::Parse("--config PATH is required".into()));
    };
    let (mut cfg, text) = ExperimentConfig::load(config_path)?;
    if let Some(p) = cli.precision {
        cfg.precision_bits = p;
        cfg.harness.precision_bits = p;
        cfg.validate()?;
    }
    let base = config_path.parent().unwrap_or(Path::new("."));
    let dir = match &cli.output {
        Some(d) => d.clone(),
        None => base.join(&cfg.output_dir),
    };
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    let start = Instant::now();
    let mut out = Output::create(&dir)?;
    let pass = match cli.command {
        Command::Coeffs => commands::coeffs(&cfg, &mut out).map(|_| true),
        Command::Approx => commands::approx(&cfg, base, &mut out).map(|_| true),
        Command::Equilibrium => commands::equilibrium(&cfg, &mut out).map(|_| true),
        Command::Scompact => commands::scompact(&cfg, &mut out).map(|_| true),
        Command::Verify => commands::verify(&cfg, &mut out),
        Command::Poles => commands::poles(&cfg, &mut out).map(|_| true),
    }?;
    let files = out.files().to_vec();
    out.finish(Manifest {
        command: cli.command.name(),
        config_path: config_path.display().to_string(),
        config_sha256: sha256_hex(text.as_bytes()),
        precision_bits: cfg.precision_bits,
        versions: Versions::current(),
        files: &files,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
