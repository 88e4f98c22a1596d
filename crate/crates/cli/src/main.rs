mod commands;
mod config;
mod emit;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Preset, RunConfig};
use error::{CliError, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(name = "slitgrate", version, about = "Transmission spectra, resonances and Fano features of a two-slit grating")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (overrides [output].path)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace geometry, incidence, sweep and windows with a preset
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Worker threads
    #[arg(long, env = "SLITGRATE_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep |T| over [sweep] and write CSV (plus per-order JSON sidecar)
    Spectrum(Common),
    /// Refine both resonance branches for every mode in [resonance].m_list
    Resonances(Common),
    /// Classify the feature inside each [fano] window
    Fano(Common),
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match (&common.config, common.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(_)) => RunConfig::default(),
        (None, None) => return Err(CliError::Config("pass --config <path> or --preset".into())),
    };
    if let Some(p) = common.preset {
        cfg.apply_preset(p);
    }
    if let Some(out) = &common.out {
        cfg.output.path = Some(out.clone());
    }
    Ok(cfg)
}

type Job = fn(&RunConfig) -> Result<Vec<PathBuf>, CliError>;

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let (common, job): (&Common, Job) = match &cli.command {
        Command::Spectrum(c) => (c, commands::spectrum),
        Command::Resonances(c) => (c, commands::resonances),
        Command::Fano(c) => (c, commands::fano),
    };
    let cfg = load(common)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| job(&cfg))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("slitgrate: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
