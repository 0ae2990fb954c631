use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use eeps_core::experiments::{
    default_output, resolve_config, run_and_write, ConfigOverrides, ErasureModel, Experiment,
};
use eeps_core::many_body::DESK_SCALE_SITES;

/// Environment variable read for the worker count when `--threads` is absent.
const THREADS_ENV: &str = "EEPS_THREADS";

/// Entanglement erasure experiments for free and interacting fermion chains.
#[derive(Debug, Parser)]
#[command(name = "eeps", version)]
struct Cli {
    /// anderson-erasure | mbl-erasure | tb-bands | erasure-factor | bell-oracle | two-particle
    #[arg(value_parser = parse_experiment)]
    experiment: Experiment,

    /// System sizes, comma separated.
    #[arg(long = "L", value_delimiter = ',')]
    sites: Option<Vec<usize>>,

    /// Particle numbers, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    particles: Option<Vec<usize>>,

    /// Occupation ratios N/L, comma separated.
    #[arg(long, value_delimiter = ',')]
    filling: Option<Vec<f64>>,

    /// Disorder strengths W in units of t, comma separated.
    #[arg(long = "W", value_delimiter = ',')]
    disorder: Option<Vec<f64>>,

    /// Nearest-neighbour interaction V.
    #[arg(long = "V")]
    interaction: Option<f64>,

    /// Staggered potential strength.
    #[arg(long)]
    mu: Option<f64>,

    /// Central-site coupling A.
    #[arg(long)]
    coupling: Option<f64>,

    /// Erasure-factor models, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    models: Option<Vec<ErasureModel>>,

    /// Tight-binding momentum separations n, comma separated.
    #[arg(long, value_delimiter = ',')]
    bands: Option<Vec<usize>>,

    #[arg(long)]
    realizations: Option<usize>,

    #[arg(long)]
    samples: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path [default: <experiment>.csv].
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write an SVG figure next to the CSV.
    #[arg(long)]
    svg: bool,

    /// TOML file with default parameters.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Worker threads [default: $EEPS_THREADS, else all cores].
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: eeps_core::Error| e.to_string())
}

fn parse_model(s: &str) -> Result<ErasureModel, String> {
    s.parse().map_err(|e: eeps_core::Error| e.to_string())
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, String> {
    if let Some(k) = flag {
        return Ok(Some(k));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got `{v}`")),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), String> {
    if let Some(k) = thread_count(cli.threads)? {
        if k == 0 {
            return Err("thread count must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| e.to_string())?;
    }

    let file = cli
        .config
        .as_deref()
        .map(ConfigOverrides::from_file)
        .transpose()
        .map_err(|e| e.to_string())?;
    let overrides = ConfigOverrides {
        experiment: None,
        sites: cli.sites,
        particles: cli.particles,
        filling: cli.filling,
        disorder: cli.disorder,
        interaction: cli.interaction,
        mu: cli.mu,
        coupling: cli.coupling,
        models: cli.models,
        bands: cli.bands,
        realizations: cli.realizations,
        samples: cli.samples,
        seed: cli.seed,
        output: None,
        svg: None,
    };
    let cfg = resolve_config(cli.experiment, file.as_ref(), &overrides).map_err(|e| e.to_string())?;

    if cfg.experiment == Experiment::MblErasure {
        if let Some(&l) = cfg.sites.iter().find(|&&l| l > DESK_SCALE_SITES) {
            eprintln!("warning: L = {l} exceeds {DESK_SCALE_SITES}; dense diagonalization will be slow");
        }
    }

    let out = cli
        .out
        .or_else(|| file.as_ref().and_then(|f| f.output.clone()))
        .unwrap_or_else(|| default_output(cfg.experiment));
    let svg = cli.svg || file.as_ref().and_then(|f| f.svg).unwrap_or(false);

    let svg_path = run_and_write(&cfg, &out, svg).map_err(|e| e.to_string())?;
    eprintln!("wrote {}", out.display());
    if let Some(p) = svg_path {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
