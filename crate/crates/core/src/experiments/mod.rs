//! Experiment runners, CSV output and SVG figures.
//!
//! Every runner is deterministic for a fixed [`ExperimentConfig`]: random
//! streams are derived from the config seed and a task address, parallel work
//! is collected in task order and reduced sequentially, so the CSV bytes do
//! not depend on the thread count.

mod config;
mod output;
mod plot;
mod runners;

use std::path::{Path, PathBuf};

pub use config::{resolve_config, ConfigOverrides, ErasureModel, Experiment, ExperimentConfig, DEFAULT_SEED};
pub use output::{csv_bytes, write_file, CsvTable, TOOL_NAME};
pub use plot::{emit_svg, PlotKind};
pub use runners::*;

use crate::error::Result;

/// Runs the experiment of `cfg` and renders the CSV.
pub fn run_to_csv(cfg: &ExperimentConfig) -> Result<Vec<u8>> {
    match cfg.experiment {
        Experiment::AndersonErasure => csv_bytes(cfg, &run_anderson_erasure(cfg)?),
        Experiment::MblErasure => csv_bytes(cfg, &run_mbl_erasure(cfg)?),
        Experiment::TbBands => csv_bytes(cfg, &run_tb_bands(cfg)?),
        Experiment::ErasureFactor => csv_bytes(cfg, &run_erasure_factor(cfg)?),
        Experiment::BellOracle => csv_bytes(cfg, &run_bell_oracle(cfg)?),
        Experiment::TwoParticle => csv_bytes(cfg, &run_two_particle(cfg)?),
    }
}

/// Default output file name, e.g. `tb-bands.csv`.
pub fn default_output(experiment: Experiment) -> PathBuf {
    PathBuf::from(format!("{experiment}.csv"))
}

/// Runs `cfg`, writes the CSV to `csv_path` and, if asked, an SVG next to it.
/// Returns the SVG path when one was written.
pub fn run_and_write(cfg: &ExperimentConfig, csv_path: &Path, svg: bool) -> Result<Option<PathBuf>> {
    let bytes = run_to_csv(cfg)?;
    write_file(csv_path, &bytes)?;
    if !svg {
        return Ok(None);
    }
    let svg_path = csv_path.with_extension("svg");
    emit_svg(csv_path, PlotKind::for_experiment(cfg.experiment), &svg_path)?;
    Ok(Some(svg_path))
}
