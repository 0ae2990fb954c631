use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    AndersonErasure,
    MblErasure,
    TbBands,
    ErasureFactor,
    BellOracle,
    TwoParticle,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::AndersonErasure,
        Experiment::MblErasure,
        Experiment::TbBands,
        Experiment::ErasureFactor,
        Experiment::BellOracle,
        Experiment::TwoParticle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::AndersonErasure => "anderson-erasure",
            Experiment::MblErasure => "mbl-erasure",
            Experiment::TbBands => "tb-bands",
            Experiment::ErasureFactor => "erasure-factor",
            Experiment::BellOracle => "bell-oracle",
            Experiment::TwoParticle => "two-particle",
        }
    }

    /// Stable tag mixed into every seed of the experiment.
    pub(crate) fn seed_tag(self) -> u64 {
        match self {
            Experiment::AndersonErasure => 1,
            Experiment::MblErasure => 2,
            Experiment::TbBands => 3,
            Experiment::ErasureFactor => 4,
            Experiment::BellOracle => 5,
            Experiment::TwoParticle => 6,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Single-particle models of the erasure-factor sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErasureModel {
    Anderson,
    TightBinding,
    Staggered,
    CentralSite,
    Bell,
}

impl ErasureModel {
    pub const ALL: [ErasureModel; 5] = [
        ErasureModel::Anderson,
        ErasureModel::TightBinding,
        ErasureModel::Staggered,
        ErasureModel::CentralSite,
        ErasureModel::Bell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErasureModel::Anderson => "anderson",
            ErasureModel::TightBinding => "tight-binding",
            ErasureModel::Staggered => "staggered",
            ErasureModel::CentralSite => "central-site",
            ErasureModel::Bell => "bell",
        }
    }

    pub fn is_disordered(self) -> bool {
        matches!(self, ErasureModel::Anderson | ErasureModel::CentralSite)
    }

    pub(crate) fn seed_tag(self) -> u64 {
        match self {
            ErasureModel::Anderson => 1,
            ErasureModel::TightBinding => 2,
            ErasureModel::Staggered => 3,
            ErasureModel::CentralSite => 4,
            ErasureModel::Bell => 5,
        }
    }
}

impl fmt::Display for ErasureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErasureModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ErasureModel::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model `{s}`")))
    }
}

/// Effective parameters of one experiment run.
///
/// Energies are in units of the hopping `t = 1`. `disorder` lists the box
/// widths `W` of the potential `h_i in [-W, W]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// System sizes `L`.
    pub sites: Vec<usize>,
    /// Particle numbers `N`; empty means every even `N <= L` where that makes sense.
    pub particles: Vec<usize>,
    /// Occupation ratios `N/L`.
    pub filling: Vec<f64>,
    pub disorder: Vec<f64>,
    /// Nearest-neighbour interaction `V`.
    pub interaction: f64,
    /// Staggered potential strength.
    pub mu: f64,
    /// Central-site coupling `A`.
    pub coupling: f64,
    pub models: Vec<ErasureModel>,
    /// Momentum separations `n` of the tight-binding pairs.
    pub bands: Vec<usize>,
    pub realizations: usize,
    pub samples: usize,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            sites: vec![],
            particles: vec![],
            filling: vec![],
            disorder: vec![],
            interaction: 0.0,
            mu: 1.0,
            coupling: 1.0,
            models: vec![],
            bands: vec![],
            realizations: 1,
            samples: 1,
            seed: DEFAULT_SEED,
        };
        match experiment {
            Experiment::AndersonErasure => Self {
                sites: vec![4096],
                particles: (0..=32).step_by(2).collect(),
                disorder: vec![2.0, 4.0, 8.0],
                realizations: 20,
                ..base
            },
            Experiment::MblErasure => Self {
                sites: vec![12],
                particles: vec![2, 4, 6],
                disorder: vec![2.0, 16.0],
                interaction: 2.0,
                realizations: 100,
                ..base
            },
            Experiment::TbBands => Self {
                sites: vec![4096],
                bands: (1..=9).collect(),
                ..base
            },
            Experiment::ErasureFactor => Self {
                sites: vec![128, 256, 512, 1024],
                filling: vec![0.25, 0.5, 0.75],
                disorder: vec![2.0],
                models: ErasureModel::ALL.to_vec(),
                realizations: 8,
                samples: 32,
                ..base
            },
            Experiment::BellOracle => Self {
                sites: vec![4, 8, 12, 16, 20],
                samples: 10_000,
                ..base
            },
            Experiment::TwoParticle => Self {
                sites: vec![8, 16, 64],
                samples: 1000,
                ..base
            },
        }
    }

    /// Applies `overrides` on top of `self`.
    pub fn apply(&mut self, overrides: &ConfigOverrides) -> Result<()> {
        if let Some(e) = overrides.experiment {
            if e != self.experiment {
                return Err(Error::Config(format!(
                    "config file is for `{e}`, but `{}` was requested",
                    self.experiment
                )));
            }
        }
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &overrides.$field {
                    self.$field = v.clone();
                })*
            };
        }
        take!(sites, particles, filling, disorder, interaction, mu, coupling, models, bands, realizations, samples, seed);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites.is_empty() {
            return Err(Error::Config("at least one system size is required".into()));
        }
        if self.sites.contains(&0) {
            return Err(Error::Config("system sizes must be positive".into()));
        }
        if self.realizations == 0 || self.samples == 0 {
            return Err(Error::Config("realizations and samples must be positive".into()));
        }
        if let Some(f) = self.filling.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(Error::Config(format!("filling must lie in (0, 1], got {f}")));
        }
        if let Some(w) = self.disorder.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Config(format!("disorder must be finite and non-negative, got {w}")));
        }
        if ![self.interaction, self.mu, self.coupling].iter().all(|x| x.is_finite()) {
            return Err(Error::Config("interaction, mu and coupling must be finite".into()));
        }
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("{} needs {what}", self.experiment)))
            }
        };
        match self.experiment {
            Experiment::AndersonErasure => {
                need(!self.disorder.is_empty(), "at least one disorder strength")?;
                need(!self.particles.is_empty(), "at least one particle number")
            }
            Experiment::MblErasure => {
                need(!self.disorder.is_empty(), "at least one disorder strength")?;
                need(!self.particles.is_empty(), "at least one particle number")
            }
            Experiment::TbBands => need(!self.bands.is_empty(), "at least one band separation"),
            Experiment::ErasureFactor => {
                need(!self.models.is_empty(), "at least one model")?;
                need(!self.filling.is_empty(), "at least one filling")?;
                let mut distinct = self.sites.clone();
                distinct.sort_unstable();
                distinct.dedup();
                need(distinct.len() >= 3, "at least 3 distinct system sizes for the extrapolation")?;
                let disordered = self.models.iter().any(|m| m.is_disordered());
                need(!disordered || !self.disorder.is_empty(), "a disorder strength")
            }
            Experiment::BellOracle | Experiment::TwoParticle => Ok(()),
        }
    }

    /// One-line rendering of every parameter, for CSV metadata.
    pub fn describe(&self) -> String {
        let list = |v: &[String]| format!("[{}]", v.join(","));
        let ints = |v: &[usize]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        let floats = |v: &[f64]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        format!(
            "experiment={} sites={} particles={} filling={} disorder={} interaction={} mu={} coupling={} models={} bands={} realizations={} samples={} seed={}",
            self.experiment,
            ints(&self.sites),
            ints(&self.particles),
            floats(&self.filling),
            floats(&self.disorder),
            self.interaction,
            self.mu,
            self.coupling,
            list(&self.models.iter().map(|m| m.to_string()).collect::<Vec<_>>()),
            ints(&self.bands),
            self.realizations,
            self.samples,
            self.seed,
        )
    }
}

/// Optional values from a TOML config file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<Experiment>,
    pub sites: Option<Vec<usize>>,
    pub particles: Option<Vec<usize>>,
    pub filling: Option<Vec<f64>>,
    pub disorder: Option<Vec<f64>>,
    pub interaction: Option<f64>,
    pub mu: Option<f64>,
    pub coupling: Option<f64>,
    pub models: Option<Vec<ErasureModel>>,
    pub bands: Option<Vec<usize>>,
    pub realizations: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub svg: Option<bool>,
}

impl ConfigOverrides {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bad config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("bad config file {}: {e}", path.display())))
    }
}

/// Defaults, then the config file, then the command line.
pub fn resolve_config(
    experiment: Experiment,
    file: Option<&ConfigOverrides>,
    cli: &ConfigOverrides,
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    if let Some(file) = file {
        cfg.apply(file)?;
    }
    cfg.apply(cli)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        for m in ErasureModel::ALL {
            assert_eq!(m.name().parse::<ErasureModel>().unwrap(), m);
        }
        assert!("fig4".parse::<Experiment>().is_err());
    }

    #[test]
    fn defaults_are_valid() {
        for e in Experiment::ALL {
            ExperimentConfig::defaults(e).validate().unwrap();
        }
    }

    #[test]
    fn precedence_cli_over_file_over_defaults() {
        let file = ConfigOverrides::from_toml_str("sites = [8, 16, 32]\nseed = 5\nmodels = [\"bell\"]\n").unwrap();
        let cli = ConfigOverrides {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = resolve_config(Experiment::ErasureFactor, Some(&file), &cli).unwrap();
        assert_eq!(cfg.sites, vec![8, 16, 32]);
        assert_eq!(cfg.models, vec![ErasureModel::Bell]);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.filling, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ConfigOverrides::from_toml_str("unknown = 1").is_err());
        let two_sizes = ConfigOverrides {
            sites: Some(vec![128, 256]),
            ..Default::default()
        };
        assert!(resolve_config(Experiment::ErasureFactor, None, &two_sizes).is_err());
        let bad_filling = ConfigOverrides {
            filling: Some(vec![1.5]),
            ..Default::default()
        };
        assert!(resolve_config(Experiment::ErasureFactor, None, &bad_filling).is_err());
        let zero = ConfigOverrides {
            realizations: Some(0),
            ..Default::default()
        };
        assert!(resolve_config(Experiment::AndersonErasure, None, &zero).is_err());
        let other = ConfigOverrides {
            experiment: Some(Experiment::TbBands),
            ..Default::default()
        };
        assert!(resolve_config(Experiment::BellOracle, Some(&other), &ConfigOverrides::default()).is_err());
    }

    #[test]
    fn describe_lists_every_parameter() {
        let d = ExperimentConfig::defaults(Experiment::TbBands).describe();
        assert!(d.starts_with("experiment=tb-bands sites=[4096]"));
        assert!(d.contains("bands=[1,2,3,4,5,6,7,8,9]"));
        assert!(d.ends_with(&format!("seed={DEFAULT_SEED}")));
    }
}
