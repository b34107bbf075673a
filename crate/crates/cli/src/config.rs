//! Experiment configuration files.
//!
//! A config is a TOML file with one table per concern. Every key has a
//! default except the model couplings, so a shipped config only spells out
//! what the figure actually depends on.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dicke_core::spectral::goe::{Ensemble, ReferenceConfig};
use dicke_core::{ModelParams, ParitySector, UnfoldMethod};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub run: RunSection,
    pub model: ModelParams,
    #[serde(default)]
    pub ladder: LadderSection,
    #[serde(default)]
    pub window: WindowSection,
    #[serde(default)]
    pub stats: StatsSection,
    #[serde(default)]
    pub reference: ReferenceSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub name: String,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Refuse sector matrices larger than this.
    pub max_dim: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            name: "experiment".into(),
            seed: 1,
            output_dir: None,
            max_dim: dicke_core::hamiltonian::DEFAULT_MAX_DIM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorChoice {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    Both,
}

impl SectorChoice {
    pub fn sectors(self) -> Vec<ParitySector> {
        match self {
            SectorChoice::Plus => vec![ParitySector::Positive],
            SectorChoice::Minus => vec![ParitySector::Negative],
            SectorChoice::Both => ParitySector::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LadderSection {
    pub cutoffs: Vec<u32>,
    pub sector: SectorChoice,
    /// Absolute tolerance in units of `omega`.
    pub tol: f64,
    /// 1-based level indices tracked by `converge`.
    pub levels: Vec<usize>,
    /// Trust probe for the top rung; `ceil(1.25 n_max)` when absent.
    pub probe: Option<u32>,
}

impl Default for LadderSection {
    fn default() -> Self {
        LadderSection {
            cutoffs: dicke_core::DEFAULT_LADDER.to_vec(),
            sector: SectorChoice::Both,
            tol: dicke_core::DEFAULT_TOL,
            levels: vec![1, 50, 100, 200],
            probe: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowSection {
    /// Lower edge in `E/N`.
    pub lo: f64,
    /// Upper edge in `E/N`.
    pub hi: f64,
}

impl Default for WindowSection {
    fn default() -> Self {
        WindowSection { lo: 0.5, hi: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnfoldingChoice {
    Polynomial,
    Semiclassical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSource {
    /// Diagonalized model levels.
    Model,
    /// Uniform random levels with the same count per sector, for testing
    /// the statistics pipeline on an uncorrelated spectrum.
    PoissonSurrogate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsSection {
    pub dos_bins: usize,
    pub spacing_bins: usize,
    pub s_max: f64,
    pub segments: usize,
    pub unfolding: UnfoldingChoice,
    pub degree: usize,
    /// `|⟨r⟩ - plateau|` band for plateau detection.
    pub plateau_band: f64,
    /// Points on the semiclassical DOS curve.
    pub curve_points: usize,
    pub source: LevelSource,
}

impl Default for StatsSection {
    fn default() -> Self {
        StatsSection {
            dos_bins: 60,
            spacing_bins: 40,
            s_max: 4.0,
            segments: dicke_core::spectral::power::DEFAULT_SEGMENTS,
            unfolding: UnfoldingChoice::Polynomial,
            degree: dicke_core::spectral::unfold::DEFAULT_DEGREE,
            plateau_band: 0.01,
            curve_points: 400,
            source: LevelSource::Model,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceSection {
    pub ensemble: Ensemble,
    pub dim: usize,
    pub samples: usize,
    pub window_fraction: f64,
    /// Power-spectrum segments per sample for `goe-ref`.
    pub segments: usize,
}

impl Default for ReferenceSection {
    fn default() -> Self {
        ReferenceSection {
            ensemble: Ensemble::Goe,
            dim: 1000,
            samples: 50,
            window_fraction: 0.5,
            segments: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.ladder;
        if l.cutoffs.is_empty() {
            bail!("ladder.cutoffs is empty");
        }
        if l.cutoffs.windows(2).any(|w| w[1] <= w[0]) {
            bail!(
                "ladder.cutoffs must be strictly increasing: {:?}",
                l.cutoffs
            );
        }
        if !(l.tol > 0.0) {
            bail!("ladder.tol must be positive");
        }
        if l.levels.contains(&0) {
            bail!("ladder.levels are 1-based");
        }
        if let Some(p) = l.probe {
            if p <= *l.cutoffs.last().unwrap() {
                bail!("ladder.probe {p} must exceed the top cutoff");
            }
        }
        if !(self.window.lo < self.window.hi) {
            bail!("window.lo must be below window.hi");
        }
        let s = &self.stats;
        if s.dos_bins == 0 || s.spacing_bins == 0 || s.segments == 0 || s.curve_points < 2 {
            bail!("stats bin, segment and curve counts must be positive");
        }
        if !(s.s_max > 0.0) || !(s.plateau_band > 0.0) {
            bail!("stats.s_max and stats.plateau_band must be positive");
        }
        let r = &self.reference;
        if !(r.window_fraction > 0.0 && r.window_fraction <= 1.0) {
            bail!("reference.window_fraction must lie in (0, 1]");
        }
        if r.segments == 0 {
            bail!("reference.segments must be positive");
        }
        Ok(())
    }

    pub fn unfold_method(&self) -> UnfoldMethod {
        match self.stats.unfolding {
            UnfoldingChoice::Polynomial => UnfoldMethod::Polynomial {
                degree: self.stats.degree,
            },
            UnfoldingChoice::Semiclassical => UnfoldMethod::Semiclassical {
                params: self.model,
                quadrature: Default::default(),
            },
        }
    }

    pub fn reference_config(&self, seed: u64) -> ReferenceConfig {
        let r = &self.reference;
        let mut c = ReferenceConfig::goe(r.dim, r.samples, r.window_fraction, seed);
        c.ensemble = r.ensemble;
        c.n_bins = self.stats.spacing_bins;
        c.s_max = self.stats.s_max;
        c.n_segments = r.segments;
        c
    }
}
