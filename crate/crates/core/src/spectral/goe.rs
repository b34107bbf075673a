//! Sampled random-matrix references.
//!
//! GOE matrices have independent Gaussian entries with the off-diagonal
//! variance half the diagonal one. The Poisson surrogate uses independent
//! uniform levels. By default each draw is unfolded with its ensemble's exact
//! smooth staircase (semicircle or linear); a local polynomial fit removes
//! real long-range fluctuations and flattens the low-k power spectrum.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::power::{low_k_slope, pooled_delta_power_spectrum, PowerSpectrumResult};
use super::ratio::r_statistic;
use super::spacing::{
    poisson_cdf, spacing_distribution, wigner_cdf, SpacingHistogram, SpacingSample,
};
use super::unfold::{unfold, UnfoldMethod, UnfoldedSpectrum};

pub const MIN_REFERENCE_DIM: usize = 200;
pub const MIN_REFERENCE_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Goe,
    Poisson,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Goe => "goe",
            Ensemble::Poisson => "poisson",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ReferenceUnfolding {
    /// Semicircle staircase for GOE, identity for the uniform surrogate.
    Exact,
    /// The same polynomial fit used on model spectra.
    Polynomial { degree: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConfig {
    pub ensemble: Ensemble,
    pub unfolding: ReferenceUnfolding,
    pub dim: usize,
    pub n_samples: usize,
    /// Central fraction of each sampled spectrum kept for statistics.
    pub window_fraction: f64,
    pub seed: u64,
    pub n_bins: usize,
    pub s_max: f64,
    /// Power-spectrum segments per sample.
    pub n_segments: usize,
    /// Force the power-spectrum series length, e.g. to match a model spectrum.
    pub common_len: Option<usize>,
}

impl ReferenceConfig {
    pub fn goe(dim: usize, n_samples: usize, window_fraction: f64, seed: u64) -> Self {
        ReferenceConfig {
            ensemble: Ensemble::Goe,
            dim,
            n_samples,
            window_fraction,
            seed,
            unfolding: ReferenceUnfolding::Exact,
            n_bins: 40,
            s_max: 4.0,
            n_segments: 1,
            common_len: None,
        }
    }

    pub fn poisson(dim: usize, n_samples: usize, window_fraction: f64, seed: u64) -> Self {
        ReferenceConfig {
            ensemble: Ensemble::Poisson,
            ..Self::goe(dim, n_samples, window_fraction, seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceStatistics {
    pub ensemble: Ensemble,
    /// Mean gap ratio over all samples.
    pub r_mean: f64,
    /// Standard error from the scatter of per-sample means.
    pub r_std_error: f64,
    pub ks_wigner: f64,
    pub ks_poisson: f64,
    pub histogram: SpacingHistogram,
    pub power: PowerSpectrumResult,
    pub slope: f64,
}

/// Eigenvalues of one GOE draw, ascending.
pub fn sample_goe_levels(dim: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let mut m = Mat::<f64>::zeros(dim, dim);
    let off = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..dim {
        m[(j, j)] = rng.sample::<f64, _>(StandardNormal);
        for i in (j + 1)..dim {
            let x = off * rng.sample::<f64, _>(StandardNormal);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    let mut levels = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Solver {
            context: format!("GOE sample of dimension {dim}"),
        })?;
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

/// Mean eigenvalue count below `e` for the GOE normalization used here,
/// whose semicircle has radius `sqrt(2 dim)`.
pub fn semicircle_staircase(e: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let r = (2.0 * n).sqrt();
    let x = (e / r).clamp(-1.0, 1.0);
    n * (0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / std::f64::consts::PI)
}

fn exact_unfold(levels: &[f64], ensemble: Ensemble, dim: usize) -> Result<UnfoldedSpectrum> {
    let raw: Vec<f64> = match ensemble {
        Ensemble::Goe => levels
            .iter()
            .map(|&e| semicircle_staircase(e, dim))
            .collect(),
        Ensemble::Poisson => levels.to_vec(),
    };
    let n = raw.len();
    let span = raw[n - 1] - raw[0];
    if !(span > 0.0) {
        return Err(Error::Unfolding("reference window has zero width".into()));
    }
    let stretch = (n - 1) as f64 / span;
    Ok(UnfoldedSpectrum {
        energies: levels.to_vec(),
        values: raw
            .iter()
            .map(|&v| raw[0] + (v - raw[0]) * stretch)
            .collect(),
        method: UnfoldMethod::Polynomial { degree: 1 },
        window: None,
        n_degenerate: 0,
    })
}

/// `count` independent uniform levels on `[0, count)`, ascending.
pub fn sample_poisson_levels(count: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut levels: Vec<f64> = (0..count)
        .map(|_| rng.random::<f64>() * count as f64)
        .collect();
    levels.sort_by(f64::total_cmp);
    levels
}

/// Independent stream per draw so results do not depend on scheduling.
pub fn draw_rng(seed: u64, draw: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    rng
}

fn central_window(levels: &[f64], fraction: f64) -> &[f64] {
    let n = levels.len();
    let keep = ((n as f64 * fraction).round() as usize).clamp(2, n);
    let start = (n - keep) / 2;
    &levels[start..start + keep]
}

/// GOE reference with the default statistics settings.
pub fn goe_reference(
    dim: usize,
    n_samples: usize,
    window_fraction: f64,
    seed: u64,
) -> Result<ReferenceStatistics> {
    ensemble_reference(&ReferenceConfig::goe(dim, n_samples, window_fraction, seed))
}

pub fn ensemble_reference(cfg: &ReferenceConfig) -> Result<ReferenceStatistics> {
    if cfg.dim < MIN_REFERENCE_DIM {
        return Err(Error::TooFew {
            what: "reference matrix dimension",
            needed: MIN_REFERENCE_DIM,
            got: cfg.dim,
        });
    }
    if cfg.n_samples < MIN_REFERENCE_SAMPLES {
        return Err(Error::TooFew {
            what: "reference samples",
            needed: MIN_REFERENCE_SAMPLES,
            got: cfg.n_samples,
        });
    }
    if !(cfg.window_fraction > 0.0 && cfg.window_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window fraction {} outside (0, 1]",
            cfg.window_fraction
        )));
    }

    let draws: Vec<(f64, UnfoldedSpectrum)> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|draw| {
            let mut rng = draw_rng(cfg.seed, draw);
            let levels = match cfg.ensemble {
                Ensemble::Goe => sample_goe_levels(cfg.dim, &mut rng)?,
                Ensemble::Poisson => sample_poisson_levels(cfg.dim, &mut rng),
            };
            let window = central_window(&levels, cfg.window_fraction);
            let r = r_statistic(window)?.mean;
            let u = match cfg.unfolding {
                ReferenceUnfolding::Exact => exact_unfold(window, cfg.ensemble, cfg.dim)?,
                ReferenceUnfolding::Polynomial { degree } => {
                    unfold(window, &UnfoldMethod::Polynomial { degree })?
                }
            };
            Ok((r, u))
        })
        .collect::<Result<_>>()?;

    let n = draws.len() as f64;
    let r_mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let r_var = draws.iter().map(|d| (d.0 - r_mean).powi(2)).sum::<f64>() / (n - 1.0);

    let unfolded: Vec<&UnfoldedSpectrum> = draws.iter().map(|d| &d.1).collect();
    let sample = SpacingSample::pooled(unfolded.iter().copied());
    let histogram = spacing_distribution(&sample, cfg.n_bins, cfg.s_max)?;
    let power = pooled_delta_power_spectrum(&unfolded, cfg.n_segments, cfg.common_len)?;
    let slope = low_k_slope(&power, None)?;

    Ok(ReferenceStatistics {
        ensemble: cfg.ensemble,
        r_mean,
        r_std_error: (r_var / n).sqrt(),
        ks_wigner: sample.ks_distance(wigner_cdf),
        ks_poisson: sample.ks_distance(poisson_cdf),
        histogram,
        power,
        slope,
    })
}
