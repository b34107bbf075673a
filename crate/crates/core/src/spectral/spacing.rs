use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::unfold::UnfoldedSpectrum;
use super::DEGENERATE_GAP;

pub const MIN_HISTOGRAM_SPACINGS: usize = 100;

/// Wigner surmise `P(s) = (π/2) s exp(-π s²/4)`.
pub fn wigner_surmise(s: f64) -> f64 {
    PI / 2.0 * s * (-PI * s * s / 4.0).exp()
}

pub fn wigner_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        1.0 - (-PI * s * s / 4.0).exp()
    }
}

/// Poisson spacing density `exp(-s)`.
pub fn poisson_spacing(s: f64) -> f64 {
    if s < 0.0 {
        0.0
    } else {
        (-s).exp()
    }
}

pub fn poisson_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        1.0 - (-s).exp()
    }
}

/// Nearest-neighbour spacings normalized to unit mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingSample {
    pub spacings: Vec<f64>,
    pub n_degenerate: usize,
}

impl SpacingSample {
    /// `s_n = S_n / ⟨S⟩` over one unfolded sequence, numerically degenerate gaps removed.
    pub fn from_unfolded(u: &UnfoldedSpectrum) -> Self {
        Self::from_sequence(&u.values)
    }

    pub fn from_sequence(values: &[f64]) -> Self {
        let gaps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        if gaps.is_empty() {
            return SpacingSample {
                spacings: Vec::new(),
                n_degenerate: 0,
            };
        }
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let floor = DEGENERATE_GAP * mean;
        let kept: Vec<f64> = gaps.iter().copied().filter(|&s| s > floor).collect();
        let n_degenerate = gaps.len() - kept.len();
        let kept_mean = kept.iter().sum::<f64>() / kept.len().max(1) as f64;
        SpacingSample {
            spacings: kept.iter().map(|s| s / kept_mean).collect(),
            n_degenerate,
        }
    }

    /// Spacings of several independent sequences, each normalized on its own.
    pub fn pooled<'a>(parts: impl IntoIterator<Item = &'a UnfoldedSpectrum>) -> Self {
        let mut out = SpacingSample {
            spacings: Vec::new(),
            n_degenerate: 0,
        };
        for u in parts {
            let s = Self::from_unfolded(u);
            out.spacings.extend(s.spacings);
            out.n_degenerate += s.n_degenerate;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.spacings.iter().sum::<f64>() / self.spacings.len() as f64
    }

    /// Kolmogorov–Smirnov distance between the empirical CDF and `cdf`.
    pub fn ks_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let mut s = self.spacings.clone();
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        s.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Density-normalized spacing histogram with reference overlays at bin centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingHistogram {
    pub centers: Vec<f64>,
    pub bin_width: f64,
    pub counts: Vec<usize>,
    pub density: Vec<f64>,
    pub wigner: Vec<f64>,
    pub poisson: Vec<f64>,
    pub n_spacings: usize,
}

/// Histogram of `s` on `[0, s_max)`; the density is normalized by the total
/// sample size, so spacings beyond `s_max` lower the in-range mass.
pub fn spacing_distribution(
    sample: &SpacingSample,
    n_bins: usize,
    s_max: f64,
) -> Result<SpacingHistogram> {
    if sample.len() < MIN_HISTOGRAM_SPACINGS {
        return Err(Error::TooFew {
            what: "spacings for a histogram",
            needed: MIN_HISTOGRAM_SPACINGS,
            got: sample.len(),
        });
    }
    if n_bins == 0 || !(s_max > 0.0) {
        return Err(Error::InvalidArgument(
            "need n_bins > 0 and s_max > 0".into(),
        ));
    }
    let width = s_max / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &s in &sample.spacings {
        let b = (s / width).floor();
        if b >= 0.0 && (b as usize) < n_bins {
            counts[b as usize] += 1;
        }
    }
    let n = sample.len() as f64;
    let centers: Vec<f64> = (0..n_bins).map(|b| (b as f64 + 0.5) * width).collect();
    Ok(SpacingHistogram {
        density: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
        wigner: centers.iter().map(|&s| wigner_surmise(s)).collect(),
        poisson: centers.iter().map(|&s| poisson_spacing(s)).collect(),
        centers,
        bin_width: width,
        counts,
        n_spacings: sample.len(),
    })
}
