//! Power spectrum of the `δ_q` level-motion statistic.
//!
//! `δ_q = Σ_{i≤q} (s_i - 1) = ε_{q+1} - ε_1 - q` measures how far the unfolded
//! staircase drifts from a picket fence. Its power spectrum falls off as
//! `1/k` for GOE-correlated spectra and as `1/k²` for uncorrelated ones.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::unfold::UnfoldedSpectrum;

/// Smallest number of levels a segment may hold.
pub const MIN_SEGMENT_LEVELS: usize = 32;

/// Segments per analysis window when not configured otherwise.
pub const DEFAULT_SEGMENTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSeries {
    pub delta: Vec<f64>,
}

impl DeltaSeries {
    /// Cumulative sum of `s_i - 1` over consecutive unfolded levels.
    pub fn from_unfolded_levels(values: &[f64]) -> Self {
        let mut acc = 0.0;
        let delta = values
            .windows(2)
            .map(|w| {
                acc += (w[1] - w[0]) - 1.0;
                acc
            })
            .collect();
        DeltaSeries { delta }
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }
}

/// Segment-averaged `⟨P_k^δ⟩` for `k = 1..=M/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrumResult {
    pub frequencies: Vec<usize>,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub n_segments: usize,
    /// Common series length `M` every segment was cut to.
    pub segment_len: usize,
}

/// `P_k = |M^{-1/2} Σ_q δ_q exp(-2πi k q / M)|²` for `k = 1..=M/2`.
fn periodogram(delta: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let m = delta.len();
    let fft = planner.plan_fft_forward(m);
    let mut buf: Vec<Complex<f64>> = delta.iter().map(|&d| Complex::new(d, 0.0)).collect();
    fft.process(&mut buf);
    // indexing from q = 0 instead of q = 1 only changes the phase
    (1..=m / 2).map(|k| buf[k].norm_sqr() / m as f64).collect()
}

/// Split `[E_first, E_last]` into `n_segments` equal energy intervals and
/// return the unfolded values falling in each.
fn energy_segments(u: &UnfoldedSpectrum, n_segments: usize) -> Vec<&[f64]> {
    let n = u.energies.len();
    let (lo, hi) = (u.energies[0], u.energies[n - 1]);
    let width = (hi - lo) / n_segments as f64;
    let mut out = Vec::with_capacity(n_segments);
    let mut start = 0;
    for s in 0..n_segments {
        let end = if s + 1 == n_segments {
            n
        } else {
            let edge = lo + width * (s + 1) as f64;
            u.energies.partition_point(|&e| e < edge)
        };
        out.push(&u.values[start..end]);
        start = end;
    }
    out
}

pub fn delta_power_spectrum(
    u: &UnfoldedSpectrum,
    n_segments: usize,
) -> Result<PowerSpectrumResult> {
    pooled_delta_power_spectrum(&[u], n_segments, None)
}

/// Average the δ periodogram over equal-energy segments of one or more
/// independent unfolded sequences.
///
/// Every segment is cut to a common length `M`: the shortest segment's
/// spacing count, or `common_len` when given (which must not exceed it).
pub fn pooled_delta_power_spectrum(
    spectra: &[&UnfoldedSpectrum],
    n_segments: usize,
    common_len: Option<usize>,
) -> Result<PowerSpectrumResult> {
    if n_segments == 0 || spectra.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one segment and one spectrum".into(),
        ));
    }
    let segments: Vec<&[f64]> = spectra
        .iter()
        .flat_map(|u| energy_segments(u, n_segments))
        .collect();
    let shortest = segments.iter().map(|s| s.len()).min().unwrap_or(0);
    if shortest < MIN_SEGMENT_LEVELS {
        return Err(Error::TooFew {
            what: "levels per power-spectrum segment",
            needed: MIN_SEGMENT_LEVELS,
            got: shortest,
        });
    }
    let m = match common_len {
        Some(m) if m > shortest - 1 => {
            return Err(Error::InvalidArgument(format!(
                "common length {m} exceeds the shortest segment ({} spacings)",
                shortest - 1
            )))
        }
        Some(m) if m < 2 => {
            return Err(Error::InvalidArgument("common length must be >= 2".into()))
        }
        Some(m) => m,
        None => shortest - 1,
    };

    let mut planner = FftPlanner::new();
    let half = m / 2;
    let mut sum = vec![0.0; half];
    let mut sum_sq = vec![0.0; half];
    for seg in &segments {
        let delta = DeltaSeries::from_unfolded_levels(&seg[..=m]);
        for (k, p) in periodogram(&delta.delta, &mut planner)
            .into_iter()
            .enumerate()
        {
            sum[k] += p;
            sum_sq[k] += p * p;
        }
    }
    let n = segments.len() as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std_errors = if segments.len() > 1 {
        sum_sq
            .iter()
            .zip(&values)
            .map(|(sq, mean)| ((sq / n - mean * mean).max(0.0) * n / (n - 1.0) / n).sqrt())
            .collect()
    } else {
        vec![f64::NAN; half]
    };
    Ok(PowerSpectrumResult {
        frequencies: (1..=half).collect(),
        values,
        std_errors,
        n_segments: segments.len(),
        segment_len: m,
    })
}

/// Upper end of the low-frequency fit band: the lowest tenth of the
/// frequency axis `1..M`, never fewer than four points.
pub fn default_fit_band(segment_len: usize) -> usize {
    (segment_len / 10).max(4).min(segment_len / 2)
}

/// Least-squares slope of `ln ⟨P_k⟩` against `ln k` for `k = 1..=k_max`.
pub fn low_k_slope(ps: &PowerSpectrumResult, k_max: Option<usize>) -> Result<f64> {
    let k_max = k_max.unwrap_or_else(|| default_fit_band(ps.segment_len));
    let points: Vec<(f64, f64)> = ps
        .frequencies
        .iter()
        .zip(&ps.values)
        .take_while(|(k, _)| **k <= k_max)
        .map(|(&k, &p)| ((k as f64).ln(), p))
        .collect();
    if points.len() < 3 {
        return Err(Error::TooFew {
            what: "frequencies in the fit band",
            needed: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|&(_, p)| !(p > 0.0)) {
        return Err(Error::InvalidArgument(
            "power spectrum has non-positive values in the fit band".into(),
        ));
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, p)| (a + x, b + p.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, p) in &points {
        sxy += (x - mx) * (p.ln() - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok(sxy / sxx)
}
