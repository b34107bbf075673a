//! Spectral fluctuation statistics: unfolding, nearest-neighbour spacings,
//! consecutive-gap ratios and the δ power spectrum, plus sampled GOE and
//! Poisson references.
//!
//! Statistics are always computed on one parity sector at a time. Mixing
//! independent symmetry sectors into one sequence destroys level repulsion.

pub mod goe;
pub mod power;
pub mod ratio;
pub mod spacing;
pub mod unfold;

/// Gaps below this multiple of the mean gap count as numerical degeneracies.
pub const DEGENERATE_GAP: f64 = 1e-12;

pub use goe::{
    ensemble_reference, goe_reference, Ensemble, ReferenceConfig, ReferenceStatistics,
    ReferenceUnfolding,
};
pub use power::{
    delta_power_spectrum, low_k_slope, pooled_delta_power_spectrum, DeltaSeries,
    PowerSpectrumResult,
};
pub use ratio::{r_statistic, RatioStatistic, GOE_MEAN_R, POISSON_MEAN_R};
pub use spacing::{
    spacing_distribution, wigner_cdf, wigner_surmise, SpacingHistogram, SpacingSample,
};
pub use unfold::{unfold, unfold_window, UnfoldMethod, UnfoldedSpectrum};
