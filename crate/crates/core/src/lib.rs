//! Numerical toolkit for auditing truncated Dicke-model spectra.
//!
//! The photon space of the Dicke model is infinite; any diagonalization has to
//! cut it at some `n_max`, and only results that no longer move when `n_max`
//! grows describe the model. This crate builds the parity-resolved truncated
//! Hamiltonian, checks eigenvalue convergence along a ladder of cutoffs,
//! provides the semiclassical ground-state energy and density of states, and
//! runs the standard spectral-chaos statistics against GOE and Poisson
//! references.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod convergence;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod semiclassical;
pub mod spectral;

pub use basis::{enumerate_basis, enumerate_full_basis, sector_dim, BasisState};
pub use convergence::{
    convergence_ladder, default_probe, ladder_spectra, monotonicity_check, reports_from_spectra,
    trusted_window, trusted_window_from_spectra, ConvergenceReport, MonotonicityCheck,
    TrustedWindow, Violation, DEFAULT_LADDER, DEFAULT_TOL,
};
pub use eigen::{eigenvalues, spectrum, SolveOptions, SpectrumRecord};
pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, hamiltonian_element, HamiltonianMatrix};
pub use model::{
    critical_coupling, truncation_artifact_energy, ModelParams, ParitySector, Truncation,
};
pub use semiclassical::{
    classical_energy, cumulative_dos, dos, dos_curve, esqpt_energy, field_minimized_energy,
    flat_onset_energy, ground_state_energy, ClassicalPoint, DosCurve, DosEvaluator,
    SphereQuadrature,
};
pub use spectral::{
    delta_power_spectrum, ensemble_reference, goe_reference, low_k_slope,
    pooled_delta_power_spectrum, r_statistic, spacing_distribution, unfold, unfold_window,
    Ensemble, PowerSpectrumResult, RatioStatistic, ReferenceConfig, ReferenceStatistics,
    SpacingHistogram, SpacingSample, UnfoldMethod, UnfoldedSpectrum, GOE_MEAN_R, POISSON_MEAN_R,
};
