//! Cutoff-ladder convergence audit.
//!
//! A level is only physical once rerunning the diagonalization with a larger
//! photon cutoff leaves it unchanged. The truncated sector matrix at a smaller
//! cutoff is a leading principal submatrix of the one at a larger cutoff (the
//! basis is ordered photon-number first), so by Cauchy interlacing each sorted
//! level can only move down as the cutoff grows. Levels are therefore matched
//! across cutoffs by their sorted index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::sector_dim;
use crate::eigen::{spectrum, SolveOptions, SpectrumRecord};
use crate::error::{Error, Result};
use crate::model::{truncation_artifact_energy, ModelParams, ParitySector, Truncation};

/// Default absolute tolerance, in units of `omega`.
pub const DEFAULT_TOL: f64 = 1e-6;

pub const DEFAULT_LADDER: [u32; 5] = [50, 100, 200, 400, 800];

/// Slack allowed on interlacing before a rise counts as a violation.
pub const MONOTONICITY_SLACK: f64 = 1e-10;

/// `DEFAULT_TOL` scaled by the field frequency.
pub fn default_tol(params: &ModelParams) -> f64 {
    DEFAULT_TOL * params.omega()
}

/// Probe cutoff paired with `n_max` for trust certification: `ceil(1.25 n_max)`.
pub fn default_probe(n_max: u32) -> u32 {
    let probe = (f64::from(n_max) * 1.25).ceil() as u32;
    probe.max(n_max + 1)
}

/// History of one level along the cutoff ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub params: ModelParams,
    pub sector: ParitySector,
    /// 1-based; 1 is the lowest level of the sector.
    pub level_index: usize,
    /// `(n_max, E_n)` pairs, strictly increasing in `n_max`.
    pub ladder: Vec<(u32, f64)>,
    pub tol: f64,
    pub converged: bool,
    pub converged_value: Option<f64>,
}

impl ConvergenceReport {
    /// Change between the last two rungs.
    pub fn last_change(&self) -> f64 {
        let k = self.ladder.len();
        (self.ladder[k - 1].1 - self.ladder[k - 2].1).abs()
    }
}

fn validate_cutoffs(cutoffs: &[u32]) -> Result<()> {
    if cutoffs.len() < 2 {
        return Err(Error::TooFew {
            what: "ladder cutoffs",
            needed: 2,
            got: cutoffs.len(),
        });
    }
    if !cutoffs.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "cutoff ladder must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Diagonalize one sector at every cutoff, in ladder order.
pub fn ladder_spectra(
    params: &ModelParams,
    sector: ParitySector,
    cutoffs: &[u32],
    opts: &SolveOptions,
) -> Result<Vec<SpectrumRecord>> {
    cutoffs
        .par_iter()
        .map(|&n_max| spectrum(params, Truncation::new(n_max), sector, opts))
        .collect()
}

/// Assemble per-level reports from spectra that were already computed.
///
/// `spectra` must come from nested cutoffs of one `(params, sector)`.
pub fn reports_from_spectra(
    spectra: &[SpectrumRecord],
    level_indices: &[usize],
    tol: f64,
) -> Result<Vec<ConvergenceReport>> {
    let cutoffs: Vec<u32> = spectra.iter().map(|s| s.truncation.n_max).collect();
    validate_cutoffs(&cutoffs)?;
    let first = &spectra[0];
    if spectra
        .iter()
        .any(|s| s.params != first.params || s.sector != first.sector)
    {
        return Err(Error::MismatchedReports);
    }
    let available = spectra.iter().map(SpectrumRecord::len).min().unwrap_or(0);

    level_indices
        .iter()
        .map(|&index| {
            if index == 0 || index > available {
                return Err(Error::LevelOutOfRange { index, available });
            }
            let ladder: Vec<(u32, f64)> = spectra
                .iter()
                .map(|s| (s.truncation.n_max, s.levels[index - 1]))
                .collect();
            let k = ladder.len();
            let converged = (ladder[k - 1].1 - ladder[k - 2].1).abs() < tol;
            Ok(ConvergenceReport {
                params: first.params,
                sector: first.sector,
                level_index: index,
                converged_value: converged.then_some(ladder[k - 1].1),
                ladder,
                tol,
                converged,
            })
        })
        .collect()
}

/// Fresh diagonalization at every rung, then one report per requested level.
pub fn convergence_ladder(
    params: &ModelParams,
    sector: ParitySector,
    cutoffs: &[u32],
    level_indices: &[usize],
    tol: f64,
    opts: &SolveOptions,
) -> Result<Vec<ConvergenceReport>> {
    validate_cutoffs(cutoffs)?;
    let available = sector_dim(params, Truncation::new(cutoffs[0]), sector);
    if let Some(&index) = level_indices.iter().find(|&&i| i == 0 || i > available) {
        return Err(Error::LevelOutOfRange { index, available });
    }
    let spectra = ladder_spectra(params, sector, cutoffs, opts)?;
    reports_from_spectra(&spectra, level_indices, tol)
}

/// A level that rose between two consecutive rungs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub level_index: usize,
    pub n_max_lo: u32,
    pub n_max_hi: u32,
    pub increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Every level must be non-increasing along the ladder (within 1e-10).
pub fn monotonicity_check(reports: &[ConvergenceReport]) -> Result<MonotonicityCheck> {
    if let Some(first) = reports.first() {
        let cutoffs: Vec<u32> = first.ladder.iter().map(|r| r.0).collect();
        let mismatched = reports.iter().any(|r| {
            r.params != first.params
                || r.sector != first.sector
                || r.ladder.len() != cutoffs.len()
                || r.ladder.iter().zip(&cutoffs).any(|(a, b)| a.0 != *b)
        });
        if mismatched {
            return Err(Error::MismatchedReports);
        }
    }
    let mut violations = Vec::new();
    for r in reports {
        for w in r.ladder.windows(2) {
            let increase = w[1].1 - w[0].1;
            if increase > MONOTONICITY_SLACK {
                violations.push(Violation {
                    level_index: r.level_index,
                    n_max_lo: w[0].0,
                    n_max_hi: w[1].0,
                    increase,
                });
            }
        }
    }
    Ok(MonotonicityCheck {
        ok: violations.is_empty(),
        violations,
    })
}

/// Energy range over which a truncated spectrum is certified cutoff-independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustedWindow {
    pub params: ModelParams,
    pub sector: ParitySector,
    pub n_max: u32,
    pub n_max_probe: u32,
    pub tol: f64,
    /// Highest level of the agreeing prefix; `None` when no level agrees.
    pub e_trust: Option<f64>,
    pub count_trusted: usize,
    /// Lowest level (at `n_max`) that failed to agree, if any.
    pub first_untrusted: Option<f64>,
    /// `N * E*/N` for the certified cutoff.
    pub e_star: f64,
}

impl TrustedWindow {
    pub fn e_trust_per_atom(&self) -> Option<f64> {
        self.e_trust.map(|e| e / f64::from(self.params.n_atoms()))
    }

    /// True when every level at or below `energy` is trusted.
    pub fn covers(&self, energy: f64) -> bool {
        self.first_untrusted.is_none_or(|u| u > energy)
    }

    pub fn covers_per_atom(&self, e_per_atom: f64) -> bool {
        self.covers(e_per_atom * f64::from(self.params.n_atoms()))
    }
}

/// Trusted window from two spectra of the same sector at different cutoffs.
pub fn trusted_window_from_spectra(
    base: &SpectrumRecord,
    probe: &SpectrumRecord,
    tol: f64,
) -> Result<TrustedWindow> {
    if base.params != probe.params || base.sector != probe.sector {
        return Err(Error::MismatchedReports);
    }
    if probe.truncation.n_max <= base.truncation.n_max {
        return Err(Error::InvalidArgument(format!(
            "probe cutoff {} must exceed {}",
            probe.truncation.n_max, base.truncation.n_max
        )));
    }
    let count = base
        .levels
        .iter()
        .zip(&probe.levels)
        .take_while(|(a, b)| (*a - *b).abs() < tol)
        .count();
    let e_trust = count.checked_sub(1).map(|k| base.levels[k]);
    let first_untrusted = base.levels.get(count).copied();
    let e_star = f64::from(base.params.n_atoms())
        * truncation_artifact_energy(&base.params, base.truncation);

    if let Some(e) = e_trust {
        if e > e_star + 1e-9 * e_star.abs().max(1.0) {
            return Err(Error::Invariant(format!(
                "trusted energy {e} exceeds the truncation bound {e_star} at n_max = {}",
                base.truncation.n_max
            )));
        }
    }

    Ok(TrustedWindow {
        params: base.params,
        sector: base.sector,
        n_max: base.truncation.n_max,
        n_max_probe: probe.truncation.n_max,
        tol,
        e_trust,
        count_trusted: count,
        first_untrusted,
        e_star,
    })
}

/// Diagonalize at `n_max` and at `n_max_probe` and compare level by level.
pub fn trusted_window(
    params: &ModelParams,
    sector: ParitySector,
    n_max: u32,
    n_max_probe: u32,
    tol: f64,
    opts: &SolveOptions,
) -> Result<TrustedWindow> {
    if n_max_probe <= n_max {
        return Err(Error::InvalidArgument(format!(
            "probe cutoff {n_max_probe} must exceed {n_max}"
        )));
    }
    let (base, probe) = rayon::join(
        || spectrum(params, Truncation::new(n_max), sector, opts),
        || spectrum(params, Truncation::new(n_max_probe), sector, opts),
    );
    trusted_window_from_spectra(&base?, &probe?, tol)
}
