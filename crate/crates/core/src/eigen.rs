//! Full spectra of sector Hamiltonians.
//!
//! Backed by faer's dense self-adjoint eigensolver. The solver runs
//! sequentially; independent diagonalizations are parallelized one level up.

use faer::Side;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian_capped, HamiltonianMatrix, DEFAULT_MAX_DIM};
use crate::model::{ModelParams, ParitySector, Truncation};

/// Sorted eigenvalues of one parity sector at one cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub params: ModelParams,
    pub truncation: Truncation,
    pub sector: ParitySector,
    pub levels: Vec<f64>,
}

impl SpectrumRecord {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// 1-based level access, matching the usual `E_1` = ground state labelling.
    pub fn level(&self, index: usize) -> Option<f64> {
        index
            .checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .copied()
    }

    /// Levels with `lo <= E/N <= hi`.
    pub fn window_per_atom(&self, lo: f64, hi: f64) -> &[f64] {
        let n = f64::from(self.params.n_atoms());
        let start = self.levels.partition_point(|&e| e / n < lo);
        let end = self.levels.partition_point(|&e| e / n <= hi);
        &self.levels[start..end.max(start)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_dim: usize,
    /// When set, also compute eigenvectors and check `‖Hv − Ev‖ ≤ 1e-8 ‖H‖`
    /// on this many evenly spaced eigenpairs.
    pub verify_samples: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_dim: DEFAULT_MAX_DIM,
            verify_samples: None,
        }
    }
}

pub const RESIDUAL_BOUND: f64 = 1e-8;

/// All eigenvalues of `matrix`, ascending.
pub fn eigenvalues(matrix: &HamiltonianMatrix) -> Result<SpectrumRecord> {
    eigenvalues_with(matrix, None)
}

pub fn eigenvalues_with(
    matrix: &HamiltonianMatrix,
    verify_samples: Option<usize>,
) -> Result<SpectrumRecord> {
    let sector = matrix
        .sector()
        .ok_or_else(|| Error::InvalidArgument("spectrum records are per parity sector".into()))?;
    let levels = match verify_samples {
        None => raw_eigenvalues(matrix)?,
        Some(samples) => verified_eigenvalues(matrix, samples)?,
    };
    Ok(SpectrumRecord {
        params: *matrix.params(),
        truncation: matrix.truncation(),
        sector,
        levels,
    })
}

/// Eigenvalues of any matrix built by this crate, including the unsectored one.
pub fn raw_eigenvalues(matrix: &HamiltonianMatrix) -> Result<Vec<f64>> {
    let mut levels = matrix
        .entries()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Solver {
            context: matrix.describe(),
        })?;
    check_finite(&levels, matrix)?;
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

fn check_finite(levels: &[f64], matrix: &HamiltonianMatrix) -> Result<()> {
    if levels.iter().all(|e| e.is_finite()) {
        Ok(())
    } else {
        Err(Error::Solver {
            context: format!("{} (non-finite eigenvalue)", matrix.describe()),
        })
    }
}

fn verified_eigenvalues(matrix: &HamiltonianMatrix, samples: usize) -> Result<Vec<f64>> {
    let h = matrix.entries();
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Solver {
            context: matrix.describe(),
        })?;
    let dim = matrix.dim();
    let vals: Vec<f64> = (0..dim).map(|i| evd.S()[i]).collect();
    check_finite(&vals, matrix)?;

    let norm = h.norm_l2();
    let bound = RESIDUAL_BOUND * norm.max(f64::MIN_POSITIVE);
    let u = evd.U();
    let samples = samples.clamp(1, dim);
    for s in 0..samples {
        let k = if samples == 1 {
            0
        } else {
            s * (dim - 1) / (samples - 1)
        };
        let v = u.col(k);
        let mut sq = 0.0;
        for i in 0..dim {
            let mut hv = 0.0;
            for c in 0..dim {
                hv += h[(i, c)] * v[c];
            }
            sq += (hv - vals[k] * v[i]).powi(2);
        }
        let residual = sq.sqrt();
        if residual > bound {
            return Err(Error::Residual {
                residual,
                bound,
                context: format!("{} eigenpair {k}", matrix.describe()),
            });
        }
    }

    let mut levels = vals;
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

/// Build and diagonalize one sector.
pub fn spectrum(
    params: &ModelParams,
    trunc: Truncation,
    sector: ParitySector,
    opts: &SolveOptions,
) -> Result<SpectrumRecord> {
    let h = build_hamiltonian_capped(params, trunc, sector, opts.max_dim)?;
    eigenvalues_with(&h, opts.verify_samples)
}
