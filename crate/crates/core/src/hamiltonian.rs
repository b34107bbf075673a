//! Dense matrix of the truncated Dicke Hamiltonian
//!
//! `H = omega a†a + omega0 Jz + (g / sqrt(N)) (a + a†)(J+ + J-)`
//!
//! in the Fock ⊗ Dicke product basis. With this normalization the
//! superradiant transition sits at `g_c = sqrt(omega omega0) / 2`.

use faer::Mat;

use crate::basis::{enumerate_basis, enumerate_full_basis, BasisState};
use crate::error::{Error, Result};
use crate::model::{ModelParams, ParitySector, Truncation};

/// Default guard on the matrix dimension (a 30k dense matrix is 7.2 GB).
pub const DEFAULT_MAX_DIM: usize = 30_000;

/// `⟨a|H|b⟩`.
pub fn hamiltonian_element(params: &ModelParams, a: &BasisState, b: &BasisState) -> f64 {
    if a == b {
        return params.omega() * f64::from(a.n) + params.omega0() * a.m();
    }
    let dn = i64::from(b.n) - i64::from(a.n);
    let d2m = b.two_m - a.two_m;
    if dn.abs() != 1 || d2m.abs() != 2 {
        return 0.0;
    }
    // a ± a† connects n and n ± 1 with amplitude sqrt(max(n, n')).
    let photon = f64::from(a.n.max(b.n)).sqrt();
    // J± between m and m ± 1: sqrt(j(j+1) - m m'), symmetric in (m, m').
    let j = params.j();
    let spin = (j * (j + 1.0) - a.m() * b.m()).max(0.0).sqrt();
    params.g() / f64::from(params.n_atoms()).sqrt() * photon * spin
}

/// Dense symmetric Hamiltonian of one parity sector (or of the whole
/// truncated space, when `sector` is `None`).
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    params: ModelParams,
    truncation: Truncation,
    sector: Option<ParitySector>,
    basis: Vec<BasisState>,
    entries: Mat<f64>,
}

impl HamiltonianMatrix {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// `None` for the unsectored matrix.
    pub fn sector(&self) -> Option<ParitySector> {
        self.sector
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Short human-readable identification, used in error messages.
    pub fn describe(&self) -> String {
        let sector = self.sector.map_or("full".to_string(), |s| s.to_string());
        format!(
            "H(N={}, g={}, omega={}, omega0={}, n_max={}, sector {sector}, dim {})",
            self.params.n_atoms(),
            self.params.g(),
            self.params.omega(),
            self.params.omega0(),
            self.truncation.n_max,
            self.dim()
        )
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0f64;
        for j in 0..m.ncols() {
            for i in (j + 1)..m.nrows() {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }
}

/// Build the sector Hamiltonian with the default dimension cap.
pub fn build_hamiltonian(
    params: &ModelParams,
    trunc: Truncation,
    sector: ParitySector,
) -> Result<HamiltonianMatrix> {
    build_hamiltonian_capped(params, trunc, sector, DEFAULT_MAX_DIM)
}

pub fn build_hamiltonian_capped(
    params: &ModelParams,
    trunc: Truncation,
    sector: ParitySector,
    max_dim: usize,
) -> Result<HamiltonianMatrix> {
    let basis = enumerate_basis(params, trunc, sector);
    assemble(params, trunc, Some(sector), basis, max_dim)
}

/// Matrix over the full truncated space, ignoring parity.
///
/// Only useful for checking that the two sector blocks reproduce it.
pub fn build_unsectored_hamiltonian(
    params: &ModelParams,
    trunc: Truncation,
    max_dim: usize,
) -> Result<HamiltonianMatrix> {
    let basis = enumerate_full_basis(params, trunc);
    assemble(params, trunc, None, basis, max_dim)
}

fn assemble(
    params: &ModelParams,
    trunc: Truncation,
    sector: Option<ParitySector>,
    basis: Vec<BasisState>,
    max_dim: usize,
) -> Result<HamiltonianMatrix> {
    let dim = basis.len();
    if dim > max_dim {
        return Err(Error::DimensionCap { dim, cap: max_dim });
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("empty basis".into()));
    }

    // (n, m + j) -> row index
    let atoms = params.n_atoms() as usize + 1;
    let slot = |s: &BasisState| s.n as usize * atoms + ((s.two_m + params.two_j()) / 2) as usize;
    let mut index = vec![usize::MAX; trunc.total_dim(params)];
    for (i, s) in basis.iter().enumerate() {
        index[slot(s)] = i;
    }

    let mut entries = Mat::<f64>::zeros(dim, dim);
    for (i, a) in basis.iter().enumerate() {
        entries[(i, i)] = hamiltonian_element(params, a, a);
        for dn in [-1i64, 1] {
            let n = i64::from(a.n) + dn;
            if n < 0 || n > i64::from(trunc.n_max) {
                continue;
            }
            for d2m in [-2i64, 2] {
                let two_m = a.two_m + d2m;
                if two_m.abs() > params.two_j() {
                    continue;
                }
                let b = BasisState::new(two_m, n as u32);
                let k = index[slot(&b)];
                if k == usize::MAX {
                    continue;
                }
                entries[(i, k)] = hamiltonian_element(params, a, &b);
            }
        }
    }

    Ok(HamiltonianMatrix {
        params: *params,
        truncation: trunc,
        sector,
        basis,
        entries,
    })
}
