//! Product basis `|j, m> ⊗ |n>` of the truncated model.

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, ParitySector, Truncation};

/// One product state: `Jz` eigenvalue `m` and photon number `n`.
///
/// `m` is stored doubled so half-integer values stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub two_m: i64,
    pub n: u32,
}

impl BasisState {
    pub fn new(two_m: i64, n: u32) -> Self {
        BasisState { two_m, n }
    }

    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    /// Parity `(-1)^(n + m + j)`; `m + j` is an integer for every allowed `m`.
    pub fn parity(&self, params: &ModelParams) -> ParitySector {
        let m_plus_j = (self.two_m + params.two_j()) / 2;
        if (i64::from(self.n) + m_plus_j).rem_euclid(2) == 0 {
            ParitySector::Positive
        } else {
            ParitySector::Negative
        }
    }
}

/// All `m` values `-j, -j+1, ..., j`, doubled.
fn two_m_values(params: &ModelParams) -> impl Iterator<Item = i64> + Clone {
    let two_j = params.two_j();
    (0..=two_j).map(move |k| 2 * k - two_j)
}

/// States of one parity sector, ordered with `n` outer and `m` inner (both ascending).
pub fn enumerate_basis(
    params: &ModelParams,
    trunc: Truncation,
    sector: ParitySector,
) -> Vec<BasisState> {
    enumerate_full_basis(params, trunc)
        .into_iter()
        .filter(|s| s.parity(params) == sector)
        .collect()
}

/// Every product state of the truncated space in the same `(n, m)` order.
pub fn enumerate_full_basis(params: &ModelParams, trunc: Truncation) -> Vec<BasisState> {
    let mut out = Vec::with_capacity(trunc.total_dim(params));
    for n in 0..=trunc.n_max {
        out.extend(two_m_values(params).map(|two_m| BasisState { two_m, n }));
    }
    out
}

/// Dimension of one sector without enumerating it.
pub fn sector_dim(params: &ModelParams, trunc: Truncation, sector: ParitySector) -> usize {
    let atoms = params.n_atoms() as usize + 1;
    let photons = trunc.photon_dim();
    let total = atoms * photons;
    // Each pair of consecutive photon numbers splits evenly; an odd leftover
    // slice contributes its own parity count.
    if total % 2 == 0 {
        return total / 2;
    }
    // Both factors odd: N even, n_max even. The m + j values 0..=N hold one
    // more even than odd entry, so n = 0 favours the positive sector.
    match sector {
        ParitySector::Positive => total / 2 + 1,
        ParitySector::Negative => total / 2,
    }
}
