//! Physical parameters of the Dicke model and the numerical photon cutoff.
//!
//! Units: ħ = 1, every energy is measured in the same (arbitrary) unit as
//! `omega`. The atoms are always treated in the maximal pseudospin sector
//! `j = N/2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Couplings and atom number of the Dicke model.
///
/// These are the only physical knobs; the photon cutoff lives in
/// [`Truncation`] and is deliberately kept out of this type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    omega: f64,
    omega0: f64,
    g: f64,
    n_atoms: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    omega: f64,
    omega0: f64,
    g: f64,
    n_atoms: u32,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.omega, raw.omega0, raw.g, raw.n_atoms)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            omega: p.omega,
            omega0: p.omega0,
            g: p.g,
            n_atoms: p.n_atoms,
        }
    }
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, g: f64, n_atoms: u32) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParams(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "omega0 must be > 0, got {omega0}"
            )));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidParams(format!("g must be >= 0, got {g}")));
        }
        if n_atoms == 0 {
            return Err(Error::InvalidParams("n_atoms must be >= 1".into()));
        }
        Ok(ModelParams {
            omega,
            omega0,
            g,
            n_atoms,
        })
    }

    /// Resonant model, `omega = omega0 = 1`.
    pub fn resonant(g: f64, n_atoms: u32) -> Result<Self> {
        Self::new(1.0, 1.0, g, n_atoms)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn n_atoms(&self) -> u32 {
        self.n_atoms
    }

    /// Pseudospin length `j = N/2`.
    pub fn j(&self) -> f64 {
        f64::from(self.n_atoms) / 2.0
    }

    /// Twice the pseudospin, `2j = N`, as an exact integer.
    pub fn two_j(&self) -> i64 {
        i64::from(self.n_atoms)
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega, self.omega0, g, self.n_atoms)
    }

    pub fn with_n_atoms(&self, n_atoms: u32) -> Result<Self> {
        Self::new(self.omega, self.omega0, self.g, n_atoms)
    }
}

/// Photon cutoff: the Fock states `|0>, ..., |n_max>` are retained.
///
/// This is a numerical device only; no physical observable may depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Truncation {
    pub n_max: u32,
}

impl Truncation {
    pub fn new(n_max: u32) -> Self {
        Truncation { n_max }
    }

    /// Dimension of the truncated photonic space, `n_max + 1`.
    pub fn photon_dim(&self) -> usize {
        self.n_max as usize + 1
    }

    /// Dimension of the full truncated product space, `(N+1)(n_max+1)`.
    pub fn total_dim(&self, params: &ModelParams) -> usize {
        (params.n_atoms() as usize + 1) * self.photon_dim()
    }
}

/// Eigenvalue of the parity operator `exp(i pi (a†a + Jz + j))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParitySector {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl ParitySector {
    pub const BOTH: [ParitySector; 2] = [ParitySector::Positive, ParitySector::Negative];

    pub fn sign(self) -> i32 {
        match self {
            ParitySector::Positive => 1,
            ParitySector::Negative => -1,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Self> {
        match sign {
            1 => Some(ParitySector::Positive),
            -1 => Some(ParitySector::Negative),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ParitySector::Positive => "plus",
            ParitySector::Negative => "minus",
        }
    }
}

impl fmt::Display for ParitySector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParitySector::Positive => "+",
            ParitySector::Negative => "-",
        })
    }
}

impl std::str::FromStr for ParitySector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "plus" | "positive" => Ok(ParitySector::Positive),
            "-" | "-1" | "minus" | "negative" => Ok(ParitySector::Negative),
            other => Err(Error::InvalidArgument(format!(
                "unknown parity sector `{other}`"
            ))),
        }
    }
}

/// Classical critical coupling `g_c = sqrt(omega * omega0) / 2`.
pub fn critical_coupling(params: &ModelParams) -> f64 {
    (params.omega() * params.omega0()).sqrt() / 2.0
}

/// Energy per atom `E*/N = omega * n_max / N + omega0 / 2`.
///
/// This is the highest energy a Fock-truncated diagonalization can represent
/// without every basis state touching the cutoff. It is a property of the
/// truncation, not of the model: no eigenvalue above it can be trusted, and
/// it diverges as `n_max` grows.
pub fn truncation_artifact_energy(params: &ModelParams, trunc: Truncation) -> f64 {
    params.omega() * f64::from(trunc.n_max) / f64::from(params.n_atoms()) + params.omega0() / 2.0
}
