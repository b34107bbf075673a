use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::semiclassical::{DosEvaluator, SphereQuadrature};

use super::DEGENERATE_GAP;

/// Minimum number of levels for a polynomial staircase fit.
pub const MIN_POLYNOMIAL_LEVELS: usize = 20;

pub const DEFAULT_DEGREE: usize = 6;

/// How the smooth staircase `N̄(E)` is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum UnfoldMethod {
    /// Least-squares polynomial fit to the empirical staircase of the levels.
    Polynomial { degree: usize },
    /// Semiclassical level count of one parity sector, `N̄(E)/2`.
    Semiclassical {
        params: ModelParams,
        quadrature: SphereQuadrature,
    },
}

impl Default for UnfoldMethod {
    fn default() -> Self {
        UnfoldMethod::Polynomial {
            degree: DEFAULT_DEGREE,
        }
    }
}

/// Levels mapped through the smooth staircase and rescaled to unit mean spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldedSpectrum {
    /// Original energies of the retained (deduplicated) levels.
    pub energies: Vec<f64>,
    /// Unfolded values, same order as `energies`.
    pub values: Vec<f64>,
    pub method: UnfoldMethod,
    /// Source window in `E/N`, when the levels were cut from a model spectrum.
    pub window: Option<(f64, f64)>,
    /// Levels dropped as numerically degenerate with their predecessor.
    pub n_degenerate: usize,
}

impl UnfoldedSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean_spacing(&self) -> f64 {
        let n = self.values.len();
        (self.values[n - 1] - self.values[0]) / (n - 1) as f64
    }
}

/// Drop levels that coincide with their predecessor to within
/// `DEGENERATE_GAP` times the mean gap.
fn deduplicate(levels: &[f64]) -> (Vec<f64>, usize) {
    let n = levels.len();
    if n < 2 {
        return (levels.to_vec(), 0);
    }
    let mean_gap = (levels[n - 1] - levels[0]) / (n - 1) as f64;
    let floor = DEGENERATE_GAP * mean_gap;
    let mut out = Vec::with_capacity(n);
    out.push(levels[0]);
    for &e in &levels[1..] {
        if e - out[out.len() - 1] > floor {
            out.push(e);
        }
    }
    let dropped = n - out.len();
    (out, dropped)
}

fn check_sorted(levels: &[f64]) -> Result<()> {
    if levels.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidArgument("non-finite level".into()));
    }
    if levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(
            "levels must be sorted ascending".into(),
        ));
    }
    Ok(())
}

/// Legendre polynomials `P_0..=P_degree` at `t`.
fn legendre_row(t: f64, degree: usize, row: &mut [f64]) {
    row[0] = 1.0;
    if degree >= 1 {
        row[1] = t;
    }
    for k in 2..=degree {
        let kf = k as f64;
        row[k] = ((2.0 * kf - 1.0) * t * row[k - 1] - (kf - 1.0) * row[k - 2]) / kf;
    }
}

fn polynomial_staircase(levels: &[f64], degree: usize) -> Result<Vec<f64>> {
    let n = levels.len();
    if n < MIN_POLYNOMIAL_LEVELS {
        return Err(Error::TooFew {
            what: "levels for a polynomial unfolding",
            needed: MIN_POLYNOMIAL_LEVELS,
            got: n,
        });
    }
    if n <= degree + 1 {
        return Err(Error::Unfolding(format!(
            "degree {degree} fit is rank-deficient with {n} distinct levels"
        )));
    }
    let (lo, hi) = (levels[0], levels[n - 1]);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let scaled = |e: f64| (e - mid) / half;

    let cols = degree + 1;
    let mut row = vec![0.0; cols];
    let mut design = Mat::<f64>::zeros(n, cols);
    let mut rhs = Mat::<f64>::zeros(n, 1);
    for (i, &e) in levels.iter().enumerate() {
        legendre_row(scaled(e), degree, &mut row);
        for (k, &v) in row.iter().enumerate() {
            design[(i, k)] = v;
        }
        // staircase N(E_i) = i + 1; the offset is irrelevant after rescaling
        rhs[(i, 0)] = (i + 1) as f64;
    }
    let qr = design.qr();
    let r = qr.R();
    let r_max = (0..cols).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
    if (0..cols).any(|k| r[(k, k)].abs() <= 1e-12 * r_max) {
        return Err(Error::Unfolding(format!(
            "degree {degree} fit is rank-deficient"
        )));
    }
    let coef = qr.solve_lstsq(&rhs);
    Ok(levels
        .iter()
        .map(|&e| {
            legendre_row(scaled(e), degree, &mut row);
            row.iter().enumerate().map(|(k, v)| v * coef[(k, 0)]).sum()
        })
        .collect())
}

/// Unfold a sorted list of levels.
pub fn unfold(levels: &[f64], method: &UnfoldMethod) -> Result<UnfoldedSpectrum> {
    check_sorted(levels)?;
    let (energies, n_degenerate) = deduplicate(levels);
    if energies.len() < 2 {
        return Err(Error::TooFew {
            what: "distinct levels",
            needed: 2,
            got: energies.len(),
        });
    }

    let raw = match method {
        UnfoldMethod::Polynomial { degree } => polynomial_staircase(&energies, *degree)?,
        UnfoldMethod::Semiclassical { params, quadrature } => {
            let mut eval = DosEvaluator::new(params, *quadrature)?;
            let n = f64::from(params.n_atoms());
            energies
                .iter()
                .map(|&e| eval.cumulative(e / n).map(|c| c / 2.0))
                .collect::<Result<Vec<_>>>()?
        }
    };

    if let Some(k) = raw.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Unfolding(format!(
            "unfolding map is not increasing between E = {} and E = {}",
            energies[k],
            energies[k + 1]
        )));
    }

    let count = raw.len();
    let span = raw[count - 1] - raw[0];
    let stretch = (count - 1) as f64 / span;
    let values = raw
        .iter()
        .map(|&v| raw[0] + (v - raw[0]) * stretch)
        .collect();

    Ok(UnfoldedSpectrum {
        energies,
        values,
        method: method.clone(),
        window: None,
        n_degenerate,
    })
}

/// Unfold the levels with `lo <= E/N <= hi`.
pub fn unfold_window(
    levels: &[f64],
    n_atoms: u32,
    lo: f64,
    hi: f64,
    method: &UnfoldMethod,
) -> Result<UnfoldedSpectrum> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
    }
    let n = f64::from(n_atoms);
    let selected: Vec<f64> = levels
        .iter()
        .copied()
        .filter(|e| (lo..=hi).contains(&(e / n)))
        .collect();
    let mut u = unfold(&selected, method)?;
    u.window = Some((lo, hi));
    Ok(u)
}
