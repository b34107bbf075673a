//! Classical limit of the Dicke model: energy surface, ground-state energy and
//! the leading-order (Weyl) density of states.
//!
//! Phase space is the Bloch sphere of the collective spin times the plane of
//! the field quadratures. In the scaled variables used here the classical
//! energy per `j = N/2` is
//!
//! `h(q, p, c, phi) = omega (q² + p²) / 2 + omega0 c + 2 g q sqrt(1 - c²) cos(phi)`
//!
//! with `c = cos(theta)`. For a fixed atomic point the field part is a shifted
//! oscillator whose minimum over `(q, p)` is
//!
//! `e_min(c, phi) = omega0 c - (2 g² / omega)(1 - c²) cos²(phi)`
//!
//! and whose level density above that minimum is the constant `1/omega`. The
//! density of states therefore reduces to the fraction of the sphere where
//! `e_min` lies below the energy:
//!
//! `nu(E) = (N + 1)/omega · ⟨Θ(E/j − e_min)⟩_sphere`.
//!
//! Above `E/N = omega0/2` the whole sphere is accessible and `nu` is flat.

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{critical_coupling, ModelParams};

/// A point of the classical phase space `S² × R²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPoint {
    pub q: f64,
    pub p: f64,
    /// `cos(theta)`, in `[-1, 1]`.
    pub c: f64,
    pub phi: f64,
}

impl ClassicalPoint {
    pub fn new(q: f64, p: f64, c: f64, phi: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&c) {
            return Err(Error::InvalidArgument(format!(
                "cos(theta) = {c} outside [-1, 1]"
            )));
        }
        if !(q.is_finite() && p.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidArgument(
                "non-finite phase-space coordinate".into(),
            ));
        }
        Ok(ClassicalPoint {
            q,
            p,
            c,
            phi: phi.rem_euclid(std::f64::consts::TAU),
        })
    }
}

/// Classical energy per `j` (i.e. `2E/N`).
pub fn classical_energy(params: &ModelParams, pt: &ClassicalPoint) -> f64 {
    let sin_theta = (1.0 - pt.c * pt.c).max(0.0).sqrt();
    params.omega() * (pt.q * pt.q + pt.p * pt.p) / 2.0
        + params.omega0() * pt.c
        + 2.0 * params.g() * pt.q * sin_theta * pt.phi.cos()
}

/// Energy per `j` minimized over the field quadratures at fixed `(c, phi)`.
pub fn field_minimized_energy(params: &ModelParams, c: f64, phi: f64) -> f64 {
    let cos_phi = phi.cos();
    params.omega0() * c - coupling_scale(params) * (1.0 - c * c) * cos_phi * cos_phi
}

/// `2 g² / omega`, the depth of the field-induced well.
fn coupling_scale(params: &ModelParams) -> f64 {
    2.0 * params.g() * params.g() / params.omega()
}

/// Semiclassical ground-state energy per atom.
///
/// `-omega0/2` in the normal phase; `-g²/omega - omega omega0² / (16 g²)` above `g_c`.
pub fn ground_state_energy(params: &ModelParams) -> f64 {
    let g = params.g();
    if g <= critical_coupling(params) {
        -params.omega0() / 2.0
    } else {
        let (w, w0) = (params.omega(), params.omega0());
        -g * g / w - w * w0 * w0 / (16.0 * g * g)
    }
}

/// `E/N` above which the density of states is constant.
pub fn flat_onset_energy(params: &ModelParams) -> f64 {
    params.omega0() / 2.0
}

/// `E/N` of the excited-state transition of the superradiant phase.
pub fn esqpt_energy(params: &ModelParams) -> f64 {
    -params.omega0() / 2.0
}

/// Tensor rule on the sphere: Gauss–Legendre in `c`, trapezoid in `phi`.
///
/// Both grids are doubled until the result changes by less than `tol`
/// relative to the full-sphere scale of the quantity (1 for the accessible
/// fraction, `omega0 + 2g²/omega` for the integrated energy excess).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereQuadrature {
    pub c_nodes: usize,
    pub phi_nodes: usize,
    pub tol: f64,
    pub max_refinements: u32,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        SphereQuadrature {
            c_nodes: 2000,
            phi_nodes: 2000,
            tol: 1e-4,
            max_refinements: 6,
        }
    }
}

/// One refinement level of the tensor grid.
///
/// The trapezoid sum in `phi` only sees `cos²(phi)`, so the `phi` samples are
/// kept sorted with prefix sums; the indicator and ramp sums over `phi` then
/// reduce to a binary search per `c` node. This is the same tensor rule, just
/// evaluated without touching every grid point.
struct SphereGrid {
    c_rule: Vec<(f64, f64)>,
    cos2_sorted: Vec<f64>,
    /// `suffix[k] = sum of cos2_sorted[k..]`
    suffix: Vec<f64>,
}

impl SphereGrid {
    fn new(c_nodes: usize, phi_nodes: usize) -> Result<Self> {
        let c_nodes = c_nodes
            .try_into()
            .map_err(|_| Error::InvalidArgument("zero quadrature nodes in c".into()))?;
        if phi_nodes == 0 {
            return Err(Error::InvalidArgument(
                "zero quadrature nodes in phi".into(),
            ));
        }
        let rule = GaussLegendre::new(c_nodes);
        let c_rule = rule.as_node_weight_pairs().to_vec();
        let mut cos2_sorted: Vec<f64> = (0..phi_nodes)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / phi_nodes as f64;
                phi.cos().powi(2)
            })
            .collect();
        cos2_sorted.sort_by(f64::total_cmp);
        let mut suffix = vec![0.0; phi_nodes + 1];
        for k in (0..phi_nodes).rev() {
            suffix[k] = suffix[k + 1] + cos2_sorted[k];
        }
        Ok(SphereGrid {
            c_rule,
            cos2_sorted,
            suffix,
        })
    }

    /// Sphere averages of `Θ(x - e_min)` and `(x - e_min)_+`.
    fn averages(&self, x: f64, omega0: f64, depth: f64) -> (f64, f64) {
        let p = self.cos2_sorted.len() as f64;
        let mut frac = 0.0;
        let mut ramp = 0.0;
        for &(c, w) in &self.c_rule {
            let a = omega0 * c;
            let b = depth * (1.0 - c * c);
            // e_min <= x  <=>  b cos² >= a - x
            let threshold = a - x;
            let start = if b > 0.0 {
                let t = threshold / b;
                self.cos2_sorted.partition_point(|&v| v < t)
            } else if threshold <= 0.0 {
                0
            } else {
                self.cos2_sorted.len()
            };
            let count = (self.cos2_sorted.len() - start) as f64;
            frac += w * count / p;
            ramp += w * ((x - a) * count + b * self.suffix[start]) / p;
        }
        // (1/4π) ∫dc ∫dφ = (1/2) Σ_c w · (1/P) Σ_φ
        (frac / 2.0, ramp / 2.0)
    }
}

/// Reusable evaluator of the semiclassical density of states for one model.
pub struct DosEvaluator {
    params: ModelParams,
    quad: SphereQuadrature,
    grids: Vec<SphereGrid>,
}

#[derive(Clone, Copy)]
enum Quantity {
    Fraction,
    Ramp,
}

impl DosEvaluator {
    pub fn new(params: &ModelParams, quad: SphereQuadrature) -> Result<Self> {
        if !(quad.tol > 0.0) {
            return Err(Error::InvalidArgument(
                "quadrature tolerance must be > 0".into(),
            ));
        }
        Ok(DosEvaluator {
            params: *params,
            quad,
            grids: Vec::new(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    fn grid(&mut self, level: usize) -> Result<&SphereGrid> {
        while self.grids.len() <= level {
            let scale = 1usize << self.grids.len();
            self.grids.push(SphereGrid::new(
                self.quad.c_nodes * scale,
                self.quad.phi_nodes * scale,
            )?);
        }
        Ok(&self.grids[level])
    }

    fn refine(&mut self, x: f64, what: Quantity) -> Result<f64> {
        let omega0 = self.params.omega0();
        let depth = coupling_scale(&self.params);
        let scale = match what {
            Quantity::Fraction => 1.0,
            Quantity::Ramp => omega0 + depth,
        };
        let pick = |v: (f64, f64)| match what {
            Quantity::Fraction => v.0,
            Quantity::Ramp => v.1,
        };
        let mut prev = pick(self.grid(0)?.averages(x, omega0, depth));
        let mut change = f64::INFINITY;
        for level in 1..=self.quad.max_refinements as usize {
            let next = pick(self.grid(level)?.averages(x, omega0, depth));
            change = (next - prev).abs() / scale;
            if change < self.quad.tol {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::QuadratureNotConverged {
            target: self.quad.tol,
            achieved: change,
            grid: self.quad.c_nodes << self.quad.max_refinements,
        })
    }

    /// Fraction of the Bloch sphere accessible at energy `e_per_atom`.
    pub fn accessible_fraction(&mut self, e_per_atom: f64) -> Result<f64> {
        let x = 2.0 * e_per_atom;
        if x >= self.params.omega0() {
            return Ok(1.0);
        }
        if e_per_atom < ground_state_energy(&self.params) {
            return Ok(0.0);
        }
        self.refine(x, Quantity::Fraction)
    }

    /// States (both parity sectors) per unit energy.
    pub fn dos(&mut self, e_per_atom: f64) -> Result<f64> {
        Ok(self.flat_density() * self.accessible_fraction(e_per_atom)?)
    }

    /// Smooth level count below `E = N e_per_atom`, both parity sectors.
    ///
    /// Integrating the density in energy under the sphere average turns the
    /// indicator into the ramp `(E/j - e_min)_+`, so the count is
    /// `(N+1)/omega · j · ⟨(E/j - e_min)_+⟩`. On the flat region the ramp
    /// never clips and the average is exact: `⟨e_min⟩ = -(2g²/omega)/3`.
    pub fn cumulative(&mut self, e_per_atom: f64) -> Result<f64> {
        let x = 2.0 * e_per_atom;
        let j = self.params.j();
        if e_per_atom < ground_state_energy(&self.params) {
            return Ok(0.0);
        }
        let mean_excess = if x >= self.params.omega0() {
            x + coupling_scale(&self.params) / 3.0
        } else {
            self.refine(x, Quantity::Ramp)?
        };
        Ok(self.flat_density() * j * mean_excess)
    }

    /// `(N+1)/omega`, the density on the flat region.
    pub fn flat_density(&self) -> f64 {
        f64::from(self.params.n_atoms() + 1) / self.params.omega()
    }
}

/// Semiclassical density of states at `E/N = e_per_atom`, both parity sectors.
pub fn dos(params: &ModelParams, e_per_atom: f64, quad: &SphereQuadrature) -> Result<f64> {
    DosEvaluator::new(params, *quad)?.dos(e_per_atom)
}

/// Smooth cumulative level count `N̄(E)` at `E/N = e_per_atom`, both sectors.
pub fn cumulative_dos(
    params: &ModelParams,
    e_per_atom: f64,
    quad: &SphereQuadrature,
) -> Result<f64> {
    DosEvaluator::new(params, *quad)?.cumulative(e_per_atom)
}

/// Density of states sampled on a grid of `E/N` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosCurve {
    pub params: ModelParams,
    pub energies: Vec<f64>,
    pub density: Vec<f64>,
}

pub fn dos_curve(
    params: &ModelParams,
    energies: &[f64],
    quad: &SphereQuadrature,
) -> Result<DosCurve> {
    let mut eval = DosEvaluator::new(params, *quad)?;
    let density = energies
        .iter()
        .map(|&e| eval.dos(e))
        .collect::<Result<Vec<_>>>()?;
    Ok(DosCurve {
        params: *params,
        energies: energies.to_vec(),
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    /// Grid search over (q, c, phi) at p = 0 followed by a finer local pass.
    fn grid_minimum(params: &ModelParams) -> f64 {
        let search = |qs: (f64, f64), cs: (f64, f64), phis: (f64, f64), n: usize| {
            let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
            for iq in 0..=n {
                let q = qs.0 + (qs.1 - qs.0) * iq as f64 / n as f64;
                for ic in 0..=n {
                    let c = (cs.0 + (cs.1 - cs.0) * ic as f64 / n as f64).clamp(-1.0, 1.0);
                    for ip in 0..=n / 4 {
                        let phi = phis.0 + (phis.1 - phis.0) * ip as f64 / (n / 4) as f64;
                        let pt = ClassicalPoint::new(q, 0.0, c, phi).unwrap();
                        let e = classical_energy(params, &pt);
                        if e < best.0 {
                            best = (e, q, c, phi);
                        }
                    }
                }
            }
            best
        };
        let qmax = 2.0 * params.g() / params.omega() + 1.0;
        let coarse = search((-qmax, qmax), (-1.0, 1.0), (0.0, PI), 200);
        let (_, q, c, phi) = coarse;
        let dq = 2.0 * qmax / 200.0;
        let fine = search(
            (q - dq, q + dq),
            (c - 0.01, c + 0.01),
            (phi - 0.05, phi + 0.05),
            200,
        );
        fine.0
    }

    #[test]
    fn classical_energy_examples() {
        let p = ModelParams::resonant(1.0, 10).unwrap();
        let south = ClassicalPoint::new(0.0, 0.0, -1.0, 0.3).unwrap();
        assert_eq!(classical_energy(&p, &south), -1.0);

        let c: f64 = -0.25;
        let q = -2.0 * (1.0 - c * c).sqrt();
        let pt = ClassicalPoint::new(q, 0.0, c, 0.0).unwrap();
        assert_abs_diff_eq!(classical_energy(&p, &pt), -2.125, epsilon = 1e-12);
        assert_abs_diff_eq!(field_minimized_energy(&p, c, 0.0), -2.125, epsilon = 1e-12);

        assert!(ClassicalPoint::new(0.0, 0.0, 1.5, 0.0).is_err());
    }

    #[test]
    fn decoupled_minimum() {
        let p = ModelParams::new(1.0, 0.8, 0.0, 4).unwrap();
        assert_abs_diff_eq!(grid_minimum(&p), -0.8, epsilon = 1e-9);
    }

    #[test]
    fn ground_state_matches_grid_minimization() {
        // Frozen from the grid oracle: -1.0625 and -16.00390625 at g = 1, 4.
        for (g, expect) in [(0.2, -0.5), (1.0, -1.0625), (4.0, -16.00390625)] {
            let p = ModelParams::resonant(g, 10).unwrap();
            assert_abs_diff_eq!(ground_state_energy(&p), expect, epsilon = 1e-12);
            // grid minimum is per j; ground_state_energy is per atom
            let oracle = grid_minimum(&p) / 2.0;
            assert!(
                oracle >= expect - 1e-12,
                "g={g}: grid {oracle} below formula {expect}"
            );
            assert!(
                (oracle - expect).abs() < 2e-4 * expect.abs(),
                "g={g}: grid {oracle}"
            );
        }
        let p = ModelParams::new(2.0, 0.5, 1.3, 3).unwrap();
        let oracle = grid_minimum(&p) / 2.0;
        assert!((oracle - ground_state_energy(&p)).abs() < 1e-3);
    }

    #[test]
    fn ground_state_is_continuous_at_gc() {
        let p = ModelParams::new(1.5, 0.7, 0.0, 4).unwrap();
        let gc = critical_coupling(&p);
        let below = ground_state_energy(&p.with_g(gc * (1.0 - 1e-9)).unwrap());
        let above = ground_state_energy(&p.with_g(gc * (1.0 + 1e-9)).unwrap());
        assert_abs_diff_eq!(below, -0.35);
        assert_abs_diff_eq!(above, -0.35, epsilon = 1e-8);
    }

    /// Independent route: the phi integral of the indicator in closed form,
    /// then composite Simpson in c.
    fn fraction_oracle(params: &ModelParams, e_per_atom: f64) -> f64 {
        let x = 2.0 * e_per_atom;
        let depth = 2.0 * params.g().powi(2) / params.omega();
        let phi_fraction = |c: f64| {
            let b = depth * (1.0 - c * c);
            let a = params.omega0() * c - x;
            if b <= 0.0 {
                return if a <= 0.0 { 1.0 } else { 0.0 };
            }
            let t = a / b;
            if t <= 0.0 {
                1.0
            } else if t >= 1.0 {
                0.0
            } else {
                2.0 / PI * t.sqrt().acos()
            }
        };
        let n = 400_000;
        let h = 2.0 / n as f64;
        let mut s = phi_fraction(-1.0) + phi_fraction(1.0);
        for k in 1..n {
            let c = -1.0 + k as f64 * h;
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * phi_fraction(c);
        }
        s * h / 3.0 / 2.0
    }

    #[test]
    fn dos_matches_closed_form_phi_oracle() {
        let quad = SphereQuadrature::default();
        for g in [0.2, 0.7, 1.0, 2.0] {
            let p = ModelParams::resonant(g, 20).unwrap();
            let mut eval = DosEvaluator::new(&p, quad).unwrap();
            let gs = ground_state_energy(&p);
            for k in 1..20 {
                let e = gs + (0.5 - gs) * k as f64 / 20.0;
                let got = eval.accessible_fraction(e).unwrap();
                let oracle = fraction_oracle(&p, e);
                assert!(
                    (got - oracle).abs() < 5e-4,
                    "g={g} e={e}: quadrature {got} vs oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn dos_flat_and_empty_regions() {
        let quad = SphereQuadrature::default();
        let p = ModelParams::resonant(1.0, 20).unwrap();
        assert_eq!(dos(&p, 0.5 + 1e-9, &quad).unwrap(), 21.0);
        assert_eq!(dos(&p, 3.0, &quad).unwrap(), 21.0);
        assert_eq!(dos(&p, -1.07, &quad).unwrap(), 0.0);
        assert!(dos(&p, 0.49, &quad).unwrap() < 21.0);
        assert_eq!(flat_onset_energy(&p), 0.5);

        let p = ModelParams::new(2.0, 1.0, 0.3, 9).unwrap();
        assert_eq!(dos(&p, 0.6, &quad).unwrap(), 5.0);
    }

    #[test]
    fn dos_is_non_decreasing() {
        let p = ModelParams::resonant(1.0, 10).unwrap();
        let grid: Vec<f64> = (0..200).map(|k| -1.1 + 1.7 * k as f64 / 199.0).collect();
        let curve = dos_curve(&p, &grid, &SphereQuadrature::default()).unwrap();
        for w in curve.density.windows(2) {
            assert!(w[1] >= w[0] - 1e-3 * 11.0, "{w:?}");
        }
        assert!(curve.density.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn esqpt_marks_the_steepest_rise() {
        let p = ModelParams::resonant(1.0, 10).unwrap();
        let h = 0.01;
        let grid: Vec<f64> = (0..=150).map(|k| -1.0 + h * k as f64).collect();
        let curve = dos_curve(&p, &grid, &SphereQuadrature::default()).unwrap();
        let (mut best, mut at) = (f64::NEG_INFINITY, 0.0);
        for (k, w) in curve.density.windows(2).enumerate() {
            let slope = (w[1] - w[0]) / h;
            if slope > best {
                best = slope;
                at = grid[k] + h / 2.0;
            }
        }
        assert!((at - esqpt_energy(&p)).abs() <= h, "steepest rise at {at}");
    }

    #[test]
    fn cumulative_matches_integrated_dos() {
        let quad = SphereQuadrature::default();
        for g in [0.3, 1.0] {
            let p = ModelParams::resonant(g, 20).unwrap();
            let mut eval = DosEvaluator::new(&p, quad).unwrap();
            let gs = ground_state_energy(&p);
            let n = 20.0;
            // trapezoid in E = N e of the density
            let steps = 4000;
            let top = 1.5;
            let de = (top - gs) / steps as f64;
            let mut integral = 0.0;
            let mut prev = eval.dos(gs).unwrap();
            for k in 1..=steps {
                let e = gs + de * k as f64;
                let cur = eval.dos(e).unwrap();
                integral += 0.5 * (prev + cur) * de * n;
                prev = cur;
                if k % 500 == 0 {
                    let got = eval.cumulative(e).unwrap();
                    assert!(
                        (got - integral).abs() < 1e-3 * integral.max(1.0),
                        "g={g} e={e}: {got} vs {integral}"
                    );
                }
            }
        }
    }

    #[test]
    fn cumulative_is_affine_on_flat_region() {
        let p = ModelParams::resonant(1.0, 20).unwrap();
        let quad = SphereQuadrature::default();
        let a = cumulative_dos(&p, 1.0, &quad).unwrap();
        let b = cumulative_dos(&p, 2.0, &quad).unwrap();
        let c = cumulative_dos(&p, 4.0, &quad).unwrap();
        // slope (N+1)/omega per unit energy, E = N e
        assert_abs_diff_eq!((b - a) / 20.0, 21.0, epsilon = 1e-9);
        assert_abs_diff_eq!((c - b) / 40.0, 21.0, epsilon = 1e-9);
        assert_eq!(cumulative_dos(&p, -2.0, &quad).unwrap(), 0.0);
        // continuity across the flat onset
        let below = cumulative_dos(&p, 0.5 - 1e-7, &quad).unwrap();
        let above = cumulative_dos(&p, 0.5 + 1e-7, &quad).unwrap();
        assert!((above - below).abs() < 1e-3 * above);
    }
}
