use dicke_core::eigen::raw_eigenvalues;
use dicke_core::hamiltonian::build_unsectored_hamiltonian;
use dicke_core::*;
use proptest::prelude::*;

fn merged_sectors(p: &ModelParams, t: Truncation) -> Vec<f64> {
    let mut all: Vec<f64> = ParitySector::BOTH
        .iter()
        .flat_map(|&s| {
            eigenvalues(&build_hamiltonian(p, t, s).unwrap())
                .unwrap()
                .levels
        })
        .collect();
    all.sort_by(f64::total_cmp);
    all
}

fn full_spectrum(p: &ModelParams, t: Truncation) -> Vec<f64> {
    let h = build_unsectored_hamiltonian(p, t, usize::MAX).unwrap();
    let mut e = raw_eigenvalues(&h).unwrap();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn sectors_reproduce_full_space_small_case() {
    let p = ModelParams::resonant(1.0, 3).unwrap();
    let t = Truncation::new(5);
    let a = merged_sectors(&p, t);
    let b = full_spectrum(&p, t);
    assert_eq!(a.len(), 24);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10, "{x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parity_blocks_are_complete(
        n in 1u32..=4,
        n_max in 0u32..=6,
        g in 0.0f64..3.0,
        omega in 0.3f64..2.0,
        omega0 in 0.3f64..2.0,
    ) {
        let p = ModelParams::new(omega, omega0, g, n).unwrap();
        let t = Truncation::new(n_max);
        let a = merged_sectors(&p, t);
        let b = full_spectrum(&p, t);
        prop_assert_eq!(a.len(), b.len());
        prop_assert_eq!(a.len(), t.total_dim(&p));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let dp = sector_dim(&p, t, ParitySector::Positive) as i64;
        let dm = sector_dim(&p, t, ParitySector::Negative) as i64;
        prop_assert!((dp - dm).abs() <= i64::from(n) + 1);
    }

    #[test]
    fn levels_never_rise_with_the_cutoff(
        n in 1u32..=6,
        g in 0.0f64..2.5,
        base in 2u32..10,
        step in 1u32..6,
    ) {
        let p = ModelParams::resonant(g, n).unwrap();
        for sector in ParitySector::BOTH {
            let lo = spectrum(&p, Truncation::new(base), sector, &SolveOptions::default()).unwrap();
            let hi = spectrum(&p, Truncation::new(base + step), sector, &SolveOptions::default()).unwrap();
            for (a, b) in lo.levels.iter().zip(&hi.levels) {
                prop_assert!(b - a <= 1e-10, "{} -> {}", a, b);
            }
        }
    }

    #[test]
    fn trust_never_exceeds_the_artifact_energy(
        n in 1u32..=5,
        g in 0.0f64..2.0,
        n_max in 3u32..15,
    ) {
        let p = ModelParams::resonant(g, n).unwrap();
        let w = trusted_window(&p, ParitySector::Positive, n_max, default_probe(n_max), 1e-6, &SolveOptions::default()).unwrap();
        let bound = f64::from(n) * truncation_artifact_energy(&p, Truncation::new(n_max));
        prop_assert!((w.e_star - bound).abs() < 1e-12);
        if let Some(e) = w.e_trust {
            prop_assert!(e <= bound + 1e-12);
        }
    }
}

#[test]
fn trusted_levels_stay_trusted_under_a_larger_probe() {
    let p = ModelParams::resonant(0.8, 8).unwrap();
    let tol = 1e-6;
    let opts = SolveOptions::default();
    let a = trusted_window(&p, ParitySector::Negative, 60, 75, tol, &opts).unwrap();
    let b = trusted_window(&p, ParitySector::Negative, 75, 94, tol, &opts).unwrap();
    assert!(a.count_trusted > 50);
    assert!(b.count_trusted >= a.count_trusted);
}

#[test]
fn verified_solve_agrees_with_fast_path() {
    let p = ModelParams::resonant(1.3, 6).unwrap();
    let h = build_hamiltonian(&p, Truncation::new(20), ParitySector::Positive).unwrap();
    let fast = eigenvalues(&h).unwrap().levels;
    let checked = dicke_core::eigen::eigenvalues_with(&h, Some(25))
        .unwrap()
        .levels;
    for (a, b) in fast.iter().zip(&checked) {
        assert!((a - b).abs() < 1e-9);
    }
}
