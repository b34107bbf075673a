use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::DEGENERATE_GAP;

/// GOE mean gap ratio.
pub const GOE_MEAN_R: f64 = 0.5307;

/// Poisson mean gap ratio, `2 ln 2 - 1`.
pub const POISSON_MEAN_R: f64 = 0.386_294_361_119_890_6;

/// Consecutive-gap ratios of a raw (not unfolded) level sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStatistic {
    pub mean: f64,
    /// Naive `sd / sqrt(n)`; neighbouring ratios share a gap, so this
    /// underestimates the true error somewhat.
    pub std_error: f64,
    pub ratios: Vec<f64>,
    /// Gaps below `1e-12 ⟨S⟩`; every ratio touching one is skipped.
    pub n_degenerate: usize,
}

/// `r_n = min(S_n, S_{n+1}) / max(S_n, S_{n+1})` and its mean.
pub fn r_statistic(levels: &[f64]) -> Result<RatioStatistic> {
    if levels.len() < 3 {
        return Err(Error::TooFew {
            what: "levels for the gap ratio",
            needed: 3,
            got: levels.len(),
        });
    }
    if levels.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidArgument(
            "levels must be sorted ascending".into(),
        ));
    }
    let gaps: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let floor = DEGENERATE_GAP * mean_gap;
    let n_degenerate = gaps.iter().filter(|&&s| s <= floor).count();

    let ratios: Vec<f64> = gaps
        .windows(2)
        .filter(|w| w[0] > floor && w[1] > floor)
        .map(|w| w[0].min(w[1]) / w[0].max(w[1]))
        .collect();
    if ratios.is_empty() {
        return Err(Error::TooFew {
            what: "non-degenerate gap pairs",
            needed: 1,
            got: 0,
        });
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = if ratios.len() > 1 {
        ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(RatioStatistic {
        mean,
        std_error: (var / n).sqrt(),
        ratios,
        n_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn picket_fence() {
        let levels: Vec<f64> = (0..20).map(|k| 0.5 * k as f64).collect();
        let r = r_statistic(&levels).unwrap();
        assert!(r.ratios.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert_abs_diff_eq!(r.mean, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn alternating_gaps() {
        let mut levels = vec![0.0];
        for k in 0..30 {
            let last = *levels.last().unwrap();
            levels.push(last + if k % 2 == 0 { 1.0 } else { 2.0 });
        }
        let r = r_statistic(&levels).unwrap();
        assert!(r.ratios.iter().all(|&x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn poisson_sample() {
        // exponential gaps: ⟨r⟩ = 2 ln 2 - 1
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut e = 0.0;
        let levels: Vec<f64> = (0..100_000)
            .map(|_| {
                e += -(1.0 - rng.random::<f64>()).ln();
                e
            })
            .collect();
        let r = r_statistic(&levels).unwrap();
        assert!((r.mean - POISSON_MEAN_R).abs() < 0.005, "{}", r.mean);
        assert_abs_diff_eq!(POISSON_MEAN_R, 2.0 * 2f64.ln() - 1.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_gaps_are_skipped() {
        let levels = [0.0, 1.0, 1.0, 3.0, 4.0, 6.0];
        let r = r_statistic(&levels).unwrap();
        assert_eq!(r.n_degenerate, 1);
        assert_eq!(r.ratios.len(), 2);
        assert!(r_statistic(&[0.0, 1.0]).is_err());
        assert!(r_statistic(&[1.0, 1.0, 1.0]).is_err());
        assert!(r_statistic(&[2.0, 1.0, 3.0]).is_err());
    }

    proptest! {
        #[test]
        fn affine_invariance(
            gaps in prop::collection::vec(0.001f64..5.0, 3..100),
            a in 0.01f64..100.0,
            b in -100.0f64..100.0,
        ) {
            let mut levels = vec![0.0];
            for g in gaps {
                let last = *levels.last().unwrap();
                levels.push(last + g);
            }
            let mapped: Vec<f64> = levels.iter().map(|e| a * e + b).collect();
            let r1 = r_statistic(&levels).unwrap();
            let r2 = r_statistic(&mapped).unwrap();
            prop_assert!((r1.mean - r2.mean).abs() < 1e-9);
            prop_assert!(r1.ratios.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }
}
