//! Synthetic stand-in for the original (unpublished) script corpus: each
//! class is an independent Gaussian per feature with the published per-class
//! mean and standard deviation of the 17 static features.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Dataset;

pub const CLASS_NAMES: [&str; 3] = ["cryptojacking", "malicious", "benign"];

/// Per-class feature means, columns in `jsmetrics::FEATURE_NAMES` order.
pub const CLASS_MEANS: [[f64; 17]; 3] = [
    [
        130.3, 29.9, 11.3, 88.9, 3_026_191.0, 3_755.1, 168_121.0, 516.4, 33_925.0, 41.3, 1_981.5, 475.1, 1_773.6,
        53.8, 440.3, 538.1, 64.9,
    ],
    [
        18.4, 14.0, 4.9, 15.5, 284_803.7, 1_625.2, 15_822.0, 422.9, 14_938.0, 12.8, 900.2, 410.1, 725.0, 26.2,
        153.1, 445.0, 66.9,
    ],
    [
        1_049.4, 48.5, 65.6, 236.1, 52_900_430.0, 19_049.2, 2_938_912.0, 1_216.0, 196_814.0, 52.1, 10_428.2,
        1_163.9, 8_621.0, 449.1, 2_217.8, 2_537.1, 63.4,
    ],
];

/// Per-class feature standard deviations.
pub const CLASS_SDS: [[f64; 17]; 3] = [
    [
        35.9, 8.4, 3.9, 13.8, 1_180_403.0, 1_109.9, 65_577.0, 185.1, 11_856.0, 3.9, 599.3, 182.8, 519.3, 14.8, 93.2,
        126.3, 2.8,
    ],
    [
        31.9, 10.5, 5.0, 10.8, 364_470.8, 1_508.9, 20_248.0, 374.8, 15_045.0, 6.9, 834.7, 372.5, 686.6, 72.6, 171.9,
        543.5, 24.9,
    ],
    [
        694.0, 17.8, 33.6, 92.8, 44_755_377.0, 9_151.2, 2_486_409.0, 459.8, 100_856.0, 5.3, 4_999.0, 456.7, 4_165.0,
        310.3, 1_225.4, 1_418.2, 4.3,
    ],
];

/// Draws `per_class` samples for each of the three classes.
pub fn table_gaussian(per_class: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(per_class * 3);
    let mut labels = Vec::with_capacity(per_class * 3);
    for (class, (means, sds)) in CLASS_MEANS.iter().zip(&CLASS_SDS).enumerate() {
        let dists: Vec<Normal<f64>> = means
            .iter()
            .zip(sds)
            .map(|(&m, &s)| Normal::new(m, s).expect("finite positive sd"))
            .collect();
        for _ in 0..per_class {
            samples.push(dists.iter().map(|d| d.sample(&mut rng)).collect());
            labels.push(class);
        }
    }
    Dataset::new(samples, labels, CLASS_NAMES.iter().map(|s| s.to_string()).collect())
        .expect("generated data is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let a = table_gaussian(40, 0);
        assert_eq!(a.len(), 120);
        assert_eq!(a.width(), 17);
        assert_eq!(a.class_counts(), vec![40, 40, 40]);
        assert_eq!(a, table_gaussian(40, 0));
        assert_ne!(a, table_gaussian(40, 1));
    }
}
