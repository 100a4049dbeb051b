use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ClassDegreeSequence;

use super::model1::homophily_index;

/// Simulated in-class preference ratios under the binomial null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullPreferenceSample {
    /// `D / d_i` with `D ~ Binom(d_i, ĥ)`, replicate-major.
    pub samples: Vec<f64>,
    pub replicate_count: usize,
    pub seed: u64,
    pub h_hat: f64,
    pub zero_degree_skipped: usize,
}

/// Draw `replicates` copies of the null ratio for every node with positive
/// degree. Deterministic in `seed`.
pub fn sample_null_preferences(
    seq: &ClassDegreeSequence,
    replicates: usize,
    seed: u64,
) -> Result<NullPreferenceSample> {
    if replicates == 0 {
        return Err(Error::Argument("replicates must be at least 1".into()));
    }
    let h_hat = homophily_index(seq)?;
    let degrees: Vec<u64> = seq
        .entries
        .iter()
        .map(|e| e.degree())
        .filter(|&d| d > 0)
        .collect();
    let dists = degrees
        .iter()
        .map(|&d| Binomial::new(d, h_hat).map_err(|e| Error::Numeric(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(replicates * degrees.len());
    for _ in 0..replicates {
        for (dist, &d) in dists.iter().zip(&degrees) {
            samples.push(dist.sample(&mut rng) as f64 / d as f64);
        }
    }
    Ok(NullPreferenceSample {
        samples,
        replicate_count: replicates,
        seed,
        h_hat,
        zero_degree_skipped: seq.entries.len() - degrees.len(),
    })
}

/// Observed ratios `d_in / d_i` for nodes with positive degree.
pub fn observed_ratios(seq: &ClassDegreeSequence) -> Vec<f64> {
    seq.entries
        .iter()
        .filter(|e| e.degree() > 0)
        .map(|e| e.d_in as f64 / e.degree() as f64)
        .collect()
}

/// Equal-width histogram over `[0, 1]`, normalized to densities that sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub fractions: Vec<f64>,
}

impl Histogram {
    pub fn unit_interval(values: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let mut counts = vec![0u64; bins];
        for &v in values {
            let b = ((v * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let total = values.len().max(1) as f64;
        Self {
            edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
            fractions: counts.iter().map(|&c| c as f64 / total).collect(),
            counts,
        }
    }
}

pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_homophily_gives_unit_ratios() {
        let seq = ClassDegreeSequence::from_counts(&[(3, 3), (5, 5), (1, 1)]).unwrap();
        let s = sample_null_preferences(&seq, 10, 1).unwrap();
        assert_eq!(s.samples.len(), 30);
        assert!(s.samples.iter().all(|&r| r == 1.0));
    }

    #[test]
    fn unit_degree_mean_within_binomial_bound() {
        let pairs: Vec<_> = (0..1000).map(|i| ((i % 2) as u64, 1)).collect();
        let seq = ClassDegreeSequence::from_counts(&pairs).unwrap();
        let s = sample_null_preferences(&seq, 20, 9).unwrap();
        let n = s.samples.len() as f64;
        let mean = s.samples.iter().sum::<f64>() / n;
        let sigma = (0.25 / n).sqrt();
        assert!((mean - 0.5).abs() <= 3.0 * sigma, "{mean}");
    }

    #[test]
    fn deterministic_and_skips_isolated() {
        let seq = ClassDegreeSequence::from_counts(&[(1, 4), (0, 0), (2, 3)]).unwrap();
        let a = sample_null_preferences(&seq, 5, 42).unwrap();
        let b = sample_null_preferences(&seq, 5, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.zero_degree_skipped, 1);
        assert_eq!(a.samples.len(), 10);
        assert!(a.samples.iter().all(|r| (0.0..=1.0).contains(r)));
        assert!(sample_null_preferences(&seq, 0, 1).is_err());
    }

    #[test]
    fn histogram_counts_every_value() {
        let h = Histogram::unit_interval(&[0.0, 0.1, 0.5, 0.99, 1.0], 4);
        assert_eq!(h.counts, vec![2, 0, 1, 2]);
        assert_eq!(h.edges.len(), 5);
        assert!((h.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
