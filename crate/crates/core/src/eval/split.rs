use rand::seq::SliceRandom;
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::classify::{binary_negative, TrainTestSplit};
use crate::error::{Error, Result};
use crate::graph::{ClassId, LabeledGraph};

pub const MAX_SPLIT_ATTEMPTS: usize = 100;

/// `⌈fraction · n⌉`, guarded against representation error in the product.
pub fn train_size(fraction: f64, n: usize) -> usize {
    (fraction * n as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Draw an exact-size uniform training set from the labeled nodes. Splits
/// missing a class from train or test are redrawn.
pub fn sample_split<R: Rng + ?Sized>(
    g: &LabeledGraph,
    fraction: f64,
    positive: ClassId,
    rng: &mut R,
) -> Result<TrainTestSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Argument(format!("label fraction must lie in (0, 1), got {fraction}")));
    }
    let negative = binary_negative(g, positive)?;
    let mut labeled = g.labeled_nodes();
    let k = train_size(fraction, labeled.len());
    if k == 0 || k >= labeled.len() {
        return Err(Error::Argument(format!(
            "fraction {fraction} of {} labeled nodes leaves an empty train or test set",
            labeled.len()
        )));
    }
    for _ in 0..MAX_SPLIT_ATTEMPTS {
        labeled.shuffle(rng);
        let (train, test) = labeled.split_at(k);
        let has = |set: &[usize], c: ClassId| set.iter().any(|&u| g.label(u) == Some(c));
        if has(train, positive) && has(train, negative) && has(test, positive) && has(test, negative) {
            let mut train = train.to_vec();
            let mut test = test.to_vec();
            train.sort_unstable();
            test.sort_unstable();
            return Ok(TrainTestSplit { train, test, positive, negative });
        }
    }
    Err(Error::DegenerateSplit { attempts: MAX_SPLIT_ATTEMPTS })
}

/// SHA-256 of the sorted training source ids.
pub fn split_hash(g: &LabeledGraph, split: &TrainTestSplit) -> String {
    let mut ids: Vec<u64> = split.train.iter().map(|&u| g.source_id(u)).collect();
    ids.sort_unstable();
    let mut h = Sha256::new();
    for id in ids {
        h.update(id.to_le_bytes());
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(n: u64) -> LabeledGraph {
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        let labels: Vec<_> = (0..n)
            .map(|u| (u, Some(if u % 2 == 0 { "F" } else { "M" }.to_string())))
            .collect();
        load_graph(&edges, &labels, false).unwrap()
    }

    #[test]
    fn exact_size() {
        let g = ring(100);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = sample_split(&g, 0.5, ClassId(0), &mut rng).unwrap();
        assert_eq!(s.train.len(), 50);
        assert_eq!(s.test.len(), 50);
        assert_eq!(train_size(0.3, 10), 3);
        assert_eq!(train_size(0.7, 10), 7);
        assert_eq!(train_size(0.1, 15), 2);
    }

    #[test]
    fn same_seed_same_split() {
        let g = ring(60);
        let a = sample_split(&g, 0.3, ClassId(0), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = sample_split(&g, 0.3, ClassId(0), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(split_hash(&g, &a), split_hash(&g, &b));
    }

    #[test]
    fn membership_frequency_is_uniform() {
        let g = ring(20);
        let seeds = 1000;
        let mut hits = vec![0u32; 20];
        for seed in 0..seeds {
            let s = sample_split(&g, 0.5, ClassId(0), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for u in s.train {
                hits[u] += 1;
            }
        }
        let sigma = (seeds as f64 * 0.25).sqrt();
        for h in hits {
            assert!((h as f64 - 500.0).abs() <= 3.0 * sigma, "{h}");
        }
    }

    #[test]
    fn impossible_splits_error() {
        let g = ring(4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_split(&g, 0.0, ClassId(0), &mut rng).is_err());
        assert!(sample_split(&g, 1.0, ClassId(0), &mut rng).is_err());
        // One train node can never hold both classes.
        assert!(matches!(
            sample_split(&g, 0.25, ClassId(0), &mut rng),
            Err(Error::DegenerateSplit { attempts: 100 })
        ));
    }
}
