use std::collections::BTreeMap;

use crate::classify::{ScoreVector, TrainTestSplit};
use crate::error::{Error, Result};
use crate::graph::{ClassId, LabeledGraph};

/// Mann-Whitney estimate of `P(pos > neg) + ½ P(pos = neg)`, via midranks.
pub fn mann_whitney_auc(positives: &[f64], negatives: &[f64]) -> Result<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::Argument("AUC needs at least one score of each class".into()));
    }
    if positives.iter().chain(negatives).any(|x| x.is_nan()) {
        return Err(Error::Numeric("AUC received a NaN score".into()));
    }
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&x| (x, true))
        .chain(negatives.iter().map(|&x| (x, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        // Ranks i+1..=j+1 share their average.
        let midrank = (i + j + 2) as f64 / 2.0;
        let pos_in_tie = all[i..=j].iter().filter(|e| e.1).count();
        rank_sum += midrank * pos_in_tie as f64;
        i = j + 1;
    }
    let (np, nn) = (positives.len() as f64, negatives.len() as f64);
    Ok((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

fn oriented_auc(sv: &ScoreVector, g: &LabeledGraph, class: ClassId, flip: bool) -> Result<f64> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (&u, &x) in sv.nodes.iter().zip(&sv.scores) {
        let x = if flip { -x } else { x };
        match g.label(u) {
            Some(c) if c == class => pos.push(x),
            Some(_) => neg.push(x),
            None => return Err(Error::Argument(format!("test node {u} has no label"))),
        }
    }
    mann_whitney_auc(&pos, &neg)
}

/// AUC with positives taken as the class the method's high scores favor.
pub fn auc(sv: &ScoreVector, g: &LabeledGraph, split: &TrainTestSplit) -> Result<f64> {
    oriented_auc(sv, g, sv.high_class(split), false)
}

/// One-vs-rest AUC for each class, keyed by class name. For two classes
/// both entries equal [`auc`], so any class weighting returns the same value.
pub fn per_class_auc(
    sv: &ScoreVector,
    g: &LabeledGraph,
    split: &TrainTestSplit,
) -> Result<BTreeMap<String, f64>> {
    let high = sv.high_class(split);
    [split.positive, split.negative]
        .into_iter()
        .map(|c| {
            let v = oriented_auc(sv, g, c, c != high)?;
            Ok((g.dict().name(c).to_string(), v))
        })
        .collect()
}
