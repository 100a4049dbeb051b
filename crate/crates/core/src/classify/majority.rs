//! Training-proportion baseline and 1-hop / 2-hop majority vote.
//!
//! Scores are `(m − f) / (m + f)` where `m` and `f` are the (weighted)
//! counts of negative and positive training labels, so high scores favor
//! the negative class.

use crate::graph::{LabeledGraph, NodeId};

use super::{features, Features, Method, ScoreVector, TrainTestSplit};

fn proportion(neg: f64, pos: f64) -> f64 {
    (neg - pos) / (neg + pos)
}

fn baseline_value(g: &LabeledGraph, split: &TrainTestSplit) -> f64 {
    let (pos, neg) = split.train_counts(g);
    proportion(neg as f64, pos as f64)
}

fn assemble(
    method: Method,
    split: &TrainTestSplit,
    fallback_value: f64,
    votes: impl Fn(NodeId) -> (f64, f64),
) -> ScoreVector {
    let mut scores = Vec::with_capacity(split.test.len());
    let mut fallback = Vec::with_capacity(split.test.len());
    for &u in &split.test {
        let (neg, pos) = votes(u);
        if neg + pos > 0.0 {
            scores.push(proportion(neg, pos));
            fallback.push(false);
        } else {
            scores.push(fallback_value);
            fallback.push(true);
        }
    }
    ScoreVector {
        method,
        nodes: split.test.clone(),
        scores,
        fallback,
        high_score_favors: method.high_score_favors(),
        converged: true,
    }
}

/// Every test node gets the training class proportion.
pub fn baseline_scores(g: &LabeledGraph, split: &TrainTestSplit) -> ScoreVector {
    let value = baseline_value(g, split);
    let mut sv = assemble(Method::Baseline, split, value, |_| (0.0, 0.0));
    sv.fallback.iter_mut().for_each(|f| *f = false);
    sv
}

/// Proportion of training labels among the feature neighbors of each test node.
pub fn mv1_scores(g: &LabeledGraph, split: &TrainTestSplit, orient: Features) -> ScoreVector {
    let signs = split.train_signs(g);
    assemble(Method::Mv1, split, baseline_value(g, split), |u| {
        let mut neg = 0.0;
        let mut pos = 0.0;
        for &v in features(g, u, orient) {
            match signs[v] {
                1 => pos += 1.0,
                -1 => neg += 1.0,
                _ => {}
            }
        }
        (neg, pos)
    })
}

/// Training labels weighted by the number of length-2 paths from each test
/// node. Paths returning to the test node itself carry no label and are
/// skipped.
pub fn mv2_scores(g: &LabeledGraph, split: &TrainTestSplit, orient: Features) -> ScoreVector {
    let signs = split.train_signs(g);
    assemble(Method::Mv2, split, baseline_value(g, split), |u| {
        let mut neg = 0.0;
        let mut pos = 0.0;
        for &x in features(g, u, orient) {
            for &v in features(g, x, orient) {
                if v == u {
                    continue;
                }
                match signs[v] {
                    1 => pos += 1.0,
                    -1 => neg += 1.0,
                    _ => {}
                }
            }
        }
        (neg, pos)
    })
}
