//! Clamped harmonic label propagation.
//!
//! Training nodes are clamped to `−1` (positive class) and `+1` (negative
//! class), matching the majority-vote sign. Every other node converges to
//! the mean of its neighbors. Directed graphs use weak neighbors.

use crate::graph::{LabeledGraph, NodeId};

use super::{Method, ScoreVector, TrainTestSplit};

/// Gauss-Seidel sweeps until the largest harmonic residual is at most `tol`.
pub fn zgl_scores(
    g: &LabeledGraph,
    split: &TrainTestSplit,
    tol: f64,
    max_sweeps: usize,
) -> ScoreVector {
    let n = g.node_count();
    let signs = split.train_signs(g);
    let (pos, neg) = split.train_counts(g);
    let start = (neg as f64 - pos as f64) / (neg + pos) as f64;
    let neighbors: Vec<Vec<NodeId>> = (0..n)
        .map(|u| {
            let mut nb = g.weak_neighbors(u);
            nb.retain(|&v| v != u);
            nb
        })
        .collect();
    let mut f: Vec<f64> = signs
        .iter()
        .map(|&s| match s {
            1 => -1.0,
            -1 => 1.0,
            _ => start,
        })
        .collect();
    let free: Vec<NodeId> = (0..n)
        .filter(|&u| signs[u] == 0 && !neighbors[u].is_empty())
        .collect();

    let mean_of = |f: &[f64], u: NodeId| {
        neighbors[u].iter().map(|&v| f[v]).sum::<f64>() / neighbors[u].len() as f64
    };
    let mut converged = free.is_empty();
    for _ in 0..max_sweeps {
        for &u in &free {
            f[u] = mean_of(&f, u);
        }
        let residual = free
            .iter()
            .map(|&u| (f[u] - mean_of(&f, u)).abs())
            .fold(0.0, f64::max);
        if residual <= tol {
            converged = true;
            break;
        }
    }
    ScoreVector {
        method: Method::Zgl,
        nodes: split.test.clone(),
        scores: split.test.iter().map(|&u| f[u]).collect(),
        fallback: split.test.iter().map(|&u| neighbors[u].is_empty()).collect(),
        high_score_favors: Method::Zgl.high_score_favors(),
        converged,
    }
}
