//! LINK Naive Bayes: Bernoulli Naive Bayes over adjacency rows with +1
//! Laplace smoothing, scored as the log-likelihood ratio of the positive
//! class over the negative class.

use crate::graph::{LabeledGraph, NodeId};

use super::{features, Features, Method, ScoreVector, TrainTestSplit};

/// Log-likelihood ratio for every test node.
///
/// With `d_iP`, `d_iN` the numbers of positive and negative training nodes
/// having feature `i`, and `n_P`, `n_N` the class counts, the exact score is
///
/// `log(n_P/n_N) + N log((n_N+2)/(n_P+2)) + Σ_i log((n_P−d_iP+1)/(n_N−d_iN+1))
///  + Σ_{i ∈ x_u} log[((d_iP+1)/(d_iN+1)) · ((n_N−d_iN+1)/(n_P−d_iP+1))]`.
///
/// `sparse` drops the absent-feature terms, keeping only
/// `log(n_P/n_N) + Σ_{i ∈ x_u} log[((d_iP+1)/(d_iN+1)) · (n_N/n_P)]` plus the
/// `N log(n_P/n_N)` constant.
pub fn link_nb_scores(
    g: &LabeledGraph,
    split: &TrainTestSplit,
    orient: Features,
    sparse: bool,
) -> ScoreVector {
    let n = g.node_count();
    let (n_pos, n_neg) = split.train_counts(g);
    let (np, nn) = (n_pos as f64, n_neg as f64);
    let mut d_pos = vec![0u64; n];
    let mut d_neg = vec![0u64; n];
    for &u in &split.train {
        let counts = if split.sign_of(g, u) > 0 { &mut d_pos } else { &mut d_neg };
        for &i in features(g, u, orient) {
            counts[i] += 1;
        }
    }
    let prior = (np / nn).ln();
    let (constant, present): (f64, Vec<f64>) = if sparse {
        let c = prior + n as f64 * (np / nn).ln();
        let w = (0..n)
            .map(|i| ((d_pos[i] as f64 + 1.0) / (d_neg[i] as f64 + 1.0) * (nn / np)).ln())
            .collect();
        (c, w)
    } else {
        let absent = |i: NodeId| (np - d_pos[i] as f64 + 1.0) / (nn - d_neg[i] as f64 + 1.0);
        let c = prior
            + n as f64 * ((nn + 2.0) / (np + 2.0)).ln()
            + (0..n).map(|i| absent(i).ln()).sum::<f64>();
        let w = (0..n)
            .map(|i| ((d_pos[i] as f64 + 1.0) / (d_neg[i] as f64 + 1.0) / absent(i)).ln())
            .collect();
        (c, w)
    };
    ScoreVector {
        method: Method::LinkNb,
        nodes: split.test.clone(),
        scores: split
            .test
            .iter()
            .map(|&u| constant + features(g, u, orient).iter().map(|&i| present[i]).sum::<f64>())
            .collect(),
        fallback: vec![false; split.test.len()],
        high_score_favors: Method::LinkNb.high_score_favors(),
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::super::majority::tests::random_instance;
    use super::super::test_graphs::build;
    use super::*;

    /// From-scratch Bernoulli Naive Bayes: estimate every conditional
    /// probability with +1 smoothing, then sum log probabilities per class.
    fn brute_force(g: &LabeledGraph, split: &TrainTestSplit, orient: Features) -> Vec<f64> {
        let n = g.node_count();
        let row = |u: NodeId| -> Vec<bool> {
            let mut x = vec![false; n];
            for &i in features(g, u, orient) {
                x[i] = true;
            }
            x
        };
        let class_rows = |positive: bool| -> Vec<Vec<bool>> {
            split
                .train
                .iter()
                .filter(|&&u| (split.sign_of(g, u) > 0) == positive)
                .map(|&u| row(u))
                .collect()
        };
        let (pos_rows, neg_rows) = (class_rows(true), class_rows(false));
        let theta = |rows: &[Vec<bool>], i: usize| {
            (rows.iter().filter(|r| r[i]).count() as f64 + 1.0) / (rows.len() as f64 + 2.0)
        };
        let total = (pos_rows.len() + neg_rows.len()) as f64;
        split
            .test
            .iter()
            .map(|&u| {
                let x = row(u);
                let log_joint = |rows: &[Vec<bool>]| {
                    let mut lp = (rows.len() as f64 / total).ln();
                    for (i, &xi) in x.iter().enumerate() {
                        let t = theta(rows, i);
                        lp += if xi { t.ln() } else { (1.0 - t).ln() };
                    }
                    lp
                };
                log_joint(&pos_rows) - log_joint(&neg_rows)
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_naive_bayes() {
        let mut checked = 0;
        for seed in 0..400 {
            for directed in [false, true] {
                let Some((g, s)) = random_instance(seed, directed) else { continue };
                for orient in [Features::Out, Features::In] {
                    let fast = link_nb_scores(&g, &s, orient, false);
                    let slow = brute_force(&g, &s, orient);
                    for (a, b) in fast.scores.iter().zip(&slow) {
                        assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "seed {seed}: {a} vs {b}");
                    }
                }
                checked += 1;
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn strongly_female_neighbor_pushes_toward_female() {
        // Unlabeled hub 0 touches train F nodes 1..=5; M nodes 6..=10 form a
        // path. Test node 11 has hub 0 as its sole neighbor; test node 12 is
        // isolated and so scores the constant alone.
        let mut edges: Vec<(u64, u64)> = (1..=5).map(|v| (0, v)).collect();
        edges.extend([(6, 7), (7, 8), (8, 9), (9, 10), (11, 0)]);
        let labels = ["", "F", "F", "F", "F", "F", "M", "M", "M", "M", "M", "F", "M"];
        let g = build(&edges, &labels);
        let s = TrainTestSplit::new(&g, &(1..=10).collect::<Vec<_>>(), g.dict().lookup("F").unwrap())
            .unwrap();
        let sv = link_nb_scores(&g, &s, Features::Out, false);
        assert_eq!(sv.nodes, vec![11, 12]);
        let (np, nn) = (5.0f64, 5.0f64);
        let term = (6.0 / 1.0 * (nn + 1.0) / (np - 4.0)).ln();
        assert!(term > 0.0);
        assert!((sv.scores[0] - sv.scores[1] - term).abs() < 1e-12);
    }

    #[test]
    fn featureless_node_gets_the_constant() {
        // Directed graph: node 3 nominates nobody, so its out-row is empty.
        let labels: Vec<_> = ["F", "M", "F", "M"]
            .iter()
            .enumerate()
            .map(|(i, l)| (i as u64, Some(l.to_string())))
            .collect();
        let g = crate::graph::load_graph(&[(0, 1), (1, 2), (2, 0), (0, 3)], &labels, true).unwrap();
        let s = TrainTestSplit::new(&g, &[0, 1], g.dict().lookup("F").unwrap()).unwrap();
        let sv = link_nb_scores(&g, &s, Features::Out, false);
        let idx = sv.nodes.iter().position(|&u| u == 3).unwrap();
        // n_P = n_N = 1, N = 4. Train F (0) has features {1, 3}; train M (1) has {2}.
        let (np, nn) = (1.0f64, 1.0f64);
        let d_pos = [0.0, 1.0, 0.0, 1.0];
        let d_neg = [0.0, 0.0, 1.0, 0.0];
        let want = (np / nn).ln()
            + 4.0 * ((nn + 2.0) / (np + 2.0)).ln()
            + (0..4)
                .map(|i| ((np - d_pos[i] + 1.0) / (nn - d_neg[i] + 1.0)).ln())
                .sum::<f64>();
        assert!((sv.scores[idx] - want).abs() < 1e-12);
    }
}
