//! LINK: logistic regression on adjacency rows.
//!
//! Fits `½‖β‖² + C Σ log(1 + exp(−y (xᵀβ + β₀)))` over training nodes with
//! an unpenalized intercept. The solver works on the objective divided by
//! `C`, which has the same minimizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, NodeId};

use super::lbfgs::{minimize, LbfgsOptions};
use super::{features, ClassifierOptions, Features, Method, ScoreVector, TrainTestSplit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    /// One weight per node of the graph.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub gain: f64,
    pub features: Features,
    pub iterations: usize,
    pub converged: bool,
}

impl LinkModel {
    pub fn linear_predictor(&self, g: &LabeledGraph, node: NodeId) -> f64 {
        self.intercept
            + features(g, node, self.features)
                .iter()
                .map(|&i| self.weights[i])
                .sum::<f64>()
    }
}

/// `log(1 + eᵗ)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub fn link_lr_fit(
    g: &LabeledGraph,
    split: &TrainTestSplit,
    opts: &ClassifierOptions,
) -> Result<LinkModel> {
    if !(opts.link_gain > 0.0 && opts.link_gain.is_finite()) {
        return Err(Error::Argument(format!(
            "regularization gain must be positive and finite, got {}",
            opts.link_gain
        )));
    }
    let n = g.node_count();
    let rows: Vec<(&[NodeId], f64)> = split
        .train
        .iter()
        .map(|&u| (features(g, u, opts.features), split.sign_of(g, u) as f64))
        .collect();
    let inv_c = 1.0 / opts.link_gain;
    // Layout: weights[0..n], intercept at n.
    let objective = |x: &[f64], grad: &mut [f64]| {
        let (beta, b0) = x.split_at(n);
        let b0 = b0[0];
        let mut value = 0.5 * inv_c * beta.iter().map(|b| b * b).sum::<f64>();
        for (gi, bi) in grad[..n].iter_mut().zip(beta) {
            *gi = inv_c * bi;
        }
        grad[n] = 0.0;
        for &(row, y) in &rows {
            let z = b0 + row.iter().map(|&i| beta[i]).sum::<f64>();
            value += softplus(-y * z);
            let coef = -y * sigmoid(-y * z);
            for &i in row {
                grad[i] += coef;
            }
            grad[n] += coef;
        }
        value
    };
    let out = minimize(
        objective,
        vec![0.0; n + 1],
        &LbfgsOptions {
            memory: 10,
            max_iter: opts.link_max_iter,
            grad_tol: opts.link_grad_tol,
        },
    )?;
    let mut x = out.x;
    let intercept = x.pop().expect("intercept slot");
    if !x.iter().all(|w| w.is_finite()) || !intercept.is_finite() {
        return Err(Error::Numeric("LINK weights became non-finite".into()));
    }
    Ok(LinkModel {
        weights: x,
        intercept,
        gain: opts.link_gain,
        features: opts.features,
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// Linear predictors of the test nodes; high scores favor the positive class.
pub fn link_lr_scores(model: &LinkModel, g: &LabeledGraph, split: &TrainTestSplit) -> ScoreVector {
    ScoreVector {
        method: Method::LinkLr,
        nodes: split.test.clone(),
        scores: split.test.iter().map(|&u| model.linear_predictor(g, u)).collect(),
        fallback: vec![false; split.test.len()],
        high_score_favors: Method::LinkLr.high_score_favors(),
        converged: model.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_graphs::build;
    use super::*;

    fn star_pair() -> (LabeledGraph, TrainTestSplit) {
        // Hubs 0 and 1. F nodes attach to hub 0, M nodes to hub 1.
        // Nodes 6 and 7 share the same row {0}.
        let g = build(
            &[(2, 0), (3, 0), (4, 1), (5, 1), (6, 0), (7, 0), (8, 1)],
            &["F", "M", "F", "F", "M", "M", "F", "F", "M"],
        );
        let f = g.dict().lookup("F").unwrap();
        let s = TrainTestSplit::new(&g, &[0, 1, 2, 3, 4, 5], f).unwrap();
        (g, s)
    }

    #[test]
    fn identical_rows_score_identically_and_rank_correctly() {
        let (g, s) = star_pair();
        let model = link_lr_fit(&g, &s, &ClassifierOptions::default()).unwrap();
        assert_eq!(model.weights.len(), g.node_count());
        let sv = link_lr_scores(&model, &g, &s);
        assert_eq!(sv.nodes, vec![6, 7, 8]);
        assert_eq!(sv.scores[0], sv.scores[1]);
        assert!(sv.scores[0] > sv.scores[2]);
        assert!(sv.scores.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn stationarity_holds_at_a_converged_fit() {
        let (g, s) = star_pair();
        let opts = ClassifierOptions { link_gain: 1.0, ..Default::default() };
        let model = link_lr_fit(&g, &s, &opts).unwrap();
        assert!(model.converged);
        // Gradient oracle written directly from the penalized likelihood.
        let mut grad = model.weights.clone();
        let mut g0 = 0.0;
        for &u in &s.train {
            let y = s.sign_of(&g, u) as f64;
            let z = model.linear_predictor(&g, u);
            let r = -y / (1.0 + (y * z).exp());
            for &i in g.out_neighbors(u) {
                grad[i] += r;
            }
            g0 += r;
        }
        assert!(grad.iter().all(|x| x.abs() < 1e-7), "{grad:?}");
        assert!(g0.abs() < 1e-7);
    }

    #[test]
    fn larger_gain_shrinks_less() {
        let (g, s) = star_pair();
        let w = |c: f64| {
            let opts = ClassifierOptions { link_gain: c, ..Default::default() };
            link_lr_fit(&g, &s, &opts).unwrap().weights[0]
        };
        assert!(w(10.0) > w(0.1));
        assert!(w(0.1) > 0.0);
    }

    #[test]
    fn non_positive_gain_rejected() {
        let (g, s) = star_pair();
        for c in [0.0, -1.0, f64::INFINITY] {
            let opts = ClassifierOptions { link_gain: c, ..Default::default() };
            assert!(link_lr_fit(&g, &s, &opts).is_err());
        }
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(-1000.0), 0.0);
        assert_eq!(softplus(1000.0), 1000.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
