//! Relational classifiers for a binary attribute.
//!
//! Training labels are encoded `+1` for the positive class (F in the
//! gender experiments) and `−1` for the other. Each method reports which
//! class its high scores favor:
//!
//! | method       | high score favors |
//! |--------------|-------------------|
//! | `baseline`   | negative (`−1`)   |
//! | `mv1`, `mv2` | negative (`−1`)   |
//! | `zgl`        | negative (`−1`)   |
//! | `link_lr`    | positive (`+1`)   |
//! | `link_nb`    | positive (`+1`)   |

mod lbfgs;
mod link;
mod majority;
mod naive_bayes;
mod zgl;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClassId, LabeledGraph, NodeId};

pub use lbfgs::{minimize, LbfgsOptions, LbfgsOutcome};
pub use link::{link_lr_fit, link_lr_scores, LinkModel};
pub use majority::{baseline_scores, mv1_scores, mv2_scores};
pub use naive_bayes::link_nb_scores;
pub use zgl::zgl_scores;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Baseline,
    Mv1,
    Mv2,
    Zgl,
    LinkLr,
    LinkNb,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Baseline,
        Method::Mv1,
        Method::Mv2,
        Method::Zgl,
        Method::LinkLr,
        Method::LinkNb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::Mv1 => "mv1",
            Method::Mv2 => "mv2",
            Method::Zgl => "zgl",
            Method::LinkLr => "link_lr",
            Method::LinkNb => "link_nb",
        }
    }

    pub fn high_score_favors(self) -> Polarity {
        match self {
            Method::LinkLr | Method::LinkNb => Polarity::Positive,
            _ => Polarity::Negative,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown method {s:?}")))
    }
}

/// Parse a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Method::from_str)
        .collect()
}

/// Which encoded class a method's high scores point to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

/// Which adjacency reads make up a node's feature vector on directed graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Features {
    /// Row of the adjacency matrix: the nodes this node nominates.
    #[default]
    Out,
    /// Column: the nodes that nominate this node.
    In,
}

impl FromStr for Features {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "out" => Ok(Self::Out),
            "in" => Ok(Self::In),
            other => Err(Error::Argument(format!("unknown feature orientation {other:?}"))),
        }
    }
}

pub(crate) fn features<'g>(g: &'g LabeledGraph, node: NodeId, f: Features) -> &'g [NodeId] {
    match f {
        Features::Out => g.out_neighbors(node),
        Features::In => g.in_neighbors(node),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierOptions {
    /// Inverse regularization strength of LINK logistic regression.
    pub link_gain: f64,
    pub link_max_iter: usize,
    pub link_grad_tol: f64,
    pub zgl_tol: f64,
    pub zgl_max_sweeps: usize,
    /// Use the sparse-graph approximation of the LINK Naive Bayes score.
    pub nb_sparse: bool,
    pub features: Features,
}

impl Default for ClassifierOptions {
    fn default() -> Self {
        Self {
            link_gain: 1e6,
            link_max_iter: 500,
            link_grad_tol: 1e-8,
            zgl_tol: 1e-8,
            zgl_max_sweeps: 10_000,
            nb_sparse: false,
            features: Features::Out,
        }
    }
}

/// Labeled nodes split into a training set whose labels are visible and a
/// test set whose labels are hidden.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainTestSplit {
    pub train: Vec<NodeId>,
    pub test: Vec<NodeId>,
    /// Class encoded as `+1`.
    pub positive: ClassId,
    /// Class encoded as `−1`.
    pub negative: ClassId,
}

impl TrainTestSplit {
    /// Train on `train`; every other labeled node becomes a test node.
    /// The graph must carry exactly two classes.
    pub fn new(g: &LabeledGraph, train: &[NodeId], positive: ClassId) -> Result<Self> {
        let negative = binary_negative(g, positive)?;
        let mut in_train = vec![false; g.node_count()];
        for &u in train {
            if u >= g.node_count() || g.label(u).is_none() {
                return Err(Error::Argument(format!("train node {u} is not a labeled node")));
            }
            in_train[u] = true;
        }
        let train: Vec<NodeId> = (0..g.node_count()).filter(|&u| in_train[u]).collect();
        let test: Vec<NodeId> = (0..g.node_count())
            .filter(|&u| !in_train[u] && g.label(u).is_some())
            .collect();
        if train.is_empty() || test.is_empty() {
            return Err(Error::Argument("train and test sets must both be nonempty".into()));
        }
        Ok(Self {
            train,
            test,
            positive,
            negative,
        })
    }

    /// `+1`, `−1` for training nodes, `0` elsewhere.
    pub fn train_signs(&self, g: &LabeledGraph) -> Vec<i8> {
        let mut signs = vec![0i8; g.node_count()];
        for &u in &self.train {
            signs[u] = self.sign_of(g, u);
        }
        signs
    }

    pub fn sign_of(&self, g: &LabeledGraph, node: NodeId) -> i8 {
        match g.label(node) {
            Some(c) if c == self.positive => 1,
            Some(_) => -1,
            None => 0,
        }
    }

    /// Counts of positive and negative training labels.
    pub fn train_counts(&self, g: &LabeledGraph) -> (usize, usize) {
        let pos = self
            .train
            .iter()
            .filter(|&&u| g.label(u) == Some(self.positive))
            .count();
        (pos, self.train.len() - pos)
    }
}

/// The other class of a two-class graph.
pub fn binary_negative(g: &LabeledGraph, positive: ClassId) -> Result<ClassId> {
    let present: Vec<ClassId> = g
        .dict()
        .classes()
        .filter(|&c| g.class_size(c) > 0)
        .collect();
    if present.len() != 2 || !present.contains(&positive) {
        return Err(Error::Argument(format!(
            "classifiers need exactly two classes including the positive one, found {}",
            present.len()
        )));
    }
    Ok(*present.iter().find(|&&c| c != positive).expect("two classes"))
}

/// Scores for the test nodes of a split, in the order of `split.test`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub method: Method,
    pub nodes: Vec<NodeId>,
    pub scores: Vec<f64>,
    /// Scored by the training-proportion fallback.
    pub fallback: Vec<bool>,
    pub high_score_favors: Polarity,
    /// False when an iterative scorer hit its iteration cap.
    pub converged: bool,
}

impl ScoreVector {
    pub fn fallback_count(&self) -> usize {
        self.fallback.iter().filter(|&&f| f).count()
    }

    /// The class that high scores point to.
    pub fn high_class(&self, split: &TrainTestSplit) -> ClassId {
        match self.high_score_favors {
            Polarity::Positive => split.positive,
            Polarity::Negative => split.negative,
        }
    }
}

/// Run one method with the given options.
pub fn score(
    method: Method,
    g: &LabeledGraph,
    split: &TrainTestSplit,
    opts: &ClassifierOptions,
) -> Result<ScoreVector> {
    match method {
        Method::Baseline => Ok(baseline_scores(g, split)),
        Method::Mv1 => Ok(mv1_scores(g, split, opts.features)),
        Method::Mv2 => Ok(mv2_scores(g, split, opts.features)),
        Method::Zgl => Ok(zgl_scores(g, split, opts.zgl_tol, opts.zgl_max_sweeps)),
        Method::LinkLr => {
            let model = link_lr_fit(g, split, opts)?;
            Ok(link_lr_scores(&model, g, split))
        }
        Method::LinkNb => Ok(link_nb_scores(g, split, opts.features, opts.nb_sparse)),
    }
}

#[cfg(test)]
pub(crate) mod test_graphs {
    use crate::graph::{load_graph, LabeledGraph};

    /// Undirected graph with string labels; `""` marks unlabeled.
    pub fn build(edges: &[(u64, u64)], labels: &[&str]) -> LabeledGraph {
        let labels: Vec<_> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (i as u64, (!l.is_empty()).then(|| l.to_string())))
            .collect();
        load_graph(edges, &labels, false).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_graphs::build;
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!(
            parse_methods("mv1, link_lr,zgl").unwrap(),
            vec![Method::Mv1, Method::LinkLr, Method::Zgl]
        );
        assert!(parse_methods("mv3").is_err());
    }

    #[test]
    fn split_partitions_labeled_nodes() {
        let g = build(&[(0, 1), (1, 2), (2, 3)], &["F", "M", "", "M"]);
        let f = g.dict().lookup("F").unwrap();
        let s = TrainTestSplit::new(&g, &[0, 1], f).unwrap();
        assert_eq!(s.test, vec![3]);
        assert_eq!(s.train_signs(&g), vec![1, -1, 0, 0]);
        assert!(TrainTestSplit::new(&g, &[2], f).is_err());
        assert!(TrainTestSplit::new(&g, &[0, 1, 3], f).is_err());
    }

    #[test]
    fn more_than_two_classes_rejected() {
        let g = build(&[(0, 1), (1, 2)], &["A", "B", "C"]);
        assert!(TrainTestSplit::new(&g, &[0], ClassId(0)).is_err());
    }

    #[test]
    fn all_methods_are_permutation_equivariant() {
        use super::majority::tests::random_instance;
        use crate::graph::load_graph;
        use std::collections::BTreeMap;

        for seed in 0..40 {
            let Some((g, s)) = random_instance(seed, seed % 2 == 1) else { continue };
            let n = g.node_count() as u64;
            // Reverse the source ids: node k becomes 100 - k.
            let relabel = |id: u64| 100 - id;
            let edges: Vec<_> = g
                .arcs()
                .map(|(u, v)| (relabel(g.source_id(u)), relabel(g.source_id(v))))
                .collect();
            let labels: Vec<_> = (0..n as usize)
                .map(|u| (relabel(g.source_id(u)), g.label(u).map(|c| g.dict().name(c).to_string())))
                .collect();
            let h = load_graph(&edges, &labels, g.is_directed()).unwrap();
            let node_of: BTreeMap<u64, NodeId> =
                (0..h.node_count()).map(|u| (h.source_id(u), u)).collect();
            let train: Vec<NodeId> = s.train.iter().map(|&u| node_of[&relabel(g.source_id(u))]).collect();
            let t = TrainTestSplit::new(&h, &train, s.positive).unwrap();
            let opts = ClassifierOptions { link_gain: 1.0, ..Default::default() };
            for m in Method::ALL {
                let a = score(m, &g, &s, &opts).unwrap();
                let b = score(m, &h, &t, &opts).unwrap();
                let by_id: BTreeMap<u64, f64> = b
                    .nodes
                    .iter()
                    .zip(&b.scores)
                    .map(|(&u, &x)| (h.source_id(u), x))
                    .collect();
                for (&u, &x) in a.nodes.iter().zip(&a.scores) {
                    let y = by_id[&relabel(g.source_id(u))];
                    assert!((x - y).abs() <= 1e-6 * (1.0 + x.abs()), "{m} seed {seed}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn scoring_is_deterministic() {
        use super::majority::tests::random_instance;
        let (g, s) = (0..).find_map(|seed| random_instance(seed, false)).unwrap();
        for m in Method::ALL {
            let opts = ClassifierOptions::default();
            assert_eq!(score(m, &g, &s, &opts).unwrap(), score(m, &g, &s, &opts).unwrap());
        }
    }
}
