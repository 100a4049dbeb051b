//! Labeled graphs, preprocessing, and class-degree sequences.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index, `0..node_count`.
pub type NodeId = usize;

/// Small-integer code of a class label. The string form lives in [`LabelDict`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassId(pub u16);

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Side dictionary mapping class codes to label strings. Codes are assigned
/// in lexicographic order of the label strings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDict {
    names: Vec<String>,
}

impl LabelDict {
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        Self {
            names: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, class: ClassId) -> &str {
        &self.names[class.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<ClassId> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| ClassId(i as u16))
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.names.len()).map(|i| ClassId(i as u16))
    }
}

/// Which adjacency reads define a node's neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Undirected,
    /// Nominators: `j` with `A[j][i] = 1` (column reads).
    In,
    /// Nominees: `j` with `A[i][j] = 1` (row reads).
    Out,
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "undirected" => Ok(Self::Undirected),
            "in" => Ok(Self::In),
            "out" => Ok(Self::Out),
            other => Err(Error::Argument(format!(
                "unknown orientation {other:?} (expected undirected, in or out)"
            ))),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Undirected => "undirected",
            Self::In => "in",
            Self::Out => "out",
        })
    }
}

/// Simple graph with one optional class label per node.
///
/// Neighbor lists are sorted and free of duplicates. Self-loops appear only
/// in graphs built by [`LabeledGraph::from_parts_keeping_loops`]. For
/// undirected graphs the in- and out-lists coincide and only one copy is
/// stored. `source_ids[i]` is the identifier node `i` had in the input, so
/// callers can map results back after preprocessing re-densifies ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    directed: bool,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Option<Vec<Vec<NodeId>>>,
    labels: Vec<Option<ClassId>>,
    dict: LabelDict,
    source_ids: Vec<u64>,
}

impl LabeledGraph {
    /// Build from already-dense parts. Arcs are deduplicated, self-loops
    /// dropped, and undirected input symmetrized.
    pub fn from_parts(
        node_count: usize,
        arcs: impl IntoIterator<Item = (NodeId, NodeId)>,
        labels: Vec<Option<ClassId>>,
        dict: LabelDict,
        source_ids: Vec<u64>,
        directed: bool,
    ) -> Result<Self> {
        Self::build(node_count, arcs, labels, dict, source_ids, directed, false)
    }

    /// Undirected graph that keeps self-loops, for generators that opt into
    /// them. A loop makes the node its own neighbor. Preprocessing and
    /// [`LabeledGraph::induced`] drop loops again.
    pub fn from_parts_keeping_loops(
        node_count: usize,
        arcs: impl IntoIterator<Item = (NodeId, NodeId)>,
        labels: Vec<Option<ClassId>>,
        dict: LabelDict,
        source_ids: Vec<u64>,
    ) -> Result<Self> {
        Self::build(node_count, arcs, labels, dict, source_ids, false, true)
    }

    fn build(
        node_count: usize,
        arcs: impl IntoIterator<Item = (NodeId, NodeId)>,
        labels: Vec<Option<ClassId>>,
        dict: LabelDict,
        source_ids: Vec<u64>,
        directed: bool,
        keep_loops: bool,
    ) -> Result<Self> {
        if labels.len() != node_count || source_ids.len() != node_count {
            return Err(Error::Argument(
                "labels and source ids must have one entry per node".into(),
            ));
        }
        if let Some(bad) = labels.iter().flatten().find(|c| c.0 as usize >= dict.len()) {
            return Err(Error::Argument(format!("class code {bad} missing from dictionary")));
        }
        let mut out_adj = vec![Vec::new(); node_count];
        let mut in_adj = if directed {
            Some(vec![Vec::new(); node_count])
        } else {
            None
        };
        for (u, v) in arcs {
            if u >= node_count || v >= node_count {
                return Err(Error::Argument(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if u == v {
                if keep_loops {
                    out_adj[u].push(u);
                }
                continue;
            }
            out_adj[u].push(v);
            match in_adj.as_mut() {
                Some(in_adj) => in_adj[v].push(u),
                None => out_adj[v].push(u),
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut().flatten()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            directed,
            out_adj,
            in_adj,
            labels,
            dict,
            source_ids,
        })
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    /// Edges for undirected graphs, arcs for directed ones.
    pub fn edge_count(&self) -> usize {
        self.arcs().count()
    }

    pub fn self_loop_count(&self) -> usize {
        (0..self.node_count()).filter(|&u| self.has_edge(u, u)).count()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn label(&self, node: NodeId) -> Option<ClassId> {
        self.labels[node]
    }

    pub fn labels(&self) -> &[Option<ClassId>] {
        &self.labels
    }

    pub fn dict(&self) -> &LabelDict {
        &self.dict
    }

    pub fn source_id(&self, node: NodeId) -> u64 {
        self.source_ids[node]
    }

    pub fn source_ids(&self) -> &[u64] {
        &self.source_ids
    }

    /// Out-neighbors (row reads). Equal to all neighbors when undirected.
    pub fn out_neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.out_adj[node]
    }

    /// In-neighbors (column reads). Equal to all neighbors when undirected.
    pub fn in_neighbors(&self, node: NodeId) -> &[NodeId] {
        match &self.in_adj {
            Some(in_adj) => &in_adj[node],
            None => &self.out_adj[node],
        }
    }

    pub fn neighbors(&self, node: NodeId, orientation: Orientation) -> &[NodeId] {
        match orientation {
            Orientation::In => self.in_neighbors(node),
            Orientation::Out | Orientation::Undirected => self.out_neighbors(node),
        }
    }

    /// Union of in- and out-neighbors, sorted.
    pub fn weak_neighbors(&self, node: NodeId) -> Vec<NodeId> {
        match &self.in_adj {
            None => self.out_adj[node].clone(),
            Some(in_adj) => {
                let mut all: Vec<NodeId> = self.out_adj[node]
                    .iter()
                    .chain(&in_adj[node])
                    .copied()
                    .collect();
                all.sort_unstable();
                all.dedup();
                all
            }
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_adj[u].binary_search(&v).is_ok()
    }

    /// Number of nodes carrying `class`.
    pub fn class_size(&self, class: ClassId) -> usize {
        self.labels.iter().filter(|l| **l == Some(class)).count()
    }

    /// Class sizes keyed by label string.
    pub fn class_sizes(&self) -> BTreeMap<String, usize> {
        self.dict
            .classes()
            .map(|c| (self.dict.name(c).to_string(), self.class_size(c)))
            .collect()
    }

    pub fn labeled_nodes(&self) -> Vec<NodeId> {
        (0..self.node_count())
            .filter(|&i| self.labels[i].is_some())
            .collect()
    }

    /// Iterate arcs `(u, v)`; undirected edges are yielded once with `u <= v`.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let directed = self.directed;
        self.out_adj.iter().enumerate().flat_map(move |(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| directed || u <= v)
                .map(move |v| (u, v))
        })
    }

    /// The same graph with every arc reversed.
    pub fn transpose(&self) -> Self {
        let arcs: Vec<_> = self.arcs().map(|(u, v)| (v, u)).collect();
        Self::from_parts(
            self.node_count(),
            arcs,
            self.labels.clone(),
            self.dict.clone(),
            self.source_ids.clone(),
            self.directed,
        )
        .expect("transpose of a valid graph is valid")
    }

    /// Induced subgraph on the nodes with `keep[i]`, ids re-densified in order.
    pub fn induced(&self, keep: &[bool]) -> Self {
        let mut new_id = vec![usize::MAX; self.node_count()];
        let mut next = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_id[i] = next;
                next += 1;
            }
        }
        let arcs: Vec<_> = self
            .arcs()
            .filter(|&(u, v)| u != v && keep[u] && keep[v])
            .map(|(u, v)| (new_id[u], new_id[v]))
            .collect();
        let labels = (0..self.node_count())
            .filter(|&i| keep[i])
            .map(|i| self.labels[i])
            .collect();
        let source_ids = (0..self.node_count())
            .filter(|&i| keep[i])
            .map(|i| self.source_ids[i])
            .collect();
        Self::from_parts(next, arcs, labels, self.dict.clone(), source_ids, self.directed)
            .expect("induced subgraph of a valid graph is valid")
    }
}

/// Build a graph from raw records.
///
/// Node ids are the union of ids seen in `edges` and `labels`, densified in
/// increasing order. A label of `None` marks the node as unlabeled.
pub fn load_graph(
    edges: &[(u64, u64)],
    labels: &[(u64, Option<String>)],
    directed: bool,
) -> Result<LabeledGraph> {
    let mut ids: BTreeSet<u64> = BTreeSet::new();
    for &(u, v) in edges {
        ids.insert(u);
        ids.insert(v);
    }
    let mut label_of: BTreeMap<u64, Option<&str>> = BTreeMap::new();
    for (id, label) in labels {
        ids.insert(*id);
        let label = label.as_deref().map(str::trim).filter(|l| !l.is_empty());
        if let Some(prev) = label_of.insert(*id, label) {
            if prev != label {
                return Err(Error::Argument(format!(
                    "node {id} has conflicting labels {prev:?} and {label:?}"
                )));
            }
        }
    }
    if edges.iter().all(|(u, v)| u == v) {
        return Err(Error::Structure("edge set is empty".into()));
    }

    let source_ids: Vec<u64> = ids.into_iter().collect();
    let index = |id: u64| source_ids.binary_search(&id).expect("id was inserted");
    let dict = LabelDict::from_names(label_of.values().flatten().map(|s| s.to_string()));
    let node_labels = source_ids
        .iter()
        .map(|id| {
            label_of
                .get(id)
                .copied()
                .flatten()
                .map(|name| dict.lookup(name).expect("label was inserted"))
        })
        .collect();
    let arcs: Vec<_> = edges.iter().map(|&(u, v)| (index(u), index(v))).collect();
    LabeledGraph::from_parts(
        source_ids.len(),
        arcs,
        node_labels,
        dict,
        source_ids,
        directed,
    )
}

/// Drop unlabeled nodes and their incident edges.
pub fn restrict_to_labeled(g: &LabeledGraph) -> Result<LabeledGraph> {
    let keep: Vec<bool> = g.labels.iter().map(Option::is_some).collect();
    if !keep.iter().any(|&k| k) {
        return Err(Error::Structure("graph has no labeled nodes".into()));
    }
    Ok(g.induced(&keep))
}

/// Connected components under weak connectivity, each sorted by node id and
/// listed in order of their smallest node.
pub fn weak_components(g: &LabeledGraph) -> Vec<Vec<NodeId>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            let ins = if g.directed { g.in_neighbors(u) } else { &[] };
            for &v in g.out_neighbors(u).iter().chain(ins) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Induced subgraph on the largest weakly connected component. Ties go to
/// the component containing the smallest node id.
pub fn largest_connected_component(g: &LabeledGraph) -> Result<LabeledGraph> {
    if g.node_count() == 0 {
        return Err(Error::Structure("graph is empty".into()));
    }
    let components = weak_components(g);
    let mut best = &components[0];
    for c in &components[1..] {
        if c.len() > best.len() {
            best = c;
        }
    }
    let mut keep = vec![false; g.node_count()];
    for &i in best {
        keep[i] = true;
    }
    Ok(g.induced(&keep))
}

/// Restrict to labeled nodes, then take the largest weakly connected component.
pub fn preprocess(g: &LabeledGraph) -> Result<LabeledGraph> {
    largest_connected_component(&restrict_to_labeled(g)?)
}

/// One node's split of its degree into same-class and other-class neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeEntry {
    pub node: NodeId,
    pub d_in: u64,
    pub d_out: u64,
}

impl DegreeEntry {
    pub fn degree(&self) -> u64 {
        self.d_in + self.d_out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDegreeSequence {
    pub class: ClassId,
    pub class_name: String,
    pub entries: Vec<DegreeEntry>,
    pub class_size: usize,
    pub complement_size: usize,
    pub orientation: Orientation,
}

impl ClassDegreeSequence {
    /// Build directly from `(d_in, d_i)` pairs, for simulation and tests.
    /// Nodes are numbered by position.
    pub fn from_counts(pairs: &[(u64, u64)]) -> Result<Self> {
        let entries = pairs
            .iter()
            .enumerate()
            .map(|(node, &(d_in, d))| {
                if d_in > d {
                    Err(Error::Argument(format!(
                        "entry {node}: in-class degree {d_in} exceeds degree {d}"
                    )))
                } else {
                    Ok(DegreeEntry {
                        node,
                        d_in,
                        d_out: d - d_in,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            class: ClassId(0),
            class_name: "0".into(),
            class_size: entries.len(),
            complement_size: 0,
            entries,
            orientation: Orientation::Undirected,
        })
    }
}

/// Per-node in-class and out-class degrees for the nodes of `class`.
///
/// `d_out` counts every neighbor not labeled `class`, so the two always sum
/// to the node's degree under `orientation`.
pub fn class_degree_sequence(
    g: &LabeledGraph,
    class: ClassId,
    orientation: Orientation,
) -> Result<ClassDegreeSequence> {
    if class.0 as usize >= g.dict.len() {
        return Err(Error::Argument(format!("unknown class code {class}")));
    }
    if orientation == Orientation::Undirected && g.directed {
        return Err(Error::Argument(
            "undirected orientation requested on a directed graph".into(),
        ));
    }
    let entries: Vec<DegreeEntry> = (0..g.node_count())
        .filter(|&i| g.labels[i] == Some(class))
        .map(|i| {
            let nbrs = g.neighbors(i, orientation);
            let d_in = nbrs.iter().filter(|&&j| g.labels[j] == Some(class)).count() as u64;
            DegreeEntry {
                node: i,
                d_in,
                d_out: nbrs.len() as u64 - d_in,
            }
        })
        .collect();
    let class_size = entries.len();
    Ok(ClassDegreeSequence {
        class,
        class_name: g.dict.name(class).to_string(),
        entries,
        class_size,
        complement_size: g.node_count() - class_size,
        orientation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(pairs: &[(u64, &str)]) -> Vec<(u64, Option<String>)> {
        pairs
            .iter()
            .map(|&(i, l)| (i, (!l.is_empty()).then(|| l.to_string())))
            .collect()
    }

    #[test]
    fn duplicate_edges_and_self_loops_are_dropped() {
        let g = load_graph(&[(0, 1), (1, 0), (1, 1)], &lbl(&[(0, "F"), (1, "M")]), false).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.out_neighbors(1), &[0]);
    }

    #[test]
    fn unlabeled_nodes_are_retained() {
        let g = load_graph(&[(0, 1)], &lbl(&[(0, "F")]), false).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.label(1), None);
        assert_eq!(g.dict().name(g.label(0).unwrap()), "F");
    }

    #[test]
    fn empty_label_string_means_missing() {
        let g = load_graph(&[(0, 1)], &lbl(&[(0, "F"), (1, "")]), false).unwrap();
        assert_eq!(g.label(1), None);
    }

    #[test]
    fn empty_edge_set_is_structural_error() {
        assert!(matches!(
            load_graph(&[], &lbl(&[(0, "F")]), false),
            Err(Error::Structure(_))
        ));
        assert!(matches!(
            load_graph(&[(3, 3)], &[], false),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn conflicting_labels_rejected() {
        assert!(load_graph(&[(0, 1)], &lbl(&[(0, "F"), (0, "M")]), false).is_err());
    }

    #[test]
    fn restrict_path_with_unlabeled_middle() {
        let g = load_graph(&[(10, 20), (20, 30)], &lbl(&[(10, "F"), (30, "M")]), false).unwrap();
        let r = restrict_to_labeled(&g).unwrap();
        assert_eq!(r.node_count(), 2);
        assert_eq!(r.edge_count(), 0);
        assert_eq!(r.source_ids(), &[10, 30]);
    }

    #[test]
    fn restrict_fully_labeled_is_identity() {
        let g = load_graph(&[(0, 1), (1, 2)], &lbl(&[(0, "F"), (1, "M"), (2, "F")]), false).unwrap();
        let r = restrict_to_labeled(&g).unwrap();
        assert_eq!(r, g);
        assert_eq!(r.source_ids(), &[0, 1, 2]);
    }

    #[test]
    fn restrict_without_labels_fails() {
        let g = load_graph(&[(0, 1)], &[], false).unwrap();
        assert!(matches!(restrict_to_labeled(&g), Err(Error::Structure(_))));
    }

    #[test]
    fn lcc_picks_larger_component() {
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        edges.extend([(10, 11), (11, 12)]);
        let g = load_graph(&edges, &[], false).unwrap();
        let c = largest_connected_component(&g).unwrap();
        assert_eq!(c.node_count(), 5);
        assert_eq!(c.source_ids(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn lcc_tie_goes_to_smallest_id() {
        let g = load_graph(&[(5, 6), (1, 2)], &[], false).unwrap();
        let c = largest_connected_component(&g).unwrap();
        assert_eq!(c.source_ids(), &[1, 2]);
    }

    #[test]
    fn lcc_connected_is_identity() {
        let g = load_graph(&[(0, 1), (1, 2), (2, 0)], &[], false).unwrap();
        assert_eq!(largest_connected_component(&g).unwrap(), g);
    }

    #[test]
    fn lcc_uses_weak_connectivity() {
        let g = load_graph(&[(0, 1), (1, 0)], &lbl(&[(0, "F"), (1, "M"), (2, "F")]), true).unwrap();
        assert_eq!(g.node_count(), 3);
        let c = largest_connected_component(&g).unwrap();
        assert_eq!(c.source_ids(), &[0, 1]);
        let g = load_graph(&[(0, 1), (2, 1)], &[], true).unwrap();
        assert_eq!(largest_connected_component(&g).unwrap().node_count(), 3);
    }

    #[test]
    fn alternating_four_cycle() {
        let g = load_graph(
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            &lbl(&[(0, "F"), (1, "M"), (2, "F"), (3, "M")]),
            false,
        )
        .unwrap();
        let f = g.dict().lookup("F").unwrap();
        let seq = class_degree_sequence(&g, f, Orientation::Undirected).unwrap();
        assert_eq!(seq.entries.len(), 2);
        for e in &seq.entries {
            assert_eq!((e.d_in, e.d_out), (0, 2));
        }
        assert_eq!(seq.class_size, 2);
        assert_eq!(seq.complement_size, 2);
    }

    #[test]
    fn triangle_of_one_class() {
        let g = load_graph(&[(0, 1), (1, 2), (0, 2)], &lbl(&[(0, "F"), (1, "F"), (2, "F")]), false).unwrap();
        let seq = class_degree_sequence(&g, ClassId(0), Orientation::Undirected).unwrap();
        assert!(seq.entries.iter().all(|e| (e.d_in, e.d_out) == (2, 0)));
    }

    #[test]
    fn directed_star_in_orientation() {
        // Five F nodes (1..=5) each nominate the M hub 0.
        let edges: Vec<_> = (1..=5).map(|i| (i, 0)).collect();
        let mut labels = lbl(&[(0, "M")]);
        labels.extend((1..=5).map(|i| (i, Some("F".to_string()))));
        let g = load_graph(&edges, &labels, true).unwrap();
        let m = g.dict().lookup("M").unwrap();
        let seq = class_degree_sequence(&g, m, Orientation::In).unwrap();
        assert_eq!(seq.entries.len(), 1);
        assert_eq!((seq.entries[0].d_in, seq.entries[0].d_out), (0, 5));
        let out = class_degree_sequence(&g, m, Orientation::Out).unwrap();
        assert_eq!((out.entries[0].d_in, out.entries[0].d_out), (0, 0));
    }

    #[test]
    fn undirected_orientation_on_directed_graph_rejected() {
        let g = load_graph(&[(0, 1)], &lbl(&[(0, "F"), (1, "M")]), true).unwrap();
        assert!(class_degree_sequence(&g, ClassId(0), Orientation::Undirected).is_err());
        assert!(class_degree_sequence(&g, ClassId(7), Orientation::In).is_err());
    }
}
