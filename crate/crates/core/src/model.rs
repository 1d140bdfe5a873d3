//! Edge labelings, the objective `Σ c_e y_e`, and feasibility.
//!
//! A labeling `y` is feasible iff it is induced by a decomposition of
//! `G = (V, F)`: a partition whose classes are connected through connectivity
//! edges, with `y_e = 1` exactly when all nodes of `e` share a class. Feasibility
//! is decided by the round trip labeling → components → induced labeling,
//! which is equivalent to the full cycle, path, cut and higher-order
//! inequality system.

use alloc::vec::Vec;

use crate::hypergraph::{EdgeId, EdgeKind, LiftedHypergraph, NodeId};
use crate::partition::NodePartition;
use crate::union_find::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("class {0} is not connected by connectivity edges inside the class")]
    DisconnectedClass(NodeId),
    #[error("expected {expected} entries, found {found}")]
    SizeMismatch { expected: usize, found: usize },
}

/// A 01 value per stored edge, indexed by [`EdgeId`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeLabeling {
    values: Vec<bool>,
}

impl EdgeLabeling {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    /// Every edge labeled `value`.
    pub fn uniform(graph: &LiftedHypergraph, value: bool) -> Self {
        Self {
            values: alloc::vec![value; graph.edge_count()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, e: EdgeId) -> bool {
        self.values[e.0]
    }

    pub fn set(&mut self, e: EdgeId, value: bool) {
        self.values[e.0] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.values
    }

    pub fn count_ones(&self) -> usize {
        self.values.iter().filter(|&&y| y).count()
    }
}

fn check_len(graph: &LiftedHypergraph, y: &EdgeLabeling) {
    assert_eq!(
        y.len(),
        graph.edge_count(),
        "labeling length does not match the edge count"
    );
}

/// `y_e = 1` iff all nodes of `e` share a class; no connectivity check.
pub fn induced_labeling(graph: &LiftedHypergraph, partition: &NodePartition) -> EdgeLabeling {
    assert_eq!(partition.len(), graph.node_count());
    EdgeLabeling {
        values: graph
            .edge_ids()
            .map(|e| partition.all_same(graph.edge_nodes(e)))
            .collect(),
    }
}

/// The labeling of a decomposition. Fails if some class is not connected by
/// connectivity edges lying inside the class.
pub fn labeling_from_partition(
    graph: &LiftedHypergraph,
    partition: &NodePartition,
) -> Result<EdgeLabeling, ModelError> {
    if partition.len() != graph.node_count() {
        return Err(ModelError::SizeMismatch {
            expected: graph.node_count(),
            found: partition.len(),
        });
    }
    let pieces = canonicalize(graph, partition);
    if let Some(v) = (0..partition.len()).find(|&v| pieces.class_of(v) != partition.class_of(v)) {
        return Err(ModelError::DisconnectedClass(partition.class_of(v)));
    }
    Ok(induced_labeling(graph, partition))
}

/// Components of `(V, {e ∈ F : y_e = 1})`; lifted labels are ignored.
pub fn partition_from_labeling(graph: &LiftedHypergraph, y: &EdgeLabeling) -> NodePartition {
    check_len(graph, y);
    graph.connected_components(|e| y.get(e))
}

pub fn is_feasible(graph: &LiftedHypergraph, y: &EdgeLabeling) -> bool {
    if y.len() != graph.edge_count() {
        return false;
    }
    let partition = partition_from_labeling(graph, y);
    graph
        .edge_ids()
        .all(|e| partition.all_same(graph.edge_nodes(e)) == y.get(e))
}

pub fn objective(graph: &LiftedHypergraph, y: &EdgeLabeling) -> f64 {
    check_len(graph, y);
    graph
        .edge_ids()
        .filter(|&e| y.get(e))
        .map(|e| graph.cost(e))
        .sum()
}

/// Objective of the labeling induced by `partition`.
pub fn partition_objective(graph: &LiftedHypergraph, partition: &NodePartition) -> f64 {
    graph
        .edge_ids()
        .filter(|&e| partition.all_same(graph.edge_nodes(e)))
        .map(|e| graph.cost(e))
        .sum()
}

/// Splits every class into the components of its induced connectivity
/// subgraph. Decompositions are returned unchanged.
pub fn canonicalize(graph: &LiftedHypergraph, partition: &NodePartition) -> NodePartition {
    assert_eq!(partition.len(), graph.node_count());
    graph.connected_components(|e| partition.all_same(graph.edge_nodes(e)))
}

/// A violated higher-order inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// `sub ⊂ sup` but `y_sup > y_sub`.
    SubEdge { sub: EdgeId, sup: EdgeId },
    /// The strict sub-edges of `edge` connect its nodes and are all joined,
    /// yet `edge` is cut.
    SubEdgesJoined { edge: EdgeId },
}

fn is_strict_subset(small: &[NodeId], large: &[NodeId]) -> bool {
    if small.len() >= large.len() {
        return false;
    }
    let mut it = large.iter();
    small.iter().all(|s| it.any(|l| l == s))
}

/// Strict sub-edges of `e` stored in the graph (any kind), ascending.
pub fn sub_edges(graph: &LiftedHypergraph, e: EdgeId) -> Vec<EdgeId> {
    let nodes = graph.edge_nodes(e);
    let mut out = Vec::new();
    for &v in nodes {
        for s in graph.incident_edges(v) {
            let sn = graph.edge_nodes(s);
            // count each candidate once, at its smallest node
            if sn[0] == v && is_strict_subset(sn, nodes) {
                out.push(s);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Checks the two families of higher-order inequalities edge by edge and
/// reports every violation. Sub-edges of either kind are taken into account.
pub fn local_diagnostics(graph: &LiftedHypergraph, y: &EdgeLabeling) -> Vec<Violation> {
    check_len(graph, y);
    let mut out = Vec::new();
    for e in graph.edge_ids() {
        if graph.order(e) < 3 {
            continue;
        }
        let subs = sub_edges(graph, e);
        if subs.is_empty() {
            continue;
        }
        for &s in &subs {
            if y.get(e) && !y.get(s) {
                out.push(Violation::SubEdge { sub: s, sup: e });
            }
        }
        let nodes = graph.edge_nodes(e);
        let mut uf = UnionFind::new(nodes.len());
        for &s in &subs {
            let positions: Vec<usize> = graph
                .edge_nodes(s)
                .iter()
                .map(|v| nodes.binary_search(v).expect("sub-edge nodes lie in the edge"))
                .collect();
            for w in positions.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let connected = (1..nodes.len()).all(|i| uf.same(0, i));
        let cut_subs = subs.iter().filter(|&&s| !y.get(s)).count();
        if connected && !y.get(e) && cut_subs == 0 {
            out.push(Violation::SubEdgesJoined { edge: e });
        }
    }
    out
}

/// Number of connectivity edges cut by the labeling; handy for reports.
pub fn cut_connectivity_edges(graph: &LiftedHypergraph, y: &EdgeLabeling) -> usize {
    graph
        .edge_ids()
        .filter(|&e| graph.kind(e) == EdgeKind::Connectivity && !y.get(e))
        .count()
}
