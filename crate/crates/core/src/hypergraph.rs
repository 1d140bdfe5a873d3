//! The lifted hypergraph `G' = (V, F ∪ F')` with real edge costs.
//!
//! Graphs are assembled with a [`HypergraphBuilder`] and frozen into an
//! immutable [`LiftedHypergraph`]. Edge node lists are stored sorted and every
//! node keeps separate incidence lists for connectivity and lifted edges.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::partition::NodePartition;
use crate::union_find::UnionFind;

pub type NodeId = usize;

/// Handle of a stored edge; edges are numbered in insertion order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Whether an edge defines connectivity (`F`) or only carries cost (`F'`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Connectivity,
    Lifted,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("an edge needs at least two nodes, got {0}")]
    TooFewNodes(usize),
    #[error("node {0} appears twice in one edge")]
    RepeatedNode(NodeId),
    #[error("node set {nodes:?} is already stored as a {existing:?} edge")]
    KindConflict { nodes: Vec<NodeId>, existing: EdgeKind },
    #[error("edge cost must be finite, got {0}")]
    NonFiniteCost(f64),
}

#[derive(Clone, Debug)]
struct PendingEdge {
    nodes: Box<[NodeId]>,
    kind: EdgeKind,
    cost: f64,
}

/// Accumulates edges for a [`LiftedHypergraph`].
///
/// Adding a node set that is already present with the same kind adds the new
/// cost to the stored one, since the objective is linear in the costs.
#[derive(Clone, Debug)]
pub struct HypergraphBuilder {
    node_count: usize,
    edges: Vec<PendingEdge>,
    index: BTreeMap<Box<[NodeId]>, EdgeId>,
}

impl HypergraphBuilder {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            edges: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(
        &mut self,
        nodes: &[NodeId],
        kind: EdgeKind,
        cost: f64,
    ) -> Result<EdgeId, GraphError> {
        if nodes.len() < 2 {
            return Err(GraphError::TooFewNodes(nodes.len()));
        }
        if !cost.is_finite() {
            return Err(GraphError::NonFiniteCost(cost));
        }
        let mut sorted: Box<[NodeId]> = nodes.into();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::RepeatedNode(w[0]));
            }
        }
        if let Some(&last) = sorted.last() {
            if last >= self.node_count {
                return Err(GraphError::NodeOutOfRange {
                    node: last,
                    node_count: self.node_count,
                });
            }
        }
        if let Some(&id) = self.index.get(&sorted) {
            let edge = &mut self.edges[id.0];
            if edge.kind != kind {
                return Err(GraphError::KindConflict {
                    nodes: sorted.into_vec(),
                    existing: edge.kind,
                });
            }
            edge.cost += cost;
            return Ok(id);
        }
        let id = EdgeId(self.edges.len());
        self.index.insert(sorted.clone(), id);
        self.edges.push(PendingEdge {
            nodes: sorted,
            kind,
            cost,
        });
        Ok(id)
    }

    pub fn build(self) -> LiftedHypergraph {
        let n = self.node_count;
        let mut offsets = Vec::with_capacity(self.edges.len() + 1);
        let mut nodes = Vec::new();
        let mut kinds = Vec::with_capacity(self.edges.len());
        let mut costs = Vec::with_capacity(self.edges.len());
        offsets.push(0);
        for edge in &self.edges {
            nodes.extend_from_slice(&edge.nodes);
            offsets.push(nodes.len());
            kinds.push(edge.kind);
            costs.push(edge.cost);
        }
        let connectivity = Incidence::new(n, &self.edges, EdgeKind::Connectivity);
        let lifted = Incidence::new(n, &self.edges, EdgeKind::Lifted);
        LiftedHypergraph {
            node_count: n,
            offsets,
            nodes,
            kinds,
            costs,
            index: self.index,
            connectivity,
            lifted,
        }
    }
}

/// Compressed per-node edge lists for one edge kind.
#[derive(Clone, Debug)]
struct Incidence {
    offsets: Vec<usize>,
    edges: Vec<EdgeId>,
}

impl Incidence {
    fn new(n: usize, edges: &[PendingEdge], kind: EdgeKind) -> Self {
        let mut counts = alloc::vec![0usize; n + 1];
        for edge in edges.iter().filter(|e| e.kind == kind) {
            for &v in edge.nodes.iter() {
                counts[v + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut list = alloc::vec![EdgeId(0); counts[n]];
        for (id, edge) in edges.iter().enumerate() {
            if edge.kind != kind {
                continue;
            }
            for &v in edge.nodes.iter() {
                list[fill[v]] = EdgeId(id);
                fill[v] += 1;
            }
        }
        Self {
            offsets: counts,
            edges: list,
        }
    }

    fn of(&self, v: NodeId) -> &[EdgeId] {
        &self.edges[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Borrowed view of one stored edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeRef<'a> {
    pub id: EdgeId,
    pub nodes: &'a [NodeId],
    pub kind: EdgeKind,
    pub cost: f64,
}

/// An immutable instance of the higher-order lifted multicut problem.
#[derive(Clone, Debug)]
pub struct LiftedHypergraph {
    node_count: usize,
    offsets: Vec<usize>,
    nodes: Vec<NodeId>,
    kinds: Vec<EdgeKind>,
    costs: Vec<f64>,
    index: BTreeMap<Box<[NodeId]>, EdgeId>,
    connectivity: Incidence,
    lifted: Incidence,
}

impl LiftedHypergraph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> + Clone {
        (0..self.kinds.len()).map(EdgeId)
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeRef<'_>> + '_ {
        self.edge_ids().map(move |id| self.edge(id))
    }

    pub fn edge(&self, e: EdgeId) -> EdgeRef<'_> {
        EdgeRef {
            id: e,
            nodes: self.edge_nodes(e),
            kind: self.kinds[e.0],
            cost: self.costs[e.0],
        }
    }

    /// Nodes of `e`, strictly increasing.
    #[inline]
    pub fn edge_nodes(&self, e: EdgeId) -> &[NodeId] {
        &self.nodes[self.offsets[e.0]..self.offsets[e.0 + 1]]
    }

    #[inline]
    pub fn kind(&self, e: EdgeId) -> EdgeKind {
        self.kinds[e.0]
    }

    #[inline]
    pub fn cost(&self, e: EdgeId) -> f64 {
        self.costs[e.0]
    }

    #[inline]
    pub fn order(&self, e: EdgeId) -> usize {
        self.offsets[e.0 + 1] - self.offsets[e.0]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Looks up the edge with exactly this node set (any order).
    pub fn find_edge(&self, nodes: &[NodeId]) -> Option<EdgeId> {
        let mut key: Vec<NodeId> = nodes.into();
        key.sort_unstable();
        self.index.get(key.as_slice()).copied()
    }

    /// Connectivity edges containing `v`.
    #[inline]
    pub fn connectivity_edges(&self, v: NodeId) -> &[EdgeId] {
        self.connectivity.of(v)
    }

    /// Lifted edges containing `v`.
    #[inline]
    pub fn lifted_edges(&self, v: NodeId) -> &[EdgeId] {
        self.lifted.of(v)
    }

    /// All edges containing `v`, connectivity edges first.
    pub fn incident_edges(&self, v: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        self.connectivity_edges(v)
            .iter()
            .chain(self.lifted_edges(v))
            .copied()
    }

    pub fn count_edges(&self, kind: EdgeKind, order: Option<usize>) -> usize {
        self.edge_ids()
            .filter(|&e| self.kind(e) == kind && order.map_or(true, |k| self.order(e) == k))
            .count()
    }

    /// Number of stored edges of order at least three.
    pub fn higher_order_edge_count(&self) -> usize {
        self.edge_ids().filter(|&e| self.order(e) > 2).count()
    }

    /// Components of `(V, {e ∈ F : active(e)})`. A k-ary active edge merges
    /// all of its nodes; lifted edges never merge anything.
    pub fn connected_components(&self, mut active: impl FnMut(EdgeId) -> bool) -> NodePartition {
        let mut uf = UnionFind::new(self.node_count);
        for e in self.edge_ids() {
            if self.kinds[e.0] != EdgeKind::Connectivity || !active(e) {
                continue;
            }
            let nodes = self.edge_nodes(e);
            for w in nodes.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        partition_from_union_find(&mut uf)
    }

    /// Nodes that share a connectivity edge with `v`, ascending.
    pub fn f_neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .connectivity_edges(v)
            .iter()
            .flat_map(|&e| self.edge_nodes(e).iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Builder pre-populated with this graph's edges, in the same order.
    pub fn to_builder(&self) -> HypergraphBuilder {
        let mut builder = HypergraphBuilder::new(self.node_count);
        for edge in self.edges() {
            builder
                .add_edge(edge.nodes, edge.kind, edge.cost)
                .expect("stored edges are valid");
        }
        builder
    }
}

pub(crate) fn partition_from_union_find(uf: &mut UnionFind) -> NodePartition {
    let n = uf.len();
    let mut rep = alloc::vec![usize::MAX; n];
    let mut labels = Vec::with_capacity(n);
    for v in 0..n {
        let root = uf.find(v);
        if rep[root] == usize::MAX {
            rep[root] = v;
        }
        labels.push(rep[root]);
    }
    NodePartition::from_canonical(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn graph(n: usize, edges: &[(&[NodeId], EdgeKind, f64)]) -> LiftedHypergraph {
        let mut b = HypergraphBuilder::new(n);
        for &(nodes, kind, cost) in edges {
            b.add_edge(nodes, kind, cost).unwrap();
        }
        b.build()
    }

    use EdgeKind::{Connectivity as F, Lifted as L};

    #[test]
    fn duplicate_edges_merge_costs() {
        let mut b = HypergraphBuilder::new(2);
        let e1 = b.add_edge(&[0, 1], F, -1.0).unwrap();
        let e2 = b.add_edge(&[1, 0], F, -1.0).unwrap();
        assert_eq!(e1, e2);
        let g = b.build();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.cost(e1), -2.0);
    }

    #[test]
    fn nodes_stored_sorted() {
        let g = graph(3, &[(&[2, 0, 1], F, 1.0)]);
        assert_eq!(g.edge_nodes(EdgeId(0)), &[0, 1, 2]);
        assert_eq!(g.find_edge(&[1, 2, 0]), Some(EdgeId(0)));
    }

    #[test]
    fn kind_conflict_rejected() {
        let mut b = HypergraphBuilder::new(2);
        b.add_edge(&[0, 1], F, 1.0).unwrap();
        assert!(matches!(
            b.add_edge(&[0, 1], L, 1.0),
            Err(GraphError::KindConflict { .. })
        ));
    }

    #[test]
    fn invalid_edges_rejected() {
        let mut b = HypergraphBuilder::new(3);
        assert_eq!(b.add_edge(&[0], F, 1.0), Err(GraphError::TooFewNodes(1)));
        assert_eq!(b.add_edge(&[0, 0], F, 1.0), Err(GraphError::RepeatedNode(0)));
        assert_eq!(
            b.add_edge(&[0, 3], F, 1.0),
            Err(GraphError::NodeOutOfRange { node: 3, node_count: 3 })
        );
        assert!(matches!(
            b.add_edge(&[0, 1], F, f64::NAN),
            Err(GraphError::NonFiniteCost(_))
        ));
    }

    #[test]
    fn components_of_hyperedge() {
        let g = graph(3, &[(&[0, 1, 2], F, 0.0)]);
        assert_eq!(g.connected_components(|_| true).labels(), &[0, 0, 0]);
    }

    #[test]
    fn components_respect_activity() {
        let g = graph(4, &[(&[0, 1], F, 0.0), (&[2, 3], F, 0.0)]);
        let p = g.connected_components(|e| e == EdgeId(0));
        assert_eq!(p.labels(), &[0, 0, 2, 3]);
    }

    #[test]
    fn lifted_edges_never_merge() {
        let g = graph(3, &[(&[0, 1], F, 0.0), (&[1, 2], F, 0.0), (&[0, 2], L, 0.0)]);
        assert_eq!(g.connected_components(|_| true).labels(), &[0, 0, 0]);
        let g = graph(3, &[(&[0, 1], F, 0.0), (&[0, 2], L, 0.0)]);
        assert_eq!(g.connected_components(|_| true).labels(), &[0, 0, 2]);
    }

    #[test]
    fn neighbors() {
        let g = graph(4, &[(&[0, 1, 2], F, 0.0)]);
        assert_eq!(g.f_neighbors(0), vec![1, 2]);
        assert_eq!(g.f_neighbors(3), Vec::<NodeId>::new());
        let g = graph(4, &[(&[0, 1], F, 0.0), (&[1, 2, 3], F, 0.0), (&[1, 3], L, 0.0)]);
        assert_eq!(g.f_neighbors(1), vec![0, 2, 3]);
        assert_eq!(g.f_neighbors(0), vec![1]);
    }

    #[test]
    fn incidence_split_by_kind() {
        let g = graph(3, &[(&[0, 1], F, 0.0), (&[0, 2], L, 0.0), (&[0, 1, 2], F, 0.0)]);
        assert_eq!(g.connectivity_edges(0), &[EdgeId(0), EdgeId(2)]);
        assert_eq!(g.lifted_edges(0), &[EdgeId(1)]);
        assert_eq!(g.incident_edges(2).collect::<Vec<_>>(), vec![EdgeId(2), EdgeId(1)]);
        assert_eq!(g.higher_order_edge_count(), 1);
    }
}
