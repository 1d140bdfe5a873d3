use alloc::vec::Vec;

use super::bipartition::{Bipartition, Transformation, Workspace};
use super::{Observer, SolveError, SolverConfig};
use crate::hypergraph::{LiftedHypergraph, NodeId};
use crate::partition::NodePartition;

/// A decomposition under local search: a component id per node plus member
/// lists. Ids are arbitrary; [`PartitionState::relabel`] makes them canonical
/// (smallest member).
pub struct PartitionState<'g> {
    graph: &'g LiftedHypergraph,
    config: SolverConfig,
    labels: Vec<usize>,
    members: Vec<Vec<NodeId>>,
    objective: f64,
    ws: Workspace,
}

impl<'g> PartitionState<'g> {
    /// Fails if some class of `partition` is not connected through
    /// connectivity edges inside the class.
    pub fn new(
        graph: &'g LiftedHypergraph,
        partition: &NodePartition,
        config: SolverConfig,
    ) -> Result<Self, SolveError> {
        let n = graph.node_count();
        if partition.len() != n {
            return Err(SolveError::SizeMismatch {
                expected: n,
                found: partition.len(),
            });
        }
        crate::model::labeling_from_partition(graph, partition)?;
        let mut state = Self {
            graph,
            config,
            labels: partition.labels().to_vec(),
            members: Vec::new(),
            objective: crate::model::partition_objective(graph, partition),
            ws: Workspace::new(n),
        };
        state.relabel();
        Ok(state)
    }

    pub fn graph(&self) -> &'g LiftedHypergraph {
        self.graph
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Component id per node.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn members(&self, component: usize) -> &[NodeId] {
        self.members.get(component).map_or(&[], |m| m.as_slice())
    }

    /// Ids of non-empty components, ascending.
    pub fn components(&self) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&c| !self.members[c].is_empty())
            .collect()
    }

    pub fn partition(&self) -> NodePartition {
        NodePartition::from_labels(&self.labels)
    }

    /// Objective of the current decomposition, tracked from applied gains.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Renames every component after its smallest member.
    pub fn relabel(&mut self) {
        let n = self.labels.len();
        let mut map = alloc::vec![usize::MAX; self.members.len().max(n)];
        for v in 0..n {
            let l = self.labels[v];
            if map[l] == usize::MAX {
                map[l] = v;
            }
            self.labels[v] = map[l];
        }
        self.members.clear();
        self.members.resize_with(n, Vec::new);
        for v in 0..n {
            self.members[self.labels[v]].push(v);
        }
    }

    /// Unordered pairs `(a, b)`, `a < b`, of components joined by at least one
    /// connectivity edge, ascending.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        let mut seen: Vec<usize> = Vec::new();
        for e in self.graph.edge_ids() {
            if self.graph.kind(e) != crate::EdgeKind::Connectivity {
                continue;
            }
            seen.clear();
            for &v in self.graph.edge_nodes(e) {
                let l = self.labels[v];
                if !seen.contains(&l) {
                    seen.push(l);
                }
            }
            for i in 0..seen.len() {
                for j in i + 1..seen.len() {
                    pairs.push((seen[i].min(seen[j]), seen[i].max(seen[j])));
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Nodes of `a ∪ b` incident to a connectivity edge that also touches the
    /// other component, ascending. Without `b` every node of `a` qualifies.
    pub fn compute_boundary(&mut self, a: usize, b: Option<usize>) -> Vec<NodeId> {
        self.with_bipartition(a, b, |bp| bp.candidates())
    }

    /// Runs `f` on a fresh bipartition of `a` and `b`; the scratch state is
    /// cleared afterwards.
    pub fn with_bipartition<R>(
        &mut self,
        a: usize,
        b: Option<usize>,
        f: impl FnOnce(&mut Bipartition<'_>) -> R,
    ) -> R {
        let Self {
            graph,
            labels,
            members,
            ws,
            ..
        } = self;
        let a_members = members.get(a).map_or(&[][..], |m| m.as_slice());
        let b_members = b
            .and_then(|b| members.get(b))
            .map_or(&[][..], |m| m.as_slice());
        let mut bp = Bipartition::new(graph, labels, ws, a, a_members, b, b_members);
        f(&mut bp)
    }

    /// One inner-loop update; returns whether the decomposition changed.
    pub fn update_bipartition(&mut self, a: usize, b: Option<usize>, observer: &mut dyn Observer) -> bool {
        if self.members(a).is_empty() {
            return false;
        }
        if let Some(b) = b {
            if b == a || self.members(b).is_empty() {
                return false;
            }
        }
        let eps = self.config.epsilon;
        let (decision, moves) = self.with_bipartition(a, b, |bp| {
            if bp.boundary_len() == 0 {
                return (Transformation::Keep, Vec::new());
            }
            while bp.step().is_some() {
                observer.on_move(bp);
            }
            let decision = bp.decide(eps);
            let moves = match decision {
                Transformation::Move(k) => bp.moves()[..k].to_vec(),
                _ => Vec::new(),
            };
            (decision, moves)
        });
        match decision {
            Transformation::Keep => false,
            Transformation::Join => {
                let b = b.expect("join needs two components");
                let changes: Vec<(NodeId, usize)> = self.members[b].iter().map(|&v| (v, a)).collect();
                self.apply(a, Some(b), &changes)
            }
            Transformation::Move(_) => {
                let target = match b {
                    Some(_) => None,
                    None => Some(self.fresh_id()),
                };
                let changes: Vec<(NodeId, usize)> = moves
                    .iter()
                    .map(|&v| {
                        let to = match target {
                            Some(t) => t,
                            None if self.labels[v] == a => b.expect("pair mode"),
                            None => a,
                        };
                        (v, to)
                    })
                    .collect();
                self.apply(a, b, &changes)
            }
        }
    }

    fn fresh_id(&mut self) -> usize {
        self.members.push(Vec::new());
        self.members.len() - 1
    }

    fn set_label(&mut self, v: NodeId, label: usize, changed: &mut Vec<NodeId>) {
        if self.ws.prev_label[v] == usize::MAX {
            self.ws.prev_label[v] = self.labels[v];
            changed.push(v);
        }
        self.labels[v] = label;
    }

    /// Applies label changes inside `a ∪ b`, splits any piece that lost
    /// connectivity into a component of its own, and keeps the result only if
    /// the exact objective decrease exceeds `epsilon` (or rollback is off).
    fn apply(&mut self, a: usize, b: Option<usize>, changes: &[(NodeId, usize)]) -> bool {
        let mut region: Vec<NodeId> = self.members[a].clone();
        if let Some(b) = b {
            region.extend_from_slice(&self.members[b]);
        }
        region.sort_unstable();
        let mut changed = Vec::new();
        for &(v, l) in changes {
            self.set_label(v, l, &mut changed);
        }
        // pieces of one label that are no longer connected become components
        let mut claimed: Vec<usize> = Vec::new();
        let mut stack = Vec::new();
        let mut piece = Vec::new();
        for &start in &region {
            if self.ws.visited[start] {
                continue;
            }
            let label = self.labels[start];
            piece.clear();
            self.ws.visited[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                piece.push(v);
                for &e in self.graph.connectivity_edges(v) {
                    let nodes = self.graph.edge_nodes(e);
                    if nodes.iter().any(|&u| self.labels[u] != label) {
                        continue;
                    }
                    for &u in nodes {
                        if !self.ws.visited[u] {
                            self.ws.visited[u] = true;
                            stack.push(u);
                        }
                    }
                }
            }
            if claimed.contains(&label) {
                let id = self.fresh_id();
                for &v in &piece {
                    self.set_label(v, id, &mut changed);
                }
            } else {
                claimed.push(label);
            }
        }
        for &v in &region {
            self.ws.visited[v] = false;
        }

        let gain = self.exact_gain(&changed);
        let keep = !self.config.rollback || gain > self.config.epsilon;
        if keep {
            self.objective -= gain;
            if let Some(b) = b {
                self.members[b].clear();
            }
            self.members[a].clear();
            for &v in &region {
                let l = self.labels[v];
                self.members[l].push(v);
            }
        } else {
            for &v in &changed {
                self.labels[v] = self.ws.prev_label[v];
            }
        }
        for &v in &changed {
            self.ws.prev_label[v] = usize::MAX;
        }
        keep
    }

    /// Objective decrease caused by the relabeling of `changed`, evaluated on
    /// every edge incident to a changed node.
    fn exact_gain(&self, changed: &[NodeId]) -> f64 {
        let prev = &self.ws.prev_label;
        let old = |u: NodeId| if prev[u] == usize::MAX { self.labels[u] } else { prev[u] };
        let mut gain = 0.0;
        for &v in changed {
            for e in self.graph.incident_edges(v) {
                let nodes = self.graph.edge_nodes(e);
                if nodes.iter().find(|&&u| prev[u] != usize::MAX) != Some(&v) {
                    continue;
                }
                let was_joined = nodes.iter().all(|&u| old(u) == old(nodes[0]));
                let is_joined = nodes.iter().all(|&u| self.labels[u] == self.labels[nodes[0]]);
                let c = self.graph.cost(e);
                if was_joined {
                    gain += c;
                }
                if is_joined {
                    gain -= c;
                }
            }
        }
        gain
    }

    /// One outer iteration: every adjacent pair, then every component against
    /// an empty one. Returns whether anything changed.
    pub fn sweep(&mut self, observer: &mut dyn Observer) -> bool {
        self.relabel();
        let mut changed = false;
        for (a, b) in self.adjacent_pairs() {
            changed |= self.update_bipartition(a, Some(b), observer);
        }
        for a in self.components() {
            changed |= self.update_bipartition(a, None, observer);
        }
        self.relabel();
        changed
    }
}
