//! Greedy move sequences between two components (or one component and a new,
//! empty one), with incrementally maintained gains.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::hypergraph::{EdgeId, LiftedHypergraph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub(crate) enum Status {
    #[default]
    Idle,
    Candidate,
    Moved,
}

/// Node-indexed scratch buffers shared by all bipartition updates of one
/// solver run. Only the entries listed in `touched` are non-default between
/// calls.
#[derive(Clone, Debug)]
pub(crate) struct Workspace {
    pub(crate) flipped: Vec<bool>,
    pub(crate) status: Vec<Status>,
    pub(crate) gain: Vec<f64>,
    pub(crate) touched: Vec<NodeId>,
    pub(crate) prev_label: Vec<usize>,
    pub(crate) visited: Vec<bool>,
}

impl Workspace {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            flipped: alloc::vec![false; n],
            status: alloc::vec![Status::Idle; n],
            gain: alloc::vec![0.0; n],
            touched: Vec::new(),
            prev_label: alloc::vec![usize::MAX; n],
            visited: alloc::vec![false; n],
        }
    }

    fn reset(&mut self) {
        for v in self.touched.drain(..) {
            self.flipped[v] = false;
            self.status[v] = Status::Idle;
            self.gain[v] = 0.0;
        }
    }
}

/// The two sides of a bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn other(self) -> Self {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Outcome of a bipartition update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transformation {
    Keep,
    Join,
    /// Apply the first `k` moves of the sequence.
    Move(usize),
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    gain: f64,
    node: NodeId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap: largest gain first, then smallest node id
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// One run of the inner loop on components `A` and `B` (or `A` and a new
/// component when `B` is absent).
///
/// The gain `D_w` of a node is the objective decrease obtained by moving `w`
/// to the opposite side, counting only edges whose nodes all lie in `A ∪ B`;
/// any other edge has at least one node in a third component and stays cut.
/// Moved nodes leave candidacy. The sequence length is the size of the
/// boundary when the run starts.
pub struct Bipartition<'a> {
    graph: &'a LiftedHypergraph,
    labels: &'a [usize],
    ws: &'a mut Workspace,
    a: usize,
    b: Option<usize>,
    a_members: &'a [NodeId],
    b_members: &'a [NodeId],
    heap: BinaryHeap<Entry>,
    moves: Vec<NodeId>,
    cumulative: Vec<f64>,
    join_gain: Option<f64>,
    boundary_len: usize,
}

impl<'a> Bipartition<'a> {
    pub(crate) fn new(
        graph: &'a LiftedHypergraph,
        labels: &'a [usize],
        ws: &'a mut Workspace,
        a: usize,
        a_members: &'a [NodeId],
        b: Option<usize>,
        b_members: &'a [NodeId],
    ) -> Self {
        debug_assert!(ws.touched.is_empty());
        let mut bp = Self {
            graph,
            labels,
            ws,
            a,
            b,
            a_members,
            b_members,
            heap: BinaryHeap::new(),
            moves: Vec::new(),
            cumulative: Vec::new(),
            join_gain: None,
            boundary_len: 0,
        };
        if b.is_none() {
            for &v in a_members {
                bp.make_candidate(v);
            }
        } else {
            for &v in a_members.iter().chain(b_members) {
                if bp.touches_other_side(v) {
                    bp.make_candidate(v);
                }
            }
            bp.join_gain = Some(bp.compute_join_gain());
        }
        bp.boundary_len = bp.ws.touched.len();
        bp
    }

    pub fn graph(&self) -> &LiftedHypergraph {
        self.graph
    }

    /// Current side of `v`, or `None` if `v ∉ A ∪ B`.
    #[inline]
    pub fn side(&self, v: NodeId) -> Option<Side> {
        let l = self.labels[v];
        let base = if l == self.a {
            Side::A
        } else if Some(l) == self.b {
            Side::B
        } else {
            return None;
        };
        Some(if self.ws.flipped[v] { base.other() } else { base })
    }

    /// Nodes of `A ∪ B`.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.a_members.iter().chain(self.b_members).copied()
    }

    /// Maintained gain of a current candidate.
    pub fn gain(&self, v: NodeId) -> Option<f64> {
        (self.ws.status[v] == Status::Candidate).then(|| self.ws.gain[v])
    }

    /// Current candidates (the boundary minus moved nodes), ascending.
    pub fn candidates(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .ws
            .touched
            .iter()
            .copied()
            .filter(|&v| self.ws.status[v] == Status::Candidate)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn moves(&self) -> &[NodeId] {
        &self.moves
    }

    /// `S_1, S_2, ...` for the moves made so far.
    pub fn cumulative_gains(&self) -> &[f64] {
        &self.cumulative
    }

    /// Objective decrease from merging `A` and `B`; `None` when `B` is absent.
    pub fn join_gain(&self) -> Option<f64> {
        self.join_gain
    }

    /// Size of the boundary when the run started, which bounds the number of
    /// moves.
    pub fn boundary_len(&self) -> usize {
        self.boundary_len
    }

    /// Picks the candidate with maximum gain (smallest id on ties), moves it,
    /// and updates gains and the boundary. Returns `None` once the move budget
    /// or the candidate set is exhausted.
    pub fn step(&mut self) -> Option<NodeId> {
        if self.moves.len() >= self.boundary_len {
            return None;
        }
        let v = loop {
            let entry = self.heap.pop()?;
            let w = entry.node;
            if self.ws.status[w] == Status::Candidate
                && self.ws.gain[w].to_bits() == entry.gain.to_bits()
            {
                break w;
            }
        };
        let total = self.cumulative.last().copied().unwrap_or(0.0) + self.ws.gain[v];
        self.cumulative.push(total);
        self.moves.push(v);
        self.incremental_gain_update(v);
        self.update_boundary(v);
        Some(v)
    }

    /// Best of: the best prefix of the move sequence (shortest on ties) and
    /// joining, provided it improves by more than `eps`.
    pub fn decide(&self, eps: f64) -> Transformation {
        let mut best_k = 0;
        let mut best = 0.0;
        for (i, &s) in self.cumulative.iter().enumerate() {
            if s > best {
                best = s;
                best_k = i + 1;
            }
        }
        if let Some(join) = self.join_gain {
            if join > best && join > eps {
                return Transformation::Join;
            }
        }
        if best > eps {
            Transformation::Move(best_k)
        } else {
            Transformation::Keep
        }
    }

    /// Counts of nodes of `e` on side A and side B, or `None` if `e` has a
    /// node outside `A ∪ B`.
    #[inline]
    fn edge_sides(&self, e: EdgeId) -> Option<(usize, usize)> {
        let mut on_a = 0;
        let mut on_b = 0;
        for &u in self.graph.edge_nodes(e) {
            match self.side(u)? {
                Side::A => on_a += 1,
                Side::B => on_b += 1,
            }
        }
        Some((on_a, on_b))
    }

    /// Gain of moving `w` computed from its incident edges.
    fn compute_difference(&self, w: NodeId) -> f64 {
        let side = match self.side(w) {
            Some(s) => s,
            None => return 0.0,
        };
        let mut d = 0.0;
        for e in self.graph.incident_edges(w) {
            let Some((on_a, on_b)) = self.edge_sides(e) else {
                continue;
            };
            let k = on_a + on_b;
            let (same, other) = match side {
                Side::A => (on_a, on_b),
                Side::B => (on_b, on_a),
            };
            let joined_now = same == k;
            let joined_after = other == k - 1;
            let c = self.graph.cost(e);
            if joined_now {
                d += c;
            }
            if joined_after {
                d -= c;
            }
        }
        d
    }

    fn compute_join_gain(&self) -> f64 {
        let (small, small_label) = match self.b {
            Some(b) if self.b_members.len() < self.a_members.len() => (self.b_members, b),
            _ => (self.a_members, self.a),
        };
        let mut gain = 0.0;
        for &v in small {
            for e in self.graph.incident_edges(v) {
                let nodes = self.graph.edge_nodes(e);
                // count the edge once, at its first node on the smaller side
                if nodes.iter().find(|&&u| self.labels[u] == small_label) != Some(&v) {
                    continue;
                }
                if let Some((on_a, on_b)) = self.edge_sides(e) {
                    if on_a > 0 && on_b > 0 {
                        gain -= self.graph.cost(e);
                    }
                }
            }
        }
        gain
    }

    fn touches_other_side(&self, v: NodeId) -> bool {
        let Some(side) = self.side(v) else {
            return false;
        };
        let other = Some(side.other());
        self.graph
            .connectivity_edges(v)
            .iter()
            .any(|&e| self.graph.edge_nodes(e).iter().any(|&u| self.side(u) == other))
    }

    fn make_candidate(&mut self, v: NodeId) {
        let gain = self.compute_difference(v);
        self.ws.status[v] = Status::Candidate;
        self.ws.gain[v] = gain;
        self.ws.touched.push(v);
        self.heap.push(Entry { gain, node: v });
    }

    /// Adjusts the gains of all candidates sharing an edge with `v` for `v`
    /// changing sides, then moves `v`.
    ///
    /// For an edge `e ∋ v` and a candidate `w ∈ e \ {v}`:
    /// * if `e \ {v}` lies on one side, the joined state of `e` as seen from
    ///   `w` flips; `D_w` changes by `2c_e` for a pairwise edge and by `c_e`
    ///   otherwise, decreasing when `w` was on `v`'s side;
    /// * otherwise `e` can only matter for `w` if `e \ {v, w}` lies on one
    ///   side, in which case `D_w` changes by `c_e` with the same sign rule;
    /// * in all other cases `e` stays cut whatever `w` does.
    pub(crate) fn incremental_gain_update(&mut self, v: NodeId) {
        let from = self.side(v).expect("moved node lies in A ∪ B");
        let graph = self.graph;
        for e in graph.incident_edges(v) {
            let Some((on_a, on_b)) = self.edge_sides(e) else {
                continue;
            };
            let nodes = graph.edge_nodes(e);
            let k = nodes.len();
            let c = graph.cost(e);
            let (rest_a, rest_b) = match from {
                Side::A => (on_a - 1, on_b),
                Side::B => (on_a, on_b - 1),
            };
            let rest_uniform = rest_a == 0 || rest_b == 0;
            for &w in nodes {
                if w == v || self.ws.status[w] != Status::Candidate {
                    continue;
                }
                let w_side = self.side(w).expect("edge lies in A ∪ B");
                let delta = if rest_uniform {
                    if k == 2 {
                        2.0 * c
                    } else {
                        c
                    }
                } else {
                    let (others_a, others_b) = match w_side {
                        Side::A => (rest_a - 1, rest_b),
                        Side::B => (rest_a, rest_b - 1),
                    };
                    if others_a == 0 || others_b == 0 {
                        c
                    } else {
                        continue;
                    }
                };
                let gain = &mut self.ws.gain[w];
                if w_side == from {
                    *gain -= delta;
                } else {
                    *gain += delta;
                }
                let gain = *gain;
                self.heap.push(Entry { gain, node: w });
            }
        }
        self.ws.flipped[v] = !self.ws.flipped[v];
        self.ws.status[v] = Status::Moved;
        self.ws.gain[v] = -self.ws.gain[v];
    }

    fn update_boundary(&mut self, v: NodeId) {
        if self.b.is_none() && self.moves.len() == 1 {
            // the new component grows from the first moved node only
            for i in 0..self.ws.touched.len() {
                let u = self.ws.touched[i];
                if self.ws.status[u] == Status::Candidate {
                    self.ws.status[u] = Status::Idle;
                }
            }
        }
        let graph = self.graph;
        for &e in graph.connectivity_edges(v) {
            for &u in graph.edge_nodes(e) {
                if u != v && self.ws.status[u] == Status::Idle && self.side(u).is_some() {
                    self.make_candidate(u);
                }
            }
        }
    }
}

impl Drop for Bipartition<'_> {
    fn drop(&mut self) {
        self.ws.reset();
    }
}
