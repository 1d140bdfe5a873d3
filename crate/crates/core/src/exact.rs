//! Brute-force optimum over all decompositions of small instances.
//!
//! Set partitions are enumerated as restricted-growth strings in
//! lexicographic order (`Bell(n)` candidates); candidates with a class that is
//! not connected through connectivity edges are discarded.

use alloc::vec::Vec;

use crate::hypergraph::{EdgeKind, LiftedHypergraph};
use crate::model::{induced_labeling, EdgeLabeling};
use crate::partition::NodePartition;
use crate::union_find::UnionFind;

pub const DEFAULT_NODE_LIMIT: usize = 10;

const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("instance has {nodes} nodes, exact enumeration is limited to {limit}")]
    TooLarge { nodes: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub labeling: EdgeLabeling,
    pub partition: NodePartition,
    pub objective: f64,
}

/// Lexicographic enumeration of restricted-growth strings of length `n`:
/// `a[0] = 0` and `a[i] <= 1 + max(a[..i])`.
#[derive(Clone, Debug)]
pub struct RestrictedGrowth {
    current: Vec<usize>,
    prefix_max: Vec<usize>,
    started: bool,
    done: bool,
}

impl RestrictedGrowth {
    pub fn new(n: usize) -> Self {
        Self {
            current: alloc::vec![0; n],
            prefix_max: alloc::vec![0; n],
            started: false,
            done: false,
        }
    }

    /// Advances to the next string; returns `None` when exhausted.
    pub fn next_string(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let n = self.current.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.current[i] <= self.prefix_max[i - 1] {
                self.current[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.current[i]);
                for j in i + 1..n {
                    self.current[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return Some(&self.current);
            }
        }
        self.done = true;
        None
    }
}

/// Number of set partitions of an `n`-element set.
pub fn bell_number(n: usize) -> u64 {
    // Bell triangle
    let mut row = alloc::vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("non-empty"));
        for &x in &row {
            let last = *next.last().expect("non-empty");
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

fn classes_connected(graph: &LiftedHypergraph, rgs: &[usize], class_count: usize, uf: &mut UnionFind) -> bool {
    *uf = UnionFind::new(rgs.len());
    let mut merges = 0;
    for e in graph.edge_ids() {
        if graph.kind(e) != EdgeKind::Connectivity {
            continue;
        }
        let nodes = graph.edge_nodes(e);
        let class = rgs[nodes[0]];
        if nodes.iter().any(|&v| rgs[v] != class) {
            continue;
        }
        for w in nodes.windows(2) {
            if uf.union(w[0], w[1]) {
                merges += 1;
            }
        }
    }
    rgs.len() - merges == class_count
}

/// Globally optimal feasible labeling for instances with at most
/// `node_limit` nodes.
///
/// Ties within a relative tolerance of `1e-12` go to the candidate with more
/// classes, then to the lexicographically smallest restricted-growth string.
pub fn solve_exact(graph: &LiftedHypergraph, node_limit: usize) -> Result<ExactSolution, ExactError> {
    let n = graph.node_count();
    if n > node_limit {
        return Err(ExactError::TooLarge { nodes: n, limit: node_limit });
    }
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    let mut uf = UnionFind::new(n);
    let mut strings = RestrictedGrowth::new(n);
    while let Some(rgs) = strings.next_string() {
        let class_count = rgs.iter().copied().max().map_or(0, |m| m + 1);
        if !classes_connected(graph, rgs, class_count, &mut uf) {
            continue;
        }
        let value: f64 = graph
            .edge_ids()
            .filter(|&e| {
                let nodes = graph.edge_nodes(e);
                nodes.iter().all(|&v| rgs[v] == rgs[nodes[0]])
            })
            .map(|e| graph.cost(e))
            .sum();
        let better = match &best {
            None => true,
            Some((b, classes, _)) => {
                let tol = TIE_TOLERANCE * (1.0 + b.abs());
                value < b - tol || (value <= b + tol && class_count > *classes)
            }
        };
        if better {
            best = Some((value, class_count, rgs.to_vec()));
        }
    }
    // n == 0 yields the single empty string
    let (_, _, rgs) = best.expect("the all-singletons partition is always feasible");
    let partition = NodePartition::from_labels(&rgs);
    let labeling = induced_labeling(graph, &partition);
    let objective = crate::model::objective(graph, &labeling);
    Ok(ExactSolution {
        labeling,
        partition,
        objective,
    })
}
