//! Node partitions in canonical form.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::hypergraph::NodeId;

/// A partition of the node set `0..n`.
///
/// Every node stores the id of its class, and the id of a class is always the
/// smallest node it contains. Two partitions are therefore equal exactly when
/// their label vectors are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodePartition {
    labels: Vec<NodeId>,
}

impl NodePartition {
    /// Every node in its own class.
    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
        }
    }

    /// All nodes in one class.
    pub fn single_class(n: usize) -> Self {
        Self {
            labels: alloc::vec![0; n],
        }
    }

    /// Builds a partition from arbitrary class labels; nodes with equal
    /// labels share a class.
    pub fn from_labels<L: Ord + Copy>(labels: &[L]) -> Self {
        let mut first: BTreeMap<L, NodeId> = BTreeMap::new();
        let labels = labels
            .iter()
            .enumerate()
            .map(|(node, &label)| *first.entry(label).or_insert(node))
            .collect();
        Self { labels }
    }

    /// Wraps labels that are already canonical. Checked in debug builds.
    pub(crate) fn from_canonical(labels: Vec<NodeId>) -> Self {
        debug_assert!(labels.iter().enumerate().all(|(v, &l)| l <= v && labels[l] == l));
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[NodeId] {
        &self.labels
    }

    pub fn class_of(&self, node: NodeId) -> NodeId {
        self.labels[node]
    }

    pub fn same_class(&self, a: NodeId, b: NodeId) -> bool {
        self.labels[a] == self.labels[b]
    }

    /// True if all given nodes share one class.
    pub fn all_same(&self, nodes: &[NodeId]) -> bool {
        match nodes.split_first() {
            Some((&first, rest)) => {
                let class = self.labels[first];
                rest.iter().all(|&v| self.labels[v] == class)
            }
            None => true,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(v, &l)| v == l)
            .count()
    }

    /// Classes in ascending order of their id, members ascending.
    pub fn classes(&self) -> Vec<Vec<NodeId>> {
        let mut index = alloc::vec![usize::MAX; self.labels.len()];
        let mut classes: Vec<Vec<NodeId>> = Vec::new();
        for (v, &l) in self.labels.iter().enumerate() {
            if index[l] == usize::MAX {
                index[l] = classes.len();
                classes.push(Vec::new());
            }
            classes[index[l]].push(v);
        }
        classes
    }
}
