//! Higher-order minimum cost lifted multicuts.
//!
//! A problem instance is a hypergraph `G = (V, F)` together with an additional
//! set of lifted hyperedges `F'`. Every hyperedge `e` carries a real cost that
//! is paid by a decomposition of `G` whenever all nodes of `e` end up in the
//! same component. Connectivity edges in `F` define which node sets may form a
//! component; lifted edges only contribute cost.
//!
//! The crate is `no_std` (with `alloc`) and contains:
//!
//! * [`hypergraph`]: the immutable instance type and its builder,
//! * [`model`]: edge labelings, the objective and feasibility checks,
//! * [`kl`]: the higher-order lifted Kernighan-Lin heuristic,
//! * [`exact`]: a brute-force oracle over all set partitions,
//! * [`motion`]: trajectories and the pairwise / third-order motion costs,
//! * [`construction`]: instance construction from point trajectories,
//! * [`synth`]: synthetic scenes, grid instances and partition scores.

#![no_std]
// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod construction;
pub mod exact;
pub mod hypergraph;
pub mod kl;
pub mod model;
pub mod motion;
pub mod partition;
pub mod synth;
mod union_find;

pub use hypergraph::{EdgeId, EdgeKind, GraphError, HypergraphBuilder, LiftedHypergraph, NodeId};
pub use model::{EdgeLabeling, ModelError};
pub use partition::NodePartition;
pub use union_find::UnionFind;
