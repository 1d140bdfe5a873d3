//! Generalized Kernighan–Lin local search for lifted multicuts on
//! hypergraphs.
//!
//! The search keeps a decomposition and repeatedly improves it by
//! moving nodes between pairs of adjacent components, joining them, or
//! splitting part of a component into a new one. Every intermediate state is
//! a decomposition, so the result is always feasible and never worse than the
//! start.

mod bipartition;
mod state;

pub use bipartition::{Bipartition, Side, Transformation};
pub use state::PartitionState;

use crate::hypergraph::LiftedHypergraph;
use crate::model::{self, EdgeLabeling, ModelError};
use crate::partition::NodePartition;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Upper bound on outer iterations.
    pub max_iter: usize,
    /// Improvements at or below this are treated as zero.
    pub epsilon: f64,
    /// Undo an applied transformation unless the objective strictly improves.
    pub rollback: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            epsilon: 1e-9,
            rollback: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("initial labeling is not induced by a decomposition")]
    InfeasibleInput,
    #[error("expected {expected} entries, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub labeling: EdgeLabeling,
    pub partition: NodePartition,
    pub objective: f64,
    /// Outer iterations executed, including the final one that found no
    /// improvement.
    pub iterations: usize,
    /// False if `max_iter` was reached while still improving.
    pub converged: bool,
}

/// Progress hooks.
pub trait Observer {
    fn on_move(&mut self, _bipartition: &Bipartition<'_>) {}

    /// Called after each outer iteration with the objective and component ids.
    fn on_iteration(&mut self, _iteration: usize, _objective: f64, _labels: &[usize]) {}
}

impl Observer for () {}

/// Improves the feasible labeling `initial`.
pub fn solve(graph: &LiftedHypergraph, initial: &EdgeLabeling, config: &SolverConfig) -> Result<Solution, SolveError> {
    solve_observed(graph, initial, config, &mut ())
}

pub fn solve_observed(
    graph: &LiftedHypergraph,
    initial: &EdgeLabeling,
    config: &SolverConfig,
    observer: &mut dyn Observer,
) -> Result<Solution, SolveError> {
    if initial.len() != graph.edge_count() {
        return Err(SolveError::SizeMismatch {
            expected: graph.edge_count(),
            found: initial.len(),
        });
    }
    if !model::is_feasible(graph, initial) {
        return Err(SolveError::InfeasibleInput);
    }
    let partition = model::partition_from_labeling(graph, initial);
    solve_partition_observed(graph, &partition, config, observer)
}

/// Starts from a decomposition given as a node partition.
pub fn solve_partition(
    graph: &LiftedHypergraph,
    partition: &NodePartition,
    config: &SolverConfig,
) -> Result<Solution, SolveError> {
    solve_partition_observed(graph, partition, config, &mut ())
}

pub fn solve_partition_observed(
    graph: &LiftedHypergraph,
    partition: &NodePartition,
    config: &SolverConfig,
    observer: &mut dyn Observer,
) -> Result<Solution, SolveError> {
    let mut state = PartitionState::new(graph, partition, config.clone())?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let changed = state.sweep(observer);
        observer.on_iteration(iterations, state.objective(), state.labels());
        if !changed {
            converged = true;
            break;
        }
    }
    let partition = state.partition();
    let labeling = model::induced_labeling(graph, &partition);
    debug_assert!(model::is_feasible(graph, &labeling));
    let objective = model::objective(graph, &labeling);
    Ok(Solution {
        labeling,
        partition,
        objective,
        iterations,
        converged,
    })
}
