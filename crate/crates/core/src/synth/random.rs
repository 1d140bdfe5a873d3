use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::{EdgeKind, HypergraphBuilder, LiftedHypergraph};

/// Random instances with pairwise and order-3 edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomInstanceSpec {
    pub nodes: usize,
    /// Probability that a node pair carries an edge.
    pub pair_density: f64,
    /// Probability that a node triple carries an edge.
    pub triple_density: f64,
    /// Probability that an edge is lifted.
    pub lifted_fraction: f64,
    /// Costs are uniform in `[-cost_range, cost_range]`.
    pub cost_range: f64,
}

impl Default for RandomInstanceSpec {
    fn default() -> Self {
        Self {
            nodes: 6,
            pair_density: 0.6,
            triple_density: 0.15,
            lifted_fraction: 0.3,
            cost_range: 2.0,
        }
    }
}

pub fn random_instance(spec: &RandomInstanceSpec, seed: u64) -> LiftedHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.nodes;
    let mut b = HypergraphBuilder::new(n);
    let mut edge = |rng: &mut ChaCha8Rng, nodes: &[usize]| {
        let kind = if rng.random_bool(spec.lifted_fraction) {
            EdgeKind::Lifted
        } else {
            EdgeKind::Connectivity
        };
        let cost = rng.random_range(-spec.cost_range..=spec.cost_range);
        b.add_edge(nodes, kind, cost).expect("distinct in-range nodes");
    };
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(spec.pair_density) {
                edge(&mut rng, &[i, j]);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if rng.random_bool(spec.triple_density) {
                    edge(&mut rng, &[i, j, k]);
                }
            }
        }
    }
    b.build()
}
