//! Problem instances from point trajectories.
//!
//! Nodes are trajectories (in input order). Candidate pairs share at least two
//! frames and lie closer than `pairwise_cutoff` on average. Candidate triples
//! share at least two frames and are sampled by their spatial extent `d` (the
//! largest pairwise mean distance): kept if `d ≤ triple_full_dist`, dropped if
//! `d ≥ triple_max_dist`, otherwise kept with probability `1/d²`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::{EdgeKind, HypergraphBuilder, LiftedHypergraph};
use crate::motion::{
    common_frames3, max_spatial_distance, mean_spatial_distance, pairwise_cost, triplet_cost, CostParams,
    FlowStats, MotionError, Trajectory,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BuildMode {
    /// Pairwise edges where attractive; repulsive pairs get a zero-cost edge
    /// plus third-order edges through every further trajectory.
    #[default]
    Adaptive,
    /// All pairwise costs plus all sampled third-order edges.
    Additive,
    /// Sampled third-order edges only.
    HigherOrder,
    /// Pairwise edges only.
    Pairwise,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuilderConfig {
    pub mode: BuildMode,
    pub lifted: bool,
    pub pairwise_cutoff: f64,
    pub lift_knn: usize,
    pub lift_dist: f64,
    pub triple_full_dist: f64,
    pub triple_max_dist: f64,
    pub seed: u64,
}

impl Default for BuilderConfig {
    fn default() -> Self {
        Self {
            mode: BuildMode::Adaptive,
            lifted: false,
            pairwise_cutoff: 100.0,
            lift_knn: 12,
            lift_dist: 40.0,
            triple_full_dist: 20.0,
            triple_max_dist: 300.0,
            seed: 0,
        }
    }
}

impl BuilderConfig {
    pub fn validate(&self) -> Result<(), BuildError> {
        if !(self.triple_full_dist > 0.0 && self.triple_full_dist < self.triple_max_dist) {
            return Err(BuildError::InvalidConfig("need 0 < triple_full_dist < triple_max_dist"));
        }
        if !(self.lift_dist < self.pairwise_cutoff) {
            return Err(BuildError::InvalidConfig("need lift_dist < pairwise_cutoff"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("need at least two trajectories, got {0}")]
    TooFewTrajectories(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Motion(#[from] MotionError),
}

/// An admissible trajectory pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairInfo {
    pub i: usize,
    pub j: usize,
    pub mean_distance: f64,
    pub cost: f64,
}

/// Mean spatial distances between all trajectory pairs (`None` without two
/// common frames).
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: usize,
    values: Vec<f64>,
}

impl DistanceTable {
    pub fn new(trajectories: &[Trajectory]) -> Self {
        let n = trajectories.len();
        let mut values = alloc::vec![f64::NAN; n * n];
        for i in 0..n {
            for j in i + 1..n {
                if let Ok(d) = mean_spatial_distance(&trajectories[i], &trajectories[j]) {
                    values[i * n + j] = d;
                    values[j * n + i] = d;
                }
            }
        }
        Self { n, values }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let d = self.values[i * self.n + j];
        (!d.is_nan()).then_some(d)
    }
}

pub fn pair_table(
    trajectories: &[Trajectory],
    distances: &DistanceTable,
    stats: &FlowStats,
    params: &CostParams,
    config: &BuilderConfig,
) -> Vec<PairInfo> {
    let n = trajectories.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let Some(d) = distances.get(i, j) else {
                continue;
            };
            if d >= config.pairwise_cutoff {
                continue;
            }
            let cost = pairwise_cost(&trajectories[i], &trajectories[j], stats, params)
                .expect("pairs in the distance table overlap");
            pairs.push(PairInfo {
                i,
                j,
                mean_distance: d,
                cost,
            });
        }
    }
    pairs
}

/// Probability that a triple of extent `d` is kept.
pub fn keep_probability(d: f64, config: &BuilderConfig) -> f64 {
    if d <= config.triple_full_dist {
        1.0
    } else if d >= config.triple_max_dist {
        0.0
    } else {
        (1.0 / (d * d)).min(1.0)
    }
}

/// Seeded keep/drop decision for the triple `i < j < k`; the random stream
/// depends only on the seed and the node set.
pub fn sample_triple(triple: [usize; 3], d: f64, config: &BuilderConfig) -> bool {
    let p = keep_probability(d, config);
    if p >= 1.0 {
        return true;
    }
    if p <= 0.0 {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(triple[0] as u64 | (triple[1] as u64) << 21 | (triple[2] as u64) << 42);
    rng.random::<f64>() < p
}

struct Context<'a> {
    trajectories: &'a [Trajectory],
    distances: DistanceTable,
    stats: &'a FlowStats,
    params: &'a CostParams,
    config: &'a BuilderConfig,
}

impl Context<'_> {
    /// Cost of the sorted triple if it is admissible and sampled.
    fn triple(&self, t: [usize; 3]) -> Option<f64> {
        let [a, b, c] = t.map(|i| &self.trajectories[i]);
        if common_frames3(a, b, c).len() < 2 {
            return None;
        }
        let d = self
            .distances
            .get(t[0], t[1])?
            .max(self.distances.get(t[0], t[2])?)
            .max(self.distances.get(t[1], t[2])?);
        if !sample_triple(t, d, self.config) {
            return None;
        }
        triplet_cost(a, b, c, self.stats, self.params).ok()
    }

    fn all_triples(&self, builder: &mut HypergraphBuilder) {
        let n = self.trajectories.len();
        let max = self.config.triple_max_dist;
        let near = |i: usize, j: usize| self.distances.get(i, j).is_some_and(|d| d < max);
        for i in 0..n {
            for j in i + 1..n {
                if !near(i, j) {
                    continue;
                }
                for k in j + 1..n {
                    if !near(i, k) || !near(j, k) {
                        continue;
                    }
                    if let Some(c) = self.triple([i, j, k]) {
                        add(builder, &[i, j, k], c);
                    }
                }
            }
        }
    }
}

fn add(builder: &mut HypergraphBuilder, nodes: &[usize], cost: f64) {
    builder
        .add_edge(nodes, EdgeKind::Connectivity, cost)
        .expect("generated edges are valid");
}

fn context<'a>(
    trajectories: &'a [Trajectory],
    stats: &'a FlowStats,
    params: &'a CostParams,
    config: &'a BuilderConfig,
) -> Result<Context<'a>, BuildError> {
    if trajectories.len() < 2 {
        return Err(BuildError::TooFewTrajectories(trajectories.len()));
    }
    config.validate()?;
    params.validate()?;
    Ok(Context {
        trajectories,
        distances: DistanceTable::new(trajectories),
        stats,
        params,
        config,
    })
}

/// Builds the instance selected by `config.mode`, lifted if requested.
pub fn build(
    trajectories: &[Trajectory],
    stats: &FlowStats,
    params: &CostParams,
    config: &BuilderConfig,
) -> Result<LiftedHypergraph, BuildError> {
    let graph = match config.mode {
        BuildMode::Adaptive => build_adaptive(trajectories, stats, params, config)?,
        BuildMode::Additive => build_hopmc(trajectories, stats, params, config)?,
        BuildMode::HigherOrder => build_homc(trajectories, stats, params, config)?,
        BuildMode::Pairwise => build_pairwise(trajectories, stats, params, config)?,
    };
    Ok(if config.lifted {
        lift(&graph, trajectories, config)
    } else {
        graph
    })
}

/// Motion-adaptive construction (not lifted).
pub fn build_adaptive(
    trajectories: &[Trajectory],
    stats: &FlowStats,
    params: &CostParams,
    config: &BuilderConfig,
) -> Result<LiftedHypergraph, BuildError> {
    let cx = context(trajectories, stats, params, config)?;
    let n = trajectories.len();
    let mut builder = HypergraphBuilder::new(n);
    let mut proposed: BTreeSet<[usize; 3]> = BTreeSet::new();
    for pair in pair_table(trajectories, &cx.distances, stats, params, config) {
        if pair.cost < 0.0 {
            add(&mut builder, &[pair.i, pair.j], pair.cost);
            continue;
        }
        add(&mut builder, &[pair.i, pair.j], 0.0);
        for k in 0..n {
            if k == pair.i || k == pair.j {
                continue;
            }
            let mut t = [pair.i, pair.j, k];
            t.sort_unstable();
            if !proposed.insert(t) {
                continue;
            }
            if let Some(c) = cx.triple(t) {
                add(&mut builder, &t, c);
            }
        }
    }
    Ok(builder.build())
}

/// All pairwise costs plus all sampled triples (not lifted).
pub fn build_hopmc(
    trajectories: &[Trajectory],
    stats: &FlowStats,
    params: &CostParams,
    config: &BuilderConfig,
) -> Result<LiftedHypergraph, BuildError> {
    let cx = context(trajectories, stats, params, config)?;
    let mut builder = HypergraphBuilder::new(trajectories.len());
    for pair in pair_table(trajectories, &cx.distances, stats, params, config) {
        add(&mut builder, &[pair.i, pair.j], pair.cost);
    }
    cx.all_triples(&mut builder);
    Ok(builder.build())
}

/// Sampled triples only.
pub fn build_homc(
    trajectories: &[Trajectory],
    stats: &FlowStats,
    params: &CostParams,
    config: &BuilderConfig,
) -> Result<LiftedHypergraph, BuildError> {
    let cx = context(trajectories, stats, params, config)?;
    let mut builder = HypergraphBuilder::new(trajectories.len());
    cx.all_triples(&mut builder);
    Ok(builder.build())
}

/// Pairwise costs only.
pub fn build_pairwise(
    trajectories: &[Trajectory],
    stats: &FlowStats,
    params: &CostParams,
    config: &BuilderConfig,
) -> Result<LiftedHypergraph, BuildError> {
    let cx = context(trajectories, stats, params, config)?;
    let mut builder = HypergraphBuilder::new(trajectories.len());
    for pair in pair_table(trajectories, &cx.distances, stats, params, config) {
        add(&mut builder, &[pair.i, pair.j], pair.cost);
    }
    Ok(builder.build())
}

/// Indices of the `k` trajectories closest to `i` by mean spatial distance
/// among those sharing at least two frames with it (ties by index).
pub fn nearest_neighbors(distances: &DistanceTable, n: usize, i: usize, k: usize) -> Vec<usize> {
    let mut cands: Vec<(f64, usize)> = (0..n)
        .filter(|&j| j != i)
        .filter_map(|j| distances.get(i, j).map(|d| (d, j)))
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    cands.truncate(k);
    cands.into_iter().map(|(_, j)| j).collect()
}

/// Turns pairwise edges into lifted edges unless the two trajectories are
/// among each other's `lift_knn` nearest neighbors (either direction) or stay
/// closer than `lift_dist` throughout. Costs and higher-order edges are
/// unchanged.
pub fn lift(graph: &LiftedHypergraph, trajectories: &[Trajectory], config: &BuilderConfig) -> LiftedHypergraph {
    let n = graph.node_count();
    assert_eq!(n, trajectories.len());
    let distances = DistanceTable::new(trajectories);
    let knn: Vec<Vec<usize>> = (0..n)
        .map(|i| nearest_neighbors(&distances, n, i, config.lift_knn))
        .collect();
    let mut builder = HypergraphBuilder::new(n);
    for e in graph.edges() {
        let kind = if e.nodes.len() == 2 {
            let (i, j) = (e.nodes[0], e.nodes[1]);
            let close = knn[i].contains(&j)
                || knn[j].contains(&i)
                || max_spatial_distance(&trajectories[i], &trajectories[j]).is_ok_and(|d| d < config.lift_dist);
            if close {
                EdgeKind::Connectivity
            } else {
                EdgeKind::Lifted
            }
        } else {
            e.kind
        };
        builder
            .add_edge(e.nodes, kind, e.cost)
            .expect("edges of a valid graph");
    }
    builder.build()
}
