//! Timing sweep over pixel-grid instances of growing size.

use std::time::Instant;

use holmc_core::kl::{self, SolveError, SolverConfig};
use holmc_core::motion::{CostParams, Vec2};
use holmc_core::synth::{generate_grid_instance, score_partition, FlowField, GridSpec};
use holmc_core::{LiftedHypergraph, NodePartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum FlowKind {
    Constant,
    TwoRegion,
    Rotating,
    #[default]
    Composite,
}

impl FlowKind {
    pub fn field(self, side: usize) -> FlowField {
        match self {
            FlowKind::Constant => FlowField::constant(side, side, Vec2::new(1.0, 0.5)),
            FlowKind::TwoRegion => FlowField::two_region(side, side, Vec2::ZERO, Vec2::new(20.0, 0.0)),
            FlowKind::Rotating => FlowField::rotating(side, side, 0.15),
            FlowKind::Composite => FlowField::composite(side),
        }
    }

    /// Ground-truth segment per pixel: the rigidly moving regions.
    pub fn regions(self, side: usize) -> Vec<usize> {
        match self {
            FlowKind::Constant | FlowKind::Rotating => vec![0; side * side],
            FlowKind::TwoRegion => (0..side * side).map(|i| usize::from(i % side >= side / 2)).collect(),
            FlowKind::Composite => FlowField::composite_regions(side),
        }
    }
}

/// The `2^k × 2^k` grid instance.
pub fn grid_instance(k: u32, flow: FlowKind, lifted: bool, params: &CostParams) -> LiftedHypergraph {
    let spec = GridSpec::square(k).with_lifting(lifted);
    generate_grid_instance(&spec, &flow.field(spec.width), params).expect("flow field matches the grid")
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub k: u32,
    pub nodes: usize,
    pub higher_order_edges: usize,
    pub edges: usize,
    pub seconds: f64,
    pub objective: f64,
    pub components: usize,
    /// Rand index against the flow regions.
    pub rand_index: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves each grid from the all-joined decomposition and keeps the fastest
/// of `repeats` runs. Instance generation is not timed.
pub fn run_sweep(
    ks: impl IntoIterator<Item = u32>,
    flow: FlowKind,
    lifted: bool,
    repeats: usize,
    config: &SolverConfig,
) -> Result<Vec<BenchRow>, SolveError> {
    let params = CostParams::default();
    let mut rows = Vec::new();
    for k in ks {
        let g = grid_instance(k, flow, lifted, &params);
        let joined = NodePartition::single_class(g.node_count());
        let mut seconds = f64::INFINITY;
        let mut sol = None;
        for _ in 0..repeats.max(1) {
            let start = Instant::now();
            let s = kl::solve_partition(&g, &joined, config)?;
            seconds = seconds.min(start.elapsed().as_secs_f64());
            sol = Some(s);
        }
        let sol = sol.expect("at least one run");
        let truth = flow.regions(1 << k);
        let scores = score_partition(sol.partition.labels(), &truth).expect("one label per pixel");
        rows.push(BenchRow {
            k,
            nodes: g.node_count(),
            higher_order_edges: g.higher_order_edge_count(),
            edges: g.edge_count(),
            seconds,
            objective: sol.objective,
            components: sol.partition.num_classes(),
            rand_index: scores.rand_index,
            iterations: sol.iterations,
            converged: sol.converged,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// distinct `x` or any non-positive value.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = String::from("# k nodes higher_order_edges seconds objective components rand iterations\n");
    for r in rows {
        out.push_str(&format!(
            "{} {} {} {:.6} {} {} {:.4} {}\n",
            r.k,
            r.nodes,
            r.higher_order_edges,
            r.seconds,
            crate::format::format_float(r.objective),
            r.components,
            r.rand_index,
            r.iterations
        ));
    }
    let points: Vec<_> = rows
        .iter()
        .map(|r| (r.higher_order_edges as f64, r.seconds))
        .collect();
    if let Some(s) = loglog_slope(&points) {
        out.push_str(&format!("# slope {s:.3}\n"));
    }
    out
}
