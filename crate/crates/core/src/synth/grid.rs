use alloc::vec::Vec;

use crate::hypergraph::{EdgeKind, HypergraphBuilder, LiftedHypergraph, NodeId};
use crate::motion::{pairwise_cost_from_distances, resolve_triplet_cost, transition_distances, CostParams, Vec2};

/// Third-order stencil: offsets of the second and third pixel relative to
/// the first.
pub const STENCIL: [[(i64, i64); 2]; 6] = [
    [(1, 0), (2, 0)],
    [(0, 1), (0, 2)],
    [(1, 1), (2, 2)],
    [(1, -1), (2, -2)],
    [(1, 0), (0, 1)],
    [(1, 0), (1, 1)],
];

/// Directions of the lifted edges, scaled by [`GridSpec::lift_offset`].
pub const LIFT_DIRECTIONS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

const NEIGHBORHOOD: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub lifted: bool,
    pub lift_offset: usize,
}

impl GridSpec {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            lifted: false,
            lift_offset: 5,
        }
    }

    /// A `2^k × 2^k` grid.
    pub fn square(k: u32) -> Self {
        Self::new(1 << k, 1 << k)
    }

    pub fn with_lifting(self, lifted: bool) -> Self {
        Self { lifted, ..self }
    }

    pub fn node_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn node(&self, x: usize, y: usize) -> NodeId {
        y * self.width + x
    }

    fn offset(&self, x: usize, y: usize, (dx, dy): (i64, i64)) -> Option<NodeId> {
        let nx = x as i64 + dx;
        let ny = y as i64 + dy;
        if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
            return None;
        }
        Some(self.node(nx as usize, ny as usize))
    }
}

/// One flow vector per pixel, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowField {
    pub width: usize,
    pub height: usize,
    pub flow: Vec<Vec2>,
}

impl FlowField {
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> Vec2) -> Self {
        let mut flow = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                flow.push(f(x, y));
            }
        }
        Self { width, height, flow }
    }

    pub fn constant(width: usize, height: usize, v: Vec2) -> Self {
        Self::from_fn(width, height, |_, _| v)
    }

    /// `left` for `x < width/2`, `right` otherwise.
    pub fn two_region(width: usize, height: usize, left: Vec2, right: Vec2) -> Self {
        Self::from_fn(width, height, |x, _| if x < width / 2 { left } else { right })
    }

    /// Rotation by `angle` radians about the grid center.
    pub fn rotating(width: usize, height: usize, angle: f64) -> Self {
        let c = Vec2::new((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
        Self::from_fn(width, height, |x, y| {
            let p = Vec2::new(x as f64, y as f64);
            (p - c).rotate(angle) + c - p
        })
    }

    /// Three regions on a `side × side` grid: a disc that rotates and shifts
    /// left, a block moving down, and a slowly drifting background. The
    /// layout scales with `side`; flow vectors are in pixels and do not.
    pub fn composite(side: usize) -> Self {
        let center = Vec2::new(0.35, 0.5) * side as f64;
        Self::from_fn(side, side, |x, y| {
            let p = Vec2::new(x as f64 + 0.5, y as f64 + 0.5);
            match composite_region(side, x, y) {
                1 => (p - center).rotate(0.15) + center - p + Vec2::new(-20.0, 5.0),
                2 => Vec2::new(0.0, 20.0),
                _ => Vec2::new(1.0, 0.0),
            }
        })
    }

    /// Region of every pixel of [`FlowField::composite`]: 0 background,
    /// 1 disc, 2 block.
    pub fn composite_regions(side: usize) -> Vec<usize> {
        (0..side * side).map(|i| composite_region(side, i % side, i / side)).collect()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Vec2 {
        self.flow[y * self.width + x]
    }
}

fn composite_region(side: usize, x: usize, y: usize) -> usize {
    let scale = side as f64;
    let (u, v) = ((x as f64 + 0.5) / scale, (y as f64 + 0.5) / scale);
    if Vec2::new(u, v).distance(Vec2::new(0.35, 0.5)) <= 0.22 {
        1
    } else if (0.65..=0.9).contains(&u) && (0.2..=0.8).contains(&v) {
        2
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("flow field is {found:?}, grid is {expected:?}")]
    SizeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

/// Pixel-grid instance: one node per pixel, the six stencil triples per pixel
/// with motion-model costs (each pixel's flow is a two-frame trajectory),
/// zero-cost 8-neighborhood pairs, and optionally lifted pairs at
/// `lift_offset` in the [`LIFT_DIRECTIONS`] with flow-difference costs.
pub fn generate_grid_instance(
    spec: &GridSpec,
    flow: &FlowField,
    params: &CostParams,
) -> Result<LiftedHypergraph, GridError> {
    if (flow.width, flow.height) != (spec.width, spec.height) || flow.flow.len() != spec.node_count() {
        return Err(GridError::SizeMismatch {
            expected: (spec.width, spec.height),
            found: (flow.width, flow.height),
        });
    }
    let mut b = HypergraphBuilder::new(spec.node_count());
    let pos = |x: usize, y: usize| Vec2::new(x as f64, y as f64);
    for y in 0..spec.height {
        for x in 0..spec.width {
            let v = spec.node(x, y);
            for &[o1, o2] in &STENCIL {
                let (Some(u), Some(w)) = (spec.offset(x, y, o1), spec.offset(x, y, o2)) else {
                    continue;
                };
                let ids = [v, u, w];
                let before = ids.map(|n| pos(n % spec.width, n / spec.width));
                let after = [0, 1, 2].map(|i| before[i] + flow.flow[ids[i]]);
                let cost = match transition_distances(before, after, 1.0) {
                    Ok((lo, hi)) => resolve_triplet_cost(lo, hi, params),
                    Err(_) => 0.0,
                };
                b.add_edge(&ids, EdgeKind::Connectivity, cost)
                    .expect("stencil triples are distinct");
            }
            for &d in &NEIGHBORHOOD {
                if let Some(u) = spec.offset(x, y, d) {
                    b.add_edge(&[v, u], EdgeKind::Connectivity, 0.0)
                        .expect("neighbors are distinct");
                }
            }
            if spec.lifted && spec.lift_offset > 1 {
                let k = spec.lift_offset as i64;
                for &(dx, dy) in &LIFT_DIRECTIONS {
                    if let Some(u) = spec.offset(x, y, (dx * k, dy * k)) {
                        let dm = (flow.flow[v] - flow.flow[u]).norm();
                        let ds = pos(x, y).distance(pos(u % spec.width, u / spec.width));
                        let cost = pairwise_cost_from_distances(dm, ds, 0.0, params);
                        b.add_edge(&[v, u], EdgeKind::Lifted, cost)
                            .expect("lifted pairs are beyond the neighborhood");
                    }
                }
            }
        }
    }
    Ok(b.build())
}
