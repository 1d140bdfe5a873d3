use std::f64::consts::PI;

use holmc_core::motion::{
    angle_difference, estimate_euclidean_transform, pairwise_motion_distance, resolve_triplet_cost, triplet_cost,
    triplet_distance, triplet_distances, CostParams, EuclideanTransform, FlowStats, Trajectory, Vec2,
};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Vec2> {
    (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

fn motion() -> impl Strategy<Value = EuclideanTransform> {
    (-PI + 1e-9..PI, 0.5..2.0f64, 0.0..100.0f64, 0.0..2.0 * PI)
        .prop_map(|(a, s, r, phi)| EuclideanTransform::new(a, s, Vec2::new(r * phi.cos(), r * phi.sin())))
}

fn two_frame(p: Vec2, m: &EuclideanTransform) -> Trajectory {
    Trajectory::new(0, 0, vec![p, m.apply(p)]).unwrap()
}

fn random_walk() -> impl Strategy<Value = Trajectory> {
    (0usize..3, point(), prop::collection::vec(point(), 2..6)).prop_map(|(start, p0, steps)| {
        let mut pts = vec![p0];
        for s in steps {
            let last = *pts.last().unwrap();
            pts.push(last + s * 0.1);
        }
        Trajectory::new(0, start, pts).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn transform_round_trip(m in motion(), a in point(), b in point(), c in point()) {
        prop_assume!(a.distance(b) > 1.0);
        let (ta, tb, tc) = (two_frame(a, &m), two_frame(b, &m), two_frame(c, &m));
        let est = estimate_euclidean_transform(&ta, &tb, 0, 1).unwrap();
        prop_assert!(angle_difference(est.angle, m.angle).abs() <= 1e-6);
        prop_assert!((est.scale - m.scale).abs() <= 1e-6);
        prop_assert!(est.translation.distance(m.translation) <= 1e-6);
        prop_assert!(triplet_distance(&est, &tc, 0, 1).unwrap() <= 1e-6);
    }

    #[test]
    fn triplet_cost_is_symmetric(a in random_walk(), b in random_walk(), c in random_walk()) {
        let s = FlowStats::default();
        let p = CostParams::default();
        let Ok(reference) = triplet_cost(&a, &b, &c, &s, &p) else {
            return Ok(());
        };
        let orders = [(&a, &c, &b), (&b, &a, &c), (&b, &c, &a), (&c, &a, &b), (&c, &b, &a)];
        for (x, y, z) in orders {
            let other = triplet_cost(x, y, z, &s, &p).unwrap();
            prop_assert!((other - reference).abs() <= 1e-9 * (1.0 + reference.abs()));
        }
        let d = triplet_distances(&a, &b, &c, &s).unwrap();
        prop_assert!(d.d_min <= d.d_max);
        let low = p.triple_cost_at(d.d_min);
        let high = p.triple_cost_at(d.d_max);
        prop_assert!(low <= reference && reference <= high);
    }

    #[test]
    fn motion_distance_is_a_symmetric_non_negative(a in random_walk(), b in random_walk()) {
        let s = FlowStats::default();
        let Ok(d) = pairwise_motion_distance(&a, &b, &s) else {
            return Ok(());
        };
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d, pairwise_motion_distance(&b, &a, &s).unwrap());
        prop_assert_eq!(pairwise_motion_distance(&a, &a, &s).unwrap(), 0.0);
    }

    #[test]
    fn resolved_cost_lies_between_estimates(lo in 0.0..60.0f64, extra in 0.0..60.0f64) {
        let p = CostParams::default();
        let c = resolve_triplet_cost(lo, lo + extra, &p);
        prop_assert!(p.triple_cost_at(lo) <= c && c <= p.triple_cost_at(lo + extra));
    }
}

#[test]
fn thousand_motions_recovered() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = EuclideanTransform::new(
            rng.random_range(-PI..PI),
            rng.random_range(0.5..2.0),
            Vec2::new(rng.random_range(-70.0..70.0), rng.random_range(-70.0..70.0)),
        );
        let p = |rng: &mut rand_chacha::ChaCha8Rng| Vec2::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let (a, b, c) = (p(&mut rng), p(&mut rng), p(&mut rng));
        if a.distance(b) < 1.0 {
            continue;
        }
        let est = estimate_euclidean_transform(&two_frame(a, &m), &two_frame(b, &m), 0, 1).unwrap();
        worst = worst
            .max(angle_difference(est.angle, m.angle).abs())
            .max((est.scale - m.scale).abs())
            .max(est.translation.distance(m.translation))
            .max(triplet_distance(&est, &two_frame(c, &m), 0, 1).unwrap());
    }
    assert!(worst <= 1e-6, "worst error {worst}");
}
