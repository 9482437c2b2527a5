use affsel_core::geometry::Polytope;
use proptest::prelude::*;

const EPS: f64 = 1e-9;

fn polytope(d: usize) -> impl Strategy<Value = Polytope<f64>> {
    prop::collection::vec(prop::collection::vec(-6i32..=6, d), 1..=7).prop_map(move |pts| {
        let v = pts
            .into_iter()
            .map(|p| p.into_iter().map(f64::from).collect())
            .collect();
        Polytope::new(d, v).unwrap()
    })
}

fn pair() -> impl Strategy<Value = (Polytope<f64>, Polytope<f64>)> {
    (1usize..=3).prop_flat_map(|d| (polytope(d), polytope(d)))
}

fn triple() -> impl Strategy<Value = (Polytope<f64>, Polytope<f64>, Polytope<f64>)> {
    (1usize..=3).prop_flat_map(|d| (polytope(d), polytope(d), polytope(d)))
}

fn hull(p: &Polytope<f64>) -> Vec<Vec<f64>> {
    p.reduce(EPS).to_vertex_lists()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn minkowski_commutes((p, q) in pair()) {
        prop_assert_eq!(hull(&p.minkowski_sum(&q).unwrap()), hull(&q.minkowski_sum(&p).unwrap()));
    }

    #[test]
    fn minkowski_associates((p, q, r) in triple()) {
        let left = p.minkowski_sum(&q).unwrap().minkowski_sum(&r).unwrap();
        let right = p.minkowski_sum(&q.minkowski_sum(&r).unwrap()).unwrap();
        prop_assert_eq!(hull(&left), hull(&right));
    }

    #[test]
    fn convex_combinations_of_vertices_lie_in_scaled_sum((p, q) in pair(), k in 0u32..=8) {
        let t = f64::from(k) / 8.0;
        let sum = p.scale(t).minkowski_sum(&q.scale(1.0 - t)).unwrap();
        for a in p.vertices() {
            for b in q.vertices() {
                let z: Vec<f64> = a.iter().zip(b).map(|(x, y)| t * x + (1.0 - t) * y).collect();
                prop_assert!(sum.contains_point(&z, EPS), "{:?} not in sum", z);
            }
        }
    }

    #[test]
    fn mutual_subset_iff_same_hull((p, q) in pair()) {
        let mutual = p.subset(&q, EPS).unwrap() && q.subset(&p, EPS).unwrap();
        prop_assert_eq!(mutual, hull(&p) == hull(&q));
    }

    #[test]
    fn hull_of_union_with_own_points_is_unchanged(p in (1usize..=3).prop_flat_map(polytope)) {
        let mut pts = p.to_vertex_lists();
        pts.push(p.centroid());
        let q = Polytope::new(p.dim(), pts).unwrap();
        prop_assert!(p.subset(&q, EPS).unwrap() && q.subset(&p, EPS).unwrap());
        prop_assert_eq!(hull(&p), hull(&q));
    }

    #[test]
    fn slices_grow_with_eps(p in (2usize..=3).prop_flat_map(polytope), w in prop::collection::vec(-6.0f64..6.0, 2)) {
        let w = &w[..p.dim() - 1];
        let mut prev: Option<(f64, f64)> = None;
        for eps in [0.0, 1e-9, 1e-6, 1e-3, 0.1, 1.0] {
            let cur = p.slice_interval(w, eps).unwrap().map(|s| (s.lo, s.hi));
            if let Some((lo, hi)) = prev {
                let (clo, chi) = cur.expect("slice vanished when eps grew");
                prop_assert!(clo <= lo + 1e-12 && chi >= hi - 1e-12, "{:?} -> {:?}", prev, cur);
            }
            prev = cur.or(prev);
        }
    }

    #[test]
    fn planar_sum_vertex_bound((p, q) in (polytope(2), polytope(2))) {
        let s = p.minkowski_sum(&q).unwrap().reduce(EPS);
        prop_assert!(s.vertex_count() <= p.reduce(EPS).vertex_count() + q.reduce(EPS).vertex_count());
    }
}
