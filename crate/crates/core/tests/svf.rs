use affsel_core::instances::{random_convex_graph, random_interval_pl};
use affsel_core::io::{parse, read_instance, serialize, write_instance};
use affsel_core::lp::Sense;
use affsel_core::svf::{Fiber, SvFunction};
use proptest::prelude::*;

const EPS: f64 = 1e-9;

/// A point of the fiber: interval `lo + θ·width`, or an extreme point of a section in
/// direction `dir`.
fn pick(fiber: &Fiber<'_, f64>, theta: f64, dir: &[f64]) -> Vec<f64> {
    match fiber {
        Fiber::Interval(i) => vec![i.lo + theta * (i.hi - i.lo)],
        Fiber::Section(s) => s.extreme(&dir[..s.out_dim()], Sense::Maximize, EPS).expect("nonempty fiber"),
        Fiber::Polytope(p) => p.centroid(),
    }
}

fn graph() -> impl Strategy<Value = SvFunction<f64>> {
    (1usize..=3, 4usize..=12, any::<u64>())
        .prop_map(|(n, m, seed)| SvFunction::Graph(random_convex_graph(n, m, seed).unwrap()))
}

fn scalar() -> impl Strategy<Value = SvFunction<f64>> {
    (2usize..=12, any::<u64>()).prop_map(|(m, seed)| SvFunction::IntervalPl(random_interval_pl(m, seed).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn fibers_are_nonempty_and_bounded(f in prop_oneof![graph(), scalar()], k in 0usize..=16) {
        let d = f.domain();
        let x = d.lattice(16)[k];
        let fiber = f.evaluate(x, EPS).unwrap();
        match &fiber {
            Fiber::Interval(i) => prop_assert!(i.lo.is_finite() && i.hi.is_finite() && i.lo <= i.hi),
            Fiber::Section(s) => {
                for axis in 0..s.out_dim() {
                    let mut e = vec![0.0; s.out_dim()];
                    e[axis] = 1.0;
                    let hi = s.extreme(&e, Sense::Maximize, EPS);
                    prop_assert!(hi.is_some_and(|p| p.iter().all(|v| v.is_finite())));
                }
            }
            Fiber::Polytope(p) => prop_assert!(p.vertex_count() > 0),
        }
    }

    #[test]
    fn graph_is_convex(
        f in graph(),
        (k1, k2) in (0usize..=8, 0usize..=8),
        (th1, th2) in (0.0f64..=1.0, 0.0f64..=1.0),
        dirs in prop::collection::vec(-1.0f64..1.0, 6),
        tk in 0u32..=10,
    ) {
        let d = f.domain();
        let xs = d.lattice(8);
        let (x1, x2) = (xs[k1], xs[k2]);
        let y1 = pick(&f.evaluate(x1, EPS).unwrap(), th1, &dirs[..3]);
        let y2 = pick(&f.evaluate(x2, EPS).unwrap(), th2, &dirs[3..]);
        prop_assert!(f.contains_value(x1, &y1, 1e-7).unwrap());
        prop_assert!(f.contains_value(x2, &y2, 1e-7).unwrap());
        let t = f64::from(tk) / 10.0;
        let x = t * x1 + (1.0 - t) * x2;
        let y: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        prop_assert!(f.contains_value(x, &y, 1e-7).unwrap());
    }

    #[test]
    fn envelopes_reproduce_slices(f in prop_oneof![scalar(), (4usize..=12, any::<u64>())
        .prop_map(|(m, s)| SvFunction::Graph(random_convex_graph(1, m, s).unwrap()))])
    {
        let (lo, hi) = f.inf_sup(EPS).unwrap();
        for &x in &lo.xs {
            let Fiber::Interval(i) = f.evaluate(x, EPS).unwrap() else { unreachable!() };
            prop_assert!((lo.eval(x) - i.lo).abs() <= EPS && (hi.eval(x) - i.hi).abs() <= EPS);
        }
    }

    #[test]
    fn canonical_text_round_trips(f in prop_oneof![graph(), scalar()]) {
        let text = write_instance(&f);
        prop_assert_eq!(serialize(&parse(&text).unwrap()), text.clone());
        let back = read_instance::<f64>(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(write_instance(&back), text);
    }
}
