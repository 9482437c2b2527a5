use affsel_core::checkers::{
    check_concave, check_condition1, check_condition2, check_convex, condition1_margins, Triple, TripleGrid,
};
use affsel_core::geometry::Polytope;
use affsel_core::instances::{
    builtin, oracle_condition2_dense, oracle_sandwich, random_convex_graph, random_interval_pl, BUILTIN_NAMES,
};
use affsel_core::selectors::{
    affine_selection_convex, affine_selection_endpoint, fixed_point, sandwich_affine, transversal_solve, Objective,
    SelectError, SelectionStatus, N_VERIFY,
};
use affsel_core::svf::{DomainInterval, IntervalPl, SvFunction};
use affsel_core::Tolerances;
use proptest::prelude::*;

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn scalar() -> impl Strategy<Value = IntervalPl<f64>> {
    (2usize..=12, any::<u64>()).prop_map(|(m, seed)| random_interval_pl(m, seed).unwrap())
}

fn samples(f: &SvFunction<f64>) -> Vec<f64> {
    let d = f.domain();
    DomainInterval { a: d.a, b: d.b }.lattice(N_VERIFY - 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn sandwich_matches_envelope_condition_and_oracle(p in scalar()) {
        let tol = tol();
        let (f, g) = (p.lower_pl(), p.upper_pl());
        let sel = sandwich_affine(&f, &g, Objective::Chebyshev, &tol).unwrap();
        let c1 = check_condition1(&f, &g, &TripleGrid::combos(p.breakpoints.clone()), tol.eps).unwrap();
        let oracle = oracle_sandwich(&f, &g).unwrap();
        let infeasible = sel.status == SelectionStatus::Infeasible;
        prop_assert_eq!(infeasible, !c1.passed());
        prop_assert_eq!(infeasible, !oracle.feasible);
        if let Some(w) = &c1.witness {
            let (m1, m2) = condition1_margins(&f, &g, &Triple { x: w.x, y: w.y, t: w.t, z: w.t * w.x + (1.0 - w.t) * w.y });
            prop_assert!(m1.max(m2) > tol.eps);
        }
        if let Some(u) = &sel.uniqueness {
            if u.unique {
                let h = sel.map.as_ref().unwrap();
                prop_assert_eq!(oracle.vertices.len(), 1);
                let (a, b) = oracle.vertices[0];
                prop_assert!((a - h.d[0]).abs() <= 1e-9 && (b - h.c[0]).abs() <= 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn selection_implies_intersection_condition(p in scalar(), res in 1usize..=6) {
        let tol = tol();
        let sel = sandwich_affine(&p.lower_pl(), &p.upper_pl(), Objective::Lexmin, &tol).unwrap();
        prop_assume!(sel.status != SelectionStatus::Infeasible);
        let f = SvFunction::IntervalPl(p.clone());
        let d = f.domain();
        for grid in [TripleGrid::combos(p.breakpoints.clone()), TripleGrid::dense(d.a, d.b, res)] {
            prop_assert!(check_condition2(&f, &grid, tol.eps).unwrap().passed(), "{}", grid);
        }
        let h = sel.map.unwrap();
        for x in samples(&f) {
            prop_assert!(f.contains_value(x, &h.eval(x), tol.eps_slice).unwrap());
        }
    }

    #[test]
    fn convex_graphs_select_and_satisfy_condition2(n in 1usize..=3, m in 4usize..=12, seed in any::<u64>()) {
        let tol = tol();
        let g = random_convex_graph(n, m, seed).unwrap();
        let f = SvFunction::Graph(g.clone());
        let d = f.domain();
        let grid = TripleGrid::dense(d.a, d.b, 3);
        let convex = check_convex(&f, &grid, tol.eps).unwrap();
        prop_assert!(convex.passed());
        prop_assert!(check_condition2(&f, &grid, tol.eps).unwrap().passed());
        for sel in [affine_selection_convex(&g, &tol).unwrap(), affine_selection_endpoint(&g, &tol).unwrap()] {
            prop_assert_eq!(sel.status, SelectionStatus::Found);
            let h = sel.map.unwrap();
            for x in samples(&f) {
                prop_assert!(f.contains_value(x, &h.eval(x), tol.eps_slice).unwrap(), "x = {}", x);
            }
        }
    }

    #[test]
    fn fixed_points_are_sound(
        xs in prop::collection::btree_set(0i32..=8, 2..=6),
        vals in prop::collection::vec((0i32..=8, 0i32..=8), 6),
    ) {
        let tol = tol();
        let bp: Vec<f64> = xs.iter().map(|&v| f64::from(v)).collect();
        let (lo, hi): (Vec<f64>, Vec<f64>) = vals[..bp.len()]
            .iter()
            .map(|&(a, b)| (f64::from(a.min(b)), f64::from(a.max(b))))
            .unzip();
        let (a, b) = (bp[0], bp[bp.len() - 1]);
        let clamp = |v: f64| v.clamp(a, b);
        let lo: Vec<f64> = lo.into_iter().map(clamp).collect();
        let hi: Vec<f64> = hi.into_iter().map(clamp).collect();
        let f = SvFunction::IntervalPl(IntervalPl::new(bp, lo, hi).unwrap());
        match fixed_point(&f, Objective::Chebyshev, &tol) {
            Ok(fp) => {
                prop_assert!(fp.x_star >= a - tol.eps && fp.x_star <= b + tol.eps);
                prop_assert!(f.contains_value(fp.x_star, &[fp.x_star], tol.eps_slice).unwrap());
                if (fp.map.d[0] - 1.0).abs() > tol.eps {
                    prop_assert!((fp.map.eval(fp.x_star)[0] - fp.x_star).abs() <= tol.eps);
                }
            }
            Err(SelectError::NoSelection { .. } | SelectError::Condition2 { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn transversals_meet_every_fiber(
        fibers in prop::collection::vec(
            prop::collection::vec(prop::collection::vec(-4i32..=4, 2), 1..=4), 2..=5),
    ) {
        let tol = tol();
        let fibers: Vec<(f64, Polytope<f64>)> = fibers
            .into_iter()
            .enumerate()
            .map(|(i, pts)| {
                let v = pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
                (i as f64, Polytope::new(2, v).unwrap())
            })
            .collect();
        let out = transversal_solve(&fibers, &tol).unwrap();
        match out.map {
            Some(h) => {
                for (x, p) in &fibers {
                    prop_assert!(p.contains_point(&h.eval(*x), tol.eps), "x = {}", x);
                }
            }
            None => {
                prop_assert_eq!(out.status, SelectionStatus::Infeasible);
                let lp = affsel_core::selectors::transversal_program(&fibers);
                prop_assert!(out.certificate.unwrap().verify(&lp.extended_constraints(), tol.eps));
            }
        }
    }
}

#[test]
fn dense_oracle_agrees_with_checker_on_builtins() {
    let tol = tol();
    for name in BUILTIN_NAMES {
        let Some(f) = builtin::<f64>(name).unwrap().instance else { continue };
        if matches!(&f, SvFunction::Graph(g) if g.n >= 2) {
            continue;
        }
        let d = f.domain();
        for res in [2, 4, 8] {
            let oracle = oracle_condition2_dense(&f, res).unwrap();
            match check_condition2(&f, &TripleGrid::dense(d.a, d.b, res), tol.eps) {
                Ok(checked) => assert_eq!(oracle.passed(), checked.passed(), "{name} at resolution {res}"),
                // Off-list points of a family without a default fiber: the oracle skips them.
                Err(_) => assert!(matches!(&f, SvFunction::Fibers(fam) if fam.default.is_none()), "{name}"),
            }
        }
    }
    let singletons = builtin::<f64>("singleton_violation").unwrap().instance.unwrap();
    assert!(!oracle_condition2_dense(&singletons, 2).unwrap().passed());
}

#[test]
fn concavity_of_interval_functions_with_affine_envelopes() {
    let tol = tol();
    // Affine envelopes: the function is both convex and concave.
    let f = SvFunction::IntervalPl(IntervalPl::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0], vec![1.0, 3.0, 5.0]).unwrap());
    let grid = TripleGrid::dense(0.0, 2.0, 4);
    assert!(check_convex(&f, &grid, tol.eps).unwrap().passed());
    assert!(check_concave(&f, &grid, tol.eps).unwrap().passed());
}
