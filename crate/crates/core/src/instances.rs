//! Named instances, seeded random generators and brute-force oracles.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::checkers::{
    check_condition1, condition1_margins, CheckOutcome, CheckStatus, Cond1Failure, Triple, TripleGrid,
    Witness,
};
use crate::geometry::Polytope;
use crate::io::{self, DomainSpec, FiberBounds, InstanceDoc, Kind};
use crate::scalar::{Scalar, Tolerances};
use crate::selectors::{
    affine_selection_convex, affine_selection_endpoint, sandwich_affine, Objective, SelectError,
    SelectionResult, SelectionStatus,
};
use crate::svf::{
    DomainInterval, FiberFamily, GraphPolytope, IntervalPl, PiecewiseLinear, SvFunction,
};

/// Coordinates drawn by the generators lie in `[-RANGE, RANGE]`.
pub const RANGE: i32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("parameter out of range: {0}")]
    Parameters(String),
    #[error("unsupported instance: {0}")]
    Unsupported(String),
}

/// What the artifact's own operations should find on an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Expected {
    pub valid: bool,
    /// An affine selection of the whole function exists.
    pub selection: Option<bool>,
    /// The selection (or the transversal of the first listed fibers) is unique.
    pub unique: Option<bool>,
    /// The intersection condition holds on the default grid.
    pub condition2: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct NamedInstance<T: Scalar> {
    pub name: &'static str,
    /// Canonical instance text, as shipped in the fixtures directory.
    pub text: String,
    /// `None` for instances that fail validation.
    pub instance: Option<SvFunction<T>>,
    pub expected: Expected,
}

pub const BUILTIN_NAMES: &[&str] = &[
    "sadowska",
    "triangle_sandwich",
    "halfstrip_fixed",
    "tetra_convex",
    "reject_unbounded",
    "reject_open",
    "singleton_violation",
    "identity_fixed",
    "infeasible_sandwich",
    "square_prism",
];

fn seg(a: [f64; 2], b: [f64; 2]) -> Vec<Vec<f64>> {
    vec![a.to_vec(), b.to_vec()]
}

fn interval_doc(bp: &[f64], lo: &[f64], hi: &[f64]) -> InstanceDoc {
    let mut doc = InstanceDoc::new(Kind::IntervalPl);
    doc.breakpoints = Some(bp.to_vec());
    doc.lower = Some(lo.to_vec());
    doc.upper = Some(hi.to_vec());
    doc
}

fn builtin_doc(name: &str) -> Option<(InstanceDoc, Expected)> {
    let ok = |selection, unique, condition2| Expected {
        valid: true,
        selection: Some(selection),
        unique,
        condition2: Some(condition2),
    };
    let rejected = Expected::default();
    Some(match name {
        "sadowska" => {
            let fibers = vec![
                (0.0, seg([-4.0, 1.0], [4.0, 1.0])),
                (1.0, seg([-1.0, -4.0], [-1.0, 4.0])),
                (2.0, seg([-4.0, -1.0], [4.0, -1.0])),
                (3.0, seg([1.0, -4.0], [1.0, 4.0])),
                (4.0, seg([-4.0, -4.0], [4.0, 4.0])),
            ];
            let default = vec![
                vec![-4.0, -4.0],
                vec![-4.0, 4.0],
                vec![4.0, -4.0],
                vec![4.0, 4.0],
            ];
            let doc = InstanceDoc {
                dim: Some(2),
                domain: Some(closed(0.0, 4.0)),
                fibers: Some(fibers),
                default: Some(default),
                ..InstanceDoc::new(Kind::Fibers)
            };
            (doc, ok(false, Some(true), true))
        }
        "triangle_sandwich" => (
            interval_doc(&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 1.0]),
            ok(true, Some(true), true),
        ),
        "halfstrip_fixed" => (
            interval_doc(&[0.0, 1.0], &[0.0, 0.5], &[0.5, 1.0]),
            ok(true, Some(false), true),
        ),
        "identity_fixed" => (
            interval_doc(&[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0]),
            ok(true, Some(true), true),
        ),
        "infeasible_sandwich" => (
            interval_doc(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0], &[0.5, 1.0, 0.5]),
            ok(false, None, false),
        ),
        "tetra_convex" => (
            InstanceDoc {
                dim: Some(2),
                vertices: Some(vec![
                    vec![0.0, -1.0, 0.0],
                    vec![0.0, 1.0, 0.0],
                    vec![1.0, 0.0, -1.0],
                    vec![1.0, 0.0, 1.0],
                ]),
                ..InstanceDoc::new(Kind::GraphPolytope)
            },
            ok(true, None, true),
        ),
        "square_prism" => {
            let mut verts = Vec::new();
            for x in [0.0, 1.0] {
                for y in [-1.0, 1.0] {
                    for z in [-1.0, 1.0] {
                        verts.push(vec![x, y, z]);
                    }
                }
            }
            (
                InstanceDoc {
                    dim: Some(2),
                    vertices: Some(verts),
                    ..InstanceDoc::new(Kind::GraphPolytope)
                },
                ok(true, Some(false), true),
            )
        }
        "singleton_violation" => (
            InstanceDoc {
                dim: Some(1),
                domain: Some(closed(0.0, 2.0)),
                fibers: Some(vec![
                    (0.0, vec![vec![0.0]]),
                    (1.0, vec![vec![1.0]]),
                    (2.0, vec![vec![0.0]]),
                ]),
                ..InstanceDoc::new(Kind::Fibers)
            },
            ok(false, None, false),
        ),
        // F(x) = [x², +∞) sampled at three breakpoints.
        "reject_unbounded" => (
            interval_doc(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0], &[f64::INFINITY; 3]),
            rejected,
        ),
        // G(x) = (x², 1) on the open interval (-1, 1).
        "reject_open" => (
            InstanceDoc {
                domain: Some(DomainSpec {
                    lo: -1.0,
                    hi: 1.0,
                    lo_closed: false,
                    hi_closed: false,
                }),
                fiber_bounds: Some(FiberBounds::Open),
                ..interval_doc(&[-1.0, -0.5, 0.0, 0.5, 1.0], &[1.0, 0.25, 0.0, 0.25, 1.0], &[1.0; 5])
            },
            rejected,
        ),
        _ => return None,
    })
}

fn closed(lo: f64, hi: f64) -> DomainSpec {
    DomainSpec {
        lo,
        hi,
        lo_closed: true,
        hi_closed: true,
    }
}

/// A builtin instance by name; see [`BUILTIN_NAMES`].
pub fn builtin<T: Scalar>(name: &str) -> Result<NamedInstance<T>, InstanceError> {
    let (doc, expected) =
        builtin_doc(name).ok_or_else(|| InstanceError::UnknownBuiltin(name.to_string()))?;
    let name = BUILTIN_NAMES
        .iter()
        .copied()
        .find(|n| *n == name)
        .expect("documented builtin");
    let instance = doc.validate::<T>().ok();
    // Valid instances are written in stored (sorted) order so the text is canonical.
    let text = match &instance {
        Some(f) => io::write_instance(f),
        None => io::serialize(&doc),
    };
    Ok(NamedInstance {
        name,
        text,
        instance,
        expected,
    })
}

/// Random graph polytope with integer vertices in `[-8, 8]^{1+n}` and at least two
/// distinct abscissae.
pub fn random_convex_graph<T: Scalar>(
    n: usize,
    num_points: usize,
    seed: u64,
) -> Result<GraphPolytope<T>, InstanceError> {
    if !(1..=4).contains(&n) {
        return Err(InstanceError::Parameters(format!("n = {n} not in 1..=4")));
    }
    if !(4..=64).contains(&num_points) {
        return Err(InstanceError::Parameters(format!(
            "num_points = {num_points} not in 4..=64"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Vec<i32>> = (0..num_points)
        .map(|_| (0..=n).map(|_| rng.gen_range(-RANGE..=RANGE)).collect())
        .collect();
    if pts.iter().all(|p| p[0] == pts[0][0]) {
        let x0 = pts[0][0];
        pts[num_points - 1][0] = if x0 < RANGE { x0 + 1 } else { x0 - 1 };
    }
    let verts = pts
        .into_iter()
        .map(|p| p.into_iter().map(|c| T::lit(f64::from(c))).collect())
        .collect();
    let graph = Polytope::new(n + 1, verts).expect("finite integer vertices");
    Ok(GraphPolytope::new(graph).expect("dimension at least two"))
}

/// Random scalar envelope pair on `m` distinct integer breakpoints. About half of the
/// instances are built around a line with integer slope so that selections exist often.
pub fn random_interval_pl<T: Scalar>(m: usize, seed: u64) -> Result<IntervalPl<T>, InstanceError> {
    if !(2..=12).contains(&m) {
        return Err(InstanceError::Parameters(format!("m = {m} not in 2..=12")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<i32> = sample(&mut rng, (2 * RANGE + 1) as usize, m)
        .into_iter()
        .map(|i| i as i32 - RANGE)
        .collect();
    xs.sort_unstable();
    let mut lower = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    if rng.gen_bool(0.5) {
        let alpha: i32 = rng.gen_range(-1..=1);
        let beta: i32 = rng.gen_range(-2..=2);
        let kink = rng.gen_bool(0.3);
        for &x in &xs {
            let h = alpha * x / if kink && x > 0 { 2 } else { 1 } + beta;
            let lo = (h - rng.gen_range(0..=2)).clamp(-RANGE, RANGE);
            let hi = (h + rng.gen_range(0..=2)).clamp(lo, RANGE);
            lower.push(lo);
            upper.push(hi);
        }
    } else {
        for _ in &xs {
            let lo: i32 = rng.gen_range(-RANGE..=RANGE);
            let hi: i32 = rng.gen_range(lo..=(lo + 4).min(RANGE));
            lower.push(lo);
            upper.push(hi);
        }
    }
    let conv = |v: Vec<i32>| v.into_iter().map(|c| T::lit(f64::from(c))).collect();
    Ok(IntervalPl::new(conv(xs), conv(lower), conv(upper)).expect("generator respects invariants"))
}

/// Result of the brute-force sandwich search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSandwich<T> {
    pub feasible: bool,
    /// Feasible `(α, β)` among all candidate lines, sorted and deduplicated.
    pub vertices: Vec<(T, T)>,
}

/// Enumerates every line through two envelope points with distinct abscissae (and the
/// horizontal lines when there is a single breakpoint) and keeps the feasible ones.
pub fn oracle_sandwich<T: Scalar>(
    f: &PiecewiseLinear<T>,
    g: &PiecewiseLinear<T>,
) -> Result<OracleSandwich<T>, InstanceError> {
    let m = f.xs.len();
    if m > 16 {
        return Err(InstanceError::Parameters(format!("{m} breakpoints, at most 16")));
    }
    if g.xs != f.xs {
        return Err(InstanceError::Parameters("breakpoints differ".into()));
    }
    let tol = T::lit(1e-9);
    let mut points = Vec::with_capacity(2 * m);
    for i in 0..m {
        points.push((f.xs[i], f.ys[i]));
        points.push((f.xs[i], g.ys[i]));
    }
    let mut candidates = Vec::new();
    for (i, &(x1, y1)) in points.iter().enumerate() {
        for &(x2, y2) in &points[i + 1..] {
            if x1 != x2 {
                let alpha = (y2 - y1) / (x2 - x1);
                candidates.push((alpha, y1 - alpha * x1));
            }
        }
    }
    if m == 1 {
        candidates.push((T::zero(), f.ys[0]));
        candidates.push((T::zero(), g.ys[0]));
    }
    let fits = |&(a, b): &(T, T)| {
        (0..m).all(|i| {
            let h = a * f.xs[i] + b;
            h >= f.ys[i] - tol && h <= g.ys[i] + tol
        })
    };
    let mut vertices: Vec<(T, T)> = candidates.into_iter().filter(fits).collect();
    vertices.sort_by(|p, q| {
        p.0.as_f64()
            .total_cmp(&q.0.as_f64())
            .then(p.1.as_f64().total_cmp(&q.1.as_f64()))
    });
    vertices.dedup_by(|p, q| (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol);
    Ok(OracleSandwich {
        feasible: !vertices.is_empty(),
        vertices,
    })
}

/// The intersection condition on the full lattice `xs = a + k(b−a)/res`, `ts = j/res`,
/// with naive set arithmetic: interval endpoints in one dimension, unreduced vertex
/// clouds otherwise. Triples whose combined point has no fiber are skipped.
pub fn oracle_condition2_dense<T: Scalar>(
    f: &SvFunction<T>,
    resolution: usize,
) -> Result<CheckOutcome<T>, InstanceError> {
    if resolution == 0 || resolution > 64 {
        return Err(InstanceError::Parameters(format!(
            "resolution {resolution} not in 1..=64"
        )));
    }
    if matches!(f, SvFunction::Graph(g) if g.n > 1) {
        return Err(InstanceError::Unsupported(
            "graph fibers in two or more dimensions".into(),
        ));
    }
    let eps = T::default_eps();
    let dom = f.domain();
    let res = T::from_usize(resolution).expect("resolution fits scalar");
    let step = |k: usize| T::from_usize(k).expect("index fits scalar") / res;
    let xs: Vec<T> = (0..=resolution)
        .map(|k| dom.a + (dom.b - dom.a) * step(k))
        .collect();
    let mut checked = 0;
    for &x in &xs {
        for &y in &xs {
            for j in 0..=resolution {
                let t = step(j);
                let z = t * x + (T::one() - t) * y;
                let (Some(fx), Some(fy), Some(fz)) = (cloud(f, x, eps), cloud(f, y, eps), cloud(f, z, eps))
                else {
                    continue;
                };
                checked += 1;
                if let Some(margin) = miss(&fx, &fy, &fz, t, eps) {
                    return Ok(CheckOutcome {
                        status: CheckStatus::Violation,
                        witness: Some(Witness { x, y, t, margin }),
                        checked,
                    });
                }
            }
        }
    }
    Ok(CheckOutcome {
        status: CheckStatus::Pass,
        witness: None,
        checked,
    })
}

/// Fiber as a vertex cloud; scalar fibers as their two endpoints.
fn cloud<T: Scalar>(f: &SvFunction<T>, x: T, eps: T) -> Option<Vec<Vec<T>>> {
    let dom: DomainInterval<T> = f.domain();
    if x < dom.a - eps || x > dom.b + eps {
        return None;
    }
    match f {
        SvFunction::IntervalPl(p) => {
            let lo = p.lower_pl().eval(x);
            let hi = p.upper_pl().eval(x);
            Some(vec![vec![lo], vec![hi]])
        }
        SvFunction::Graph(g) => {
            // Scalar graph: the fiber's endpoints are where segments between vertices
            // cross the vertical line at x.
            let verts: Vec<&[T]> = g.graph.vertices().collect();
            let mut ys = Vec::new();
            for (i, p) in verts.iter().enumerate() {
                if (p[0] - x).abs() <= eps {
                    ys.push(p[1]);
                }
                for q in &verts[i + 1..] {
                    if (p[0] - x) * (q[0] - x) < T::zero() {
                        let s = (x - p[0]) / (q[0] - p[0]);
                        ys.push(p[1] + s * (q[1] - p[1]));
                    }
                }
            }
            let lo = ys.iter().copied().fold(T::infinity(), T::min);
            let hi = ys.iter().copied().fold(T::neg_infinity(), T::max);
            (lo <= hi).then(|| vec![vec![lo], vec![hi]])
        }
        SvFunction::Fibers(fam) => fam.lookup(x, eps).map(Polytope::to_vertex_lists),
    }
}

fn miss<T: Scalar>(fx: &[Vec<T>], fy: &[Vec<T>], fz: &[Vec<T>], t: T, eps: T) -> Option<T> {
    let s = T::one() - t;
    let n = fz[0].len();
    if n == 1 {
        let bounds = |c: &[Vec<T>]| {
            c.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
                (lo.min(v[0]), hi.max(v[0]))
            })
        };
        let (xl, xh) = bounds(fx);
        let (yl, yh) = bounds(fy);
        let (zl, zh) = bounds(fz);
        let gap = (zl.max(t * xl + s * yl)) - (zh.min(t * xh + s * yh));
        return (gap > eps).then_some(gap);
    }
    let mut sum = Vec::with_capacity(fx.len() * fy.len());
    for p in fx {
        for q in fy {
            sum.push(p.iter().zip(q).map(|(&a, &b)| t * a + s * b).collect());
        }
    }
    let sum = Polytope::new(n, sum).ok()?;
    let target = Polytope::new(n, fz.to_vec()).ok()?;
    if target.intersects(&sum, eps).ok()? {
        None
    } else {
        target.separation(&sum).ok()
    }
}

/// Family of `(x, fiber)` pairs of a fiber-family instance whose abscissa is in `xs`.
pub fn listed_fibers<T: Scalar>(fam: &FiberFamily<T>, xs: &[T]) -> Vec<(T, Polytope<T>)> {
    fam.fibers
        .iter()
        .filter(|(x, _)| xs.contains(x))
        .cloned()
        .collect()
}

/// Seed of the `i`-th corpus instance.
pub fn corpus_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

/// Tallies of the scalar corpus: sandwich solver against the breakpoint-combos check
/// of the envelope condition and against the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SandwichCorpus {
    pub instances: usize,
    pub feasible: usize,
    pub infeasible: usize,
    /// Sandwich infeasible but no grid violation, or the reverse.
    pub disagreements: usize,
    /// Sandwich and oracle statuses differ.
    pub oracle_disagreements: usize,
    /// Infeasible instances whose witness does not re-fail by more than `eps`.
    pub bad_witnesses: usize,
    pub errors: usize,
}

impl SandwichCorpus {
    pub fn clean(&self) -> bool {
        self.disagreements == 0 && self.oracle_disagreements == 0 && self.bad_witnesses == 0 && self.errors == 0
    }
}

/// `count` random envelope pairs with 2..=12 breakpoints.
pub fn sandwich_corpus(seed: u64, count: usize, tol: &Tolerances<f64>) -> SandwichCorpus {
    let mut s = SandwichCorpus {
        instances: count,
        ..Default::default()
    };
    for i in 0..count {
        let p = random_interval_pl::<f64>(2 + i % 11, corpus_seed(seed, i)).expect("parameters in range");
        let (f, g) = (p.lower_pl(), p.upper_pl());
        let (Ok(sel), Ok(c1), Ok(oracle)) = (
            sandwich_affine(&f, &g, Objective::Chebyshev, tol),
            check_condition1(&f, &g, &TripleGrid::combos(p.breakpoints.clone()), tol.eps),
            oracle_sandwich(&f, &g),
        ) else {
            s.errors += 1;
            continue;
        };
        let infeasible = sel.status == SelectionStatus::Infeasible;
        if infeasible {
            s.infeasible += 1;
        } else {
            s.feasible += 1;
        }
        if infeasible == c1.passed() {
            s.disagreements += 1;
        }
        if infeasible == oracle.feasible {
            s.oracle_disagreements += 1;
        }
        if infeasible {
            let ok = match (sel.witness, sel.failure) {
                (Some(w), Some(Cond1Failure::EmptyFiber)) => f.eval(w.x) - g.eval(w.x) > tol.eps,
                (Some(w), Some(_)) => {
                    let tr = Triple {
                        x: w.x,
                        y: w.y,
                        t: w.t,
                        z: w.t * w.x + (1.0 - w.t) * w.y,
                    };
                    let (m1, m2) = condition1_margins(&f, &g, &tr);
                    m1.max(m2) > tol.eps
                }
                _ => false,
            };
            if !ok {
                s.bad_witnesses += 1;
            }
        }
    }
    s
}

/// Tallies of the convex-graph corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConvexCorpus {
    pub instances: usize,
    pub found_induction: usize,
    pub found_endpoint: usize,
}

impl ConvexCorpus {
    pub fn clean(&self) -> bool {
        self.found_induction == self.instances && self.found_endpoint == self.instances
    }
}

/// `count` random convex graphs with `n` cycling through 1, 2, 3.
pub fn convex_corpus(seed: u64, count: usize, tol: &Tolerances<f64>) -> ConvexCorpus {
    let mut s = ConvexCorpus {
        instances: count,
        ..Default::default()
    };
    for i in 0..count {
        let g = random_convex_graph::<f64>(1 + i % 3, 4 + (i * 7) % 9, corpus_seed(seed, i))
            .expect("parameters in range");
        let found = |r: Result<SelectionResult<f64>, SelectError>| {
            r.is_ok_and(|r| r.status == SelectionStatus::Found)
        };
        s.found_induction += usize::from(found(affine_selection_convex(&g, tol)));
        s.found_endpoint += usize::from(found(affine_selection_endpoint(&g, tol)));
    }
    s
}
