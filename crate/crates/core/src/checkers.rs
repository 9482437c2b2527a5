//! Grid checks of convexity, concavity, the scalar envelope condition and the
//! intersection condition.
//!
//! Every check is a verdict about the sampled triples `(x, y, t)` only. Triples are
//! visited in lexicographic order and the first failure is reported.

use std::fmt;

use thiserror::Error;

use crate::geometry::{sum_contains, sum_gap, GeometryError, Polytope, Section};
use crate::lp::{Certificate, Sense};
use crate::scalar::Scalar;
use crate::svf::{Fiber, PiecewiseLinear, SvFunction, SvfError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPolicy {
    /// Every `(x, y, t)` with `x, y ∈ xs`, `t ∈ ts`.
    AllPairs,
    /// `(x_i, x_k, t)` landing exactly on each intermediate `x_j`.
    BreakpointCombos,
}

/// A sampled triple; `z = t·x + (1 − t)·y` is carried exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple<T> {
    pub x: T,
    pub y: T,
    pub t: T,
    pub z: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleGrid<T> {
    pub xs: Vec<T>,
    pub ts: Vec<T>,
    pub policy: GridPolicy,
}

impl<T: Scalar> TripleGrid<T> {
    pub fn all_pairs(xs: Vec<T>, ts: Vec<T>) -> Self {
        Self {
            xs,
            ts,
            policy: GridPolicy::AllPairs,
        }
    }

    /// `xs = a + k(b − a)/res`, `ts = j/res`.
    pub fn dense(a: T, b: T, resolution: usize) -> Self {
        let dom = crate::svf::DomainInterval { a, b };
        let unit = crate::svf::DomainInterval {
            a: T::zero(),
            b: T::one(),
        };
        Self::all_pairs(dom.lattice(resolution), unit.lattice(resolution))
    }

    pub fn combos(xs: Vec<T>) -> Self {
        Self {
            xs,
            ts: Vec::new(),
            policy: GridPolicy::BreakpointCombos,
        }
    }

    /// Breakpoint combos for functions only defined at listed points, otherwise the
    /// dense lattice with resolution 4.
    pub fn default_for(f: &SvFunction<T>) -> Self {
        match f {
            SvFunction::Fibers(fam) if fam.default.is_none() => Self::combos(fam.abscissae()),
            _ => {
                let d = f.domain();
                Self::dense(d.a, d.b, 4)
            }
        }
    }

    /// All triples in lexicographic `(x, y, t)` order, without repeats.
    pub fn triples(&self) -> Vec<Triple<T>> {
        let mut xs = self.xs.clone();
        xs.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
        xs.dedup();
        let mut out = Vec::new();
        match self.policy {
            GridPolicy::AllPairs => {
                let mut ts = self.ts.clone();
                ts.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
                ts.dedup();
                for &x in &xs {
                    for &y in &xs {
                        for &t in &ts {
                            let z = if t == T::one() {
                                x
                            } else if t == T::zero() || x == y {
                                y
                            } else {
                                (t * x + (T::one() - t) * y).max(x.min(y)).min(x.max(y))
                            };
                            out.push(Triple { x, y, t, z });
                        }
                    }
                }
            }
            GridPolicy::BreakpointCombos => {
                for &x in &xs {
                    out.push(Triple {
                        x,
                        y: x,
                        t: T::one(),
                        z: x,
                    });
                }
                for i in 0..xs.len() {
                    for k in i + 2..xs.len() {
                        for &m in &xs[i + 1..k] {
                            let t = (xs[k] - m) / (xs[k] - xs[i]);
                            out.push(Triple {
                                x: xs[i],
                                y: xs[k],
                                t,
                                z: m,
                            });
                        }
                    }
                }
                out.sort_by(|a, b| {
                    [a.x, a.y, a.t]
                        .iter()
                        .zip([b.x, b.y, b.t].iter())
                        .map(|(p, q)| p.as_f64().total_cmp(&q.as_f64()))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            }
        }
        out
    }
}

impl<T: Scalar> fmt::Display for TripleGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[T]| {
            v.iter()
                .map(|x| crate::io::fmt_bare(x.as_f64()))
                .collect::<Vec<_>>()
                .join(",")
        };
        match self.policy {
            GridPolicy::AllPairs => write!(f, "all-pairs xs={{{}}} ts={{{}}}", list(&self.xs), list(&self.ts)),
            GridPolicy::BreakpointCombos => write!(f, "breakpoint-combos xs={{{}}}", list(&self.xs)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Violation,
}

/// Failing triple and the amount by which the defining relation fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness<T> {
    pub x: T,
    pub y: T,
    pub t: T,
    pub margin: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome<T> {
    pub status: CheckStatus,
    pub witness: Option<Witness<T>>,
    /// Number of triples examined.
    pub checked: usize,
}

impl<T> CheckOutcome<T> {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("cannot evaluate at x = {x}: {source}")]
    Evaluate { x: f64, source: SvfError },
    #[error("lower and upper envelopes use different breakpoints")]
    MismatchedBreakpoints,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    Convex,
    Concave,
    Intersect,
}

/// Convexity: `tF(x) + (1−t)F(y) ⊂ F(tx + (1−t)y)` on every grid triple.
pub fn check_convex<T: Scalar>(
    f: &SvFunction<T>,
    grid: &TripleGrid<T>,
    eps: T,
) -> Result<CheckOutcome<T>, CheckError> {
    run(f, grid, eps, Relation::Convex)
}

/// Concavity: `F(tx + (1−t)y) ⊂ tF(x) + (1−t)F(y)` on every grid triple.
pub fn check_concave<T: Scalar>(
    f: &SvFunction<T>,
    grid: &TripleGrid<T>,
    eps: T,
) -> Result<CheckOutcome<T>, CheckError> {
    run(f, grid, eps, Relation::Concave)
}

/// `F(tx + (1−t)y) ∩ [tF(x) + (1−t)F(y)] ≠ ∅` on every grid triple.
pub fn check_condition2<T: Scalar>(
    f: &SvFunction<T>,
    grid: &TripleGrid<T>,
    eps: T,
) -> Result<CheckOutcome<T>, CheckError> {
    run(f, grid, eps, Relation::Intersect)
}

fn run<T: Scalar>(
    f: &SvFunction<T>,
    grid: &TripleGrid<T>,
    eps: T,
    rel: Relation,
) -> Result<CheckOutcome<T>, CheckError> {
    let triples = grid.triples();
    for (i, tr) in triples.iter().enumerate() {
        if let Some(margin) = triple_margin(f, tr, eps, rel)? {
            return Ok(CheckOutcome {
                status: CheckStatus::Violation,
                witness: Some(Witness {
                    x: tr.x,
                    y: tr.y,
                    t: tr.t,
                    margin,
                }),
                checked: i + 1,
            });
        }
    }
    Ok(CheckOutcome {
        status: CheckStatus::Pass,
        witness: None,
        checked: triples.len(),
    })
}

fn eval<T: Scalar>(f: &SvFunction<T>, x: T, eps: T) -> Result<Fiber<'_, T>, CheckError> {
    f.evaluate(x, eps).map_err(|source| CheckError::Evaluate {
        x: x.as_f64(),
        source,
    })
}

/// `Some(margin)` when the relation fails at the triple.
fn triple_margin<T: Scalar>(
    f: &SvFunction<T>,
    tr: &Triple<T>,
    eps: T,
    rel: Relation,
) -> Result<Option<T>, CheckError> {
    let fx = eval(f, tr.x, eps)?;
    let fy = eval(f, tr.y, eps)?;
    let fz = eval(f, tr.z, eps)?;
    match (fx.materialize(), fy.materialize(), fz.materialize()) {
        (Some(a), Some(b), Some(c)) => polytope_margin(&a, &b, &c, tr.t, eps, rel),
        _ => match (fx, fy, fz) {
            (Fiber::Section(a), Fiber::Section(b), Fiber::Section(c)) => {
                Ok(section_margin(&a, &b, &c, tr, eps, rel))
            }
            _ => unreachable!("graph fibers are either all materialized or all sections"),
        },
    }
}

fn polytope_margin<T: Scalar>(
    a: &Polytope<T>,
    b: &Polytope<T>,
    c: &Polytope<T>,
    t: T,
    eps: T,
    rel: Relation,
) -> Result<Option<T>, CheckError> {
    let sum = a.scale(t).minkowski_sum(&b.scale(T::one() - t))?;
    let outside = |inner: &Polytope<T>, outer: &Polytope<T>| {
        let mut worst: Option<T> = None;
        for v in inner.vertices() {
            if !outer.contains_point(v, eps) {
                let s = outer.membership_slack(v);
                worst = Some(worst.map_or(s, |w: T| w.max(s)));
            }
        }
        worst
    };
    Ok(match rel {
        Relation::Convex => outside(&sum, c),
        Relation::Concave => outside(c, &sum),
        Relation::Intersect => {
            if c.intersects(&sum, eps)? {
                None
            } else {
                Some(c.separation(&sum)?)
            }
        }
    })
}

/// Graph fibers in `n ≥ 2`. The intersection condition is one LP over all three
/// fibers; the inclusions are probed at axis-extreme points.
fn section_margin<T: Scalar>(
    a: &Section<'_, T>,
    b: &Section<'_, T>,
    c: &Section<'_, T>,
    tr: &Triple<T>,
    eps: T,
    rel: Relation,
) -> Option<T> {
    let n = c.out_dim();
    let t = tr.t;
    let s = T::one() - t;
    match rel {
        Relation::Intersect => {
            let terms = [(t, a.clone()), (s, b.clone()), (-T::one(), c.clone())];
            let zero = vec![T::zero(); n];
            if sum_contains(&terms, &zero, eps) {
                None
            } else {
                sum_gap(&terms, &zero, eps)
            }
        }
        Relation::Convex => {
            let mut worst: Option<T> = None;
            for dir in axis_directions::<T>(n) {
                let (Some(p), Some(q)) = (
                    a.extreme(&dir, Sense::Maximize, eps),
                    b.extreme(&dir, Sense::Maximize, eps),
                ) else {
                    continue;
                };
                let v: Vec<T> = p.iter().zip(&q).map(|(&p, &q)| t * p + s * q).collect();
                if !c.contains(&v, eps) {
                    let gap = sum_gap(&[(T::one(), c.clone())], &v, eps).unwrap_or(T::infinity());
                    worst = Some(worst.map_or(gap, |w: T| w.max(gap)));
                }
            }
            worst
        }
        Relation::Concave => {
            let terms = [(t, a.clone()), (s, b.clone())];
            let mut worst: Option<T> = None;
            for dir in axis_directions::<T>(n) {
                let Some(v) = c.extreme(&dir, Sense::Maximize, eps) else {
                    continue;
                };
                if !sum_contains(&terms, &v, eps) {
                    let gap = sum_gap(&terms, &v, eps).unwrap_or(T::infinity());
                    worst = Some(worst.map_or(gap, |w: T| w.max(gap)));
                }
            }
            worst
        }
    }
}

fn axis_directions<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(2 * n);
    for k in 0..n {
        for sign in [T::one(), -T::one()] {
            let mut d = vec![T::zero(); n];
            d[k] = sign;
            out.push(d);
        }
    }
    out
}

/// Margins of the two scalar inequalities at one triple:
/// `f(z) − [t g(x) + (1−t) g(y)]` and `[t f(x) + (1−t) f(y)] − g(z)`.
pub fn condition1_margins<T: Scalar>(
    f: &PiecewiseLinear<T>,
    g: &PiecewiseLinear<T>,
    tr: &Triple<T>,
) -> (T, T) {
    let s = T::one() - tr.t;
    let first = f.eval(tr.z) - (tr.t * g.eval(tr.x) + s * g.eval(tr.y));
    let second = (tr.t * f.eval(tr.x) + s * f.eval(tr.y)) - g.eval(tr.z);
    (first, second)
}

/// Both crossed inequalities between `f = inf F` and `g = sup F` on every grid triple.
pub fn check_condition1<T: Scalar>(
    f: &PiecewiseLinear<T>,
    g: &PiecewiseLinear<T>,
    grid: &TripleGrid<T>,
    eps: T,
) -> Result<CheckOutcome<T>, CheckError> {
    if f.xs != g.xs {
        return Err(CheckError::MismatchedBreakpoints);
    }
    let triples = grid.triples();
    for (i, tr) in triples.iter().enumerate() {
        let (m1, m2) = condition1_margins(f, g, tr);
        let margin = m1.max(m2);
        if margin > eps {
            return Ok(CheckOutcome {
                status: CheckStatus::Violation,
                witness: Some(Witness {
                    x: tr.x,
                    y: tr.y,
                    t: tr.t,
                    margin,
                }),
                checked: i + 1,
            });
        }
    }
    Ok(CheckOutcome {
        status: CheckStatus::Pass,
        witness: None,
        checked: triples.len(),
    })
}

/// Which part of the scalar condition a certificate refutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cond1Failure {
    /// `f(z) > t g(x) + (1−t) g(y)`.
    First,
    /// `g(z) < t f(x) + (1−t) f(y)`.
    Second,
    /// `f(x) > g(x)`.
    EmptyFiber,
}

impl fmt::Display for Cond1Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cond1Failure::First => "first inequality",
            Cond1Failure::Second => "second inequality",
            Cond1Failure::EmptyFiber => "empty fiber",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateWitness<T> {
    pub triple: Triple<T>,
    pub failure: Cond1Failure,
}

/// Row index of the constraint `h(x_i) ≥ f(x_i)` in a sandwich system.
pub fn lower_row(i: usize) -> usize {
    2 * i
}

/// Row index of the constraint `h(x_i) ≤ g(x_i)` in a sandwich system.
pub fn upper_row(i: usize) -> usize {
    2 * i + 1
}

/// Reads a violating triple off an infeasibility certificate of the sandwich system
/// `-x_i α - β ≤ -f_i` (row `2i`), `x_i α + β ≤ g_i` (row `2i + 1`).
pub fn witness_from_certificate<T: Scalar>(
    cert: &Certificate<T>,
    breakpoints: &[T],
) -> Result<CertificateWitness<T>, CheckError> {
    let malformed = |m: &str| CheckError::MalformedCertificate(m.to_string());
    let mut rows: Vec<(usize, bool)> = Vec::new();
    for idx in cert.support() {
        let i = idx / 2;
        if i >= breakpoints.len() {
            return Err(malformed("row index out of range"));
        }
        rows.push((i, idx % 2 == 1));
    }
    rows.sort_unstable();
    rows.dedup();
    // A lower and an upper constraint at one abscissa: the fiber there is empty.
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        let x = breakpoints[w[0].0];
        return Ok(CertificateWitness {
            triple: Triple {
                x,
                y: x,
                t: T::one(),
                z: x,
            },
            failure: Cond1Failure::EmptyFiber,
        });
    }
    if rows.len() != 3 {
        return Err(malformed(&format!(
            "expected 3 constraints, found {}",
            rows.len()
        )));
    }
    let (l, m, r) = (rows[0], rows[1], rows[2]);
    if l.1 != r.1 || m.1 == l.1 {
        return Err(malformed("middle constraint is not bracketed"));
    }
    let (x, z, y) = (breakpoints[l.0], breakpoints[m.0], breakpoints[r.0]);
    Ok(CertificateWitness {
        triple: Triple {
            x,
            y,
            t: (y - z) / (y - x),
            z,
        },
        failure: if l.1 {
            Cond1Failure::First
        } else {
            Cond1Failure::Second
        },
    })
}
