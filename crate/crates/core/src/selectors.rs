//! Affine selections: scalar sandwiches, the dimension-reduction induction for convex
//! graphs, fixed points, and transversals of finite fiber families.

use thiserror::Error;

use crate::checkers::{
    check_condition2, condition1_margins, upper_row, witness_from_certificate,
    CheckError, Cond1Failure, TripleGrid, Witness,
};
use crate::geometry::{GeometryError, IntervalSet, Polytope};
use crate::lp::{Certificate, LinearProgram, LpConfig, LpError, LpStatus, Sense};
use crate::scalar::{Scalar, Tolerances};
use crate::svf::{AffineMap, DomainInterval, FiberFamily, GraphPolytope, PiecewiseLinear, SvFunction, SvfError};

/// Number of equally spaced samples every selection is verified at.
pub const N_VERIFY: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStatus {
    Found,
    Infeasible,
    Multiple,
}

impl SelectionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionStatus::Found => "found",
            SelectionStatus::Infeasible => "infeasible",
            SelectionStatus::Multiple => "multiple",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Maximize the smallest vertical slack to the envelopes.
    Chebyshev,
    /// Lexicographically smallest `(α, β)`.
    Lexmin,
}

/// Range of every free coordinate over the feasible set; `None` for an unbounded range.
#[derive(Debug, Clone, PartialEq)]
pub struct Uniqueness<T> {
    pub unique: bool,
    pub spread: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult<T> {
    pub status: SelectionStatus,
    pub map: Option<AffineMap<T>>,
    pub witness: Option<Witness<T>>,
    pub failure: Option<Cond1Failure>,
    pub certificate: Option<Certificate<T>>,
    pub uniqueness: Option<Uniqueness<T>>,
    /// Smallest slack of the chosen map at the breakpoints (scalar problems).
    pub slack: Option<T>,
}

impl<T> SelectionResult<T> {
    fn found(map: AffineMap<T>) -> Self {
        Self {
            status: SelectionStatus::Found,
            map: Some(map),
            witness: None,
            failure: None,
            certificate: None,
            uniqueness: None,
            slack: None,
        }
    }

    fn infeasible(certificate: Certificate<T>) -> Self {
        Self {
            status: SelectionStatus::Infeasible,
            map: None,
            witness: None,
            failure: None,
            certificate: Some(certificate),
            uniqueness: None,
            slack: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("slice of the fiber at x = {x} is empty beyond the slice tolerance")]
    EmptySlice { x: f64 },
    #[error("selection misses the fiber at x = {x} by {violation}")]
    Verification { x: f64, violation: f64 },
    #[error("value at x = {x} leaves the domain")]
    ValuesEscape { x: f64 },
    #[error("intersection condition fails at x = {x}, y = {y}, t = {t} (margin {margin})")]
    Condition2 { x: f64, y: f64, t: f64, margin: f64 },
    #[error("no affine selection: {failure} fails at x = {x}, y = {y}, t = {t}")]
    NoSelection {
        x: f64,
        y: f64,
        t: f64,
        failure: Cond1Failure,
    },
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error(transparent)]
    Svf(#[from] SvfError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl<T: Scalar> From<LpError<T>> for SelectError {
    fn from(e: LpError<T>) -> Self {
        SelectError::Lp(e.to_string())
    }
}

fn samples<T: Scalar>(a: T, b: T) -> Vec<T> {
    DomainInterval { a, b }.lattice(N_VERIFY - 1)
}

/// The sandwich system over `(α, β)` in the row order [`witness_from_certificate`]
/// expects. With `slack`, a third variable `s` is subtracted from both sides.
fn sandwich_rows<T: Scalar>(f: &PiecewiseLinear<T>, g: &PiecewiseLinear<T>, slack: bool) -> LinearProgram<T> {
    let dim = if slack { 3 } else { 2 };
    let mut lp = LinearProgram::new(dim);
    for (i, &x) in f.xs.iter().enumerate() {
        let mut lo = vec![-x, -T::one()];
        let mut hi = vec![x, T::one()];
        if slack {
            lo.push(T::one());
            hi.push(T::one());
        }
        lp.le(lo, -f.ys[i]);
        lp.le(hi, g.ys[i]);
        debug_assert_eq!(lp.rows().len(), upper_row(i) + 1);
    }
    lp
}

/// Affine `h` with `f ≤ h ≤ g`, checked at the common breakpoints.
pub fn sandwich_affine<T: Scalar>(
    f: &PiecewiseLinear<T>,
    g: &PiecewiseLinear<T>,
    objective: Objective,
    tol: &Tolerances<T>,
) -> Result<SelectionResult<T>, SelectError> {
    if f.xs != g.xs {
        return Err(SelectError::Input("envelopes use different breakpoints".into()));
    }
    if f.xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SelectError::Input("breakpoints not strictly increasing".into()));
    }
    let config = LpConfig {
        eps_feas: Some(tol.eps),
        ..LpConfig::default()
    };
    let feas = sandwich_rows(f, g, false).solve(&config)?;
    if let Some(cert) = feas.certificate {
        let w = witness_from_certificate(&cert, &f.xs)?;
        let (m1, m2) = condition1_margins(f, g, &w.triple);
        let margin = match w.failure {
            Cond1Failure::First => m1,
            Cond1Failure::Second => m2,
            Cond1Failure::EmptyFiber => f.eval(w.triple.x) - g.eval(w.triple.x),
        };
        let mut out = SelectionResult::infeasible(cert);
        out.witness = Some(Witness {
            x: w.triple.x,
            y: w.triple.y,
            t: w.triple.t,
            margin,
        });
        out.failure = Some(w.failure);
        return Ok(out);
    }

    let (alpha, beta, uniqueness) = if f.xs.len() == 1 {
        let mid = (f.ys[0] + g.ys[0]) * T::half();
        (
            T::zero(),
            mid,
            Uniqueness {
                unique: false,
                spread: vec![None, None],
            },
        )
    } else {
        let point = match objective {
            Objective::Chebyshev => {
                let mut lp = sandwich_rows(f, g, true);
                lp.nonnegative(2);
                lp.objective(vec![T::zero(), T::zero(), T::one()], Sense::Maximize);
                optimal_point(&lp, &config)?
            }
            Objective::Lexmin => {
                let mut lp = sandwich_rows(f, g, false);
                lp.objective(vec![T::one(), T::zero()], Sense::Minimize);
                optimal_point(&lp, &config)?
            }
        };
        let mut spread = Vec::with_capacity(2);
        for k in 0..2 {
            let mut e = vec![T::zero(); 2];
            e[k] = T::one();
            spread.push(range_width(&sandwich_rows(f, g, false), &e, &config)?);
        }
        let unique = spread.iter().all(|s| s.is_some_and(|w| w <= tol.eps_unique));
        (point[0], point[1], Uniqueness { unique, spread })
    };

    let map = AffineMap::new(vec![beta], vec![alpha]);
    let slack = f
        .xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let h = map.eval(x)[0];
            (h - f.ys[i]).min(g.ys[i] - h)
        })
        .fold(T::infinity(), T::min);
    let eps_sel = tol.eps_slice;
    let (a, b) = (f.xs[0], *f.xs.last().expect("nonempty breakpoints"));
    for x in samples(a, b) {
        let h = map.eval(x)[0];
        let violation = (f.eval(x) - h).max(h - g.eval(x));
        if violation > eps_sel {
            return Err(SelectError::Verification {
                x: x.as_f64(),
                violation: violation.as_f64(),
            });
        }
    }
    let mut out = SelectionResult::found(map);
    out.uniqueness = Some(uniqueness);
    out.slack = Some(slack);
    Ok(out)
}

fn optimal_point<T: Scalar>(lp: &LinearProgram<T>, config: &LpConfig<T>) -> Result<Vec<T>, SelectError> {
    let out = lp.solve(config)?;
    match out.status {
        LpStatus::Feasible => Ok(out.point.expect("feasible outcome carries a point")),
        LpStatus::Unbounded => Err(SelectError::Lp("objective unbounded".into())),
        LpStatus::Infeasible => Err(SelectError::Lp("feasible region vanished".into())),
    }
}

/// `(min, max)` of `e · v` over the region; `None` for an unbounded side.
fn coordinate_range<T: Scalar>(
    lp: &LinearProgram<T>,
    e: &[T],
    config: &LpConfig<T>,
) -> Result<(Option<T>, Option<T>), SelectError> {
    let mut ends = [None, None];
    for (slot, sense) in [Sense::Minimize, Sense::Maximize].into_iter().enumerate() {
        let mut lp = lp.clone();
        lp.objective(e.to_vec(), sense);
        let cfg = LpConfig {
            lex_ties: false,
            ..*config
        };
        let out = lp.solve(&cfg)?;
        ends[slot] = match out.status {
            LpStatus::Feasible => out.value,
            LpStatus::Unbounded => None,
            LpStatus::Infeasible => return Err(SelectError::Lp("feasible region vanished".into())),
        };
    }
    Ok((ends[0], ends[1]))
}

fn range_width<T: Scalar>(lp: &LinearProgram<T>, e: &[T], config: &LpConfig<T>) -> Result<Option<T>, SelectError> {
    Ok(match coordinate_range(lp, e, config)? {
        (Some(lo), Some(hi)) => Some((hi - lo).max(T::zero())),
        _ => None,
    })
}

/// Affine selection of a convex graph by induction on the dimension: select from the
/// projection dropping the last coordinate, then pick the midpoint of the remaining
/// one-dimensional slice at both endpoints.
pub fn affine_selection_convex<T: Scalar>(
    f: &GraphPolytope<T>,
    tol: &Tolerances<T>,
) -> Result<SelectionResult<T>, SelectError> {
    let dom = f.domain();
    let (at_a, at_b) = induct(&f.graph, dom.a, dom.b, tol)?;
    let map = AffineMap::interpolate(dom.a, &at_a, dom.b, &at_b);
    verify_graph(f, &map, tol.eps_slice)?;
    Ok(SelectionResult::found(map))
}

fn induct<T: Scalar>(
    graph: &Polytope<T>,
    a: T,
    b: T,
    tol: &Tolerances<T>,
) -> Result<(Vec<T>, Vec<T>), SelectError> {
    let (mut pa, mut pb) = if graph.dim() == 2 {
        (vec![a], vec![b])
    } else {
        let (ga, gb) = induct(&graph.project_drop_last()?, a, b, tol)?;
        let mut pa = vec![a];
        pa.extend(ga);
        let mut pb = vec![b];
        pb.extend(gb);
        (pa, pb)
    };
    // Projected points may sit just outside the projection; widen only if needed.
    let slice = |w: &[T], x: T| -> Result<IntervalSet<T>, SelectError> {
        if let Some(s) = graph.slice_interval(w, tol.eps)? {
            return Ok(s);
        }
        if graph.dim() > 2 {
            if let Some(s) = graph.slice_interval(w, tol.eps_slice)? {
                return Ok(s);
            }
        }
        Err(SelectError::EmptySlice { x: x.as_f64() })
    };
    let ha = slice(&pa, a)?;
    let hb = slice(&pb, b)?;
    pa.push(ha.midpoint());
    pb.push(hb.midpoint());
    pa.remove(0);
    pb.remove(0);
    Ok((pa, pb))
}

/// Interpolates fiber centers at the two endpoints; valid because the graph is convex.
pub fn affine_selection_endpoint<T: Scalar>(
    f: &GraphPolytope<T>,
    tol: &Tolerances<T>,
) -> Result<SelectionResult<T>, SelectError> {
    let dom = f.domain();
    let center = |x: T| -> Result<Vec<T>, SelectError> {
        if f.n == 1 {
            let s = f
                .graph
                .slice_interval(&[x], tol.eps)?
                .ok_or(SelectError::EmptySlice { x: x.as_f64() })?;
            return Ok(vec![s.midpoint()]);
        }
        let at: Vec<&[T]> = f
            .graph
            .vertices()
            .filter(|v| (v[0] - x).abs() <= tol.eps_x)
            .collect();
        if at.is_empty() {
            return Err(SelectError::EmptySlice { x: x.as_f64() });
        }
        let k = T::from_usize(at.len()).expect("vertex count fits scalar");
        let mut c = vec![T::zero(); f.n];
        for v in at {
            for (acc, &y) in c.iter_mut().zip(&v[1..]) {
                *acc = *acc + y;
            }
        }
        Ok(c.into_iter().map(|s| s / k).collect())
    };
    let map = AffineMap::interpolate(dom.a, &center(dom.a)?, dom.b, &center(dom.b)?);
    verify_graph(f, &map, tol.eps_slice)?;
    Ok(SelectionResult::found(map))
}

fn verify_graph<T: Scalar>(f: &GraphPolytope<T>, map: &AffineMap<T>, eps_sel: T) -> Result<(), SelectError> {
    let dom = f.domain();
    for x in samples(dom.a, dom.b) {
        let mut p = vec![x];
        p.extend(map.eval(x));
        if !f.graph.contains_point(&p, eps_sel) {
            return Err(SelectError::Verification {
                x: x.as_f64(),
                violation: f.graph.membership_slack(&p).as_f64(),
            });
        }
    }
    Ok(())
}

/// A fixed point `x* ∈ F(x*)` read off an affine selection `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint<T> {
    pub x_star: T,
    pub map: AffineMap<T>,
    /// Distance from `x*` to the nearer endpoint of `F(x*)`.
    pub slack: T,
}

/// Fixed point of a scalar function whose values stay inside its domain.
pub fn fixed_point<T: Scalar>(
    f: &SvFunction<T>,
    objective: Objective,
    tol: &Tolerances<T>,
) -> Result<FixedPoint<T>, SelectError> {
    let (lo, hi) = f.inf_sup(tol.eps)?;
    let dom = f.domain();
    for (i, &x) in lo.xs.iter().enumerate() {
        if lo.ys[i] < dom.a - tol.eps || hi.ys[i] > dom.b + tol.eps {
            return Err(SelectError::ValuesEscape { x: x.as_f64() });
        }
    }
    let grid = TripleGrid::combos(lo.xs.clone());
    let cond = check_condition2(f, &grid, tol.eps)?;
    if let Some(w) = cond.witness {
        return Err(SelectError::Condition2 {
            x: w.x.as_f64(),
            y: w.y.as_f64(),
            t: w.t.as_f64(),
            margin: w.margin.as_f64(),
        });
    }
    let sel = sandwich_affine(&lo, &hi, objective, tol)?;
    let Some(map) = sel.map else {
        let w = sel.witness.expect("infeasible sandwich carries a witness");
        return Err(SelectError::NoSelection {
            x: w.x.as_f64(),
            y: w.y.as_f64(),
            t: w.t.as_f64(),
            failure: sel.failure.expect("infeasible sandwich carries a failure"),
        });
    };
    let (alpha, beta) = (map.d[0], map.c[0]);
    let x_star = if (alpha - T::one()).abs() > tol.eps {
        let x = beta / (T::one() - alpha);
        if !dom.contains(x, tol.eps) {
            return Err(SelectError::ValuesEscape { x: x.as_f64() });
        }
        x.max(dom.a).min(dom.b)
    } else {
        dom.a
    };
    if !f.contains_value(x_star, &[x_star], tol.eps)? {
        return Err(SelectError::Verification {
            x: x_star.as_f64(),
            violation: (lo.eval(x_star) - x_star)
                .max(x_star - hi.eval(x_star))
                .as_f64(),
        });
    }
    let slack = (x_star - lo.eval(x_star)).min(hi.eval(x_star) - x_star);
    Ok(FixedPoint { x_star, map, slack })
}

/// The feasibility system behind [`transversal_solve`]: variables `(c, d)` and the
/// barycentric weights of every fiber, with `c + x·d = Σ λ_j v_j` and `Σ λ_j = 1`.
/// Certificates returned by the solver index into its
/// [`extended_constraints`](LinearProgram::extended_constraints).
pub fn transversal_program<T: Scalar>(fibers: &[(T, Polytope<T>)]) -> LinearProgram<T> {
    let n = fibers.first().map_or(0, |(_, p)| p.dim());
    let weights: usize = fibers.iter().map(|(_, p)| p.vertex_count()).sum();
    let total = 2 * n + weights;
    let mut lp = LinearProgram::new(total);
    lp.nonnegative_range(2 * n..total);
    let mut offset = 2 * n;
    for (x, p) in fibers {
        let mut simplex = vec![T::zero(); total];
        for j in 0..p.vertex_count() {
            simplex[offset + j] = T::one();
        }
        lp.eq_relaxed(simplex, T::one(), T::zero());
        for k in 0..n {
            let mut row = vec![T::zero(); total];
            row[k] = T::one();
            row[n + k] = *x;
            for (j, v) in p.vertices().enumerate() {
                row[offset + j] = -v[k];
            }
            lp.eq_relaxed(row, T::zero(), T::zero());
        }
        offset += p.vertex_count();
    }
    lp
}

/// Affine maps `h(x) = c + x·d` with `h(x_i) ∈ P_i` for every listed fiber.
///
/// Variables are `(c, d)` followed by the barycentric weights of every fiber. The
/// reported map fixes the coordinates one at a time at the midpoint of their remaining
/// range, so it is deterministic even when the solution is not unique.
pub fn transversal_solve<T: Scalar>(
    fibers: &[(T, Polytope<T>)],
    tol: &Tolerances<T>,
) -> Result<SelectionResult<T>, SelectError> {
    let n = fibers
        .first()
        .map(|(_, p)| p.dim())
        .ok_or_else(|| SelectError::Input("at least one fiber is required".into()))?;
    if let Some((_, p)) = fibers.iter().find(|(_, p)| p.dim() != n) {
        return Err(SelectError::Input(format!(
            "fiber dimension {} differs from {n}",
            p.dim()
        )));
    }
    let lp = transversal_program(fibers);
    let total = lp.dim();
    let config = LpConfig {
        eps_feas: Some(tol.eps),
        lex_ties: false,
        ..LpConfig::default()
    };
    let feas = lp.solve(&config)?;
    if let Some(cert) = feas.certificate {
        return Ok(SelectionResult::infeasible(cert));
    }

    let unit = |k: usize| {
        let mut e = vec![T::zero(); total];
        e[k] = T::one();
        e
    };
    let mut spread = Vec::with_capacity(2 * n);
    for k in 0..2 * n {
        spread.push(range_width(&lp, &unit(k), &config)?);
    }
    let unique = spread.iter().all(|s| s.is_some_and(|w| w <= tol.eps_unique));

    let mut fixed = lp.clone();
    let mut coords = Vec::with_capacity(2 * n);
    for k in 0..2 * n {
        let v = match coordinate_range(&fixed, &unit(k), &config)? {
            (Some(lo), Some(hi)) => (lo + hi) * T::half(),
            (Some(lo), None) => lo,
            (None, Some(hi)) => hi,
            (None, None) => T::zero(),
        };
        fixed.eq_relaxed(unit(k), v, T::zero());
        coords.push(v);
    }
    let map = AffineMap::new(coords[..n].to_vec(), coords[n..].to_vec());
    for (x, p) in fibers {
        let y = map.eval(*x);
        if !p.contains_point(&y, tol.eps_slice) {
            return Err(SelectError::Verification {
                x: x.as_f64(),
                violation: p.membership_slack(&y).as_f64(),
            });
        }
    }
    let mut out = SelectionResult::found(map);
    if !unique {
        out.status = SelectionStatus::Multiple;
    }
    out.uniqueness = Some(Uniqueness { unique, spread });
    Ok(out)
}

/// Transversal of a whole fiber family. Off the listed points the default fiber
/// applies, and since it is convex and closed an affine map stays inside it on all of
/// `[a, b]` exactly when it does at both endpoints.
pub fn affine_selection_family<T: Scalar>(
    fam: &FiberFamily<T>,
    tol: &Tolerances<T>,
) -> Result<SelectionResult<T>, SelectError> {
    let mut fibers = fam.fibers.clone();
    if let Some(d) = &fam.default {
        fibers.push((fam.domain.a, d.clone()));
        if fam.domain.b != fam.domain.a {
            fibers.push((fam.domain.b, d.clone()));
        }
    }
    transversal_solve(&fibers, tol)
}

/// Any affine selection of `F`, by encoding: sandwich for scalar envelopes, the
/// induction for convex graphs, a transversal for fiber families.
pub fn solve_affine<T: Scalar>(
    f: &SvFunction<T>,
    objective: Objective,
    tol: &Tolerances<T>,
) -> Result<SelectionResult<T>, SelectError> {
    match f {
        SvFunction::IntervalPl(_) => {
            let (lo, hi) = f.inf_sup(tol.eps)?;
            sandwich_affine(&lo, &hi, objective, tol)
        }
        SvFunction::Graph(g) => affine_selection_convex(g, tol),
        SvFunction::Fibers(fam) => {
            let out = affine_selection_family(fam, tol)?;
            if let Some(map) = &out.map {
                let dom = f.domain();
                let points = if fam.default.is_some() {
                    samples(dom.a, dom.b)
                } else {
                    fam.abscissae()
                };
                for x in points {
                    if !f.contains_value(x, &map.eval(x), tol.eps_slice)? {
                        return Err(SelectError::Verification {
                            x: x.as_f64(),
                            violation: f64::NAN,
                        });
                    }
                }
            }
            Ok(out)
        }
    }
}
