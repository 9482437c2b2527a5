//! Set-valued functions `F: [a, b] → cc(ℝⁿ)` in three encodings.
//!
//! * [`IntervalPl`]: scalar fibers `[f(x), g(x)]` with `f`, `g` piecewise linear.
//! * [`GraphPolytope`]: `F(x) = { y : (x, y) ∈ conv(graph) }`, convex by construction.
//! * [`FiberFamily`]: finitely many listed fibers plus an optional default fiber.
//!
//! Only compact domains and compact fibers are representable; anything else is
//! rejected by validation.

use std::borrow::Cow;
use std::fmt;

use thiserror::Error;

use crate::geometry::{GeometryError, IntervalSet, Polytope, Section};
use crate::scalar::Scalar;

/// Rule text for non-finite or open fibers.
pub const FIBERS_MUST_BE_COMPACT: &str = "fibers must be compact";
/// Rule text for open, unbounded or reversed domains.
pub const DOMAIN_MUST_BE_COMPACT: &str = "domain must be a compact interval";

/// One broken invariant: which field, which rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SvfError {
    #[error("x = {x} lies outside the domain [{a}, {b}]")]
    OutsideDomain { x: f64, a: f64, b: f64 },
    #[error("no fiber defined at x = {x}")]
    NoFiber { x: f64 },
    #[error("fiber at x = {x} is empty")]
    EmptyFiber { x: f64 },
    #[error("operation needs a scalar (n = 1) function, got n = {n}")]
    NotScalar { n: usize },
    #[error("fiber family with a default fiber has no piecewise-linear envelope")]
    NotPiecewiseLinear,
    #[error("point has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid instance: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Compact domain `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainInterval<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> DomainInterval<T> {
    pub fn new(a: T, b: T) -> Result<Self, SvfError> {
        let d = Self { a, b };
        let v = d.violations("domain");
        if v.is_empty() {
            Ok(d)
        } else {
            Err(SvfError::Invalid(v))
        }
    }

    fn violations(&self, field: &str) -> Vec<Violation> {
        if !(self.a.is_finite() && self.b.is_finite()) || self.a > self.b {
            vec![Violation::new(field, DOMAIN_MUST_BE_COMPACT)]
        } else {
            Vec::new()
        }
    }

    pub fn contains(&self, x: T, eps: T) -> bool {
        x >= self.a - eps && x <= self.b + eps
    }

    pub fn width(&self) -> T {
        self.b - self.a
    }

    /// `resolution + 1` equally spaced points from `a` to `b`.
    pub fn lattice(&self, resolution: usize) -> Vec<T> {
        if resolution == 0 {
            return vec![self.a];
        }
        let r = T::from_usize(resolution).expect("resolution fits scalar");
        (0..=resolution)
            .map(|k| {
                if k == resolution {
                    self.b
                } else {
                    let k = T::from_usize(k).expect("index fits scalar");
                    self.a + (self.b - self.a) * k / r
                }
            })
            .collect()
    }

    fn check(&self, x: T, eps: T) -> Result<T, SvfError> {
        if self.contains(x, eps) {
            Ok(x.max(self.a).min(self.b))
        } else {
            Err(SvfError::OutsideDomain {
                x: x.as_f64(),
                a: self.a.as_f64(),
                b: self.b.as_f64(),
            })
        }
    }
}

/// Piecewise-linear interpolant through `(xs[i], ys[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear<T> {
    pub xs: Vec<T>,
    pub ys: Vec<T>,
}

impl<T: Scalar> PiecewiseLinear<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Self {
        assert_eq!(xs.len(), ys.len(), "abscissae and values must pair up");
        assert!(!xs.is_empty(), "piecewise-linear function needs a breakpoint");
        Self { xs, ys }
    }

    /// Linear interpolation; constant extension outside the breakpoint range.
    pub fn eval(&self, x: T) -> T {
        let n = self.xs.len();
        if n == 1 || x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = self.xs.partition_point(|&b| b <= x);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ys[k - 1], self.ys[k]);
        if x == x0 {
            return y0;
        }
        let s = (x - x0) / (x1 - x0);
        y0 + (y1 - y0) * s
    }
}

/// Scalar fibers `[lower(x), upper(x)]` interpolated between breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPl<T> {
    pub breakpoints: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> IntervalPl<T> {
    pub fn new(breakpoints: Vec<T>, lower: Vec<T>, upper: Vec<T>) -> Result<Self, SvfError> {
        let f = Self {
            breakpoints,
            lower,
            upper,
        };
        into_result(f.violations(), f)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.breakpoints.is_empty() {
            out.push(Violation::new("breakpoints", "breakpoints must not be empty"));
            return out;
        }
        let n = self.breakpoints.len();
        if self.lower.len() != n {
            out.push(Violation::new("lower", "length must match breakpoints"));
        }
        if self.upper.len() != n {
            out.push(Violation::new("upper", "length must match breakpoints"));
        }
        if self.breakpoints.iter().any(|x| !x.is_finite()) {
            out.push(Violation::new("breakpoints", DOMAIN_MUST_BE_COMPACT));
        } else if self.breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            out.push(Violation::new(
                "breakpoints",
                "breakpoints not strictly increasing",
            ));
        }
        for (name, vals) in [("lower", &self.lower), ("upper", &self.upper)] {
            for (i, v) in vals.iter().enumerate() {
                if !v.is_finite() {
                    out.push(Violation::new(format!("{name}[{i}]"), FIBERS_MUST_BE_COMPACT));
                }
            }
        }
        for (i, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_finite() && hi.is_finite() && lo > hi {
                out.push(Violation::new(
                    "lower",
                    format!("lower exceeds upper at index {i}"),
                ));
            }
        }
        out
    }

    pub fn domain(&self) -> DomainInterval<T> {
        DomainInterval {
            a: self.breakpoints[0],
            b: *self.breakpoints.last().expect("validated nonempty"),
        }
    }

    pub fn lower_pl(&self) -> PiecewiseLinear<T> {
        PiecewiseLinear::new(self.breakpoints.clone(), self.lower.clone())
    }

    pub fn upper_pl(&self) -> PiecewiseLinear<T> {
        PiecewiseLinear::new(self.breakpoints.clone(), self.upper.clone())
    }

    pub fn at(&self, x: T) -> IntervalSet<T> {
        let lo = self.lower_pl().eval(x);
        let hi = self.upper_pl().eval(x);
        IntervalSet { lo, hi: hi.max(lo) }
    }
}

/// `F(x) = { y ∈ ℝⁿ : (x, y) ∈ conv(graph) }`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPolytope<T> {
    pub n: usize,
    pub graph: Polytope<T>,
}

impl<T: Scalar> GraphPolytope<T> {
    pub fn new(graph: Polytope<T>) -> Result<Self, SvfError> {
        if graph.dim() < 2 {
            return Err(SvfError::Invalid(vec![Violation::new(
                "vertices",
                "graph vertices need a domain coordinate and at least one value coordinate",
            )]));
        }
        Ok(Self {
            n: graph.dim() - 1,
            graph,
        })
    }

    pub fn domain(&self) -> DomainInterval<T> {
        let (lo, hi) = self.graph.bounds();
        DomainInterval { a: lo[0], b: hi[0] }
    }

    /// Distinct abscissae of the graph vertices, ascending.
    pub fn abscissae(&self, eps: T) -> Vec<T> {
        let mut xs: Vec<T> = Vec::new();
        for v in self.graph.vertices() {
            if xs.last().is_none_or(|&last| v[0] - last > eps) {
                xs.push(v[0]);
            }
        }
        xs
    }

    pub fn fiber(&self, x: T) -> Section<'_, T> {
        Section::new(&self.graph, vec![x])
    }
}

/// Listed fibers over distinct abscissae plus an optional default fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberFamily<T> {
    pub n: usize,
    pub domain: DomainInterval<T>,
    pub fibers: Vec<(T, Polytope<T>)>,
    pub default: Option<Polytope<T>>,
}

impl<T: Scalar> FiberFamily<T> {
    pub fn new(
        n: usize,
        domain: DomainInterval<T>,
        fibers: Vec<(T, Polytope<T>)>,
        default: Option<Polytope<T>>,
    ) -> Result<Self, SvfError> {
        let f = Self {
            n,
            domain,
            fibers,
            default,
        };
        into_result(f.violations(T::default_eps()), f)
    }

    pub fn violations(&self, eps_x: T) -> Vec<Violation> {
        let mut out = self.domain.violations("domain");
        if self.n == 0 {
            out.push(Violation::new("dim", "dimension must be positive"));
        }
        for (i, (x, p)) in self.fibers.iter().enumerate() {
            if !x.is_finite() || !self.domain.contains(*x, eps_x) {
                out.push(Violation::new(
                    format!("fibers[{i}].x"),
                    "abscissa must lie in the domain",
                ));
            }
            if p.dim() != self.n {
                out.push(Violation::new(
                    format!("fibers[{i}].vertices"),
                    format!("vertices must have dimension {}", self.n),
                ));
            }
            for (j, (y, _)) in self.fibers.iter().enumerate().skip(i + 1) {
                if (*x - *y).abs() <= eps_x {
                    out.push(Violation::new(
                        format!("fibers[{j}].x"),
                        format!("abscissa duplicates fibers[{i}]"),
                    ));
                }
            }
        }
        if let Some(d) = &self.default {
            if d.dim() != self.n {
                out.push(Violation::new(
                    "default.vertices",
                    format!("vertices must have dimension {}", self.n),
                ));
            }
        }
        if self.fibers.is_empty() && self.default.is_none() {
            out.push(Violation::new("fibers", "at least one fiber or a default is required"));
        }
        out
    }

    /// Listed fiber matching `x` within `eps_x`, else the default.
    pub fn lookup(&self, x: T, eps_x: T) -> Option<&Polytope<T>> {
        self.fibers
            .iter()
            .find(|(fx, _)| (*fx - x).abs() <= eps_x)
            .map(|(_, p)| p)
            .or(self.default.as_ref())
    }

    pub fn abscissae(&self) -> Vec<T> {
        let mut xs: Vec<T> = self.fibers.iter().map(|(x, _)| *x).collect();
        xs.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
        xs
    }
}

/// `h(x) = c + x·d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap<T> {
    pub c: Vec<T>,
    pub d: Vec<T>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(c: Vec<T>, d: Vec<T>) -> Self {
        assert_eq!(c.len(), d.len(), "offset and slope dimensions");
        Self { c, d }
    }

    pub fn constant(c: Vec<T>) -> Self {
        let d = vec![T::zero(); c.len()];
        Self { c, d }
    }

    /// The map through `(a, at_a)` and `(b, at_b)`; constant when `a == b`.
    pub fn interpolate(a: T, at_a: &[T], b: T, at_b: &[T]) -> Self {
        if b == a {
            return Self::constant(at_a.to_vec());
        }
        let d: Vec<T> = at_a
            .iter()
            .zip(at_b)
            .map(|(&ya, &yb)| (yb - ya) / (b - a))
            .collect();
        let c = at_a.iter().zip(&d).map(|(&ya, &di)| ya - a * di).collect();
        Self { c, d }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn eval(&self, x: T) -> Vec<T> {
        self.c.iter().zip(&self.d).map(|(&c, &d)| c + x * d).collect()
    }
}

/// A fiber `F(x)` as the consumers see it.
#[derive(Debug, Clone)]
pub enum Fiber<'a, T: Scalar> {
    Interval(IntervalSet<T>),
    Polytope(Cow<'a, Polytope<T>>),
    /// Fiber of a graph polytope with `n >= 2`; never materialized as a vertex list.
    Section(Section<'a, T>),
}

impl<T: Scalar> Fiber<'_, T> {
    pub fn dim(&self) -> usize {
        match self {
            Fiber::Interval(_) => 1,
            Fiber::Polytope(p) => p.dim(),
            Fiber::Section(s) => s.out_dim(),
        }
    }

    pub fn contains(&self, y: &[T], eps: T) -> bool {
        match self {
            Fiber::Interval(i) => y.len() == 1 && i.contains(y[0], eps),
            Fiber::Polytope(p) => p.contains_point(y, eps),
            Fiber::Section(s) => s.contains(y, eps),
        }
    }

    /// Vertex list of the fiber when it is available.
    pub fn materialize(&self) -> Option<Polytope<T>> {
        match self {
            Fiber::Interval(i) => Some(i.to_polytope()),
            Fiber::Polytope(p) => Some(p.as_ref().clone()),
            Fiber::Section(_) => None,
        }
    }
}

/// A validated set-valued function in one of the supported encodings.
#[derive(Debug, Clone, PartialEq)]
pub enum SvFunction<T> {
    IntervalPl(IntervalPl<T>),
    Graph(GraphPolytope<T>),
    Fibers(FiberFamily<T>),
}

impl<T: Scalar> SvFunction<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            SvFunction::IntervalPl(_) => "interval_pl",
            SvFunction::Graph(_) => "graph_polytope",
            SvFunction::Fibers(_) => "fibers",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SvFunction::IntervalPl(_) => 1,
            SvFunction::Graph(g) => g.n,
            SvFunction::Fibers(f) => f.n,
        }
    }

    pub fn domain(&self) -> DomainInterval<T> {
        match self {
            SvFunction::IntervalPl(f) => f.domain(),
            SvFunction::Graph(g) => g.domain(),
            SvFunction::Fibers(f) => f.domain,
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            SvFunction::IntervalPl(f) => f.violations(),
            SvFunction::Graph(g) => {
                if g.graph.dim() < 2 {
                    vec![Violation::new("dim", "dimension must be positive")]
                } else {
                    Vec::new()
                }
            }
            SvFunction::Fibers(f) => f.violations(T::default_eps()),
        }
    }

    /// Breakpoints, listed abscissae or graph vertex abscissae, ascending.
    pub fn natural_abscissae(&self, eps: T) -> Vec<T> {
        match self {
            SvFunction::IntervalPl(f) => f.breakpoints.clone(),
            SvFunction::Graph(g) => g.abscissae(eps),
            SvFunction::Fibers(f) => f.abscissae(),
        }
    }

    pub fn evaluate(&self, x: T, eps: T) -> Result<Fiber<'_, T>, SvfError> {
        let x = self.domain().check(x, eps)?;
        match self {
            SvFunction::IntervalPl(f) => Ok(Fiber::Interval(f.at(x))),
            SvFunction::Fibers(f) => f
                .lookup(x, eps.max(T::default_eps()))
                .map(|p| Fiber::Polytope(Cow::Borrowed(p)))
                .ok_or(SvfError::NoFiber { x: x.as_f64() }),
            SvFunction::Graph(g) if g.n == 1 => g
                .graph
                .slice_interval(&[x], eps)?
                .map(Fiber::Interval)
                .ok_or(SvfError::EmptyFiber { x: x.as_f64() }),
            SvFunction::Graph(g) => Ok(Fiber::Section(g.fiber(x))),
        }
    }

    pub fn contains_value(&self, x: T, y: &[T], eps: T) -> Result<bool, SvfError> {
        if y.len() != self.dim() {
            return Err(SvfError::DimensionMismatch {
                expected: self.dim(),
                found: y.len(),
            });
        }
        match self {
            SvFunction::Graph(g) => {
                self.domain().check(x, eps)?;
                let mut point = Vec::with_capacity(y.len() + 1);
                point.push(x);
                point.extend_from_slice(y);
                Ok(g.graph.contains_point(&point, eps))
            }
            _ => Ok(self.evaluate(x, eps)?.contains(y, eps)),
        }
    }

    /// Lower and upper envelopes `f = inf F`, `g = sup F` of a scalar function on a
    /// common breakpoint set.
    pub fn inf_sup(&self, eps: T) -> Result<(PiecewiseLinear<T>, PiecewiseLinear<T>), SvfError> {
        if self.dim() != 1 {
            return Err(SvfError::NotScalar { n: self.dim() });
        }
        match self {
            SvFunction::IntervalPl(f) => Ok((f.lower_pl(), f.upper_pl())),
            SvFunction::Graph(g) => {
                let xs = g.abscissae(eps);
                let mut lo = Vec::with_capacity(xs.len());
                let mut hi = Vec::with_capacity(xs.len());
                for &x in &xs {
                    let s = g
                        .graph
                        .slice_interval(&[x], eps)?
                        .ok_or(SvfError::EmptyFiber { x: x.as_f64() })?;
                    lo.push(s.lo);
                    hi.push(s.hi);
                }
                Ok((PiecewiseLinear::new(xs.clone(), lo), PiecewiseLinear::new(xs, hi)))
            }
            SvFunction::Fibers(f) => {
                if f.default.is_some() {
                    return Err(SvfError::NotPiecewiseLinear);
                }
                let mut pairs: Vec<(T, T, T)> = f
                    .fibers
                    .iter()
                    .map(|(x, p)| {
                        let (lo, hi) = p.bounds();
                        (*x, lo[0], hi[0])
                    })
                    .collect();
                pairs.sort_by(|a, b| a.0.as_f64().total_cmp(&b.0.as_f64()));
                let xs: Vec<T> = pairs.iter().map(|p| p.0).collect();
                Ok((
                    PiecewiseLinear::new(xs.clone(), pairs.iter().map(|p| p.1).collect()),
                    PiecewiseLinear::new(xs, pairs.iter().map(|p| p.2).collect()),
                ))
            }
        }
    }
}

fn into_result<T>(violations: Vec<Violation>, value: T) -> Result<T, SvfError> {
    if violations.is_empty() {
        Ok(value)
    } else {
        Err(SvfError::Invalid(violations))
    }
}
