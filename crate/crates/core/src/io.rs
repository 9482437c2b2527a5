//! JSON instance files.
//!
//! ```text
//! { "kind": "interval_pl", "breakpoints": [..], "lower": [..], "upper": [..] }
//! { "kind": "graph_polytope", "dim": n, "vertices": [[x, y1..yn], ...] }
//! { "kind": "fibers", "dim": n, "domain": [a,b],
//!   "fibers": [{"x": v, "vertices": [[..],..]}, ...], "default": {"vertices": [[..],..]} }
//! ```
//!
//! Parsing is deliberately permissive about values: the strings `"inf"`, `"-inf"` and
//! `"nan"` are accepted as numbers, a domain may be written in interval notation
//! (`"(0,1]"`), and `"fiber_bounds": "open"` marks open fibers. Such documents parse but
//! never validate, so the rejection carries a field and a rule instead of a syntax error.

use std::fmt::Write as _;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::geometry::Polytope;
use crate::scalar::Scalar;
use crate::svf::{
    DomainInterval, FiberFamily, GraphPolytope, IntervalPl, SvFunction, Violation,
    DOMAIN_MUST_BE_COMPACT, FIBERS_MUST_BE_COMPACT,
};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    IntervalPl,
    GraphPolytope,
    Fibers,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::IntervalPl => "interval_pl",
            Kind::GraphPolytope => "graph_polytope",
            Kind::Fibers => "fibers",
        }
    }
}

/// Domain as written: endpoints plus whether each end is closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberBounds {
    Closed,
    Open,
}

/// An instance file as written, before any invariant is checked.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDoc {
    pub kind: Kind,
    pub dim: Option<usize>,
    pub domain: Option<DomainSpec>,
    pub fiber_bounds: Option<FiberBounds>,
    pub breakpoints: Option<Vec<f64>>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub vertices: Option<Vec<Vec<f64>>>,
    pub fibers: Option<Vec<(f64, Vec<Vec<f64>>)>>,
    pub default: Option<Vec<Vec<f64>>>,
}

impl InstanceDoc {
    /// A document with only its kind set.
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            dim: None,
            domain: None,
            fiber_bounds: None,
            breakpoints: None,
            lower: None,
            upper: None,
            vertices: None,
            fibers: None,
            default: None,
        }
    }

    /// Checks every invariant and builds the function, or lists all violations.
    pub fn validate<T: Scalar>(&self) -> Result<SvFunction<T>, Vec<Violation>> {
        let mut out = Vec::new();
        if let Some(d) = &self.domain {
            if !(d.lo_closed && d.hi_closed) || !d.lo.is_finite() || !d.hi.is_finite() || d.lo > d.hi
            {
                out.push(Violation::new("domain", DOMAIN_MUST_BE_COMPACT));
            }
        }
        if self.fiber_bounds == Some(FiberBounds::Open) {
            out.push(Violation::new("fiber_bounds", FIBERS_MUST_BE_COMPACT));
        }
        let built = match self.kind {
            Kind::IntervalPl => self.build_interval(&mut out),
            Kind::GraphPolytope => self.build_graph(&mut out),
            Kind::Fibers => self.build_fibers(&mut out),
        };
        match built {
            Some(f) if out.is_empty() => Ok(f),
            _ => {
                if out.is_empty() {
                    out.push(Violation::new("kind", "instance could not be built"));
                }
                Err(out)
            }
        }
    }

    fn build_interval<T: Scalar>(&self, out: &mut Vec<Violation>) -> Option<SvFunction<T>> {
        let bp = required(&self.breakpoints, "breakpoints", out);
        let lo = required(&self.lower, "lower", out);
        let hi = required(&self.upper, "upper", out);
        if self.dim.is_some_and(|d| d != 1) {
            out.push(Violation::new("dim", "interval_pl instances have dim 1"));
        }
        let (bp, lo, hi) = (bp?, lo?, hi?);
        let f: IntervalPl<T> = IntervalPl {
            breakpoints: convert(bp),
            lower: convert(lo),
            upper: convert(hi),
        };
        let v = f.violations();
        let ok = v.is_empty();
        out.extend(v);
        if let (true, Some(d)) = (ok, &self.domain) {
            let dom = f.domain();
            if dom.a.as_f64() != d.lo || dom.b.as_f64() != d.hi {
                out.push(Violation::new(
                    "domain",
                    "domain must span the first to the last breakpoint",
                ));
            }
        }
        ok.then_some(SvFunction::IntervalPl(f))
    }

    fn build_graph<T: Scalar>(&self, out: &mut Vec<Violation>) -> Option<SvFunction<T>> {
        let verts = required(&self.vertices, "vertices", out)?;
        let n = match self.dim {
            Some(0) => {
                out.push(Violation::new("dim", "dimension must be positive"));
                return None;
            }
            Some(n) => n,
            None => match verts.first() {
                Some(v) if v.len() >= 2 => v.len() - 1,
                _ => {
                    out.push(Violation::new("dim", "dimension must be positive"));
                    return None;
                }
            },
        };
        let p = polytope::<T>(verts, n + 1, "vertices", out)?;
        if self.domain.is_some() {
            out.push(Violation::new(
                "domain",
                "graph_polytope domains come from the vertices",
            ));
        }
        GraphPolytope::new(p)
            .map_err(|_| out.push(Violation::new("vertices", "invalid graph")))
            .ok()
            .map(SvFunction::Graph)
    }

    fn build_fibers<T: Scalar>(&self, out: &mut Vec<Violation>) -> Option<SvFunction<T>> {
        let Some(n) = self.dim.filter(|&n| n > 0) else {
            out.push(Violation::new("dim", "dimension must be positive"));
            return None;
        };
        let Some(d) = self.domain else {
            out.push(Violation::new("domain", "missing field"));
            return None;
        };
        let domain = DomainInterval {
            a: T::lit(d.lo),
            b: T::lit(d.hi),
        };
        let mut fibers = Vec::new();
        let mut broken = false;
        for (i, (x, verts)) in self.fibers.iter().flatten().enumerate() {
            match polytope::<T>(verts, n, &format!("fibers[{i}].vertices"), out) {
                Some(p) => fibers.push((T::lit(*x), p)),
                None => broken = true,
            }
        }
        let default = match &self.default {
            Some(verts) => match polytope::<T>(verts, n, "default.vertices", out) {
                Some(p) => Some(p),
                None => {
                    broken = true;
                    None
                }
            },
            None => None,
        };
        if broken {
            return None;
        }
        let fam = FiberFamily {
            n,
            domain,
            fibers,
            default,
        };
        let v = fam.violations(T::default_eps());
        // The domain rule is already reported above.
        let v: Vec<_> = v
            .into_iter()
            .filter(|v| !(v.field == "domain" && out.iter().any(|o| o.field == "domain")))
            .collect();
        let ok = v.is_empty();
        out.extend(v);
        ok.then_some(SvFunction::Fibers(fam))
    }
}

fn required<'a, V>(v: &'a Option<V>, field: &str, out: &mut Vec<Violation>) -> Option<&'a V> {
    if v.is_none() {
        out.push(Violation::new(field, "missing field"));
    }
    v.as_ref()
}

fn convert<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

fn polytope<T: Scalar>(
    verts: &[Vec<f64>],
    dim: usize,
    field: &str,
    out: &mut Vec<Violation>,
) -> Option<Polytope<T>> {
    if verts.is_empty() {
        out.push(Violation::new(field, "vertex list must not be empty"));
        return None;
    }
    let mut ok = true;
    for (i, v) in verts.iter().enumerate() {
        if v.len() != dim {
            out.push(Violation::new(
                format!("{field}[{i}]"),
                format!("vertex must have {dim} coordinates"),
            ));
            ok = false;
        } else if v.iter().any(|c| !c.is_finite()) {
            out.push(Violation::new(format!("{field}[{i}]"), FIBERS_MUST_BE_COMPACT));
            ok = false;
        }
    }
    if !ok {
        return None;
    }
    Polytope::new(dim, verts.iter().map(|v| convert(v)).collect()).ok()
}

/// Parses an instance document; structural problems are errors, invariant
/// violations are left for [`InstanceDoc::validate`].
pub fn parse(text: &str) -> Result<InstanceDoc, ParseError> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| field_err("$", "instance must be a JSON object"))?;
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some("interval_pl") => Kind::IntervalPl,
        Some("graph_polytope") => Kind::GraphPolytope,
        Some("fibers") => Kind::Fibers,
        Some(other) => return Err(field_err("kind", format!("unknown kind {other:?}"))),
        None => return Err(field_err("kind", "missing string field")),
    };
    let mut doc = InstanceDoc::new(kind);
    for (key, v) in obj {
        match key.as_str() {
            "kind" => {}
            "dim" => {
                doc.dim = Some(
                    v.as_u64()
                        .ok_or_else(|| field_err("dim", "expected a nonnegative integer"))?
                        as usize,
                )
            }
            "domain" => doc.domain = Some(parse_domain(v)?),
            "fiber_bounds" => {
                doc.fiber_bounds = Some(match v.as_str() {
                    Some("closed") => FiberBounds::Closed,
                    Some("open") => FiberBounds::Open,
                    _ => return Err(field_err(key, "expected \"closed\" or \"open\"")),
                })
            }
            "breakpoints" => doc.breakpoints = Some(numbers(v, key)?),
            "lower" => doc.lower = Some(numbers(v, key)?),
            "upper" => doc.upper = Some(numbers(v, key)?),
            "vertices" => doc.vertices = Some(points(v, key)?),
            "fibers" => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| field_err(key, "expected an array"))?;
                let mut fibers = Vec::with_capacity(arr.len());
                for (i, f) in arr.iter().enumerate() {
                    let name = format!("fibers[{i}]");
                    let o = object(f, &name, &["x", "vertices"])?;
                    let x = number(
                        o.get("x")
                            .ok_or_else(|| field_err(&name, "missing field x"))?,
                        &format!("{name}.x"),
                    )?;
                    let verts = points(
                        o.get("vertices")
                            .ok_or_else(|| field_err(&name, "missing field vertices"))?,
                        &format!("{name}.vertices"),
                    )?;
                    fibers.push((x, verts));
                }
                doc.fibers = Some(fibers);
            }
            "default" => {
                let o = object(v, key, &["vertices"])?;
                doc.default = Some(points(
                    o.get("vertices")
                        .ok_or_else(|| field_err(key, "missing field vertices"))?,
                    "default.vertices",
                )?);
            }
            other => return Err(field_err(other, "unknown field")),
        }
    }
    Ok(doc)
}

fn object<'v>(v: &'v Value, field: &str, allowed: &[&str]) -> Result<&'v Map<String, Value>, ParseError> {
    let o = v
        .as_object()
        .ok_or_else(|| field_err(field, "expected an object"))?;
    if let Some(k) = o.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(field_err(format!("{field}.{k}"), "unknown field"));
    }
    Ok(o)
}

fn number(v: &Value, field: &str) -> Result<f64, ParseError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| field_err(field, "number out of range")),
        Value::String(s) => parse_special(s).ok_or_else(|| field_err(field, "expected a number")),
        _ => Err(field_err(field, "expected a number")),
    }
}

fn parse_special(s: &str) -> Option<f64> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => None,
    }
}

fn numbers(v: &Value, field: &str) -> Result<Vec<f64>, ParseError> {
    v.as_array()
        .ok_or_else(|| field_err(field, "expected an array of numbers"))?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{field}[{i}]")))
        .collect()
}

fn points(v: &Value, field: &str) -> Result<Vec<Vec<f64>>, ParseError> {
    v.as_array()
        .ok_or_else(|| field_err(field, "expected an array of points"))?
        .iter()
        .enumerate()
        .map(|(i, p)| numbers(p, &format!("{field}[{i}]")))
        .collect()
}

fn parse_domain(v: &Value) -> Result<DomainSpec, ParseError> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(DomainSpec {
            lo: number(&a[0], "domain[0]")?,
            hi: number(&a[1], "domain[1]")?,
            lo_closed: true,
            hi_closed: true,
        }),
        Value::String(s) => {
            let s = s.trim();
            let bad = || field_err("domain", "expected [a,b] or interval notation");
            let lo_closed = match s.chars().next() {
                Some('[') => true,
                Some('(') => false,
                _ => return Err(bad()),
            };
            let hi_closed = match s.chars().last() {
                Some(']') => true,
                Some(')') => false,
                _ => return Err(bad()),
            };
            let inner = &s[1..s.len() - 1];
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            let endpoint = |t: &str| {
                let t = t.trim();
                t.parse::<f64>().ok().or_else(|| parse_special(t)).ok_or_else(bad)
            };
            Ok(DomainSpec {
                lo: endpoint(a)?,
                hi: endpoint(b)?,
                lo_closed,
                hi_closed,
            })
        }
        _ => Err(field_err("domain", "expected [a,b] or interval notation")),
    }
}

/// Document for a validated function; vertex lists in stored (lexicographic) order.
pub fn to_doc<T: Scalar>(f: &SvFunction<T>) -> InstanceDoc {
    let back = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    let verts = |p: &Polytope<T>| p.vertices().map(back).collect::<Vec<_>>();
    match f {
        SvFunction::IntervalPl(p) => InstanceDoc {
            breakpoints: Some(back(&p.breakpoints)),
            lower: Some(back(&p.lower)),
            upper: Some(back(&p.upper)),
            ..InstanceDoc::new(Kind::IntervalPl)
        },
        SvFunction::Graph(g) => InstanceDoc {
            dim: Some(g.n),
            vertices: Some(verts(&g.graph)),
            ..InstanceDoc::new(Kind::GraphPolytope)
        },
        SvFunction::Fibers(fam) => InstanceDoc {
            dim: Some(fam.n),
            domain: Some(DomainSpec {
                lo: fam.domain.a.as_f64(),
                hi: fam.domain.b.as_f64(),
                lo_closed: true,
                hi_closed: true,
            }),
            fibers: Some(
                fam.fibers
                    .iter()
                    .map(|(x, p)| (x.as_f64(), verts(p)))
                    .collect(),
            ),
            default: fam.default.as_ref().map(verts),
            ..InstanceDoc::new(Kind::Fibers)
        },
    }
}

/// Canonical text: one key per line in a fixed order, compact values, shortest
/// round-trip numbers, trailing newline.
pub fn serialize(doc: &InstanceDoc) -> String {
    let mut lines: Vec<String> = vec![format!("\"kind\": \"{}\"", doc.kind.as_str())];
    if let Some(d) = doc.dim {
        lines.push(format!("\"dim\": {d}"));
    }
    if let Some(d) = &doc.domain {
        let text = if d.lo_closed && d.hi_closed {
            format!("[{},{}]", fmt_num(d.lo), fmt_num(d.hi))
        } else {
            format!(
                "\"{}{},{}{}\"",
                if d.lo_closed { '[' } else { '(' },
                fmt_bare(d.lo),
                fmt_bare(d.hi),
                if d.hi_closed { ']' } else { ')' }
            )
        };
        lines.push(format!("\"domain\": {text}"));
    }
    if let Some(b) = doc.fiber_bounds {
        let s = match b {
            FiberBounds::Closed => "closed",
            FiberBounds::Open => "open",
        };
        lines.push(format!("\"fiber_bounds\": \"{s}\""));
    }
    for (key, vals) in [
        ("breakpoints", &doc.breakpoints),
        ("lower", &doc.lower),
        ("upper", &doc.upper),
    ] {
        if let Some(v) = vals {
            lines.push(format!("\"{key}\": {}", fmt_list(v)));
        }
    }
    if let Some(v) = &doc.vertices {
        lines.push(format!("\"vertices\": {}", fmt_points(v)));
    }
    if let Some(fibers) = &doc.fibers {
        let mut s = String::from("\"fibers\": [");
        for (i, (x, verts)) in fibers.iter().enumerate() {
            let sep = if i + 1 < fibers.len() { "," } else { "" };
            let _ = write!(
                s,
                "\n    {{\"x\":{},\"vertices\":{}}}{sep}",
                fmt_num(*x),
                fmt_points(verts)
            );
        }
        s.push_str(if fibers.is_empty() { "]" } else { "\n  ]" });
        lines.push(s);
    }
    if let Some(v) = &doc.default {
        lines.push(format!("\"default\": {{\"vertices\":{}}}", fmt_points(v)));
    }
    let mut out = String::from("{\n");
    for (i, l) in lines.iter().enumerate() {
        out.push_str("  ");
        out.push_str(l);
        if i + 1 < lines.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

/// Canonical text of a validated function.
pub fn write_instance<T: Scalar>(f: &SvFunction<T>) -> String {
    serialize(&to_doc(f))
}

/// Parses and validates in one step.
pub fn read_instance<T: Scalar>(text: &str) -> Result<SvFunction<T>, ReadError> {
    let doc = parse(text)?;
    doc.validate().map_err(ReadError::Invalid)
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid instance: {}", crate::svf::format_violations(.0))]
    Invalid(Vec<Violation>),
}

/// Shortest round-trip decimal; integral values without a fractional part.
pub fn fmt_bare(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

/// JSON form of a number: non-finite values become strings.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        fmt_bare(v)
    } else {
        format!("\"{}\"", fmt_bare(v))
    }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", parts.join(","))
}

fn fmt_points(v: &[Vec<f64>]) -> String {
    let parts: Vec<String> = v.iter().map(|p| fmt_list(p)).collect();
    format!("[{}]", parts.join(","))
}
