//! Compact convex sets in vertex representation.
//!
//! Every query (membership, intersection, slicing) is posed as a small LP over
//! barycentric weights of the vertices, so no facet enumeration is ever needed.
//! Lower-dimensional polytopes (points, segments) are handled like any other.

use thiserror::Error;

use crate::lp::{LinearProgram, LpConfig, LpStatus, Sense};
use crate::scalar::{lex_cmp, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("a polytope needs at least one vertex")]
    Empty,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("vertex {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("operation needs dimension at least {needed}, got {dim}")]
    TooSmall { needed: usize, dim: usize },
    #[error("interval bounds out of order or non-finite")]
    BadInterval,
}

/// `conv(vertices)` for a nonempty finite vertex list, stored in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<T> {
    dim: usize,
    coords: Vec<T>,
}

/// Compact real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSet<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> IntervalSet<T> {
    pub fn new(lo: T, hi: T) -> Result<Self, GeometryError> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(GeometryError::BadInterval);
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, v: T, eps: T) -> bool {
        v >= self.lo - eps && v <= self.hi + eps
    }

    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) * T::half()
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn to_polytope(&self) -> Polytope<T> {
        Polytope::from_sorted(1, vec![self.lo, self.hi]).dedup_exact()
    }
}

impl<T: Scalar> Polytope<T> {
    pub fn new(dim: usize, vertices: Vec<Vec<T>>) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        if vertices.is_empty() {
            return Err(GeometryError::Empty);
        }
        for (index, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    left: dim,
                    right: v.len(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(GeometryError::NonFinite { index });
            }
        }
        Ok(Self::from_vertices(dim, vertices))
    }

    /// Builds from a list of points, taking the dimension from the first one.
    pub fn from_points(points: &[&[T]]) -> Result<Self, GeometryError> {
        let dim = points.first().ok_or(GeometryError::Empty)?.len();
        Self::new(dim, points.iter().map(|p| p.to_vec()).collect())
    }

    pub fn point(v: &[T]) -> Result<Self, GeometryError> {
        Self::new(v.len(), vec![v.to_vec()])
    }

    /// Axis-aligned box `[lo_1, hi_1] × … × [lo_d, hi_d]` (degenerate sides allowed).
    pub fn cuboid(lo: &[T], hi: &[T]) -> Result<Self, GeometryError> {
        if lo.len() != hi.len() {
            return Err(GeometryError::DimensionMismatch {
                left: lo.len(),
                right: hi.len(),
            });
        }
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            return Err(GeometryError::BadInterval);
        }
        let dim = lo.len();
        let mut corners = vec![Vec::with_capacity(dim)];
        for k in 0..dim {
            let mut next = Vec::with_capacity(corners.len() * 2);
            for c in &corners {
                for v in [lo[k], hi[k]] {
                    let mut c = c.clone();
                    c.push(v);
                    next.push(c);
                }
            }
            corners = next;
        }
        Ok(Self::new(dim, corners)?.dedup_exact())
    }

    fn from_vertices(dim: usize, mut vertices: Vec<Vec<T>>) -> Self {
        // Normalizes -0.0 so equal sets compare and serialize identically.
        for v in vertices.iter_mut() {
            for c in v.iter_mut() {
                *c = *c + T::zero();
            }
        }
        vertices.sort_by(|a, b| lex_cmp(a, b));
        Self {
            dim,
            coords: vertices.into_iter().flatten().collect(),
        }
    }

    fn from_sorted(dim: usize, coords: Vec<T>) -> Self {
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn vertex(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_vertex_lists(&self) -> Vec<Vec<T>> {
        self.vertices().map(<[T]>::to_vec).collect()
    }

    /// Mean of the vertex list (always a point of the polytope).
    pub fn centroid(&self) -> Vec<T> {
        let n = T::from_usize(self.vertex_count()).expect("vertex count fits scalar");
        let mut c = vec![T::zero(); self.dim];
        for v in self.vertices() {
            for (acc, &x) in c.iter_mut().zip(v) {
                *acc = *acc + x;
            }
        }
        c.into_iter().map(|x| x / n).collect()
    }

    /// Per-coordinate bounding box.
    pub fn bounds(&self) -> (Vec<T>, Vec<T>) {
        let mut lo = self.vertex(0).to_vec();
        let mut hi = lo.clone();
        for v in self.vertices() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    fn dedup_exact(self) -> Self {
        self.dedup(T::zero())
    }

    /// Drops vertices within `eps` (max-norm) of an earlier kept vertex.
    pub fn dedup(&self, eps: T) -> Self {
        let mut kept: Vec<&[T]> = Vec::new();
        for v in self.vertices() {
            let dup = kept
                .iter()
                .any(|k| k.iter().zip(v).all(|(&a, &b)| (a - b).abs() <= eps));
            if !dup {
                kept.push(v);
            }
        }
        Self::from_vertices(self.dim, kept.into_iter().map(<[T]>::to_vec).collect())
    }

    /// `t · P`, with coinciding vertices merged.
    pub fn scale(&self, t: T) -> Self {
        let coords = self.coords.iter().map(|&c| c * t).collect();
        Self::from_vertices(self.dim, chunk(self.dim, coords)).dedup_exact()
    }

    pub fn translate(&self, by: &[T]) -> Result<Self, GeometryError> {
        self.check_dim(by.len())?;
        let verts = self
            .vertices()
            .map(|v| v.iter().zip(by).map(|(&a, &b)| a + b).collect())
            .collect();
        Ok(Self::from_vertices(self.dim, verts))
    }

    /// All pairwise vertex sums; redundant points are kept (see [`Polytope::reduce`]).
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self, GeometryError> {
        self.check_dim(other.dim)?;
        let mut verts = Vec::with_capacity(self.vertex_count() * other.vertex_count());
        for p in self.vertices() {
            for q in other.vertices() {
                verts.push(p.iter().zip(q).map(|(&a, &b)| a + b).collect());
            }
        }
        Ok(Self::from_vertices(self.dim, verts).dedup_exact())
    }

    /// Membership of `v` in `conv(P)` with every barycentric equality relaxed by `eps`.
    ///
    /// Panics when `v` has the wrong dimension.
    pub fn contains_point(&self, v: &[T], eps: T) -> bool {
        assert_eq!(v.len(), self.dim, "point dimension");
        sum_contains(&[(T::one(), Section::whole(self))], v, eps)
    }

    /// L1 distance from `v` to `conv(P)`.
    pub fn membership_slack(&self, v: &[T]) -> T {
        assert_eq!(v.len(), self.dim, "point dimension");
        sum_gap(&[(T::one(), Section::whole(self))], v, T::zero())
            .expect("membership gap LP over a nonempty polytope is feasible")
    }

    /// Lower bound on the Euclidean distance (`‖·‖₂ >= ‖·‖₁ / √d`).
    pub fn distance_lower_bound(&self, v: &[T]) -> T {
        let d = T::from_usize(self.dim).expect("dimension fits scalar");
        self.membership_slack(v) / d.sqrt()
    }

    pub fn intersects(&self, other: &Self, eps: T) -> Result<bool, GeometryError> {
        self.check_dim(other.dim)?;
        let zero = vec![T::zero(); self.dim];
        Ok(sum_contains(
            &[
                (T::one(), Section::whole(self)),
                (-T::one(), Section::whole(other)),
            ],
            &zero,
            eps,
        ))
    }

    /// L1 distance between the two sets.
    pub fn separation(&self, other: &Self) -> Result<T, GeometryError> {
        self.check_dim(other.dim)?;
        let zero = vec![T::zero(); self.dim];
        Ok(sum_gap(
            &[
                (T::one(), Section::whole(self)),
                (-T::one(), Section::whole(other)),
            ],
            &zero,
            T::zero(),
        )
        .expect("separation LP over nonempty polytopes is feasible"))
    }

    /// `conv(P) ⊂ conv(Q)`, decided vertex by vertex.
    pub fn subset(&self, other: &Self, eps: T) -> Result<bool, GeometryError> {
        self.check_dim(other.dim)?;
        Ok(self.vertices().all(|v| other.contains_point(v, eps)))
    }

    /// Drops the last coordinate of every vertex; duplicates are kept.
    pub fn project_drop_last(&self) -> Result<Self, GeometryError> {
        if self.dim < 2 {
            return Err(GeometryError::TooSmall {
                needed: 2,
                dim: self.dim,
            });
        }
        let verts = self
            .vertices()
            .map(|v| v[..self.dim - 1].to_vec())
            .collect();
        Ok(Self::from_vertices(self.dim - 1, verts))
    }

    /// Range of the last coordinate over the points of `conv(P)` whose leading
    /// coordinates equal `w` (equalities relaxed by `eps`); `None` when empty.
    pub fn slice_interval(&self, w: &[T], eps: T) -> Result<Option<IntervalSet<T>>, GeometryError> {
        if self.dim < 2 {
            return Err(GeometryError::TooSmall {
                needed: 2,
                dim: self.dim,
            });
        }
        if w.len() != self.dim - 1 {
            return Err(GeometryError::DimensionMismatch {
                left: self.dim - 1,
                right: w.len(),
            });
        }
        let section = Section::new(self, w.to_vec());
        let Some(lo) = section.extreme(&[T::one()], Sense::Minimize, eps) else {
            return Ok(None);
        };
        let hi = section
            .extreme(&[T::one()], Sense::Maximize, eps)
            .expect("slice nonempty once minimized");
        Ok(Some(IntervalSet {
            lo: lo[0],
            hi: hi[0].max(lo[0]),
        }))
    }

    /// Removes every vertex lying in the hull of the remaining ones.
    pub fn reduce(&self, eps: T) -> Self {
        let mut current = self.dedup(eps).to_vertex_lists();
        let mut i = 0;
        while i < current.len() && current.len() > 1 {
            let others: Vec<Vec<T>> = current
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            let rest = Self::from_vertices(self.dim, others);
            if rest.contains_point(&current[i], eps) {
                current.remove(i);
            } else {
                i += 1;
            }
        }
        Self::from_vertices(self.dim, current)
    }

    fn check_dim(&self, other: usize) -> Result<(), GeometryError> {
        if self.dim != other {
            return Err(GeometryError::DimensionMismatch {
                left: self.dim,
                right: other,
            });
        }
        Ok(())
    }
}

fn chunk<T: Scalar>(dim: usize, coords: Vec<T>) -> Vec<Vec<T>> {
    coords.chunks_exact(dim).map(<[T]>::to_vec).collect()
}

/// `{ y : (prefix, y) ∈ conv(P) }`: a polytope cut at fixed leading coordinates.
/// With an empty prefix this is the polytope itself; with `prefix = [x]` on a graph
/// polytope it is the fiber over `x`.
#[derive(Debug, Clone)]
pub struct Section<'a, T> {
    polytope: &'a Polytope<T>,
    prefix: Vec<T>,
}

impl<'a, T: Scalar> Section<'a, T> {
    pub fn new(polytope: &'a Polytope<T>, prefix: Vec<T>) -> Self {
        assert!(prefix.len() < polytope.dim(), "section keeps at least one coordinate");
        Self { polytope, prefix }
    }

    pub fn whole(polytope: &'a Polytope<T>) -> Self {
        Self::new(polytope, Vec::new())
    }

    pub fn out_dim(&self) -> usize {
        self.polytope.dim() - self.prefix.len()
    }

    pub fn polytope(&self) -> &Polytope<T> {
        self.polytope
    }

    pub fn prefix(&self) -> &[T] {
        &self.prefix
    }

    /// Point of the section optimizing `direction · y`, or `None` if the section is empty.
    pub fn extreme(&self, direction: &[T], sense: Sense, eps: T) -> Option<Vec<T>> {
        let terms = [(T::one(), self.clone())];
        let mut builder = SumProgram::new(&terms, eps);
        let obj = builder.output_objective(0, direction);
        builder.lp.objective(obj, sense);
        let out = builder
            .lp
            .solve(&LpConfig::strict())
            .expect("section LP is well formed");
        match out.status {
            LpStatus::Feasible => {
                let lambda = out.point.expect("feasible outcome carries a point");
                Some(builder.output_point(0, &lambda))
            }
            _ => None,
        }
    }

    pub fn contains(&self, y: &[T], eps: T) -> bool {
        sum_contains(&[(T::one(), self.clone())], y, eps)
    }
}

/// LP over barycentric weights of several sections whose weighted sum is constrained.
struct SumProgram<'s, 'a, T> {
    terms: &'s [(T, Section<'a, T>)],
    offsets: Vec<usize>,
    lp: LinearProgram<T>,
    out_dim: usize,
}

impl<'s, 'a, T: Scalar> SumProgram<'s, 'a, T> {
    /// Variables are the weights of every term followed by `extra` free variables.
    /// Adds simplex and prefix rows; the combination rows are added by callers.
    fn with_extra(terms: &'s [(T, Section<'a, T>)], eps: T, extra: usize) -> Self {
        let out_dim = terms.first().map_or(0, |(_, s)| s.out_dim());
        let mut offsets = Vec::with_capacity(terms.len() + 1);
        let mut total = 0;
        for (_, s) in terms {
            assert_eq!(s.out_dim(), out_dim, "terms must share the output dimension");
            offsets.push(total);
            total += s.polytope.vertex_count();
        }
        offsets.push(total);
        let mut lp = LinearProgram::new(total + extra);
        lp.nonnegative_range(0..total);
        for (k, (_, s)) in terms.iter().enumerate() {
            let mut row = vec![T::zero(); total + extra];
            row[offsets[k]..offsets[k + 1]].fill(T::one());
            lp.eq_relaxed(row, T::one(), eps);
            for (r, &w) in s.prefix.iter().enumerate() {
                let mut row = vec![T::zero(); total + extra];
                for (j, v) in s.polytope.vertices().enumerate() {
                    row[offsets[k] + j] = v[r];
                }
                lp.eq_relaxed(row, w, eps);
            }
        }
        Self {
            terms,
            offsets,
            lp,
            out_dim,
        }
    }

    fn new(terms: &'s [(T, Section<'a, T>)], eps: T) -> Self {
        Self::with_extra(terms, eps, 0)
    }

    /// Coefficients of output coordinate `r` of `Σ coef_k y_k` in terms of the weights.
    fn combination_row(&self, r: usize) -> Vec<T> {
        let mut row = vec![T::zero(); self.lp.dim()];
        for (k, (coef, s)) in self.terms.iter().enumerate() {
            let skip = s.prefix.len();
            for (j, v) in s.polytope.vertices().enumerate() {
                row[self.offsets[k] + j] = *coef * v[skip + r];
            }
        }
        row
    }

    /// Objective `direction · y_term` over the weights of one term.
    fn output_objective(&self, term: usize, direction: &[T]) -> Vec<T> {
        let mut obj = vec![T::zero(); self.lp.dim()];
        let s = &self.terms[term].1;
        let skip = s.prefix.len();
        for (j, v) in s.polytope.vertices().enumerate() {
            obj[self.offsets[term] + j] = direction
                .iter()
                .zip(&v[skip..])
                .fold(T::zero(), |acc, (&d, &x)| acc + d * x);
        }
        obj
    }

    fn output_point(&self, term: usize, lambda: &[T]) -> Vec<T> {
        let s = &self.terms[term].1;
        let skip = s.prefix.len();
        let mut y = vec![T::zero(); s.out_dim()];
        for (j, v) in s.polytope.vertices().enumerate() {
            let l = lambda[self.offsets[term] + j];
            for (acc, &x) in y.iter_mut().zip(&v[skip..]) {
                *acc = *acc + l * x;
            }
        }
        y
    }
}

/// Is there a choice `y_k ∈ S_k` with `Σ coef_k y_k = target`, all equalities relaxed by `eps`?
pub fn sum_contains<T: Scalar>(terms: &[(T, Section<'_, T>)], target: &[T], eps: T) -> bool {
    let mut prog = SumProgram::new(terms, eps);
    assert_eq!(target.len(), prog.out_dim, "target dimension");
    for (r, &t) in target.iter().enumerate() {
        let row = prog.combination_row(r);
        prog.lp.eq_relaxed(row, t, eps);
    }
    prog.lp
        .solve(&LpConfig::strict())
        .map(|o| o.is_feasible())
        .unwrap_or(false)
}

/// Minimal L1 residual `‖Σ coef_k y_k − target‖₁` over `y_k ∈ S_k` (prefix and simplex
/// rows relaxed by `eps`); `None` when some section is empty.
pub fn sum_gap<T: Scalar>(terms: &[(T, Section<'_, T>)], target: &[T], eps: T) -> Option<T> {
    let mut prog = SumProgram::with_extra(terms, eps, target.len());
    assert_eq!(target.len(), prog.out_dim, "target dimension");
    let base = prog.offsets[terms.len()];
    for (r, &t) in target.iter().enumerate() {
        let mut row = prog.combination_row(r);
        row[base + r] = -T::one();
        let neg: Vec<T> = row
            .iter()
            .enumerate()
            .map(|(j, &c)| if j == base + r { -T::one() } else { -c })
            .collect();
        prog.lp.le(row, t);
        prog.lp.le(neg, -t);
    }
    prog.lp.nonnegative_range(base..base + target.len());
    let mut obj = vec![T::zero(); prog.lp.dim()];
    for r in 0..target.len() {
        obj[base + r] = T::one();
    }
    prog.lp.objective(obj, Sense::Minimize);
    let out = prog.lp.solve(&LpConfig::strict()).ok()?;
    match out.status {
        LpStatus::Feasible => out.value.map(|v| v.max(T::zero())),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pts: &[&[f64]]) -> Polytope<f64> {
        Polytope::from_points(pts).unwrap()
    }

    const EPS: f64 = 1e-9;

    #[test]
    fn scale_examples() {
        let seg = poly(&[&[-4.0, 1.0], &[4.0, 1.0]]);
        assert_eq!(seg.scale(0.5), poly(&[&[-2.0, 0.5], &[2.0, 0.5]]));
        assert_eq!(seg.scale(0.0).to_vertex_lists(), vec![vec![0.0, 0.0]]);
        assert_eq!(seg.scale(1.0), seg);
    }

    #[test]
    fn minkowski_examples() {
        let unit = Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let sum = unit.minkowski_sum(&unit).unwrap().reduce(EPS);
        assert_eq!(sum, Polytope::cuboid(&[0.0, 0.0], &[2.0, 2.0]).unwrap());

        let f0 = poly(&[&[-4.0, 1.0], &[4.0, 1.0]]);
        let f4 = poly(&[&[-4.0, -4.0], &[4.0, 4.0]]);
        let para = f0.scale(0.5).minkowski_sum(&f4.scale(0.5)).unwrap();
        assert_eq!(
            para,
            poly(&[&[-4.0, -1.5], &[0.0, -1.5], &[0.0, 2.5], &[4.0, 2.5]])
        );
        assert!(para.contains_point(&[0.0, -1.0], EPS));

        let origin = Polytope::point(&[0.0, 0.0]).unwrap();
        assert_eq!(unit.minkowski_sum(&origin).unwrap(), unit);
        assert!(unit.minkowski_sum(&Polytope::point(&[0.0]).unwrap()).is_err());
    }

    #[test]
    fn membership_examples() {
        let tri = poly(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]);
        for v in tri.vertices() {
            assert!(tri.contains_point(v, EPS));
        }
        let f4 = poly(&[&[-4.0, -4.0], &[4.0, 4.0]]);
        assert!(!f4.contains_point(&[2.0, -3.0], EPS));
        // L1 distance to the diagonal is 5; Euclidean distance is 5/√2.
        assert!((f4.membership_slack(&[2.0, -3.0]) - 5.0).abs() < 1e-9);
        assert!((f4.distance_lower_bound(&[2.0, -3.0]) - 5.0 / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn membership_tolerance() {
        let seg = poly(&[&[0.0], &[1.0]]);
        assert!(seg.contains_point(&[1.0 + 0.5e-9], EPS));
        assert!(!seg.contains_point(&[1.0 + 1e-6], EPS));
    }

    #[test]
    fn intersects_examples() {
        let a = poly(&[&[-4.0, -1.0], &[4.0, -1.0]]);
        let b = poly(&[&[0.0, -4.0], &[0.0, 4.0]]);
        assert!(a.intersects(&b, EPS).unwrap());
        let c = poly(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let d = poly(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert!(!c.intersects(&d, EPS).unwrap());
        assert!((c.separation(&d).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.intersects(&a, EPS).unwrap());
    }

    #[test]
    fn subset_examples() {
        let small = Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let big = Polytope::cuboid(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        assert!(small.subset(&big, EPS).unwrap());
        assert!(!big.subset(&small, EPS).unwrap());
        let fiber = poly(&[&[0.0, -4.0], &[0.0, 4.0]]);
        let square = Polytope::cuboid(&[-4.0, -4.0], &[4.0, 4.0]).unwrap();
        assert!(fiber.subset(&square, EPS).unwrap());
    }

    #[test]
    fn projection_examples() {
        let tetra = poly(&[&[0.0, -1.0, 0.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, -1.0], &[1.0, 0.0, 1.0]]);
        let g = tetra.project_drop_last().unwrap();
        assert_eq!(g.reduce(EPS), poly(&[&[0.0, -1.0], &[0.0, 1.0], &[1.0, 0.0]]));

        let seg = poly(&[&[3.0, 0.0], &[3.0, 1.0]]);
        assert_eq!(seg.project_drop_last().unwrap().to_vertex_lists(), vec![vec![3.0], vec![3.0]]);

        let cube = Polytope::cuboid(&[0.0; 3], &[1.0; 3]).unwrap();
        assert_eq!(
            cube.project_drop_last().unwrap().reduce(EPS),
            Polytope::cuboid(&[0.0; 2], &[1.0; 2]).unwrap()
        );
        assert!(Polytope::point(&[1.0]).unwrap().project_drop_last().is_err());
    }

    #[test]
    fn slice_examples() {
        let tetra = poly(&[&[0.0, -1.0, 0.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, -1.0], &[1.0, 0.0, 1.0]]);
        let s = tetra.slice_interval(&[0.5, 0.0], EPS).unwrap().unwrap();
        assert!((s.lo + 0.5).abs() < 1e-8 && (s.hi - 0.5).abs() < 1e-8);
        let s = tetra.slice_interval(&[0.0, 0.5], EPS).unwrap().unwrap();
        assert!(s.lo.abs() < 1e-8 && s.hi.abs() < 1e-8);
        assert!(tetra.slice_interval(&[0.0, 2.0], EPS).unwrap().is_none());
        assert!(tetra.slice_interval(&[0.0], EPS).is_err());
    }

    #[test]
    fn reduce_examples() {
        let seg = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 0.0]]);
        assert_eq!(seg.reduce(EPS), poly(&[&[0.0, 0.0], &[1.0, 0.0]]));
        let sq = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], &[0.5, 0.5]]);
        assert_eq!(sq.reduce(EPS), Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        let tri = poly(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]);
        assert_eq!(tri.reduce(EPS), tri);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Polytope::<f64>::new(2, vec![]), Err(GeometryError::Empty));
        assert!(matches!(
            Polytope::new(2, vec![vec![0.0, f64::INFINITY]]),
            Err(GeometryError::NonFinite { index: 0 })
        ));
        assert!(IntervalSet::new(1.0, 0.0).is_err());
    }

    #[test]
    fn sections_of_a_graph() {
        // Graph of F(x) = [0, x] on [0, 1].
        let graph = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]]);
        let fiber = Section::new(&graph, vec![0.5]);
        assert!(fiber.contains(&[0.25], EPS));
        assert!(!fiber.contains(&[0.75], EPS));
        let top = fiber.extreme(&[1.0], Sense::Maximize, EPS).unwrap();
        assert!((top[0] - 0.5).abs() < 1e-9);
        assert!(Section::new(&graph, vec![2.0]).extreme(&[1.0], Sense::Minimize, EPS).is_none());
    }
}
