//! Small dense linear programming engine.
//!
//! Problems have the form `minimize/maximize c·v subject to normal_i·v <= offset_i`,
//! with free variables unless a variable is explicitly declared nonnegative.
//! The solver is a two-phase dense tableau simplex (Dantzig pricing with a switch
//! to Bland's rule on stalling), so it is deterministic for identical input.
//!
//! Infeasible problems come with a Farkas certificate `y >= 0` such that
//! `Σ y_i normal_i = 0` and `Σ y_i offset_i = -1`, reduced to at most `d + 1`
//! constraints (Helly bound) when the reduction is numerically clean.

#![allow(clippy::needless_range_loop)]

use thiserror::Error;

use crate::scalar::{max_abs, Scalar};

/// One linear inequality `normal · v <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<T> {
    normal: Vec<T>,
    offset: T,
    trivial: bool,
}

impl<T: Scalar> Halfspace<T> {
    /// A constraint whose normal is identically zero is flagged trivial: it is either
    /// void (always satisfied) or contradictory on its own.
    pub fn new(normal: Vec<T>, offset: T) -> Self {
        let trivial = normal.iter().all(|c| c.is_zero());
        Self {
            normal,
            offset,
            trivial,
        }
    }

    pub fn normal(&self) -> &[T] {
        &self.normal
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// Trivial and always satisfied.
    pub fn is_void(&self) -> bool {
        self.trivial && self.offset >= T::zero()
    }

    /// `offset - normal·v`; negative when `v` violates the constraint.
    pub fn slack(&self, v: &[T]) -> T {
        self.offset - dot(&self.normal, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Unbounded,
}

/// Nonnegative multipliers over constraint indices proving infeasibility.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub multipliers: Vec<(usize, T)>,
}

impl<T: Scalar> Certificate<T> {
    pub fn support(&self) -> Vec<usize> {
        self.multipliers.iter().map(|&(i, _)| i).collect()
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }

    /// `Σ y_i normal_i` and `Σ y_i offset_i` over the given constraint list.
    pub fn combination(&self, constraints: &[Halfspace<T>]) -> Option<(Vec<T>, T)> {
        let dim = constraints.first()?.dim();
        let mut normal = vec![T::zero(); dim];
        let mut offset = T::zero();
        for &(i, y) in &self.multipliers {
            let h = constraints.get(i)?;
            if h.dim() != dim {
                return None;
            }
            for (acc, &c) in normal.iter_mut().zip(h.normal()) {
                *acc = *acc + y * c;
            }
            offset = offset + y * h.offset();
        }
        Some((normal, offset))
    }

    /// Arithmetic check: `y >= 0`, `‖Σ y normal‖∞ <= eps`, `Σ y offset < -eps`.
    pub fn verify(&self, constraints: &[Halfspace<T>], eps: T) -> bool {
        if self.multipliers.iter().any(|&(_, y)| y < T::zero() || !y.is_finite()) {
            return false;
        }
        match self.combination(constraints) {
            Some((normal, offset)) => max_abs(normal) <= eps && offset < -eps,
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome<T> {
    pub status: LpStatus,
    pub point: Option<Vec<T>>,
    pub value: Option<T>,
    pub certificate: Option<Certificate<T>>,
}

impl<T> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        self.status == LpStatus::Feasible
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError<T: std::fmt::Debug> {
    #[error("constraint {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite coefficient in constraint {index}")]
    NonFinite { index: usize },
    #[error("problem dimension must be at least 1")]
    EmptyDimension,
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("region is empty")]
    Infeasible(Certificate<T>),
    #[error("region is unbounded")]
    Unbounded,
}

/// Solver tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpConfig<T> {
    /// Feasibility tolerance; `None` means `default_eps · max(1, largest |input|)`.
    pub eps_feas: Option<T>,
    pub eps_opt: T,
    /// Refine optima to the lexicographically smallest optimal point.
    pub lex_ties: bool,
}

impl<T: Scalar> Default for LpConfig<T> {
    fn default() -> Self {
        Self {
            eps_feas: None,
            eps_opt: T::default_eps(),
            lex_ties: true,
        }
    }
}

impl<T: Scalar> LpConfig<T> {
    /// Near machine-precision feasibility, no tie refinement. Used by geometric
    /// queries that already relax their constraints explicitly.
    pub fn strict() -> Self {
        Self {
            eps_feas: Some(T::pivot_tol() * T::lit(16.0)),
            eps_opt: T::default_eps(),
            lex_ties: false,
        }
    }
}

/// Linear program builder over `dim` variables.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    dim: usize,
    rows: Vec<Halfspace<T>>,
    nonneg: Vec<bool>,
    objective: Option<(Vec<T>, Sense)>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            nonneg: vec![false; dim],
            objective: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Halfspace<T>] {
        &self.rows
    }

    pub fn push(&mut self, h: Halfspace<T>) -> &mut Self {
        self.rows.push(h);
        self
    }

    /// Adds `coeffs·v <= rhs`.
    pub fn le(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.push(Halfspace::new(coeffs, rhs))
    }

    /// Adds `|coeffs·v - rhs| <= slack` as two inequalities.
    pub fn eq_relaxed(&mut self, coeffs: Vec<T>, rhs: T, slack: T) -> &mut Self {
        let neg: Vec<T> = coeffs.iter().map(|&c| -c).collect();
        self.le(coeffs, rhs + slack);
        self.le(neg, -rhs + slack)
    }

    pub fn nonnegative(&mut self, var: usize) -> &mut Self {
        self.nonneg[var] = true;
        self
    }

    pub fn nonnegative_range(&mut self, vars: std::ops::Range<usize>) -> &mut Self {
        for v in vars {
            self.nonneg[v] = true;
        }
        self
    }

    pub fn objective(&mut self, c: Vec<T>, sense: Sense) -> &mut Self {
        self.objective = Some((c, sense));
        self
    }

    pub fn clear_objective(&mut self) -> &mut Self {
        self.objective = None;
        self
    }

    /// Constraint rows followed by one `-v_j <= 0` row per nonnegative variable;
    /// certificate indices refer to this list.
    pub fn extended_constraints(&self) -> Vec<Halfspace<T>> {
        let mut out = self.rows.clone();
        for (j, &nn) in self.nonneg.iter().enumerate() {
            if nn {
                let mut e = vec![T::zero(); self.dim];
                e[j] = -T::one();
                out.push(Halfspace::new(e, T::zero()));
            }
        }
        out
    }

    fn validate(&self) -> Result<(), LpError<T>> {
        if self.dim == 0 {
            return Err(LpError::EmptyDimension);
        }
        for (index, h) in self.rows.iter().enumerate() {
            if h.dim() != self.dim {
                return Err(LpError::DimensionMismatch {
                    index,
                    expected: self.dim,
                    found: h.dim(),
                });
            }
            if !h.offset().is_finite() || h.normal().iter().any(|c| !c.is_finite()) {
                return Err(LpError::NonFinite { index });
            }
        }
        if let Some((c, _)) = &self.objective {
            if c.len() != self.dim {
                return Err(LpError::DimensionMismatch {
                    index: self.rows.len(),
                    expected: self.dim,
                    found: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NonFinite {
                    index: self.rows.len(),
                });
            }
        }
        Ok(())
    }

    /// Feasibility tolerance actually used for this problem.
    pub fn eps_feas(&self, config: &LpConfig<T>) -> T {
        config.eps_feas.unwrap_or_else(|| {
            let scale = self
                .rows
                .iter()
                .map(|h| max_abs(h.normal().iter().copied()).max(h.offset().abs()))
                .fold(T::one(), T::max);
            T::default_eps() * scale
        })
    }

    pub fn solve(&self, config: &LpConfig<T>) -> Result<LpOutcome<T>, LpError<T>> {
        self.validate()?;
        let eps_feas = self.eps_feas(config);
        self.solve_once(eps_feas, config.lex_ties)
    }

    fn solve_once(&self, eps_feas: T, lex_ties: bool) -> Result<LpOutcome<T>, LpError<T>> {
        let mut relax = T::zero();
        let zero_tol = T::pivot_tol() * T::lit(16.0) * self.scale();
        loop {
            let mut tab = Tableau::build(self, relax);
            let phase1 = tab.phase_one()?;
            if phase1 > eps_feas {
                let certificate = tab.farkas(self);
                return Ok(LpOutcome {
                    status: LpStatus::Infeasible,
                    point: None,
                    value: None,
                    certificate: Some(certificate),
                });
            }
            if phase1 > zero_tol && relax.is_zero() {
                // Feasible only within tolerance: re-run with every row relaxed so the
                // second phase starts from an exactly feasible basis.
                relax = eps_feas;
                continue;
            }
            tab.drive_out_artificials();
            let status = match &self.objective {
                Some(_) => tab.optimize(1, None)?,
                None => LpStatus::Feasible,
            };
            if status == LpStatus::Feasible && lex_ties && self.objective.is_some() {
                tab.refine_lexicographic(self)?;
            }
            let point = tab.point(self);
            let value = match (&self.objective, status) {
                (Some((c, _)), LpStatus::Feasible) => Some(dot(c, &point)),
                _ => None,
            };
            return Ok(LpOutcome {
                status,
                point: Some(point),
                value,
                certificate: None,
            });
        }
    }

    fn scale(&self) -> T {
        self.rows
            .iter()
            .map(|h| max_abs(h.normal().iter().copied()).max(h.offset().abs()))
            .fold(T::one(), T::max)
    }
}

/// Solves with default configuration; the dimension is taken from the first
/// constraint or, failing that, from the objective.
pub fn solve<T: Scalar>(
    constraints: &[Halfspace<T>],
    objective: Option<&[T]>,
    sense: Sense,
) -> Result<LpOutcome<T>, LpError<T>> {
    let dim = constraints
        .first()
        .map(Halfspace::dim)
        .or_else(|| objective.map(<[T]>::len))
        .ok_or(LpError::EmptyDimension)?;
    let mut lp = LinearProgram::new(dim);
    for h in constraints {
        lp.push(h.clone());
    }
    if let Some(c) = objective {
        lp.objective(c.to_vec(), sense);
    }
    lp.solve(&LpConfig::default())
}

/// Center and radius of the largest Euclidean ball inside a bounded, nonempty region.
pub fn chebyshev_center<T: Scalar>(constraints: &[Halfspace<T>]) -> Result<(Vec<T>, T), LpError<T>> {
    let dim = constraints
        .first()
        .map(Halfspace::dim)
        .ok_or(LpError::EmptyDimension)?;
    let feas = solve(constraints, None, Sense::Minimize)?;
    if let Some(cert) = feas.certificate {
        return Err(LpError::Infeasible(cert));
    }
    for k in 0..dim {
        let mut e = vec![T::zero(); dim];
        e[k] = T::one();
        for sense in [Sense::Minimize, Sense::Maximize] {
            let mut lp = LinearProgram::new(dim);
            for h in constraints {
                lp.push(h.clone());
            }
            lp.objective(e.clone(), sense);
            let config = LpConfig {
                lex_ties: false,
                ..LpConfig::default()
            };
            if lp.solve(&config)?.status == LpStatus::Unbounded {
                return Err(LpError::Unbounded);
            }
        }
    }

    let mut lp = LinearProgram::new(dim + 1);
    for h in constraints {
        if h.is_trivial() {
            continue;
        }
        let norm = h.normal().iter().map(|&c| c * c).sum::<T>().sqrt();
        let mut row = h.normal().to_vec();
        row.push(norm);
        lp.le(row, h.offset());
    }
    lp.nonnegative(dim);
    let mut obj = vec![T::zero(); dim + 1];
    obj[dim] = T::one();
    lp.objective(obj, Sense::Maximize);
    let out = lp.solve(&LpConfig::default())?;
    match out.status {
        LpStatus::Feasible => {
            let mut point = out.point.expect("feasible outcome carries a point");
            let radius = point.pop().expect("radius coordinate").max(T::zero());
            Ok((point, radius))
        }
        LpStatus::Unbounded => Err(LpError::Unbounded),
        LpStatus::Infeasible => Err(LpError::Infeasible(
            out.certificate.unwrap_or(Certificate {
                multipliers: Vec::new(),
            }),
        )),
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Dense simplex tableau. Columns: structural (one per nonnegative variable, two per
/// free variable), one slack per row, one artificial per row with negative rhs.
struct Tableau<T> {
    m: usize,
    ncols: usize,
    width: usize,
    tab: Vec<T>,
    /// Objective rows: 0 = phase one, 1 = phase two. Entry `ncols` holds `-z`.
    obj: Vec<Vec<T>>,
    basis: Vec<usize>,
    plus_col: Vec<usize>,
    minus_col: Vec<Option<usize>>,
    slack_start: usize,
    art_start: usize,
    tol: T,
    iterations: usize,
    max_iterations: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>, relax: T) -> Self {
        let m = lp.rows.len();
        let mut plus_col = Vec::with_capacity(lp.dim);
        let mut minus_col = Vec::with_capacity(lp.dim);
        let mut col = 0;
        for &nn in &lp.nonneg {
            plus_col.push(col);
            col += 1;
            if nn {
                minus_col.push(None);
            } else {
                minus_col.push(Some(col));
                col += 1;
            }
        }
        let slack_start = col;
        let art_start = slack_start + m;
        let flipped: Vec<bool> = lp.rows.iter().map(|h| h.offset() + relax < T::zero()).collect();
        let n_art = flipped.iter().filter(|&&f| f).count();
        let ncols = art_start + n_art;
        let width = ncols + 1;
        let mut tab = vec![T::zero(); m * width];
        let mut basis = vec![0; m];
        let mut art = art_start;
        for (i, h) in lp.rows.iter().enumerate() {
            let sign = if flipped[i] { -T::one() } else { T::one() };
            let row = &mut tab[i * width..(i + 1) * width];
            for (j, &a) in h.normal().iter().enumerate() {
                row[plus_col[j]] = sign * a;
                if let Some(mc) = minus_col[j] {
                    row[mc] = -sign * a;
                }
            }
            row[slack_start + i] = sign;
            row[ncols] = sign * (h.offset() + relax);
            if flipped[i] {
                row[art] = T::one();
                basis[i] = art;
                art += 1;
            } else {
                basis[i] = slack_start + i;
            }
        }

        let mut phase1 = vec![T::zero(); width];
        for j in art_start..ncols {
            phase1[j] = T::one();
        }
        for i in 0..m {
            if basis[i] >= art_start {
                for j in 0..width {
                    phase1[j] = phase1[j] - tab[i * width + j];
                }
            }
        }
        let mut phase2 = vec![T::zero(); width];
        if let Some((c, sense)) = &lp.objective {
            for (j, &cj) in c.iter().enumerate() {
                let cj = match sense {
                    Sense::Minimize => cj,
                    Sense::Maximize => -cj,
                };
                phase2[plus_col[j]] = cj;
                if let Some(mc) = minus_col[j] {
                    phase2[mc] = -cj;
                }
            }
        }

        let scale = max_abs(tab.iter().copied()).max(T::one());
        Self {
            m,
            ncols,
            width,
            tab,
            obj: vec![phase1, phase2],
            basis,
            plus_col,
            minus_col,
            slack_start,
            art_start,
            tol: T::pivot_tol() * scale,
            iterations: 0,
            max_iterations: 200 * (m + ncols + 10),
        }
    }

    fn at(&self, i: usize, j: usize) -> T {
        self.tab[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.tab[r * w + c];
        for j in 0..w {
            self.tab[r * w + j] = self.tab[r * w + j] / p;
        }
        self.tab[r * w + c] = T::one();
        let (before, rest) = self.tab.split_at_mut(r * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[c];
            if !f.is_zero() {
                for j in 0..w {
                    row[j] = row[j] - f * pivot_row[j];
                }
                row[c] = T::zero();
            }
        }
        for obj in self.obj.iter_mut() {
            let f = obj[c];
            if !f.is_zero() {
                for j in 0..w {
                    obj[j] = obj[j] - f * pivot_row[j];
                }
                obj[c] = T::zero();
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex method on objective row `which`.
    fn optimize(&mut self, which: usize, allowed: Option<&[bool]>) -> Result<LpStatus, LpError<T>> {
        let allowed_end = if which == 0 { self.ncols } else { self.art_start };
        let ok = |j: usize| allowed.is_none_or(|a| a[j]);
        let mut bland = false;
        let mut degenerate_run = 0usize;
        loop {
            let obj = &self.obj[which];
            let entering = if bland {
                (0..allowed_end).find(|&j| ok(j) && obj[j] < -self.tol)
            } else {
                let mut best: Option<(usize, T)> = None;
                for (j, &d) in obj.iter().enumerate().take(allowed_end) {
                    if ok(j) && d < -self.tol && best.is_none_or(|(_, b)| d < b) {
                        best = Some((j, d));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(c) = entering else {
                return Ok(LpStatus::Feasible);
            };

            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > self.tol {
                    let ratio = self.at(i, self.ncols).max(T::zero()) / a;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best || (ratio == best && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(LpStatus::Unbounded);
            };
            if ratio <= self.tol {
                degenerate_run += 1;
                if degenerate_run > 50 {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(LpError::IterationLimit);
            }
        }
    }

    /// Returns the phase-one optimum (total artificial infeasibility).
    fn phase_one(&mut self) -> Result<T, LpError<T>> {
        if self.art_start == self.ncols {
            return Ok(T::zero());
        }
        self.optimize(0, None)?;
        Ok((-self.obj[0][self.ncols]).max(T::zero()))
    }

    /// Moves to the lexicographically smallest point of the optimal face: each
    /// stage only admits columns whose reduced cost is zero in every earlier stage.
    fn refine_lexicographic(&mut self, lp: &LinearProgram<T>) -> Result<(), LpError<T>> {
        let mut allowed: Vec<bool> = (0..self.ncols)
            .map(|j| j < self.art_start && self.obj[1][j].abs() <= self.tol)
            .collect();
        for k in 0..lp.dim {
            let mut cost = vec![T::zero(); self.width];
            cost[self.plus_col[k]] = T::one();
            if let Some(mc) = self.minus_col[k] {
                cost[mc] = -T::one();
            }
            let mut row = cost.clone();
            for i in 0..self.m {
                let cb = cost[self.basis[i]];
                if !cb.is_zero() {
                    for j in 0..self.width {
                        row[j] = row[j] - cb * self.at(i, j);
                    }
                }
            }
            self.obj.push(row);
            let which = self.obj.len() - 1;
            let status = self.optimize(which, Some(&allowed))?;
            let reduced = self.obj.pop().expect("stage objective row");
            if status == LpStatus::Feasible {
                for (j, a) in allowed.iter_mut().enumerate() {
                    if reduced[j] > self.tol {
                        *a = false;
                    }
                }
            }
        }
        Ok(())
    }

    fn drive_out_artificials(&mut self) {
        for i in 0..self.m {
            if self.basis[i] < self.art_start {
                continue;
            }
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.art_start {
                let a = self.at(i, j).abs();
                if a > self.tol && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(i, j);
                let rhs = self.at(i, self.ncols);
                if rhs < T::zero() {
                    self.tab[i * self.width + self.ncols] = T::zero();
                }
            }
        }
    }

    fn column_value(&self, col: usize) -> T {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or(T::zero(), |i| self.at(i, self.ncols).max(T::zero()))
    }

    fn point(&self, lp: &LinearProgram<T>) -> Vec<T> {
        (0..lp.dim)
            .map(|j| {
                let plus = self.column_value(self.plus_col[j]);
                let minus = self.minus_col[j].map_or(T::zero(), |c| self.column_value(c));
                plus - minus
            })
            .collect()
    }

    /// Farkas multipliers read from the phase-one reduced costs of the slack columns
    /// (and of the structural columns for nonnegative variables).
    fn farkas(&self, lp: &LinearProgram<T>) -> Certificate<T> {
        let reduced = &self.obj[0];
        let mut y: Vec<(usize, T)> = (0..self.m)
            .map(|i| (i, reduced[self.slack_start + i].max(T::zero())))
            .collect();
        let mut bound_index = self.m;
        for (j, &nn) in lp.nonneg.iter().enumerate() {
            if nn {
                y.push((bound_index, reduced[self.plus_col[j]].max(T::zero())));
                bound_index += 1;
            }
        }
        let extended = lp.extended_constraints();
        let threshold = self.tol;
        y.retain(|&(_, v)| v > threshold);
        let full = normalize(Certificate { multipliers: y }, &extended);
        let reduced = reduce_support(&full, &extended, lp.dim);
        let check_tol = T::default_eps() * lp.scale();
        match reduced {
            Some(r) if r.verify(&extended, check_tol) || !full.verify(&extended, check_tol) => r,
            _ => full,
        }
    }
}

fn normalize<T: Scalar>(mut cert: Certificate<T>, rows: &[Halfspace<T>]) -> Certificate<T> {
    let offset = cert
        .multipliers
        .iter()
        .fold(T::zero(), |acc, &(i, y)| acc + y * rows[i].offset());
    if offset < T::zero() {
        let s = -T::one() / offset;
        for (_, y) in cert.multipliers.iter_mut() {
            *y = *y * s;
        }
    }
    cert
}

/// Carathéodory-style reduction of a Farkas certificate to at most `dim + 1`
/// constraints, preserving `Σ y normal` and `Σ y offset`.
fn reduce_support<T: Scalar>(
    cert: &Certificate<T>,
    rows: &[Halfspace<T>],
    dim: usize,
) -> Option<Certificate<T>> {
    let mut y = cert.multipliers.clone();
    let k = dim + 2;
    while y.len() > dim + 1 {
        // Columns [normal; offset] of the first dim + 2 support constraints.
        let mut mat = vec![vec![T::zero(); k]; dim + 1];
        for (col, &(idx, _)) in y.iter().take(k).enumerate() {
            for r in 0..dim {
                mat[r][col] = rows[idx].normal()[r];
            }
            mat[dim][col] = rows[idx].offset();
        }
        let z = null_vector(mat, k)?;
        let floor = T::pivot_tol() * max_abs(z.iter().copied());
        let z: Vec<T> = z.into_iter().map(|v| if v.abs() <= floor { T::zero() } else { v }).collect();
        let z = if z.iter().any(|&v| v < T::zero()) {
            z
        } else {
            z.into_iter().map(|v| -v).collect()
        };
        let mut theta: Option<(usize, T)> = None;
        for (col, &zc) in z.iter().enumerate() {
            if zc < T::zero() {
                let step = y[col].1 / -zc;
                if theta.is_none_or(|(_, t)| step < t) {
                    theta = Some((col, step));
                }
            }
        }
        let (hit, step) = theta?;
        for (col, &zc) in z.iter().enumerate() {
            y[col].1 = (y[col].1 + step * zc).max(T::zero());
        }
        y[hit].1 = T::zero();
        y.retain(|&(_, v)| v > T::zero());
    }
    y.sort_by_key(|&(i, _)| i);
    Some(normalize(Certificate { multipliers: y }, rows))
}

/// A nonzero vector in the kernel of a `rows x cols` matrix with `cols > rows`.
fn null_vector<T: Scalar>(mut mat: Vec<Vec<T>>, cols: usize) -> Option<Vec<T>> {
    let rows = mat.len();
    let scale = mat
        .iter()
        .flat_map(|r| r.iter().copied())
        .fold(T::one(), |acc, v| acc.max(v.abs()));
    let tol = T::pivot_tol() * scale;
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, mat[i][c].abs()))
            .fold((r, T::zero()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if val <= tol {
            continue;
        }
        mat.swap(r, best);
        let p = mat[r][c];
        for j in 0..cols {
            mat[r][j] = mat[r][j] / p;
        }
        for i in 0..rows {
            if i != r {
                let f = mat[i][c];
                if !f.is_zero() {
                    for j in 0..cols {
                        mat[i][j] = mat[i][j] - f * mat[r][j];
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivot_cols.contains(c))?;
    let mut z = vec![T::zero(); cols];
    z[free] = T::one();
    for (row, &pc) in pivot_cols.iter().enumerate() {
        z[pc] = -mat[row][free];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(normal: &[f64], offset: f64) -> Halfspace<f64> {
        Halfspace::new(normal.to_vec(), offset)
    }

    #[test]
    fn one_variable_box() {
        let cons = [hs(&[1.0], 1.0), hs(&[-1.0], 0.0)];
        let out = solve(&cons, Some(&[1.0]), Sense::Maximize).unwrap();
        assert_eq!(out.status, LpStatus::Feasible);
        assert_eq!(out.point.unwrap(), vec![1.0]);
        assert_eq!(out.value.unwrap(), 1.0);
    }

    #[test]
    fn empty_interval_certificate() {
        let cons = [hs(&[1.0], 0.0), hs(&[-1.0], -1.0)];
        let out = solve(&cons, None, Sense::Minimize).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        let cert = out.certificate.unwrap();
        assert_eq!(cert.multipliers, vec![(0, 1.0), (1, 1.0)]);
        assert!(cert.verify(&cons, 1e-9));
    }

    #[test]
    fn barycentric_membership() {
        // λ ∈ ℝ³, λ >= 0, Σλ = 1, Σ λ_i p_i = (0, 0) for p = (-1,0), (1,0), (0,1).
        let pts = [[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mut cons = Vec::new();
        for j in 0..3 {
            let mut e = vec![0.0; 3];
            e[j] = -1.0;
            cons.push(Halfspace::new(e, 0.0));
        }
        cons.push(hs(&[1.0, 1.0, 1.0], 1.0));
        cons.push(hs(&[-1.0, -1.0, -1.0], -1.0));
        for k in 0..2 {
            let row: Vec<f64> = pts.iter().map(|p| p[k]).collect();
            cons.push(Halfspace::new(row.clone(), 0.0));
            cons.push(Halfspace::new(row.iter().map(|v| -v).collect(), 0.0));
        }
        let out = solve(&cons, None, Sense::Minimize).unwrap();
        assert_eq!(out.status, LpStatus::Feasible);
        let lambda = out.point.unwrap();
        for h in &cons {
            assert!(h.slack(&lambda) >= -1e-9);
        }
        // The only solution has λ = (½, ½, 0).
        assert!((lambda[0] - 0.5).abs() < 1e-12);
        assert!((lambda[1] - 0.5).abs() < 1e-12);
        assert!(lambda[2].abs() < 1e-12);
    }

    #[test]
    fn unbounded_detection() {
        let cons = [hs(&[-1.0], 0.0)];
        let out = solve(&cons, Some(&[1.0]), Sense::Maximize).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let cons = [hs(&[1.0], 0.0), hs(&[1.0, 2.0], 0.0)];
        assert!(matches!(
            solve(&cons, None, Sense::Minimize),
            Err(LpError::DimensionMismatch { index: 1, .. })
        ));
        let cons = [hs(&[f64::NAN], 0.0)];
        assert!(matches!(
            solve(&cons, None, Sense::Minimize),
            Err(LpError::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn trivial_rows() {
        let void = hs(&[0.0, 0.0], 1.0);
        assert!(void.is_trivial() && void.is_void());
        let bad = hs(&[0.0, 0.0], -1.0);
        let out = solve(&[void.clone(), bad.clone()], None, Sense::Minimize).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        let cert = out.certificate.unwrap();
        assert_eq!(cert.support(), vec![1]);
        assert!(cert.verify(&[void, bad], 1e-9));
    }

    #[test]
    fn chebyshev_examples() {
        let square = [
            hs(&[-1.0, 0.0], 0.0),
            hs(&[1.0, 0.0], 1.0),
            hs(&[0.0, -1.0], 0.0),
            hs(&[0.0, 1.0], 1.0),
        ];
        let (c, r) = chebyshev_center(&square).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-9 && (c[1] - 0.5).abs() < 1e-9);
        assert!((r - 0.5).abs() < 1e-9);

        let triangle = [hs(&[-1.0, 0.0], 0.0), hs(&[0.0, -1.0], 0.0), hs(&[1.0, 1.0], 2.0)];
        let (c, r) = chebyshev_center(&triangle).unwrap();
        let expect = 2.0 - 2f64.sqrt();
        assert!((r - expect).abs() < 1e-9);
        assert!((c[0] - expect).abs() < 1e-9 && (c[1] - expect).abs() < 1e-9);

        let seg = [hs(&[1.0], 1.0), hs(&[-1.0], 1.0)];
        let (c, r) = chebyshev_center(&seg).unwrap();
        assert!(c[0].abs() < 1e-9 && (r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn chebyshev_errors() {
        let half = [hs(&[1.0, 0.0], 1.0)];
        assert!(matches!(chebyshev_center(&half), Err(LpError::Unbounded)));
        let empty = [hs(&[1.0], 0.0), hs(&[-1.0], -1.0)];
        assert!(matches!(chebyshev_center(&empty), Err(LpError::Infeasible(_))));
    }

    #[test]
    fn helly_sized_certificate() {
        // Many redundant rows around an empty 2-D region.
        let mut cons = Vec::new();
        for k in 0..8 {
            let a = k as f64 * 0.3;
            cons.push(hs(&[a.cos(), a.sin()], 1.0));
        }
        cons.push(hs(&[1.0, 0.0], -5.0));
        cons.push(hs(&[-1.0, 0.0], -5.0));
        let out = solve(&cons, None, Sense::Minimize).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        let cert = out.certificate.unwrap();
        assert!(cert.len() <= 3, "support {:?}", cert.support());
        assert!(cert.verify(&cons, 1e-9));
    }

    #[test]
    fn lexicographic_tie_break() {
        // Minimize v2 over the square: every point of the bottom edge is optimal.
        let square = [
            hs(&[-1.0, 0.0], 0.0),
            hs(&[1.0, 0.0], 1.0),
            hs(&[0.0, -1.0], 0.0),
            hs(&[0.0, 1.0], 1.0),
        ];
        let out = solve(&square, Some(&[0.0, 1.0]), Sense::Minimize).unwrap();
        assert_eq!(out.point.unwrap(), vec![0.0, 0.0]);
        let out = solve(&square, Some(&[0.0, 1.0]), Sense::Maximize).unwrap();
        assert_eq!(out.point.unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn reduction_ignores_noise_in_kernel_vector() {
        let rows: Vec<Halfspace<f64>> = [
            ([3.0, 2.0], -5.0),
            ([-5.0, -5.0], 5.0),
            ([-3.0, 5.0], 1.0),
            ([5.0, 1.0], -4.0),
        ]
        .iter()
        .map(|(n, o)| Halfspace::new(n.to_vec(), *o))
        .collect();
        let full = Certificate {
            multipliers: vec![(0, 4.0 / 9.0), (1, 49.0 / 90.0), (2, 5.0 / 18.0), (3, 4.0 / 9.0)],
        };
        assert!(full.verify(&rows, 1e-9));
        let r = reduce_support(&full, &rows, 2).unwrap();
        assert!(r.len() <= 3 && r.verify(&rows, 1e-9), "{r:?}");
    }

    #[test]
    fn nonnegative_bound_rows_in_certificate() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.nonnegative_range(0..2);
        lp.le(vec![1.0, 1.0], -1.0);
        let out = lp.solve(&LpConfig::default()).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        let cert = out.certificate.unwrap();
        assert!(cert.verify(&lp.extended_constraints(), 1e-9));
        assert!(cert.len() <= 3);
    }

    #[test]
    fn f32_solves_small_problem() {
        let cons = [
            Halfspace::new(vec![1.0f32], 2.0),
            Halfspace::new(vec![-1.0f32], 1.0),
        ];
        let out = solve(&cons, Some(&[1.0f32]), Sense::Minimize).unwrap();
        assert_eq!(out.point.unwrap(), vec![-1.0f32]);
    }
}
