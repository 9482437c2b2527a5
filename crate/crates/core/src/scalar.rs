//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the solvers are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Default feasibility tolerance for this precision.
    fn default_eps() -> Self;

    /// Slack used when slicing a fiber at a point that may sit on its boundary.
    fn default_eps_slice() -> Self;

    /// Pivot / zero tolerance used inside the simplex engine.
    fn pivot_tol() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }

    /// Converts an `f64` literal. Panics only for values unrepresentable in `Self`,
    /// which never happens for `f32`/`f64`.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Scalar for f64 {
    fn default_eps() -> Self {
        1e-9
    }

    fn default_eps_slice() -> Self {
        1e-7
    }
}

impl Scalar for f32 {
    fn default_eps() -> Self {
        1e-4
    }

    fn default_eps_slice() -> Self {
        1e-3
    }
}

/// Tolerances used by checkers and selectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Feasibility / membership slack.
    pub eps: T,
    /// Slack for boundary slices in the dimension-reduction selector.
    pub eps_slice: T,
    /// Maximal coordinate spread still reported as a unique transversal.
    pub eps_unique: T,
    /// Matching tolerance for listed abscissae of a fiber family.
    pub eps_x: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            eps: T::default_eps(),
            eps_slice: T::default_eps_slice(),
            eps_unique: T::default_eps_slice(),
            eps_x: T::default_eps(),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    /// Defaults with a custom feasibility tolerance; the slice slack never drops below it.
    pub fn with_eps(eps: T) -> Self {
        let base = Self::default();
        Self {
            eps,
            eps_slice: base.eps_slice.max(eps),
            eps_unique: base.eps_unique.max(eps),
            eps_x: base.eps_x,
        }
    }
}

/// Largest absolute value in a stream of numbers (0 for an empty stream).
pub(crate) fn max_abs<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values
        .into_iter()
        .fold(T::zero(), |acc, v| acc.max(v.abs()))
}

/// Lexicographic comparison of coordinate slices with a total order on floats.
pub(crate) fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.as_f64().total_cmp(&y.as_f64());
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}
