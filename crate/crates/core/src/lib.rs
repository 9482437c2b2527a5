//! Affine selections of set-valued functions on a compact interval.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix it to `f64`, which is what the command-line tool uses.
//!
//! ```
//! use affsel_core::{builtin, transversal_solve, Tolerances};
//! use affsel_core::svf::SvFunction;
//!
//! let sad = builtin::<f64>("sadowska").unwrap().instance.unwrap();
//! let SvFunction::Fibers(fam) = &sad else { unreachable!() };
//! let out = transversal_solve(&fam.fibers[..4], &Tolerances::default()).unwrap();
//! let h = out.map.unwrap();
//! assert!((h.c[0] + 2.0).abs() < 1e-9 && (h.d[1] + 1.0).abs() < 1e-9);
//! ```

pub mod checkers;
pub mod geometry;
pub mod instances;
pub mod io;
pub mod lp;
pub mod scalar;
pub mod selectors;
pub mod svf;

pub use checkers::{
    check_concave, check_condition1, check_condition2, check_convex, witness_from_certificate,
    CheckError, CheckStatus, GridPolicy,
};
pub use geometry::GeometryError;
pub use instances::{builtin, oracle_condition2_dense, oracle_sandwich, random_convex_graph, random_interval_pl};
pub use io::{read_instance, write_instance};
pub use lp::{chebyshev_center, solve, LpStatus, Sense};
pub use scalar::{Scalar, Tolerances};
pub use selectors::{
    affine_selection_convex, affine_selection_endpoint, affine_selection_family, fixed_point,
    sandwich_affine, solve_affine, transversal_solve, Objective, SelectError, SelectionStatus,
};
pub use svf::{SvfError, Violation};

pub type Halfspace = lp::Halfspace<f64>;
pub type Certificate = lp::Certificate<f64>;
pub type LpOutcome = lp::LpOutcome<f64>;
pub type LinearProgram = lp::LinearProgram<f64>;
pub type Polytope = geometry::Polytope<f64>;
pub type IntervalSet = geometry::IntervalSet<f64>;
pub type DomainInterval = svf::DomainInterval<f64>;
pub type PiecewiseLinear = svf::PiecewiseLinear<f64>;
pub type IntervalPl = svf::IntervalPl<f64>;
pub type GraphPolytope = svf::GraphPolytope<f64>;
pub type FiberFamily = svf::FiberFamily<f64>;
pub type AffineMap = svf::AffineMap<f64>;
pub type SvFunction = svf::SvFunction<f64>;
pub type TripleGrid = checkers::TripleGrid<f64>;
pub type CheckOutcome = checkers::CheckOutcome<f64>;
pub type SelectionResult = selectors::SelectionResult<f64>;
pub type NamedInstance = instances::NamedInstance<f64>;
