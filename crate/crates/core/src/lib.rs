//! Numerical toolkit for conformal vector fields on (α, β)-metric spaces.
//!
//! The crate builds the classical objects of the theory — constant-curvature
//! charts, (α, β)-metrics `F = α φ(β/α)`, the `(h, ρ)` metric deformation
//! `h² = u(b²)α² + v(b²)β²`, `ρ = w(b²)β`, explicit conformal vector field
//! families and their constraint systems — and verifies the characterizing
//! PDE identities by pointwise tensor calculus with analytic or
//! finite-difference derivatives.
//!
//! Everything is evaluated on a single coordinate chart. All values are
//! immutable after construction and evaluation is free of global state, so
//! fields and reports can be shared across threads.

// negated comparisons like `!(t_min < t_max)` are deliberate: they reject
// NaN parameters along with the ordinary violations
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index-based loops mirror the tensor index notation throughout
#![allow(clippy::needless_range_loop)]

pub mod alphabeta;
pub mod cvf;
pub mod deform;
pub mod error;
pub mod families;
pub mod flow;
pub mod geom;
pub mod num;
pub mod projflat;

pub use error::{GeomError, Result};
pub use geom::{ConstCurvChart, MetricField, OneFormField, Point, VectorFieldGeom};
