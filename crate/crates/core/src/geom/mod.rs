//! Riemannian backbone: chart points, metric and 1-form fields, the
//! Levi-Civita connection, covariant derivatives, the r/s decomposition of
//! ∇β and sectional curvature.
//!
//! Fields are closures over chart coordinates with optional analytic
//! derivatives; when the analytic derivatives are absent, Richardson-
//! extrapolated central differences are used with steps scaled by `1 + |x|`.

mod chart;
mod curvature;
mod metric;
mod oneform;
mod point;
mod vector_field;

pub use chart::ConstCurvChart;
pub use curvature::sectional_curvature;
pub use metric::{christoffel, spd_inverse, Christoffel, MetricField};
pub use oneform::{covdiff_oneform, norm_sq, r_s_decompose, OneFormField};
pub use point::Point;
pub use vector_field::VectorFieldGeom;
