//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by chart evaluation, tensor calculus and the family builders.
#[derive(Debug, Clone, Error)]
pub enum GeomError {
    /// A point lies outside the validity domain of a chart or field.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// The metric coefficient matrix is not invertible within tolerance.
    #[error("metric coefficient matrix is singular within tolerance at the queried point")]
    SingularMetric,

    /// The two vectors spanning a curvature plane are (nearly) collinear.
    #[error("degenerate plane: |X ∧ Y| is below tolerance")]
    DegeneratePlane,

    /// Parameters of a named family are outside its validity region.
    #[error("invalid family parameters: {0}")]
    InvalidFamilyParams(String),

    /// The leading coefficient of a φ-defining ODE vanishes inside the
    /// requested interval.
    #[error("ODE singularity: {0}")]
    OdeSingularity(String),

    /// The deformed metric `u·a + v·b bᵀ` fails positive definiteness.
    #[error("deformed metric not positive definite (u = {u}, u + v·b² = {u_plus_vt})")]
    NotPositiveDefinite { u: f64, u_plus_vt: f64 },

    /// The pointwise inversion of the deformation found no root for b².
    #[error("no fixed point for b² in [{lo}, {hi}]")]
    NoFixedPoint { lo: f64, hi: f64 },

    /// A 1-form required to be closed has a nonvanishing antisymmetric part.
    #[error("1-form is not closed (max |s_ij| = {0:.3e})")]
    NotClosed(f64),

    /// Parameters contradict the case label of a solution family.
    #[error("case mismatch: {0}")]
    CaseMismatch(String),

    /// An asserted precondition on supplied parameters does not hold.
    #[error("precondition violation: {0}")]
    PreconditionViolation(String),

    /// The denominator of the f(c)-ODE has non-removable roots in range.
    #[error("singular f-ODE: denominator roots {roots:?} intersect the requested range")]
    SingularOde { roots: Vec<f64> },

    /// No sampled ball satisfies the regularity margin.
    #[error("no sampled ball satisfies the regularity margin")]
    EmptyRegularRegion,

    /// A flow trajectory left the chart domain.
    #[error("flow trajectory left the chart domain at t = {t}")]
    DomainEscape { t: f64 },
}

pub type Result<T> = std::result::Result<T, GeomError>;
