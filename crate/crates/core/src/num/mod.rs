//! Numerical building blocks: finite differences, quadrature, RK4
//! integration, scalar root finding, low-discrepancy sampling and small
//! interpolation tables.

pub mod fd;
pub mod halton;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod stats;
pub mod table;
