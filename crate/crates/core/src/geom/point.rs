use crate::error::{GeomError, Result};
use nalgebra::DVector;

/// A point in chart coordinates. Dimension is at least 2 and every entry is
/// finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: DVector<f64>,
}

impl Point {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(GeomError::DomainViolation(format!(
                "chart dimension must be ≥ 2, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::DomainViolation(
                "point has non-finite coordinates".into(),
            ));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Origin in `n` dimensions.
    pub fn origin(n: usize) -> Self {
        Self {
            coords: DVector::zeros(n),
        }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean square norm |x|² of the coordinates.
    pub fn norm_sq(&self) -> f64 {
        self.coords.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }
}

impl From<DVector<f64>> for Point {
    fn from(coords: DVector<f64>) -> Self {
        Point::new(coords).expect("valid point coordinates")
    }
}
