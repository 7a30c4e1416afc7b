use crate::geom::Point;
use crate::num::fd;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

pub type VectorCompFn = Arc<dyn Fn(&Point) -> DVector<f64> + Send + Sync>;
/// Jacobian; entry `(i, j)` is `∂V^i/∂x^j`.
pub type VectorJacFn = Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>;
/// Second derivatives; entry `i` is the Hessian matrix `∂²V^i/∂x^j∂x^k`.
pub type VectorHessFn = Arc<dyn Fn(&Point) -> Vec<DMatrix<f64>> + Send + Sync>;

/// A vector field `V = V^i(x) ∂/∂x^i` on the chart.
#[derive(Clone)]
pub struct VectorFieldGeom {
    dim: usize,
    comp: VectorCompFn,
    jac: Option<VectorJacFn>,
    hess: Option<VectorHessFn>,
}

impl VectorFieldGeom {
    pub fn new(dim: usize, comp: VectorCompFn) -> Self {
        Self {
            dim,
            comp,
            jac: None,
            hess: None,
        }
    }

    pub fn with_jacobian(mut self, jac: VectorJacFn) -> Self {
        self.jac = Some(jac);
        self
    }

    pub fn with_hessian(mut self, hess: VectorHessFn) -> Self {
        self.hess = Some(hess);
        self
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(DVector::zeros(dim))
    }

    /// Constant field V(x) = v.
    pub fn constant(v: DVector<f64>) -> Self {
        let dim = v.len();
        let zero_j = DMatrix::zeros(dim, dim);
        let zero_h = vec![DMatrix::zeros(dim, dim); dim];
        Self::new(dim, Arc::new(move |_| v.clone()))
            .with_jacobian(Arc::new(move |_| zero_j.clone()))
            .with_hessian(Arc::new(move |_| zero_h.clone()))
    }

    /// Linear field V(x) = A x.
    pub fn linear(a: DMatrix<f64>) -> Self {
        let dim = a.nrows();
        let a2 = a.clone();
        let zero_h = vec![DMatrix::zeros(dim, dim); dim];
        Self::new(dim, Arc::new(move |x: &Point| &a * x.coords()))
            .with_jacobian(Arc::new(move |_| a2.clone()))
            .with_hessian(Arc::new(move |_| zero_h.clone()))
    }

    /// Dilation field V(x) = −2τ x.
    pub fn dilation(tau: f64, dim: usize) -> Self {
        Self::linear(DMatrix::identity(dim, dim) * (-2.0 * tau))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hess.is_some()
    }

    /// Components V^i(x).
    pub fn eval(&self, x: &Point) -> DVector<f64> {
        (self.comp)(x)
    }

    /// Jacobian `∂V^i/∂x^j`, analytic or finite-difference.
    pub fn jacobian(&self, x: &Point) -> DMatrix<f64> {
        if let Some(j) = &self.jac {
            return j(x);
        }
        let comp = self.comp.clone();
        let f = move |v: &DVector<f64>| comp(&Point::from(v.clone()));
        let h = fd::step1(x.norm());
        let cols: Vec<DVector<f64>> = (0..self.dim)
            .map(|j| fd::partial_richardson(&f, x.coords(), j, h))
            .collect();
        DMatrix::from_fn(self.dim, self.dim, |i, j| cols[j][i])
    }

    /// Second derivatives `∂²V^i/∂x^j∂x^k`, analytic or finite-difference.
    pub fn hessian(&self, x: &Point) -> Vec<DMatrix<f64>> {
        if let Some(h) = &self.hess {
            return h(x);
        }
        let comp = self.comp.clone();
        let f = move |v: &DVector<f64>| comp(&Point::from(v.clone()));
        let h2 = fd::step2(x.norm());
        let n = self.dim;
        let mut out = vec![DMatrix::zeros(n, n); n];
        for j in 0..n {
            for k in 0..=j {
                let d: DVector<f64> = fd::second_partial(&f, x.coords(), j, k, h2);
                for i in 0..n {
                    out[i][(j, k)] = d[i];
                    out[i][(k, j)] = d[i];
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for VectorFieldGeom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorFieldGeom")
            .field("dim", &self.dim)
            .field("analytic_jac", &self.jac.is_some())
            .field("analytic_hess", &self.hess.is_some())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn linear_field_jacobian() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let v = VectorFieldGeom::linear(a.clone());
        let x = Point::from_slice(&[0.3, 0.4]).unwrap();
        assert_eq!(v.eval(&x), dvector![0.4, -0.3]);
        assert_eq!(v.jacobian(&x), a);
    }

    #[test]
    fn fd_jacobian_matches_analytic() {
        let quad = VectorFieldGeom::new(
            2,
            Arc::new(|x: &Point| {
                let c = x.coords();
                dvector![c[0] * c[0] - c[1], c[0] * c[1]]
            }),
        );
        let x = Point::from_slice(&[0.5, -0.2]).unwrap();
        let j = quad.jacobian(&x);
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -0.2, 0.5]);
        assert_relative_eq!(j, expected, epsilon = 1e-9);
        let h = quad.hessian(&x);
        assert_relative_eq!(h[0][(0, 0)], 2.0, epsilon = 1e-6);
        assert_relative_eq!(h[1][(0, 1)], 1.0, epsilon = 1e-6);
    }
}
