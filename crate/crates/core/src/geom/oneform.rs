use crate::error::Result;
use crate::geom::{christoffel, MetricField, Point};
use crate::num::fd;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

pub type FormCoeffFn = Arc<dyn Fn(&Point) -> DVector<f64> + Send + Sync>;
/// Jacobian of the coefficients; entry `(i, j)` is `∂b_i/∂x^j`.
pub type FormGradFn = Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>;

/// A 1-form `β = b_i(x) y^i` given by its coefficient field.
#[derive(Clone)]
pub struct OneFormField {
    dim: usize,
    coeff: FormCoeffFn,
    grad: Option<FormGradFn>,
}

impl OneFormField {
    pub fn new(dim: usize, coeff: FormCoeffFn) -> Self {
        Self {
            dim,
            coeff,
            grad: None,
        }
    }

    pub fn with_grad(mut self, grad: FormGradFn) -> Self {
        self.grad = Some(grad);
        self
    }

    /// Constant-coefficient 1-form.
    pub fn constant(b: DVector<f64>) -> Self {
        let dim = b.len();
        let zero = DMatrix::zeros(dim, dim);
        Self::new(dim, Arc::new(move |_| b.clone())).with_grad(Arc::new(move |_| zero.clone()))
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficients b_i(x).
    pub fn coeffs(&self, x: &Point) -> DVector<f64> {
        (self.coeff)(x)
    }

    /// Coefficient Jacobian `∂b_i/∂x^j`, analytic or finite-difference.
    pub fn coeff_grad(&self, x: &Point) -> DMatrix<f64> {
        if let Some(g) = &self.grad {
            return g(x);
        }
        let coeff = self.coeff.clone();
        let f = move |v: &DVector<f64>| coeff(&Point::from(v.clone()));
        let h = fd::step1(x.norm());
        let cols: Vec<DVector<f64>> = (0..self.dim)
            .map(|j| fd::partial_richardson(&f, x.coords(), j, h))
            .collect();
        DMatrix::from_fn(self.dim, self.dim, |i, j| cols[j][i])
    }

    /// Pairing β(y) = b_i(x) y^i.
    pub fn apply(&self, x: &Point, y: &DVector<f64>) -> f64 {
        self.coeffs(x).dot(y)
    }
}

impl std::fmt::Debug for OneFormField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OneFormField")
            .field("dim", &self.dim)
            .field("analytic_grad", &self.grad.is_some())
            .finish()
    }
}

/// Covariant derivative matrix `b_{i|j} = ∂_j b_i − Γ^k_{ij} b_k` with
/// respect to the Levi-Civita connection of `metric`.
pub fn covdiff_oneform(metric: &MetricField, beta: &OneFormField, x: &Point) -> Result<DMatrix<f64>> {
    let n = metric.dim();
    let gamma = christoffel(metric, x)?;
    let b = beta.coeffs(x);
    let db = beta.coeff_grad(x);
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut v = db[(i, j)];
        for k in 0..n {
            v -= gamma[k][(i, j)] * b[k];
        }
        v
    }))
}

/// Split `b_{i|j}` into the symmetric part `r_ij`, antisymmetric part
/// `s_ij`, and the contraction `s_j = b^i s_ij` with `b^i = a^{ij} b_j`.
pub fn r_s_decompose(
    metric: &MetricField,
    beta: &OneFormField,
    x: &Point,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)> {
    let cov = covdiff_oneform(metric, beta, x)?;
    let r = (&cov + cov.transpose()) * 0.5;
    let s = (&cov - cov.transpose()) * 0.5;
    let ainv = metric.inverse_at(x)?;
    let b_up = &ainv * beta.coeffs(x);
    let s_vec = s.transpose() * b_up; // s_j = b^i s_ij
    Ok((r, s, s_vec))
}

/// Squared norm `b² = a^{ij} b_i b_j` of the 1-form at `x`.
pub fn norm_sq(metric: &MetricField, beta: &OneFormField, x: &Point) -> Result<f64> {
    let ainv = metric.inverse_at(x)?;
    let b = beta.coeffs(x);
    Ok((&ainv * &b).dot(&b))
}
