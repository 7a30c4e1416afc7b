use crate::error::{GeomError, Result};
use crate::geom::Point;
use crate::num::fd;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

pub type CoeffFn = Arc<dyn Fn(&Point) -> DMatrix<f64> + Send + Sync>;
pub type CoeffGradFn = Arc<dyn Fn(&Point) -> Vec<DMatrix<f64>> + Send + Sync>;
pub type CoeffHessFn = Arc<dyn Fn(&Point) -> Vec<Vec<DMatrix<f64>>> + Send + Sync>;
pub type DomainFn = Arc<dyn Fn(&Point) -> bool + Send + Sync>;

/// Christoffel symbols of the second kind; entry `i` is the matrix
/// `Γ^i_{jk}` over the lower index pair, symmetric in (j, k).
pub type Christoffel = Vec<DMatrix<f64>>;

/// Relative pivot threshold below which the coefficient matrix is treated
/// as singular.
const PIVOT_RATIO: f64 = 1e-12;

/// Invert a symmetric positive-definite matrix via its Cholesky
/// factorization, rejecting matrices whose smallest pivot is below
/// `PIVOT_RATIO` times the largest.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = m.clone().cholesky().ok_or(GeomError::SingularMetric)?;
    let l = chol.l();
    let mut min_d = f64::INFINITY;
    let mut max_d: f64 = 0.0;
    for i in 0..m.nrows() {
        let piv = l[(i, i)] * l[(i, i)];
        min_d = min_d.min(piv);
        max_d = max_d.max(piv);
    }
    if min_d < PIVOT_RATIO * max_d {
        return Err(GeomError::SingularMetric);
    }
    Ok(chol.inverse())
}

/// A Riemannian metric given by its coefficient matrix field `x ↦ a_ij(x)`.
///
/// Analytic first/second coordinate derivatives are optional; central
/// differences with Richardson extrapolation fill in whatever is missing.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    coeff: CoeffFn,
    grad: Option<CoeffGradFn>,
    hess: Option<CoeffHessFn>,
    domain: DomainFn,
}

impl MetricField {
    pub fn new(dim: usize, coeff: CoeffFn) -> Self {
        Self {
            dim,
            coeff,
            grad: None,
            hess: None,
            domain: Arc::new(|_| true),
        }
    }

    pub fn with_grad(mut self, grad: CoeffGradFn) -> Self {
        self.grad = Some(grad);
        self
    }

    pub fn with_hess(mut self, hess: CoeffHessFn) -> Self {
        self.hess = Some(hess);
        self
    }

    pub fn with_domain(mut self, domain: DomainFn) -> Self {
        self.domain = domain;
        self
    }

    /// Euclidean metric δ_ij.
    pub fn euclidean(dim: usize) -> Self {
        Self::constant(DMatrix::identity(dim, dim))
    }

    /// Constant-coefficient metric; derivatives vanish identically.
    pub fn constant(m: DMatrix<f64>) -> Self {
        let dim = m.nrows();
        assert_eq!(m.nrows(), m.ncols());
        let zero = DMatrix::zeros(dim, dim);
        let grad: Vec<DMatrix<f64>> = vec![zero.clone(); dim];
        let hess: Vec<Vec<DMatrix<f64>>> = vec![vec![zero; dim]; dim];
        Self::new(dim, Arc::new(move |_| m.clone()))
            .with_grad(Arc::new(move |_| grad.clone()))
            .with_hess(Arc::new(move |_| hess.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn in_domain(&self, x: &Point) -> bool {
        x.dim() == self.dim && (self.domain)(x)
    }

    pub fn domain_fn(&self) -> DomainFn {
        self.domain.clone()
    }

    fn check_domain(&self, x: &Point) -> Result<()> {
        if !self.in_domain(x) {
            return Err(GeomError::DomainViolation(format!(
                "point {:?} outside metric domain",
                x.coords().as_slice()
            )));
        }
        Ok(())
    }

    /// Coefficient matrix a_ij(x).
    pub fn coeffs(&self, x: &Point) -> Result<DMatrix<f64>> {
        self.check_domain(x)?;
        Ok((self.coeff)(x))
    }

    /// Inverse coefficient matrix a^{ij}(x); fails with `SingularMetric`
    /// when positive definiteness is lost within tolerance.
    pub fn inverse_at(&self, x: &Point) -> Result<DMatrix<f64>> {
        spd_inverse(&self.coeffs(x)?)
    }

    /// First coordinate derivatives; entry `k` is `∂a_ij/∂x^k`.
    pub fn coeff_grad(&self, x: &Point) -> Result<Vec<DMatrix<f64>>> {
        self.check_domain(x)?;
        if let Some(g) = &self.grad {
            return Ok(g(x));
        }
        let coeff = self.coeff.clone();
        let f = move |v: &DVector<f64>| coeff(&Point::from(v.clone()));
        let h = fd::step1(x.norm());
        Ok((0..self.dim)
            .map(|k| fd::partial_richardson(&f, x.coords(), k, h))
            .collect())
    }

    /// Second coordinate derivatives; entry `[k][l]` is `∂²a_ij/∂x^k∂x^l`.
    pub fn coeff_hess(&self, x: &Point) -> Result<Vec<Vec<DMatrix<f64>>>> {
        self.check_domain(x)?;
        if let Some(h) = &self.hess {
            return Ok(h(x));
        }
        if let Some(g) = &self.grad {
            // differentiate the analytic gradient
            let h1 = fd::step1(x.norm());
            let mut out = vec![vec![DMatrix::zeros(self.dim, self.dim); self.dim]; self.dim];
            for k in 0..self.dim {
                let g = g.clone();
                let f = move |v: &DVector<f64>| g(&Point::from(v.clone()))[k].clone();
                for l in 0..self.dim {
                    out[k][l] = fd::partial_richardson(&f, x.coords(), l, h1);
                }
            }
            return Ok(out);
        }
        let coeff = self.coeff.clone();
        let f = move |v: &DVector<f64>| coeff(&Point::from(v.clone()));
        let h2 = fd::step2(x.norm());
        Ok((0..self.dim)
            .map(|k| {
                (0..self.dim)
                    .map(|l| fd::second_partial(&f, x.coords(), k, l, h2))
                    .collect()
            })
            .collect())
    }
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("analytic_grad", &self.grad.is_some())
            .field("analytic_hess", &self.hess.is_some())
            .finish()
    }
}

/// Levi-Civita connection coefficients `Γ^i_{jk}` of the metric at `x`.
pub fn christoffel(metric: &MetricField, x: &Point) -> Result<Christoffel> {
    let n = metric.dim();
    let ainv = metric.inverse_at(x)?;
    let da = metric.coeff_grad(x)?;
    let mut gamma = vec![DMatrix::zeros(n, n); n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..=j {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += ainv[(i, l)] * (da[j][(l, k)] + da[k][(l, j)] - da[l][(j, k)]);
                }
                let val = 0.5 * acc;
                gamma[i][(j, k)] = val;
                gamma[i][(k, j)] = val;
            }
        }
    }
    Ok(gamma)
}
