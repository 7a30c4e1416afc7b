use crate::error::{GeomError, Result};
use crate::geom::{MetricField, Point};
use nalgebra::DMatrix;
use std::sync::Arc;

/// Chart of a space form of constant sectional curvature μ, carrying the
/// metric with coefficients `(2/(1 + μ|x|²))² δ_ij`. The chart degenerates
/// on `1 + μ|x|² ≤ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ConstCurvChart {
    mu: f64,
    dim: usize,
}

impl ConstCurvChart {
    pub fn new(mu: f64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(GeomError::DomainViolation(format!(
                "chart dimension must be ≥ 2, got {dim}"
            )));
        }
        if !mu.is_finite() {
            return Err(GeomError::DomainViolation("μ must be finite".into()));
        }
        Ok(Self { mu, dim })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn w(&self, x: &Point) -> f64 {
        1.0 + self.mu * x.norm_sq()
    }

    /// The conformal scale 2/(1 + μ|x|²).
    pub fn conformal_factor(&self, x: &Point) -> Result<f64> {
        let w = self.w(x);
        if w <= 0.0 {
            return Err(GeomError::DomainViolation(format!(
                "1 + μ|x|² = {w} ≤ 0 at |x|² = {}",
                x.norm_sq()
            )));
        }
        Ok(2.0 / w)
    }

    /// Metric coefficients `(2/(1 + μ|x|²))² δ_ij`.
    pub fn metric_coeffs(&self, x: &Point) -> Result<DMatrix<f64>> {
        let f = self.conformal_factor(x)?;
        Ok(DMatrix::identity(self.dim, self.dim) * (f * f))
    }

    /// The chart metric as a field with analytic first and second
    /// derivatives and domain `1 + μ|x|² > 0`.
    pub fn metric_field(&self) -> MetricField {
        let chart = *self;
        let n = self.dim;
        let coeff = Arc::new(move |x: &Point| chart.metric_coeffs(x).expect("in domain"));
        let mu = self.mu;
        // ∂_k (f²) = −16 μ x_k / w³ with f² = 4/w², w = 1 + μ|x|²
        let grad = Arc::new(move |x: &Point| {
            let w = 1.0 + mu * x.norm_sq();
            (0..n)
                .map(|k| DMatrix::identity(n, n) * (-16.0 * mu * x.coords()[k] / w.powi(3)))
                .collect::<Vec<_>>()
        });
        // ∂_l ∂_k (f²) = −16 μ (δ_kl / w³ − 6 μ x_k x_l / w⁴)
        let hess = Arc::new(move |x: &Point| {
            let w = 1.0 + mu * x.norm_sq();
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|l| {
                            let dkl = if k == l { 1.0 } else { 0.0 };
                            let v = -16.0 * mu
                                * (dkl / w.powi(3)
                                    - 6.0 * mu * x.coords()[k] * x.coords()[l] / w.powi(4));
                            DMatrix::identity(n, n) * v
                        })
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        });
        let domain = Arc::new(move |x: &Point| 1.0 + mu * x.norm_sq() > 0.0);
        MetricField::new(n, coeff)
            .with_grad(grad)
            .with_hess(hess)
            .with_domain(domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_chart_is_four_delta() {
        let chart = ConstCurvChart::new(0.0, 3).unwrap();
        let a = chart
            .metric_coeffs(&Point::from_slice(&[0.7, -0.3, 2.0]).unwrap())
            .unwrap();
        assert_eq!(a, DMatrix::identity(3, 3) * 4.0);
    }

    #[test]
    fn unit_curvature_at_origin() {
        let chart = ConstCurvChart::new(1.0, 2).unwrap();
        let a = chart.metric_coeffs(&Point::origin(2)).unwrap();
        assert_eq!(a, DMatrix::identity(2, 2) * 4.0);
    }

    #[test]
    fn negative_curvature_coefficient_value() {
        // μ = −1/4, |x|² = 1 → (2/(3/4))² = 64/9
        let chart = ConstCurvChart::new(-0.25, 2).unwrap();
        let a = chart
            .metric_coeffs(&Point::from_slice(&[1.0, 0.0]).unwrap())
            .unwrap();
        assert_relative_eq!(a[(0, 0)], 64.0 / 9.0, epsilon = 1e-14);
        assert_relative_eq!(a[(1, 1)], 64.0 / 9.0, epsilon = 1e-14);
        assert_eq!(a[(0, 1)], 0.0);
    }

    #[test]
    fn domain_violation_outside_hyperbolic_ball() {
        let chart = ConstCurvChart::new(-1.0, 2).unwrap();
        let err = chart.metric_coeffs(&Point::from_slice(&[1.0, 0.5]).unwrap());
        assert!(matches!(err, Err(GeomError::DomainViolation(_))));
    }

    #[test]
    fn analytic_derivatives_match_finite_differences_with_halving() {
        use crate::num::fd;
        use nalgebra::DVector;
        let chart = ConstCurvChart::new(-0.25, 2).unwrap();
        let m = chart.metric_field();
        let x = Point::from_slice(&[0.3, -0.2]).unwrap();
        let analytic = m.coeff_grad(&x).unwrap();
        let f = |v: &DVector<f64>| chart.metric_coeffs(&Point::from(v.clone())).unwrap();
        for k in 0..2 {
            let e_h: f64 = (fd::partial(&f, x.coords(), k, 1e-3) - &analytic[k]).amax();
            let e_h2: f64 = (fd::partial(&f, x.coords(), k, 5e-4) - &analytic[k]).amax();
            let ratio = e_h / e_h2;
            assert!(
                (3.0..5.0).contains(&ratio),
                "expected O(ε²) halving ratio ≈ 4, got {ratio}"
            );
        }
    }
}
