//! Conformal vector field verification: the tangent-bundle derivation X_V,
//! residuals of the fundamental scaling identity `X_V(F²) = −4cF²` and of
//! the characterizing PDE system
//!
//! `V_{i;j} + V_{j;i} = −4c a_ij`,  `V^j b_{i;j} + b^j V_{j;i} = −2c b_i`,
//!
//! conformal-factor extraction, Lie brackets, sample-based classification
//! and the proportionality check `c_i ∥ b_i` for closed β.

use crate::alphabeta::AlphaBetaMetric;
use crate::error::{GeomError, Result};
use crate::geom::{covdiff_oneform, r_s_decompose, MetricField, OneFormField, Point, VectorFieldGeom};
use crate::num::{fd, halton::BallSampler, stats};
use nalgebra::{DMatrix, DVector};

/// Scalar function of the chart point, used for conformal factors.
pub type ScalarField<'a> = &'a (dyn Fn(&Point) -> f64 + Sync);

/// Apply the complete lift `X_V = V^i ∂/∂x^i + y^i (∂V^j/∂x^i) ∂/∂y^j`
/// to a scalar function G(x, y), using finite differences for the
/// derivatives of G.
pub fn xv_apply(
    v: &VectorFieldGeom,
    g: &dyn Fn(&Point, &DVector<f64>) -> f64,
    x: &Point,
    y: &DVector<f64>,
) -> f64 {
    let n = x.dim();
    let vx = v.eval(x);
    let jac = v.jacobian(x);
    let hx = fd::step1(x.norm());
    let hy = fd::step1(y.norm());
    let gx = |coords: &DVector<f64>| g(&Point::from(coords.clone()), y);
    let gy = |yy: &DVector<f64>| g(x, yy);
    let mut out = 0.0;
    for i in 0..n {
        out += vx[i] * fd::partial_richardson(&gx, x.coords(), i, hx);
    }
    // (y^i ∂V^j/∂x^i) ∂G/∂y^j
    for j in 0..n {
        let mut coeff = 0.0;
        for i in 0..n {
            coeff += y[i] * jac[(j, i)];
        }
        out += coeff * fd::partial_richardson(&gy, y, j, hy);
    }
    out
}

/// Residual of the fundamental identity: `X_V(F²) + 4 c(x) F²`.
/// Reports normalize this by F².
pub fn residual_fundamental(
    f: &AlphaBetaMetric,
    v: &VectorFieldGeom,
    c: ScalarField,
    x: &Point,
    y: &DVector<f64>,
) -> Result<f64> {
    let f_val = f.eval(x, y)?;
    let g = |p: &Point, yy: &DVector<f64>| match f.eval(p, yy) {
        Ok(val) => val * val,
        Err(_) => f64::NAN,
    };
    Ok(xv_apply(v, &g, x, y) + 4.0 * c(x) * f_val * f_val)
}

/// The PDE residuals with attached magnitude scales for normalization.
#[derive(Debug, Clone)]
pub struct PdeResiduals {
    /// `R1_ij = V_{i;j} + V_{j;i} + 4c a_ij`.
    pub r1: DMatrix<f64>,
    /// `R2_i = V^j b_{i;j} + b^j V_{j;i} + 2c b_i`.
    pub r2: DVector<f64>,
    /// Magnitude of the terms entering R1.
    pub r1_scale: f64,
    /// Magnitude of the terms entering R2.
    pub r2_scale: f64,
}

impl PdeResiduals {
    pub fn r1_normalized(&self) -> f64 {
        self.r1.norm() / (1.0 + self.r1_scale)
    }

    pub fn r2_normalized(&self) -> f64 {
        self.r2.norm() / (1.0 + self.r2_scale)
    }
}

/// Covariant derivative matrix of the lowered field, `V_{i;j}` with
/// `V_i = a_ik V^k`.
fn lowered_covderiv(
    metric: &MetricField,
    v: &VectorFieldGeom,
    x: &Point,
) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let n = metric.dim();
    let a = metric.coeffs(x)?;
    let da = metric.coeff_grad(x)?;
    let gamma = crate::geom::christoffel(metric, x)?;
    let vx = v.eval(x);
    let jac = v.jacobian(x);
    let v_low = &a * &vx;
    // ∂_j V_i = (∂_j a_ik) V^k + a_ik ∂_j V^k
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut val = 0.0;
            for k in 0..n {
                val += da[j][(i, k)] * vx[k] + a[(i, k)] * jac[(k, j)];
                val -= gamma[k][(i, j)] * v_low[k];
            }
            cov[(i, j)] = val;
        }
    }
    Ok((cov, vx, a))
}

/// Residuals of the two characterizing equations at `x`, with the supplied
/// conformal factor value c = c(x).
pub fn residual_pde(
    metric: &MetricField,
    beta: &OneFormField,
    v: &VectorFieldGeom,
    c: f64,
    x: &Point,
) -> Result<PdeResiduals> {
    let n = metric.dim();
    let (vcov, vx, a) = lowered_covderiv(metric, v, x)?;
    let r1 = &vcov + vcov.transpose() + &a * (4.0 * c);
    let r1_scale = 2.0 * vcov.norm() + 4.0 * c.abs() * a.norm();

    let bcov = covdiff_oneform(metric, beta, x)?;
    let b = beta.coeffs(x);
    let ainv = metric.inverse_at(x)?;
    let b_up = &ainv * &b;
    let mut r2 = DVector::zeros(n);
    for i in 0..n {
        let mut val = 2.0 * c * b[i];
        for j in 0..n {
            val += vx[j] * bcov[(i, j)] + b_up[j] * vcov[(j, i)];
        }
        r2[i] = val;
    }
    let r2_scale =
        vx.norm() * bcov.norm() + b_up.norm() * vcov.norm() + 2.0 * c.abs() * b.norm();
    Ok(PdeResiduals {
        r1,
        r2,
        r1_scale,
        r2_scale,
    })
}

/// Residuals of the deformed system — the same equations taken with
/// respect to (h, ρ) in place of (α, β).
pub fn residual_deformed(
    h: &MetricField,
    rho: &OneFormField,
    v: &VectorFieldGeom,
    c: f64,
    x: &Point,
) -> Result<PdeResiduals> {
    residual_pde(h, rho, v, c, x)
}

/// The unique c making the trace of `V_{i;j} + V_{j;i} + 4c a_ij` vanish:
/// `c = −a^{ij}(V_{i;j} + V_{j;i}) / (4n)`.
pub fn extract_factor(metric: &MetricField, v: &VectorFieldGeom, x: &Point) -> Result<f64> {
    let n = metric.dim();
    let (vcov, _, _) = lowered_covderiv(metric, v, x)?;
    let ainv = metric.inverse_at(x)?;
    let tr = (&ainv * (&vcov + vcov.transpose())).trace();
    Ok(-tr / (4.0 * n as f64))
}

/// Lie bracket `[V, W]^i = V^j ∂_j W^i − W^j ∂_j V^i` at a point.
pub fn lie_bracket(v: &VectorFieldGeom, w: &VectorFieldGeom, x: &Point) -> DVector<f64> {
    let vx = v.eval(x);
    let wx = w.eval(x);
    let jv = v.jacobian(x);
    let jw = w.jacobian(x);
    &jw * &vx - &jv * &wx
}

/// Lie bracket as a field. When both inputs carry analytic second
/// derivatives, the bracket's Jacobian is assembled analytically.
pub fn lie_bracket_field(v: &VectorFieldGeom, w: &VectorFieldGeom) -> VectorFieldGeom {
    let n = v.dim();
    let (v0, w0) = (v.clone(), w.clone());
    let comp = std::sync::Arc::new(move |x: &Point| lie_bracket(&v0, &w0, x));
    let field = VectorFieldGeom::new(n, comp);
    if v.has_analytic_hessian() && w.has_analytic_hessian() {
        let (v1, w1) = (v.clone(), w.clone());
        let jac = std::sync::Arc::new(move |x: &Point| {
            let vx = v1.eval(x);
            let wx = w1.eval(x);
            let jv = v1.jacobian(x);
            let jw = w1.jacobian(x);
            let hv = v1.hessian(x);
            let hw = w1.hessian(x);
            DMatrix::from_fn(n, n, |i, k| {
                let mut val = 0.0;
                for j in 0..n {
                    val += jv[(j, k)] * jw[(i, j)] + vx[j] * hw[i][(j, k)];
                    val -= jw[(j, k)] * jv[(i, j)] + wx[j] * hv[i][(j, k)];
                }
                val
            })
        });
        field.with_jacobian(jac)
    } else {
        field
    }
}

/// Classification outcome of a candidate conformal field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    None,
    Conformal,
    Homothetic,
    Killing,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::None => "none",
            Classification::Conformal => "conformal",
            Classification::Homothetic => "homothetic",
            Classification::Killing => "killing",
        };
        f.write_str(s)
    }
}

/// Tolerances of `classify`.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyTol {
    /// Normalized residual threshold for conformality.
    pub residual: f64,
    /// Factor-constancy threshold (homothety / Killing).
    pub factor: f64,
}

impl Default for ClassifyTol {
    fn default() -> Self {
        Self {
            residual: 1e-6,
            factor: 1e-7,
        }
    }
}

/// Per-sample residuals, extracted factor samples and the classification.
#[derive(Debug, Clone)]
pub struct ConformalReport {
    /// Normalized residual of the first PDE per sample.
    pub r1_samples: Vec<f64>,
    /// Normalized residual of the second PDE per sample.
    pub r2_samples: Vec<f64>,
    /// Normalized fundamental residual X_V(F²) + 4cF² per sample.
    pub fundamental_samples: Vec<f64>,
    /// Extracted conformal factor per sample.
    pub factor_samples: Vec<f64>,
    pub r1_max: f64,
    pub r2_max: f64,
    pub fundamental_max: f64,
    pub factor_mean: f64,
    pub factor_stddev: f64,
    pub factor_max_abs: f64,
    pub classification: Classification,
    pub tol: ClassifyTol,
}

/// Number of tangent directions per point for the fundamental residual.
const FUNDAMENTAL_DIRECTIONS: usize = 3;

/// Extract c at each sample, evaluate both PDE residuals with it plus the
/// fundamental residual in a few tangent directions, and classify.
///
/// The candidate's own factor is never consumed: c is always re-extracted
/// from the trace of the first equation.
pub fn classify(
    metric: &MetricField,
    beta: &OneFormField,
    phi: &crate::alphabeta::PhiFunction,
    v: &VectorFieldGeom,
    samples: &[Point],
    tol: ClassifyTol,
) -> Result<ConformalReport> {
    phi.riemannian_guard()?;
    let f = AlphaBetaMetric::new(metric.clone(), beta.clone(), phi.clone())?;
    let n = metric.dim();
    let dirs = BallSampler::new(n, 1.0, 17).pairs(FUNDAMENTAL_DIRECTIONS);
    let mut r1_samples = Vec::with_capacity(samples.len());
    let mut r2_samples = Vec::with_capacity(samples.len());
    let mut fundamental_samples = Vec::with_capacity(samples.len());
    let mut factor_samples = Vec::with_capacity(samples.len());
    for x in samples {
        let c = extract_factor(metric, v, x)?;
        let res = residual_pde(metric, beta, v, c, x)?;
        r1_samples.push(res.r1_normalized());
        r2_samples.push(res.r2_normalized());
        let mut worst = 0.0f64;
        for (_, y) in &dirs {
            let f_val = f.eval(x, y)?;
            let raw = residual_fundamental(&f, v, &|_| c, x, y)?;
            worst = worst.max((raw / (f_val * f_val)).abs());
        }
        fundamental_samples.push(worst);
        factor_samples.push(c);
    }
    let r1_max = stats::max_abs(&r1_samples);
    let r2_max = stats::max_abs(&r2_samples);
    let fundamental_max = stats::max_abs(&fundamental_samples);
    let factor_mean = stats::mean(&factor_samples);
    let factor_stddev = stats::stddev(&factor_samples);
    let factor_max_abs = stats::max_abs(&factor_samples);
    let conformal = r1_max <= tol.residual && r2_max <= tol.residual && fundamental_max <= tol.residual;
    let homothetic = conformal && factor_stddev <= tol.factor * (1.0 + factor_mean.abs());
    let killing = homothetic && factor_max_abs <= tol.factor;
    let classification = if killing {
        Classification::Killing
    } else if homothetic {
        Classification::Homothetic
    } else if conformal {
        Classification::Conformal
    } else {
        Classification::None
    };
    Ok(ConformalReport {
        r1_samples,
        r2_samples,
        fundamental_samples,
        factor_samples,
        r1_max,
        r2_max,
        fundamental_max,
        factor_mean,
        factor_stddev,
        factor_max_abs,
        classification,
        tol,
    })
}

/// For closed β: the maximum over samples and index pairs of
/// `|c_i b_j − c_j b_i|`, with c_i by finite differences. Fails with
/// `NotClosed` when β has a nonvanishing antisymmetric part.
pub fn lemma71_check(
    metric: &MetricField,
    beta: &OneFormField,
    c: ScalarField,
    samples: &[Point],
) -> Result<f64> {
    let mut max_skew: f64 = 0.0;
    for x in samples {
        let (_, s, _) = r_s_decompose(metric, beta, x)?;
        max_skew = max_skew.max(s.amax());
    }
    if max_skew > 1e-6 {
        return Err(GeomError::NotClosed(max_skew));
    }
    let n = metric.dim();
    let mut worst: f64 = 0.0;
    for x in samples {
        let b = beta.coeffs(x);
        let grad_c = fd::gradient(&|v: &DVector<f64>| c(&Point::from(v.clone())), x.coords());
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((grad_c[i] * b[j] - grad_c[j] * b[i]).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabeta::PhiFunction;
    use approx::assert_relative_eq;
    use nalgebra::dvector;
    use std::sync::Arc;

    fn euclidean_norm_metric() -> AlphaBetaMetric {
        AlphaBetaMetric::randers(MetricField::euclidean(2), OneFormField::zero(2)).unwrap()
    }

    #[test]
    fn xv_apply_on_zero_field_vanishes() {
        let v = VectorFieldGeom::zero(2);
        let g = |x: &Point, y: &DVector<f64>| x.coords()[0] * y[1];
        assert_eq!(
            xv_apply(&v, &g, &Point::from_slice(&[0.3, 0.4]).unwrap(), &dvector![1.0, 2.0]),
            0.0
        );
    }

    #[test]
    fn xv_apply_dilation_on_norm() {
        // G = |y|, V = −2x: X_V(G) = −2|y| (c = 1 in X_V(F) = −2cF)
        let v = VectorFieldGeom::dilation(1.0, 2);
        let g = |_x: &Point, y: &DVector<f64>| y.norm();
        let x = Point::from_slice(&[0.5, -0.3]).unwrap();
        let y = dvector![0.8, 0.6];
        assert_relative_eq!(xv_apply(&v, &g, &x, &y), -2.0 * y.norm(), epsilon = 1e-9);
    }

    #[test]
    fn xv_apply_is_linear_in_g() {
        let v = VectorFieldGeom::linear(DMatrix::from_row_slice(2, 2, &[0.1, 1.0, -1.0, 0.3]));
        let g1 = |x: &Point, y: &DVector<f64>| x.coords()[0] * y[0];
        let g2 = |x: &Point, y: &DVector<f64>| x.coords()[1].sin() * y[1];
        let gsum = |x: &Point, y: &DVector<f64>| g1(x, y) + g2(x, y);
        let x = Point::from_slice(&[0.4, 0.2]).unwrap();
        let y = dvector![1.0, -0.5];
        assert_relative_eq!(
            xv_apply(&v, &gsum, &x, &y),
            xv_apply(&v, &g1, &x, &y) + xv_apply(&v, &g2, &x, &y),
            epsilon = 1e-9
        );
    }

    #[test]
    fn fundamental_residual_homothety_and_controls() {
        let f = euclidean_norm_metric();
        let x = Point::from_slice(&[0.3, -0.2]).unwrap();
        let y = dvector![0.6, 0.8];
        // V = −2x with c ≡ 1 is exact
        let v = VectorFieldGeom::dilation(1.0, 2);
        let res = residual_fundamental(&f, &v, &|_| 1.0, &x, &y).unwrap();
        assert!(res.abs() < 1e-8, "residual {res}");
        // rotation with c ≡ 0 is exact
        let rot = VectorFieldGeom::linear(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let res = residual_fundamental(&f, &rot, &|_| 0.0, &x, &y).unwrap();
        assert!(res.abs() < 1e-8, "residual {res}");
        // the residual is affine in c: c ≡ 2 leaves 4(2−1)F²
        let f2 = f.eval(&x, &y).unwrap().powi(2);
        let res = residual_fundamental(&f, &v, &|_| 2.0, &x, &y).unwrap();
        assert_relative_eq!(res, 4.0 * f2, epsilon = 1e-7);
    }

    #[test]
    fn pde_residual_hand_example() {
        // Euclidean δ, constant b, V = −2x, c ≡ 1: R1 = R2 = 0
        let m = MetricField::euclidean(3);
        let beta = OneFormField::constant(dvector![0.2, -0.4, 0.1]);
        let v = VectorFieldGeom::dilation(1.0, 3);
        let x = Point::from_slice(&[0.3, 0.1, -0.2]).unwrap();
        let res = residual_pde(&m, &beta, &v, 1.0, &x).unwrap();
        assert!(res.r1.norm() < 1e-9);
        assert!(res.r2.norm() < 1e-9);
    }

    #[test]
    fn pde_residual_generic_negative_control() {
        let m = MetricField::euclidean(2);
        let beta = OneFormField::constant(dvector![0.3, 0.0]);
        let v = VectorFieldGeom::new(
            2,
            Arc::new(|x: &Point| dvector![x.coords()[0] * x.coords()[0], x.coords()[1]]),
        );
        let x = Point::from_slice(&[0.4, 0.3]).unwrap();
        let res = residual_pde(&m, &beta, &v, 0.0, &x).unwrap();
        assert!(res.r1_normalized() >= 1e-2);
    }

    #[test]
    fn extract_factor_examples() {
        let m = MetricField::euclidean(3);
        let x = Point::from_slice(&[0.2, -0.1, 0.4]).unwrap();
        // V = −2τx → c = τ
        let v = VectorFieldGeom::dilation(0.7, 3);
        assert_relative_eq!(extract_factor(&m, &v, &x).unwrap(), 0.7, epsilon = 1e-12);
        // Killing rotation → 0
        let mut q = DMatrix::zeros(3, 3);
        q[(0, 1)] = 1.0;
        q[(1, 0)] = -1.0;
        let rot = VectorFieldGeom::linear(q);
        assert_relative_eq!(extract_factor(&m, &rot, &x).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lie_bracket_examples() {
        let x = Point::from_slice(&[0.3, -0.5]).unwrap();
        let v = VectorFieldGeom::dilation(1.0, 2); // −2x
        assert_eq!(lie_bracket(&v, &v, &x).amax(), 0.0);
        let gamma = VectorFieldGeom::constant(dvector![0.7, -0.2]);
        // [−2x, γ] = 2γ
        assert_relative_eq!(
            lie_bracket(&v, &gamma, &x),
            dvector![1.4, -0.4],
            epsilon = 1e-12
        );
        // two rotations: [Q₁x, Q₂x] = (Q₂Q₁ − Q₁Q₂)x
        let q1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let q2 = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]);
        let r1 = VectorFieldGeom::linear(q1.clone());
        let r2 = VectorFieldGeom::linear(q2.clone());
        let expected = (&q2 * &q1 - &q1 * &q2) * x.coords();
        assert_relative_eq!(lie_bracket(&r1, &r2, &x), expected, epsilon = 1e-12);
    }

    #[test]
    fn classify_dilation_as_homothetic() {
        let m = MetricField::euclidean(2);
        let beta = OneFormField::constant(dvector![0.3, 0.0]);
        let v = VectorFieldGeom::dilation(1.0, 2);
        let samples: Vec<Point> = BallSampler::new(2, 0.5, 3)
            .points(20)
            .into_iter()
            .map(Point::from)
            .collect();
        let rep = classify(
            &m,
            &beta,
            &PhiFunction::randers(),
            &v,
            &samples,
            ClassifyTol::default(),
        )
        .unwrap();
        assert_eq!(rep.classification, Classification::Homothetic);
        assert_relative_eq!(rep.factor_mean, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn classify_rejects_riemannian_phi() {
        let m = MetricField::euclidean(2);
        let beta = OneFormField::constant(dvector![0.3, 0.0]);
        let v = VectorFieldGeom::dilation(1.0, 2);
        let riem = PhiFunction::douglas_ode(1.0, 0.0, 0.0, 0.0, 0.5).unwrap();
        let err = classify(&m, &beta, &riem, &v, &[Point::origin(2)], ClassifyTol::default());
        assert!(err.is_err());
    }

    #[test]
    fn lemma71_examples() {
        let m = MetricField::euclidean(2);
        let samples: Vec<Point> = [[0.2, 0.3], [-0.4, 0.1]]
            .iter()
            .map(|c| Point::from_slice(c).unwrap())
            .collect();
        // constant c → 0
        let b = OneFormField::constant(dvector![0.0, 1.0]);
        let worst = lemma71_check(&m, &b, &|_| 3.0, &samples).unwrap();
        assert!(worst < 1e-9);
        // c = x¹ with b = dx²: |c₁b₂ − c₂b₁| = 1
        let worst = lemma71_check(&m, &b, &|x| x.coords()[0], &samples).unwrap();
        assert_relative_eq!(worst, 1.0, epsilon = 1e-8);
        // non-closed β is rejected
        let shear = OneFormField::new(2, Arc::new(|x: &Point| dvector![x.coords()[1], 0.0]));
        assert!(matches!(
            lemma71_check(&m, &shear, &|_| 0.0, &samples),
            Err(GeomError::NotClosed(_))
        ));
    }
}
