//! The (α, β) ↦ (h, ρ) deformation `h² = u(b²)α² + v(b²)β²`, `ρ = w(b²)β`:
//! forward map with chain-rule derivatives, generic pointwise inverse by
//! root finding in t = b², the named deformation recipes, and
//! conformal/closed/homothetic testing of 1-forms.

use crate::error::{GeomError, Result};
use crate::geom::{covdiff_oneform, norm_sq, MetricField, OneFormField, Point};
use crate::num::{quad, roots, stats};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function of t = b² together with its derivative.
#[derive(Clone)]
pub struct DeformationScalar {
    f: ScalarFn,
    df: ScalarFn,
}

impl DeformationScalar {
    pub fn new(f: ScalarFn, df: ScalarFn) -> Self {
        Self { f, df }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Arc::new(move |_| c), Arc::new(|_| 0.0))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.df)(t)
    }
}

/// The triple (u, v, w) of the deformation, with u ≠ 0 and w ≠ 0 on its
/// validity interval.
#[derive(Clone)]
pub struct DeformationTriple {
    u: DeformationScalar,
    v: DeformationScalar,
    w: DeformationScalar,
    t_min: f64,
    t_max: f64,
    label: String,
}

impl std::fmt::Debug for DeformationTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeformationTriple")
            .field("label", &self.label)
            .field("interval", &(self.t_min, self.t_max))
            .finish()
    }
}

impl DeformationTriple {
    pub fn new(
        u: DeformationScalar,
        v: DeformationScalar,
        w: DeformationScalar,
        t_min: f64,
        t_max: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(t_min < t_max) {
            return Err(GeomError::InvalidFamilyParams(format!(
                "empty validity interval [{t_min}, {t_max}]"
            )));
        }
        let out = Self {
            u,
            v,
            w,
            t_min,
            t_max,
            label: label.into(),
        };
        // u and w must not vanish on the interval
        let hi = if t_max.is_finite() { t_max } else { t_min + 4.0 };
        for i in 0..=64 {
            let t = t_min + (hi - t_min) * i as f64 / 64.0;
            if out.u(t) == 0.0 || out.w(t) == 0.0 {
                return Err(GeomError::InvalidFamilyParams(format!(
                    "u or w vanishes at t = {t} inside the validity interval"
                )));
            }
        }
        Ok(out)
    }

    pub fn u(&self, t: f64) -> f64 {
        self.u.eval(t)
    }

    pub fn v(&self, t: f64) -> f64 {
        self.v.eval(t)
    }

    pub fn w(&self, t: f64) -> f64 {
        self.w.eval(t)
    }

    pub fn du(&self, t: f64) -> f64 {
        self.u.deriv(t)
    }

    pub fn dv(&self, t: f64) -> f64 {
        self.v.deriv(t)
    }

    pub fn dw(&self, t: f64) -> f64 {
        self.w.deriv(t)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_min && t <= self.t_max
    }

    /// Identity deformation (u, v, w) = (1, 0, 1); (h, ρ) = (α, β) exactly.
    pub fn identity() -> Self {
        Self::new(
            DeformationScalar::constant(1.0),
            DeformationScalar::constant(0.0),
            DeformationScalar::constant(1.0),
            0.0,
            f64::INFINITY,
            "identity",
        )
        .expect("identity triple is valid")
    }

    /// Isotropic-S Randers-type recipe u = k₂w, v = (k₁ − (k₁+k₂)/t)w with
    /// a caller-supplied w; valid on [1e−3, 1).
    pub fn iso_s_randers(k1: f64, k2: f64, w: DeformationScalar) -> Result<Self> {
        if k2 == 0.0 {
            return Err(GeomError::InvalidFamilyParams(
                "k₂ = 0 makes u ≡ 0".into(),
            ));
        }
        let wf = w.clone();
        let u = DeformationScalar::new(
            Arc::new(move |t| k2 * wf.eval(t)),
            {
                let wf = w.clone();
                Arc::new(move |t| k2 * wf.deriv(t))
            },
        );
        let wf = w.clone();
        let wf2 = w.clone();
        let v = DeformationScalar::new(
            Arc::new(move |t| (k1 - (k1 + k2) / t) * wf.eval(t)),
            Arc::new(move |t| {
                (k1 + k2) / (t * t) * wf2.eval(t) + (k1 - (k1 + k2) / t) * wf2.deriv(t)
            }),
        );
        Self::new(u, v, w, 1e-3, 1.0 - 1e-9, format!("isoS-randers(k1={k1},k2={k2})"))
    }

    /// Navigation data (u, v, w) = (1 − t, t − 1, t − 1); the Randers case
    /// k₁ = 1, k₂ = −1, w = t − 1 of the isotropic-S recipe.
    pub fn navigation() -> Self {
        let w = DeformationScalar::new(Arc::new(|t| t - 1.0), Arc::new(|_| 1.0));
        let mut triple = Self::iso_s_randers(1.0, -1.0, w).expect("navigation data is valid");
        triple.t_min = 1e-9;
        triple.label = "navigation".into();
        triple
    }

    /// Two-dimensional isotropic-S recipe u = 1, v = 0,
    /// w = (1 + k₁t)^{−3/4}(1 + k₂t)^{−1/4}.
    pub fn iso_s_2d(k1: f64, k2: f64) -> Result<Self> {
        let mut t_max: f64 = 4.0;
        for k in [k1, k2] {
            if k < 0.0 {
                t_max = t_max.min((1.0 - 1e-6) / -k * (1.0 - 1e-9));
            }
        }
        let wf = move |t: f64| (1.0 + k1 * t).powf(-0.75) * (1.0 + k2 * t).powf(-0.25);
        let w = DeformationScalar::new(
            Arc::new(wf),
            Arc::new(move |t| {
                wf(t) * (-0.75 * k1 / (1.0 + k1 * t) - 0.25 * k2 / (1.0 + k2 * t))
            }),
        );
        Self::new(
            DeformationScalar::constant(1.0),
            DeformationScalar::constant(0.0),
            w,
            0.0,
            t_max,
            format!("isoS-2d(k1={k1},k2={k2})"),
        )
    }

    /// Douglas recipe for n ≥ 3: u = 1, v = 0,
    /// w = exp(−∫₀ᵗ ½(k₃+k₂τ)/(1+(k₁+k₃)τ+k₂τ²) dτ).
    pub fn douglas_n3(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        // keep the rational integrand's denominator positive on the interval
        let mut t_max: f64 = 4.0;
        if k2 == 0.0 {
            if k1 + k3 < 0.0 {
                t_max = t_max.min(-1.0 / (k1 + k3) * (1.0 - 1e-9));
            }
        } else {
            let disc = (k1 + k3) * (k1 + k3) - 4.0 * k2;
            if disc >= 0.0 {
                for z in [
                    (-(k1 + k3) - disc.sqrt()) / (2.0 * k2),
                    (-(k1 + k3) + disc.sqrt()) / (2.0 * k2),
                ] {
                    if z > 0.0 {
                        t_max = t_max.min(z * (1.0 - 1e-9));
                    }
                }
            }
        }
        let q = move |t: f64| 0.5 * (k3 + k2 * t) / (1.0 + (k1 + k3) * t + k2 * t * t);
        let wf = move |t: f64| (-quad::integrate(&q, 0.0, t, 1e-13)).exp();
        let w = DeformationScalar::new(Arc::new(wf), Arc::new(move |t| -q(t) * wf(t)));
        Self::new(
            DeformationScalar::constant(1.0),
            DeformationScalar::constant(0.0),
            w,
            0.0,
            t_max,
            format!("douglas-n3(k1={k1},k2={k2},k3={k3})"),
        )
    }

    /// Two-dimensional Douglas recipe for the metric type F₀^± = α ± β²/α:
    /// u = (1 ∓ t)³/(1 ± 2t)^{3/2}, w = 1, and the bracketed v whose t → 0
    /// singularity is removable.
    pub fn douglas_2d(sign: crate::alphabeta::Sign) -> Result<Self> {
        let sg = sign.value();
        let t_max = if sg > 0.0 { 1.0 - 1e-9 } else { 0.5 - 1e-9 };
        let u = DeformationScalar::new(
            Arc::new(move |t| (1.0 - sg * t).powi(3) / (1.0 + 2.0 * sg * t).powf(1.5)),
            Arc::new(move |t| {
                -3.0 * sg * (1.0 - sg * t).powi(2) * (2.0 + sg * t)
                    / (1.0 + 2.0 * sg * t).powf(2.5)
            }),
        );
        // below t = 1e−4 the literal bracket loses digits; use the exact
        // factored limit form 9σ(1 + σt + t²)/(1 + 2σt)^{3/2}
        let v_fn = move |t: f64| {
            if t.abs() < 1e-4 {
                9.0 * sg * (1.0 + sg * t + t * t) / (1.0 + 2.0 * sg * t).powf(1.5)
            } else {
                let a = (1.0 + 2.0 * sg * t).powf(1.5);
                9.0 / (8.0 * t) * (a - (1.0 - 2.0 * sg * t + 4.0 * t * t) / a)
            }
        };
        let v = DeformationScalar::new(
            Arc::new(v_fn),
            Arc::new(move |t| {
                9.0 * (-2.0 + sg * t + t * t) / (1.0 + 2.0 * sg * t).powf(2.5)
            }),
        );
        Self::new(
            u,
            v,
            DeformationScalar::constant(1.0),
            0.0,
            t_max,
            format!("douglas-2d({})", if sg > 0.0 { "+" } else { "-" }),
        )
    }
}

/// Deformed coefficients (h_ij, p_i) at a point, with precise failures:
/// `DomainViolation` when b² leaves the validity interval and
/// `NotPositiveDefinite` when u ≤ 0 or u + v·b² ≤ 0.
pub fn deformed_coeffs(
    metric: &MetricField,
    beta: &OneFormField,
    triple: &DeformationTriple,
    x: &Point,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let a = metric.coeffs(x)?;
    let b = beta.coeffs(x);
    let t = norm_sq(metric, beta, x)?;
    if !triple.contains(t) {
        return Err(GeomError::DomainViolation(format!(
            "b² = {t} outside the triple validity interval {:?}",
            triple.interval()
        )));
    }
    let (u, v, w) = (triple.u(t), triple.v(t), triple.w(t));
    if u <= 0.0 || u + v * t <= 0.0 {
        return Err(GeomError::NotPositiveDefinite {
            u,
            u_plus_vt: u + v * t,
        });
    }
    let h = &a * u + (&b * b.transpose()) * v;
    let p = &b * w;
    Ok((h, p))
}

/// The deformed pair as fields, with first derivatives carried through the
/// chain rule in t = b²(x).
#[derive(Debug, Clone)]
pub struct DeformedPair {
    pub h: MetricField,
    pub rho: OneFormField,
}

/// Gradient of t = b²(x) = a^{ij} b_i b_j.
fn norm_sq_grad(metric: &MetricField, beta: &OneFormField, x: &Point) -> Result<DVector<f64>> {
    let n = metric.dim();
    let ainv = metric.inverse_at(x)?;
    let da = metric.coeff_grad(x)?;
    let b = beta.coeffs(x);
    let db = beta.coeff_grad(x);
    let b_up = &ainv * &b;
    Ok(DVector::from_fn(n, |k, _| {
        let quad_term = -(&da[k] * &b_up).dot(&b_up);
        let lin_term = 2.0 * db.column(k).dot(&b_up);
        quad_term + lin_term
    }))
}

/// Forward deformation producing (h, ρ) as evaluable fields.
pub fn deform_forward(
    metric: &MetricField,
    beta: &OneFormField,
    triple: &DeformationTriple,
) -> DeformedPair {
    let n = metric.dim();
    let (m0, b0, t0) = (metric.clone(), beta.clone(), triple.clone());
    let domain = Arc::new(move |x: &Point| {
        deformed_coeffs(&m0, &b0, &t0, x).is_ok()
    });

    let (m1, b1, t1) = (metric.clone(), beta.clone(), triple.clone());
    let h_coeff = Arc::new(move |x: &Point| {
        deformed_coeffs(&m1, &b1, &t1, x)
            .expect("deformed metric evaluated inside its domain")
            .0
    });
    let (m2, b2, t2) = (metric.clone(), beta.clone(), triple.clone());
    let h_grad = Arc::new(move |x: &Point| {
        let a = m2.coeffs(x).expect("in domain");
        let da = m2.coeff_grad(x).expect("in domain");
        let b = b2.coeffs(x);
        let db = b2.coeff_grad(x);
        let t = norm_sq(&m2, &b2, x).expect("in domain");
        let dt = norm_sq_grad(&m2, &b2, x).expect("in domain");
        let (u, v) = (t2.u(t), t2.v(t));
        let (du, dv) = (t2.du(t), t2.dv(t));
        let bbt = &b * b.transpose();
        (0..n)
            .map(|k| {
                let dbk = db.column(k).into_owned();
                &a * (du * dt[k])
                    + &da[k] * u
                    + &bbt * (dv * dt[k])
                    + (&dbk * b.transpose() + &b * dbk.transpose()) * v
            })
            .collect::<Vec<_>>()
    });
    let h = MetricField::new(n, h_coeff)
        .with_grad(h_grad)
        .with_domain(domain.clone());

    let (m3, b3, t3) = (metric.clone(), beta.clone(), triple.clone());
    let rho_coeff = Arc::new(move |x: &Point| {
        let b = b3.coeffs(x);
        let t = norm_sq(&m3, &b3, x).expect("in domain");
        &b * t3.w(t)
    });
    let (m4, b4, t4) = (metric.clone(), beta.clone(), triple.clone());
    let rho_grad = Arc::new(move |x: &Point| {
        let b = b4.coeffs(x);
        let db = b4.coeff_grad(x);
        let t = norm_sq(&m4, &b4, x).expect("in domain");
        let dt = norm_sq_grad(&m4, &b4, x).expect("in domain");
        let (w, dw) = (t4.w(t), t4.dw(t));
        DMatrix::from_fn(n, n, |i, k| dw * dt[k] * b[i] + w * db[(i, k)])
    });
    let rho = OneFormField::new(n, rho_coeff).with_grad(rho_grad);

    DeformedPair { h, rho }
}

/// Result of the pointwise inversion of the deformation at one chart point.
#[derive(Debug, Clone)]
pub struct InverseResult {
    pub metric_coeffs: DMatrix<f64>,
    pub beta_coeffs: DVector<f64>,
    /// Accepted root t* = b².
    pub t: f64,
    /// All bracketed roots, ascending; the smallest is the accepted one.
    pub all_roots: Vec<f64>,
}

impl InverseResult {
    /// True when more than one root was bracketed.
    pub fn ambiguous(&self) -> bool {
        self.all_roots.len() > 1
    }
}

/// Number of scan nodes used to bracket the fixed-point equation.
const INVERSE_SCAN_NODES: usize = 2048;

fn inverse_candidate(
    h_x: &DMatrix<f64>,
    p: &DVector<f64>,
    triple: &DeformationTriple,
    t: f64,
) -> Option<(DMatrix<f64>, DVector<f64>, f64)> {
    let (u, v, w) = (triple.u(t), triple.v(t), triple.w(t));
    if u.abs() < 1e-14 || w.abs() < 1e-14 {
        return None;
    }
    let b = p / w;
    let a = (h_x - (&b * b.transpose()) * v) / u;
    let ainv = crate::geom::spd_inverse(&a).ok()?;
    let bsq = (&ainv * &b).dot(&b);
    Some((a, b, bsq))
}

/// Invert `h² = uα² + vβ², ρ = wβ` at one point by solving
/// `t = ‖ρ/w(t)‖²_{α(t)}` with a bracket scan, bisection and Newton polish.
///
/// The default bracket is `[1e−9, 1 − 1e−9]` intersected with the triple's
/// validity interval. When several roots are bracketed they are all
/// reported in `all_roots` and the smallest is returned.
pub fn deform_inverse(
    h: &MetricField,
    rho: &OneFormField,
    triple: &DeformationTriple,
    x: &Point,
    bracket: Option<(f64, f64)>,
) -> Result<InverseResult> {
    let h_x = h.coeffs(x)?;
    let p = rho.coeffs(x);
    let (mut lo, mut hi) = bracket.unwrap_or((1e-9, 1.0 - 1e-9));
    lo = lo.max(triple.interval().0);
    hi = hi.min(triple.interval().1);
    if !(lo < hi) {
        return Err(GeomError::NoFixedPoint { lo, hi });
    }
    let g = |t: f64| match inverse_candidate(&h_x, &p, triple, t) {
        Some((_, _, bsq)) => bsq - t,
        None => f64::NAN,
    };
    let brackets = roots::scan_brackets(&g, lo, hi, INVERSE_SCAN_NODES);
    if brackets.is_empty() {
        return Err(GeomError::NoFixedPoint { lo, hi });
    }
    let mut all_roots: Vec<f64> = brackets
        .iter()
        .map(|&(a, b)| roots::bisect_newton(&g, a, b, 1e-12))
        .collect();
    all_roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all_roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let t = all_roots[0];
    let (a, b, _) = inverse_candidate(&h_x, &p, triple, t)
        .ok_or(GeomError::NoFixedPoint { lo, hi })?;
    Ok(InverseResult {
        metric_coeffs: a,
        beta_coeffs: b,
        t,
        all_roots,
    })
}

/// The inverse deformation as fields; every evaluation performs the
/// pointwise root solve, so derivatives fall back to finite differences.
pub fn inverse_fields(
    h: &MetricField,
    rho: &OneFormField,
    triple: &DeformationTriple,
    bracket: Option<(f64, f64)>,
) -> (MetricField, OneFormField) {
    let n = h.dim();
    let (h0, r0, t0) = (h.clone(), rho.clone(), triple.clone());
    let domain = Arc::new(move |x: &Point| deform_inverse(&h0, &r0, &t0, x, bracket).is_ok());
    let (h1, r1, t1) = (h.clone(), rho.clone(), triple.clone());
    let metric = MetricField::new(
        n,
        Arc::new(move |x: &Point| {
            deform_inverse(&h1, &r1, &t1, x, bracket)
                .expect("inverse deformation evaluated inside its domain")
                .metric_coeffs
        }),
    )
    .with_domain(domain);
    let (h2, r2, t2) = (h.clone(), rho.clone(), triple.clone());
    let beta = OneFormField::new(
        n,
        Arc::new(move |x: &Point| {
            deform_inverse(&h2, &r2, &t2, x, bracket)
                .expect("inverse deformation evaluated inside its domain")
                .beta_coeffs
        }),
    );
    (metric, beta)
}

/// Thresholds for the 1-form classification flags.
#[derive(Debug, Clone, Copy)]
pub struct FormCheckTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for FormCheckTol {
    fn default() -> Self {
        Self {
            abs: 1e-6,
            rel: 1e-6,
        }
    }
}

/// Conformality report for a 1-form ρ with respect to a metric h, from the
/// decomposition of `p_{i|j}` into `r̃_ij` (symmetric) and `s̃_ij`
/// (antisymmetric): conformal iff `r̃ = σ h` pointwise, Killing iff
/// `r̃ = 0`, homothetic iff conformal with constant σ, closed iff `s̃ = 0`.
#[derive(Debug, Clone)]
pub struct FormCheckReport {
    pub is_closed: bool,
    pub is_conformal: bool,
    pub is_homothetic: bool,
    pub is_killing: bool,
    /// σ(x) = tr_h(r̃)/n at each sample.
    pub sigma_samples: Vec<f64>,
    pub sigma_mean: f64,
    pub sigma_variance: f64,
    /// max over samples of ‖r̃ − σh‖_F.
    pub max_traceless: f64,
    /// max over samples of ‖s̃‖_F.
    pub max_skew: f64,
    /// max over samples of ‖r̃‖_F.
    pub max_rtilde: f64,
    pub tol: FormCheckTol,
}

/// Classify ρ against h on the given samples.
pub fn form_check(
    h: &MetricField,
    rho: &OneFormField,
    samples: &[Point],
    tol: FormCheckTol,
) -> Result<FormCheckReport> {
    let n = h.dim();
    let mut sigma_samples = Vec::with_capacity(samples.len());
    let mut max_traceless: f64 = 0.0;
    let mut max_skew: f64 = 0.0;
    let mut max_rtilde: f64 = 0.0;
    let mut conformal = true;
    let mut closed = true;
    let mut killing_size = true;
    for x in samples {
        let cov = covdiff_oneform(h, rho, x)?;
        let r = (&cov + cov.transpose()) * 0.5;
        let s = (&cov - cov.transpose()) * 0.5;
        let h_x = h.coeffs(x)?;
        let h_inv = h.inverse_at(x)?;
        let sigma = (&h_inv * &r).trace() / n as f64;
        let traceless = (&r - &h_x * sigma).norm();
        let scale = 1.0 + cov.norm();
        sigma_samples.push(sigma);
        max_traceless = max_traceless.max(traceless);
        max_skew = max_skew.max(s.norm());
        max_rtilde = max_rtilde.max(r.norm());
        if traceless > tol.abs + tol.rel * scale {
            conformal = false;
        }
        if s.norm() > tol.abs + tol.rel * scale {
            closed = false;
        }
        if r.norm() > tol.abs + tol.rel * scale {
            killing_size = false;
        }
    }
    let sigma_mean = stats::mean(&sigma_samples);
    let sigma_variance = stats::variance(&sigma_samples);
    let is_homothetic = conformal && sigma_variance <= tol.abs;
    let is_killing = is_homothetic && killing_size;
    Ok(FormCheckReport {
        is_closed: closed,
        is_conformal: conformal,
        is_homothetic,
        is_killing,
        sigma_samples,
        sigma_mean,
        sigma_variance,
        max_traceless,
        max_skew,
        max_rtilde,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn identity_triple_is_exact() {
        let m = MetricField::constant(DMatrix::from_row_slice(2, 2, &[5.0, 1.0, 1.0, 3.0]));
        let beta = OneFormField::constant(dvector![0.3, -0.2]);
        let pair = deform_forward(&m, &beta, &DeformationTriple::identity());
        let x = Point::from_slice(&[0.4, 0.7]).unwrap();
        assert_eq!(pair.h.coeffs(&x).unwrap(), m.coeffs(&x).unwrap());
        assert_eq!(pair.rho.coeffs(&x), beta.coeffs(&x));
    }

    #[test]
    fn navigation_example_coefficients() {
        // Euclidean δ, constant b = (1/2, 0): b² = 1/4, u = 3/4, v = w = −3/4
        let m = MetricField::euclidean(2);
        let beta = OneFormField::constant(dvector![0.5, 0.0]);
        let x = Point::from_slice(&[0.2, -0.6]).unwrap();
        let (h, p) = deformed_coeffs(&m, &beta, &DeformationTriple::navigation(), &x).unwrap();
        let expected_h =
            DMatrix::identity(2, 2) * 0.75 - dvector![0.5, 0.0] * dvector![0.5, 0.0].transpose() * 0.75;
        assert_relative_eq!(h, expected_h, epsilon = 1e-14);
        assert_relative_eq!(p, dvector![0.5, 0.0] * -0.75, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_triple_reports_not_positive_definite() {
        // u + v b² = (1−t) + (t−1)·t at t = b²; forcing b² = 1 makes it 0,
        // but b² = 1 is outside the navigation interval, so craft a triple
        let m = MetricField::euclidean(2);
        let beta = OneFormField::constant(dvector![0.5, 0.0]); // b² = 1/4
        let triple = DeformationTriple::new(
            DeformationScalar::constant(1.0),
            DeformationScalar::constant(-4.0), // u + v b² = 1 − 1 = 0
            DeformationScalar::constant(1.0),
            0.0,
            2.0,
            "degenerate",
        )
        .unwrap();
        let err = deformed_coeffs(&m, &beta, &triple, &Point::origin(2));
        assert!(matches!(err, Err(GeomError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn recipe_iso_s_randers_reproduces_navigation() {
        let triple = DeformationTriple::navigation();
        for &t in &[0.1, 0.25, 0.7] {
            assert_relative_eq!(triple.u(t), 1.0 - t, epsilon = 1e-14);
            assert_relative_eq!(triple.v(t), t - 1.0, epsilon = 1e-14);
            assert_relative_eq!(triple.w(t), t - 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn recipe_iso_s_2d_at_zero() {
        let triple = DeformationTriple::iso_s_2d(0.7, -0.3).unwrap();
        assert_eq!(triple.u(0.0), 1.0);
        assert_eq!(triple.v(0.0), 0.0);
        assert_relative_eq!(triple.w(0.0), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn recipe_douglas_n3_closed_form() {
        // k₁ = 0, k₂ = 0, k₃ = 1 → w(t) = (1 + t)^{−1/2}
        let triple = DeformationTriple::douglas_n3(0.0, 0.0, 1.0).unwrap();
        for &t in &[0.0, 0.2, 0.5, 1.0] {
            assert_relative_eq!(triple.w(t), (1.0 + t).powf(-0.5), epsilon = 1e-11);
        }
    }

    #[test]
    fn douglas_2d_small_t_branch_is_continuous() {
        use crate::alphabeta::Sign;
        for sign in [Sign::Plus, Sign::Minus] {
            let triple = DeformationTriple::douglas_2d(sign).unwrap();
            let sg = sign.value();
            assert_relative_eq!(triple.v(0.0), 9.0 * sg, epsilon = 1e-12);
            // literal and factored forms agree across the branch switch
            for &t in &[5e-5, 9.9e-5, 1.01e-4, 2e-4] {
                let a = (1.0f64 + 2.0 * sg * t).powf(1.5);
                let literal = 9.0 / (8.0 * t) * (a - (1.0 - 2.0 * sg * t + 4.0 * t * t) / a);
                assert_relative_eq!(triple.v(t), literal, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn triple_derivatives_match_finite_differences() {
        use crate::num::fd;
        let triples = [
            DeformationTriple::navigation(),
            DeformationTriple::iso_s_2d(0.5, -0.4).unwrap(),
            DeformationTriple::douglas_n3(1.0, 1.0, 0.0).unwrap(),
            DeformationTriple::douglas_2d(crate::alphabeta::Sign::Plus).unwrap(),
        ];
        for triple in &triples {
            for &t in &[0.1, 0.3, 0.45] {
                let du = fd::central_richardson(|s| triple.u(s), t, 1e-5);
                let dv = fd::central_richardson(|s| triple.v(s), t, 1e-5);
                let dw = fd::central_richardson(|s| triple.w(s), t, 1e-5);
                assert_relative_eq!(triple.du(t), du, epsilon = 1e-7, max_relative = 1e-7);
                assert_relative_eq!(triple.dv(t), dv, epsilon = 1e-7, max_relative = 1e-7);
                assert_relative_eq!(triple.dw(t), dw, epsilon = 1e-7, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn inverse_recovers_forward_identity_triple() {
        let m = MetricField::constant(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.5]));
        let beta = OneFormField::constant(dvector![0.4, -0.1]);
        let triple = DeformationTriple::identity();
        let pair = deform_forward(&m, &beta, &triple);
        let x = Point::from_slice(&[0.1, 0.1]).unwrap();
        let inv = deform_inverse(&pair.h, &pair.rho, &triple, &x, None).unwrap();
        assert_relative_eq!(inv.metric_coeffs, m.coeffs(&x).unwrap(), epsilon = 1e-10);
        assert_relative_eq!(inv.beta_coeffs, beta.coeffs(&x), epsilon = 1e-10);
    }

    #[test]
    fn inverse_round_trips_smooth_triples() {
        let m = MetricField::constant(DMatrix::from_row_slice(2, 2, &[1.3, -0.2, -0.2, 0.9]));
        let beta = OneFormField::constant(dvector![0.35, 0.2]);
        let triple = DeformationTriple::new(
            DeformationScalar::new(Arc::new(|t| 1.0 + t), Arc::new(|_| 1.0)),
            DeformationScalar::new(Arc::new(|t| t), Arc::new(|_| 1.0)),
            DeformationScalar::new(Arc::new(|t| t.exp()), Arc::new(|t| t.exp())),
            0.0,
            2.0,
            "generic",
        )
        .unwrap();
        let pair = deform_forward(&m, &beta, &triple);
        let x = Point::from_slice(&[-0.3, 0.2]).unwrap();
        let inv = deform_inverse(&pair.h, &pair.rho, &triple, &x, Some((1e-9, 1.9))).unwrap();
        assert_relative_eq!(inv.metric_coeffs, m.coeffs(&x).unwrap(), epsilon = 1e-10);
        assert_relative_eq!(inv.beta_coeffs, beta.coeffs(&x), epsilon = 1e-10);
        assert_relative_eq!(inv.t, norm_sq(&m, &beta, &x).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn inverse_reports_no_fixed_point() {
        // ρ = 0 with the navigation triple forces b = 0, so t = b² = 0
        // which lies outside (and g = −t < 0 throughout the bracket)
        let h = MetricField::euclidean(2);
        let rho = OneFormField::zero(2);
        let err = deform_inverse(
            &h,
            &rho,
            &DeformationTriple::navigation(),
            &Point::origin(2),
            None,
        );
        assert!(matches!(err, Err(GeomError::NoFixedPoint { .. })));
    }

    #[test]
    fn form_check_examples() {
        let h = MetricField::euclidean(2);
        let samples: Vec<Point> = [[0.3, 0.1], [-0.2, 0.4], [0.1, -0.5]]
            .iter()
            .map(|c| Point::from_slice(c).unwrap())
            .collect();
        // p_i = x_i: conformal with σ ≡ 1, closed, not Killing
        let radial = OneFormField::new(2, Arc::new(|x: &Point| x.coords().clone()));
        let rep = form_check(&h, &radial, &samples, FormCheckTol::default()).unwrap();
        assert!(rep.is_conformal && rep.is_closed && rep.is_homothetic && !rep.is_killing);
        for s in &rep.sigma_samples {
            assert_relative_eq!(*s, 1.0, epsilon = 1e-8);
        }
        // constant p: Killing and closed
        let constant = OneFormField::constant(dvector![0.7, -0.1]);
        let rep = form_check(&h, &constant, &samples, FormCheckTol::default()).unwrap();
        assert!(rep.is_killing && rep.is_closed && rep.is_conformal && rep.is_homothetic);
        // p = (x², 0): r̃ off-diagonal 1/2, not conformal
        let shear = OneFormField::new(2, Arc::new(|x: &Point| dvector![x.coords()[1], 0.0]));
        let rep = form_check(&h, &shear, &samples, FormCheckTol::default()).unwrap();
        assert!(!rep.is_conformal && !rep.is_killing);
        assert_relative_eq!(rep.max_rtilde, 0.5f64.hypot(0.5), epsilon = 1e-8);
    }
}
