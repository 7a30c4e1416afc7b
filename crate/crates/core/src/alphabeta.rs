//! The Finsler layer: φ-function families and (α, β)-metrics
//! `F = α φ(β/α)` with regularity checking.
//!
//! The isotropic-S two-dimensional family is built by quadrature of its
//! exponent integral; the Douglas-type family solves its defining second
//! order ODE by fixed-step RK4 from the initial data φ(0) = 1, φ′(0) = p₀
//! and interpolates the solution table with cubic Hermite polynomials.

use crate::error::{GeomError, Result};
use crate::geom::{norm_sq, MetricField, OneFormField, Point};
use crate::num::{ode, quad, table::HermiteTable};
use nalgebra::{dvector, DVector};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sign choice for the families that carry a free ± branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Family tag and parameters of a constructed φ.
#[derive(Debug, Clone)]
pub enum PhiFamily {
    /// φ = 1 + s (Randers).
    Randers,
    /// φ = 1 ± s².
    F0Type { sign: Sign },
    /// φ = {(1 + k₁s²)(1 + k₂s²)}^{1/4} e^{∫₀ˢ Θ}, Θ = ±√(k₂−k₁)/(2(1+k₁s²)√(1+k₂s²)).
    IsoS2d { k1: f64, k2: f64, sign: Sign },
    /// {1 + (k₁+k₃)s² + k₂s⁴} φ″ = (k₁ + k₂s²)(φ − sφ′), φ(0) = 1, φ′(0) = p₀.
    DouglasOde { k1: f64, k2: f64, k3: f64, p0: f64 },
}

/// A φ-function with its first two derivatives on `[−s_max, s_max]`.
#[derive(Clone)]
pub struct PhiFunction {
    family: PhiFamily,
    s_max: f64,
    phi: ScalarFn,
    dphi: ScalarFn,
    d2phi: ScalarFn,
}

impl std::fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhiFunction")
            .field("family", &self.family)
            .field("s_max", &self.s_max)
            .finish()
    }
}

impl PhiFunction {
    fn build(
        family: PhiFamily,
        s_max: f64,
        phi: ScalarFn,
        dphi: ScalarFn,
        d2phi: ScalarFn,
    ) -> Result<Self> {
        let out = Self {
            family,
            s_max,
            phi,
            dphi,
            d2phi,
        };
        if ((out.phi)(0.0) - 1.0).abs() > 1e-12 {
            return Err(GeomError::InvalidFamilyParams(format!(
                "φ(0) = {} ≠ 1",
                (out.phi)(0.0)
            )));
        }
        // positivity at interior samples; endpoints may touch zero
        for i in 0..=40 {
            let s = out.s_max * (i as f64 / 40.0 - 0.5) * 2.0 * 0.999;
            if (out.phi)(s) <= 0.0 {
                return Err(GeomError::InvalidFamilyParams(format!(
                    "φ({s}) = {} ≤ 0 inside the interval",
                    (out.phi)(s)
                )));
            }
        }
        Ok(out)
    }

    pub fn family(&self) -> &PhiFamily {
        &self.family
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    fn check_range(&self, s: f64) -> Result<()> {
        if s.abs() > self.s_max {
            return Err(GeomError::DomainViolation(format!(
                "|s| = {} exceeds the φ interval bound {}",
                s.abs(),
                self.s_max
            )));
        }
        Ok(())
    }

    pub fn phi(&self, s: f64) -> Result<f64> {
        self.check_range(s)?;
        Ok((self.phi)(s))
    }

    pub fn dphi(&self, s: f64) -> Result<f64> {
        self.check_range(s)?;
        Ok((self.dphi)(s))
    }

    pub fn d2phi(&self, s: f64) -> Result<f64> {
        self.check_range(s)?;
        Ok((self.d2phi)(s))
    }

    /// φ = 1 + s on [−1, 1]; φ vanishes only at the left endpoint.
    pub fn randers() -> Self {
        Self::build(
            PhiFamily::Randers,
            1.0,
            Arc::new(|s| 1.0 + s),
            Arc::new(|_| 1.0),
            Arc::new(|_| 0.0),
        )
        .expect("randers φ is valid")
    }

    /// φ = 1 ± s² on [−1, 1].
    pub fn f0_type(sign: Sign) -> Self {
        let sg = sign.value();
        Self::build(
            PhiFamily::F0Type { sign },
            1.0,
            Arc::new(move |s| 1.0 + sg * s * s),
            Arc::new(move |s| 2.0 * sg * s),
            Arc::new(move |_| 2.0 * sg),
        )
        .expect("metric-type φ is valid")
    }

    /// Two-dimensional isotropic-S family; requires k₂ > k₁. The requested
    /// interval is clipped to where both quartic factors stay positive.
    pub fn iso_s_2d(k1: f64, k2: f64, sign: Sign, s_max: f64) -> Result<Self> {
        if !(k2 > k1) {
            return Err(GeomError::InvalidFamilyParams(format!(
                "isotropic-S family needs k₂ > k₁, got k₁ = {k1}, k₂ = {k2}"
            )));
        }
        if s_max <= 0.0 {
            return Err(GeomError::InvalidFamilyParams(
                "s_max must be positive".into(),
            ));
        }
        // maximal interval around 0 where both 1 + k s² > 1e−6
        let mut bound = s_max;
        for k in [k1, k2] {
            if k < 0.0 {
                bound = bound.min(((1.0 - 1e-6) / -k).sqrt() * (1.0 - 1e-9));
            }
        }
        let s_max = bound;
        let rad = (k2 - k1).sqrt() * sign.value();
        let theta = move |s: f64| rad / (2.0 * (1.0 + k1 * s * s) * (1.0 + k2 * s * s).sqrt());
        // tabulate I(s) = ∫₀ˢ Θ on a fine grid; I′ = Θ is analytic
        let n_nodes = 2001usize;
        let ds = 2.0 * s_max / (n_nodes - 1) as f64;
        let mut ys = Vec::with_capacity(n_nodes);
        let mut dys = Vec::with_capacity(n_nodes);
        let mut acc = quad::integrate(&theta, 0.0, -s_max, 1e-13);
        let mut prev = -s_max;
        for i in 0..n_nodes {
            let s = -s_max + ds * i as f64;
            acc += quad::integrate(&theta, prev, s, 1e-14);
            prev = s;
            ys.push(acc);
            dys.push(theta(s));
        }
        let itable = HermiteTable::new(-s_max, ds, ys, dys);

        let amp = move |s: f64| ((1.0 + k1 * s * s) * (1.0 + k2 * s * s)).powf(0.25);
        let dlog_amp =
            move |s: f64| 0.5 * s * (k1 / (1.0 + k1 * s * s) + k2 / (1.0 + k2 * s * s));
        let d2log_amp = move |s: f64| {
            0.5 * (k1 * (1.0 - k1 * s * s) / (1.0 + k1 * s * s).powi(2)
                + k2 * (1.0 - k2 * s * s) / (1.0 + k2 * s * s).powi(2))
        };
        let dtheta = move |s: f64| {
            -theta(s) * (2.0 * k1 * s / (1.0 + k1 * s * s) + k2 * s / (1.0 + k2 * s * s))
        };

        let it = itable.clone();
        let phi = Arc::new(move |s: f64| amp(s) * it.eval(s).exp());
        let it = itable.clone();
        let dphi = Arc::new(move |s: f64| {
            let p = amp(s) * it.eval(s).exp();
            p * (dlog_amp(s) + theta(s))
        });
        let it = itable;
        let d2phi = Arc::new(move |s: f64| {
            let p = amp(s) * it.eval(s).exp();
            let g = dlog_amp(s) + theta(s);
            p * (g * g + d2log_amp(s) + dtheta(s))
        });
        Self::build(PhiFamily::IsoS2d { k1, k2, sign }, s_max, phi, dphi, d2phi)
    }

    /// Douglas-type family solving its second-order ODE from φ(0) = 1,
    /// φ′(0) = p₀, requiring a nonvanishing leading coefficient
    /// `1 + (k₁+k₃)s² + k₂s⁴` on the interval.
    ///
    /// The classification hypothesis k₂ ≠ k₁k₃ is not enforced here: the
    /// ODE is solvable without it, and the degenerate solutions it admits
    /// (the Riemannian √(1+ks²)) are caught by [`Self::riemannian_guard`]
    /// where the theorems require their exclusion.
    pub fn douglas_ode(k1: f64, k2: f64, k3: f64, p0: f64, s_max: f64) -> Result<Self> {
        if s_max <= 0.0 {
            return Err(GeomError::InvalidFamilyParams(
                "s_max must be positive".into(),
            ));
        }
        let lead = move |s: f64| 1.0 + (k1 + k3) * s * s + k2 * s.powi(4);
        // real positive roots of the leading coefficient in z = s²
        let mut singular = f64::INFINITY;
        if k2 == 0.0 {
            if k1 + k3 < 0.0 {
                singular = (-1.0 / (k1 + k3)).sqrt();
            }
        } else {
            let disc = (k1 + k3) * (k1 + k3) - 4.0 * k2;
            if disc >= 0.0 {
                for z in [
                    (-(k1 + k3) - disc.sqrt()) / (2.0 * k2),
                    (-(k1 + k3) + disc.sqrt()) / (2.0 * k2),
                ] {
                    if z > 0.0 {
                        singular = singular.min(z.sqrt());
                    }
                }
            }
        }
        if singular <= s_max {
            return Err(GeomError::OdeSingularity(format!(
                "leading coefficient 1 + (k₁+k₃)s² + k₂s⁴ vanishes at |s| = {singular:.6} ≤ s_max = {s_max}"
            )));
        }

        let rhs =
            move |s: f64, phi: f64, dphi: f64| (k1 + k2 * s * s) * (phi - s * dphi) / lead(s);
        let sys = move |s: f64, y: &DVector<f64>| dvector![y[1], rhs(s, y[0], y[1])];

        // integrate both directions with step ~1e−3, store value + slope
        let n_steps = ((s_max / 1e-3).ceil() as usize).max(16);
        let ds = s_max / n_steps as f64;
        let mut ys = vec![0.0; 2 * n_steps + 1];
        let mut dys = vec![0.0; 2 * n_steps + 1];
        ys[n_steps] = 1.0;
        dys[n_steps] = p0;
        let mut y = dvector![1.0, p0];
        for i in 0..n_steps {
            let s = ds * i as f64;
            y = ode::rk4_step(&sys, s, &y, ds);
            ys[n_steps + i + 1] = y[0];
            dys[n_steps + i + 1] = y[1];
        }
        y = dvector![1.0, p0];
        for i in 0..n_steps {
            let s = -ds * i as f64;
            y = ode::rk4_step(&sys, s, &y, -ds);
            ys[n_steps - i - 1] = y[0];
            dys[n_steps - i - 1] = y[1];
        }
        let t = HermiteTable::new(-s_max, ds, ys, dys);

        let t1 = t.clone();
        let phi = Arc::new(move |s: f64| t1.eval(s));
        let t2 = t.clone();
        let dphi = Arc::new(move |s: f64| t2.eval_deriv(s));
        let t3 = t;
        let d2phi = Arc::new(move |s: f64| rhs(s, t3.eval(s), t3.eval_deriv(s)));
        Self::build(
            PhiFamily::DouglasOde { k1, k2, k3, p0 },
            s_max,
            phi,
            dphi,
            d2phi,
        )
    }

    /// Rejects φ of the Riemannian form √(1 + ks²), detected by a constant
    /// (φ²)″ together with a vanishing (φ²)′ at s = 0.
    pub fn riemannian_guard(&self) -> Result<()> {
        let sq_d1_at0 = 2.0 * (self.phi)(0.0) * (self.dphi)(0.0);
        if sq_d1_at0.abs() > 1e-9 {
            return Ok(());
        }
        let sq_d2 = |s: f64| {
            let (p, dp, d2p) = ((self.phi)(s), (self.dphi)(s), (self.d2phi)(s));
            2.0 * (dp * dp + p * d2p)
        };
        let samples: Vec<f64> = (0..5)
            .map(|i| sq_d2(0.8 * self.s_max * (i as f64 / 4.0 - 0.5)))
            .collect();
        let spread = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - samples.iter().cloned().fold(f64::INFINITY, f64::min);
        if spread <= 1e-9 {
            return Err(GeomError::InvalidFamilyParams(
                "φ is of the Riemannian form √(1 + ks²)".into(),
            ));
        }
        Ok(())
    }
}

/// An (α, β)-metric `F = α φ(β/α)`.
#[derive(Debug, Clone)]
pub struct AlphaBetaMetric {
    metric: MetricField,
    beta: OneFormField,
    phi: PhiFunction,
}

impl AlphaBetaMetric {
    pub fn new(metric: MetricField, beta: OneFormField, phi: PhiFunction) -> Result<Self> {
        if metric.dim() != beta.dim() {
            return Err(GeomError::InvalidFamilyParams(format!(
                "metric dimension {} ≠ 1-form dimension {}",
                metric.dim(),
                beta.dim()
            )));
        }
        Ok(Self { metric, beta, phi })
    }

    /// Randers metric F = α + β.
    pub fn randers(metric: MetricField, beta: OneFormField) -> Result<Self> {
        Self::new(metric, beta, PhiFunction::randers())
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn beta(&self) -> &OneFormField {
        &self.beta
    }

    pub fn phi(&self) -> &PhiFunction {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// α(x, y) = √(a_ij y^i y^j).
    pub fn alpha(&self, x: &Point, y: &DVector<f64>) -> Result<f64> {
        let a = self.metric.coeffs(x)?;
        Ok((&a * y).dot(y).max(0.0).sqrt())
    }

    /// F(x, y) = α φ(β/α); positively 1-homogeneous in y.
    pub fn eval(&self, x: &Point, y: &DVector<f64>) -> Result<f64> {
        let alpha = self.alpha(x, y)?;
        if !(alpha > 0.0) {
            return Err(GeomError::DomainViolation(
                "α(x, y) must be positive (y ≠ 0)".into(),
            ));
        }
        let s = self.beta.apply(x, y) / alpha;
        Ok(alpha * self.phi.phi(s)?)
    }
}

/// Outcome of the pointwise regularity criterion
/// `φ > 0` and `φ − sφ′ + (b² − s²)φ″ > 0` over `s ∈ [−√b², √b²]`.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub pass: bool,
    /// Worst value of φ(s) over all sampled (x, s).
    pub min_phi: f64,
    /// Worst value of the convexity expression over all sampled (x, s).
    pub min_criterion: f64,
    /// Index of the worst sample point, if any failed.
    pub worst_point: Option<usize>,
    /// Number of (x, s) samples that fell outside the φ interval.
    pub out_of_range: usize,
}

/// Check regularity of F over the given chart points, sampling `sample_s`
/// values of s per point across `[−√b², √b²]`.
pub fn regularity_check(
    f: &AlphaBetaMetric,
    sample_points: &[Point],
    sample_s: usize,
) -> Result<RegularityReport> {
    let mut report = RegularityReport {
        pass: true,
        min_phi: f64::INFINITY,
        min_criterion: f64::INFINITY,
        worst_point: None,
        out_of_range: 0,
    };
    let ns = sample_s.max(3);
    for (idx, x) in sample_points.iter().enumerate() {
        let b2 = norm_sq(f.metric(), f.beta(), x)?;
        let b = b2.max(0.0).sqrt();
        for i in 0..ns {
            let s = if b == 0.0 {
                0.0
            } else {
                -b + 2.0 * b * i as f64 / (ns - 1) as f64
            };
            let (phi, dphi, d2phi) = match (f.phi.phi(s), f.phi.dphi(s), f.phi.d2phi(s)) {
                (Ok(p), Ok(dp), Ok(d2p)) => (p, dp, d2p),
                _ => {
                    report.out_of_range += 1;
                    report.pass = false;
                    report.worst_point = Some(idx);
                    continue;
                }
            };
            let crit = phi - s * dphi + (b2 - s * s) * d2phi;
            if phi < report.min_phi {
                report.min_phi = phi;
            }
            if crit < report.min_criterion {
                report.min_criterion = crit;
            }
            if phi <= 0.0 || crit <= 0.0 {
                report.pass = false;
                report.worst_point = Some(idx);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn randers_phi_basics() {
        let phi = PhiFunction::randers();
        assert_eq!(phi.phi(0.0).unwrap(), 1.0);
        assert_eq!(phi.dphi(0.0).unwrap(), 1.0);
        assert_eq!(phi.d2phi(0.5).unwrap(), 0.0);
        assert!(phi.phi(1.5).is_err());
    }

    #[test]
    fn eval_reduces_to_alpha_for_zero_beta() {
        let f = AlphaBetaMetric::randers(MetricField::euclidean(2), OneFormField::zero(2)).unwrap();
        let x = Point::origin(2);
        let y = dvector![3.0, 4.0];
        assert_relative_eq!(f.eval(&x, &y).unwrap(), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn eval_randers_example() {
        let f = AlphaBetaMetric::randers(
            MetricField::euclidean(2),
            OneFormField::constant(dvector![0.5, 0.0]),
        )
        .unwrap();
        let v = f.eval(&Point::origin(2), &dvector![1.0, 0.0]).unwrap();
        assert_relative_eq!(v, 1.5, epsilon = 1e-14);
    }

    #[test]
    fn eval_is_positively_homogeneous() {
        let f = AlphaBetaMetric::randers(
            MetricField::constant(DMatrix::identity(2, 2) * 4.0),
            OneFormField::constant(dvector![0.4, -0.3]),
        )
        .unwrap();
        let x = Point::from_slice(&[0.1, 0.2]).unwrap();
        let y = dvector![0.7, -1.1];
        let f1 = f.eval(&x, &y).unwrap();
        let f2 = f.eval(&x, &(2.0 * &y)).unwrap();
        assert_relative_eq!(f2, 2.0 * f1, epsilon = 1e-12, max_relative = 1e-12);
    }

    #[test]
    fn iso_s_2d_phi_at_zero_is_one() {
        let phi = PhiFunction::iso_s_2d(-0.3, 1.0, Sign::Plus, 0.8).unwrap();
        assert!((phi.phi(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(PhiFunction::iso_s_2d(1.0, 1.0, Sign::Plus, 0.5).is_err());
    }

    #[test]
    fn iso_s_2d_derivative_consistency() {
        use crate::num::fd;
        let phi = PhiFunction::iso_s_2d(0.5, 2.0, Sign::Plus, 0.6).unwrap();
        for &s in &[-0.4, -0.1, 0.2, 0.5] {
            let fd1 = fd::central_richardson(|t| phi.phi(t).unwrap(), s, 1e-4);
            assert_relative_eq!(phi.dphi(s).unwrap(), fd1, epsilon = 1e-9);
            let fd2 = fd::central_richardson(|t| phi.dphi(t).unwrap(), s, 1e-4);
            assert_relative_eq!(phi.d2phi(s).unwrap(), fd2, epsilon = 1e-7);
        }
    }

    #[test]
    fn iso_s_2d_quadrature_refinement_is_converged() {
        // recompute the exponent with doubled Simpson nodes; φ must move ≤ 1e−9
        let (k1, k2) = (0.5, 2.0);
        let phi = PhiFunction::iso_s_2d(k1, k2, Sign::Plus, 0.6).unwrap();
        let theta =
            |s: f64| (k2 - k1).sqrt() / (2.0 * (1.0 + k1 * s * s) * (1.0 + k2 * s * s).sqrt());
        for &s in &[-0.5, 0.3, 0.6] {
            let coarse = quad::simpson_n(&theta, 0.0, s, 400);
            let fine = quad::simpson_n(&theta, 0.0, s, 800);
            let amp = ((1.0 + k1 * s * s) * (1.0 + k2 * s * s)).powf(0.25);
            let p_coarse = amp * coarse.exp();
            let p_fine = amp * fine.exp();
            assert!((p_coarse - p_fine).abs() <= 1e-9);
            assert_relative_eq!(phi.phi(s).unwrap(), p_fine, epsilon = 1e-9);
        }
    }

    #[test]
    fn douglas_ode_matches_sqrt_one_plus_s_squared() {
        // (1+s²)φ″ = φ − sφ′ is solved by √(1+s²) with φ(0)=1, φ′(0)=0
        let phi = PhiFunction::douglas_ode(1.0, 0.0, 0.0, 0.0, 0.6).unwrap();
        for i in 0..=50 {
            let s = 0.5 * i as f64 / 50.0;
            let exact = (1.0 + s * s).sqrt();
            assert!(
                (phi.phi(s).unwrap() - exact).abs() < 1e-8,
                "s = {s}: {} vs {exact}",
                phi.phi(s).unwrap()
            );
        }
    }

    #[test]
    fn douglas_ode_residual_is_small() {
        let (k1, k2, k3, p0) = (0.8, 0.5, -0.2, 0.6);
        let phi = PhiFunction::douglas_ode(k1, k2, k3, p0, 0.7).unwrap();
        for i in 0..=40 {
            let s = -0.7 + 1.4 * i as f64 / 40.0;
            let lead = 1.0 + (k1 + k3) * s * s + k2 * s.powi(4);
            let res = lead * phi.d2phi(s).unwrap()
                - (k1 + k2 * s * s) * (phi.phi(s).unwrap() - s * phi.dphi(s).unwrap());
            assert!(res.abs() < 1e-7, "ODE residual {res} at s = {s}");
        }
    }

    #[test]
    fn douglas_ode_rejects_in_range_singularity() {
        // leading coefficient 1 − 4s² vanishes at s = 0.5 < 0.7
        assert!(matches!(
            PhiFunction::douglas_ode(-2.0, 0.0, -2.0, 0.0, 0.7),
            Err(GeomError::OdeSingularity(_))
        ));
        // the same coefficients on a smaller interval are fine
        assert!(PhiFunction::douglas_ode(-2.0, 0.0, -2.0, 0.0, 0.4).is_ok());
    }

    #[test]
    fn riemannian_guard_accepts_and_rejects() {
        assert!(PhiFunction::randers().riemannian_guard().is_ok());
        assert!(PhiFunction::f0_type(Sign::Plus).riemannian_guard().is_ok());
        // √(1+s²) via the Douglas ODE is exactly the excluded family
        let riem = PhiFunction::douglas_ode(1.0, 0.0, 0.0, 0.0, 0.5).unwrap();
        assert!(riem.riemannian_guard().is_err());
    }

    #[test]
    fn regularity_examples() {
        let x = Point::origin(2);
        // β = 0 passes with margin 1
        let f0 =
            AlphaBetaMetric::randers(MetricField::euclidean(2), OneFormField::zero(2)).unwrap();
        let r0 = regularity_check(&f0, std::slice::from_ref(&x), 11).unwrap();
        assert!(r0.pass);
        assert_relative_eq!(r0.min_phi, 1.0);
        assert_relative_eq!(r0.min_criterion, 1.0);
        // b² = 1/4 passes with min φ = 1/2
        let f1 = AlphaBetaMetric::randers(
            MetricField::euclidean(2),
            OneFormField::constant(dvector![0.5, 0.0]),
        )
        .unwrap();
        let r1 = regularity_check(&f1, std::slice::from_ref(&x), 11).unwrap();
        assert!(r1.pass);
        assert_relative_eq!(r1.min_phi, 0.5, epsilon = 1e-12);
        // b² = 1 fails: φ(−1) = 0 at the boundary
        let f2 = AlphaBetaMetric::randers(
            MetricField::euclidean(2),
            OneFormField::constant(dvector![1.0, 0.0]),
        )
        .unwrap();
        let r2 = regularity_check(&f2, &[x], 11).unwrap();
        assert!(!r2.pass);
        assert!(r2.min_phi <= 0.0);
    }
}
