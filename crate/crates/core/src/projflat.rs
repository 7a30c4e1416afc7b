//! Non-homothetic conformal fields on locally projectively flat Randers
//! charts: the linear f(c)-ODE with its quadratic denominator, the
//! compatibility constraints on (μ, τ, η, γ, Q), assembly of the full
//! instance `β = f(c) dc`, the A₁/A₂ residual vectors, and the closed-form
//! simple family with f = 1/c.

use crate::alphabeta::AlphaBetaMetric;
use crate::error::{GeomError, Result};
use crate::families::lemma22_general;
use crate::geom::{ConstCurvChart, MetricField, OneFormField, Point, VectorFieldGeom};
use crate::num::{ode, table::HermiteTable};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Parameters of the construction; μ ≠ 0, Q exactly skew, and (c₀, f₀)
/// normalizing the f-ODE solution.
#[derive(Debug, Clone)]
pub struct Example72Params {
    pub mu: f64,
    pub tau: f64,
    pub eta: DVector<f64>,
    pub gamma: DVector<f64>,
    pub q: DMatrix<f64>,
    pub c0: f64,
    pub f0: f64,
}

impl Example72Params {
    pub fn new(
        mu: f64,
        tau: f64,
        eta: DVector<f64>,
        gamma: DVector<f64>,
        q: DMatrix<f64>,
        c0: f64,
        f0: f64,
    ) -> Result<Self> {
        if mu == 0.0 {
            return Err(GeomError::InvalidFamilyParams("μ must be nonzero".into()));
        }
        let n = eta.len();
        if gamma.len() != n || q.nrows() != n || q.ncols() != n {
            return Err(GeomError::InvalidFamilyParams(
                "inconsistent parameter dimensions".into(),
            ));
        }
        for i in 0..n {
            for j in 0..n {
                if q[(i, j)] != -q[(j, i)] {
                    return Err(GeomError::InvalidFamilyParams(
                        "Q must be exactly skew-symmetric".into(),
                    ));
                }
            }
        }
        Ok(Self {
            mu,
            tau,
            eta,
            gamma,
            q,
            c0,
            f0,
        })
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }
}

/// Residuals of the two compatibility equalities
/// `Qη = −μ(4τγ + Qγ)` and `|η|² = μ(μ|γ|² − 4τ²)`.
#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    pub vector_residual: f64,
    pub scalar_residual: f64,
    pub pass: bool,
}

pub fn check_compatibility(params: &Example72Params) -> CompatibilityReport {
    let vector_residual = (&params.q * &params.eta
        + (&params.gamma * (4.0 * params.tau) + &params.q * &params.gamma) * params.mu)
        .norm();
    let scalar_residual = (params.eta.norm_squared()
        - params.mu * (params.mu * params.gamma.norm_squared() - 4.0 * params.tau * params.tau))
        .abs();
    CompatibilityReport {
        vector_residual,
        scalar_residual,
        pass: vector_residual <= 1e-10 && scalar_residual <= 1e-10,
    }
}

/// The scalar function f(c) with its derivative, valid on a c-interval.
#[derive(Clone)]
enum FKind {
    /// f = k/c, the exact solution when the denominator constant vanishes.
    Reciprocal { k: f64 },
    /// Tabulated RK4 solution with f′ = g(c) f.
    Table {
        table: HermiteTable,
        g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

#[derive(Clone)]
pub struct FFunction {
    kind: FKind,
    range: (f64, f64),
}

impl std::fmt::Debug for FFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.kind {
            FKind::Reciprocal { k } => format!("reciprocal(k={k})"),
            FKind::Table { .. } => "table".to_string(),
        };
        f.debug_struct("FFunction")
            .field("kind", &kind)
            .field("range", &self.range)
            .finish()
    }
}

impl FFunction {
    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    fn check(&self, c: f64) -> Result<()> {
        if c < self.range.0 - 1e-9 || c > self.range.1 + 1e-9 {
            return Err(GeomError::DomainViolation(format!(
                "c = {c} outside the solved f-range {:?}",
                self.range
            )));
        }
        Ok(())
    }

    pub fn eval(&self, c: f64) -> Result<f64> {
        self.check(c)?;
        Ok(match &self.kind {
            FKind::Reciprocal { k } => k / c,
            FKind::Table { table, .. } => table.eval(c),
        })
    }

    pub fn deriv(&self, c: f64) -> Result<f64> {
        self.check(c)?;
        Ok(match &self.kind {
            FKind::Reciprocal { k } => -k / (c * c),
            FKind::Table { table, g } => g(c) * table.eval(c),
        })
    }
}

/// Solve `f′(c) = 2(c − τ)/(2τc − 2c² + μ|γ|² + ⟨η, γ⟩) · f(c)` on
/// `c_range` with f(c₀) = f₀.
///
/// The denominator is the quadratic `D(c) = −2(c − r₁)(c − r₂)`. A root
/// equal to τ cancels against the numerator and is removable (this happens
/// exactly when μ|γ|² + ⟨η, γ⟩ = 0, where f = f₀c₀/c solves the equation
/// exactly); any other root inside the range is a genuine singularity.
pub fn solve_f_ode(
    tau: f64,
    mu: f64,
    gamma: &DVector<f64>,
    eta: &DVector<f64>,
    c_range: (f64, f64),
    c0: f64,
    f0: f64,
) -> Result<FFunction> {
    let (lo, hi) = c_range;
    if !(lo < hi) {
        return Err(GeomError::InvalidFamilyParams(format!(
            "empty c-range [{lo}, {hi}]"
        )));
    }
    if f0 == 0.0 {
        return Err(GeomError::InvalidFamilyParams(
            "f₀ = 0 yields the trivial solution β = 0".into(),
        ));
    }
    if c0 < lo || c0 > hi {
        return Err(GeomError::InvalidFamilyParams(format!(
            "normalization point c₀ = {c0} outside the range [{lo}, {hi}]"
        )));
    }
    let e_const = mu * gamma.norm_squared() + eta.dot(gamma);
    let scale = 1.0 + tau * tau;
    let in_range = |r: f64| r >= lo && r <= hi;

    if e_const.abs() <= 1e-12 * scale {
        // roots {0, τ}; the τ-root is removable, leaving f′ = −f/c
        if in_range(0.0) {
            return Err(GeomError::SingularOde {
                roots: vec![0.0, tau],
            });
        }
        return Ok(FFunction {
            kind: FKind::Reciprocal { k: f0 * c0 },
            range: (lo, hi),
        });
    }

    let disc = tau * tau + 2.0 * e_const;
    let g: Arc<dyn Fn(f64) -> f64 + Send + Sync> = if disc >= 0.0 {
        let r1 = (tau - disc.sqrt()) / 2.0;
        let r2 = (tau + disc.sqrt()) / 2.0;
        // e_const ≠ 0 means neither root equals τ; both are genuine
        if in_range(r1) || in_range(r2) {
            return Err(GeomError::SingularOde {
                roots: vec![r1, r2],
            });
        }
        Arc::new(move |c: f64| -(c - tau) / ((c - r1) * (c - r2)))
    } else {
        Arc::new(move |c: f64| 2.0 * (c - tau) / (2.0 * tau * c - 2.0 * c * c + e_const))
    };

    // tabulate by RK4 from c0 in both directions
    let n_steps = (((hi - lo) / 1e-3).ceil() as usize).max(16);
    let ds = (hi - lo) / n_steps as f64;
    // index of the node closest to c0; integrate outward from there
    let i0 = ((c0 - lo) / ds).round() as usize;
    let mut ys = vec![0.0; n_steps + 1];
    let g2 = g.clone();
    let sys = move |c: f64, y: &DVector<f64>| {
        DVector::from_vec(vec![g2(c) * y[0]])
    };
    // first reach the grid node nearest c0 exactly
    let c_i0 = lo + ds * i0 as f64;
    let y_i0 = ode::rk4_integrate(&sys, c0, &DVector::from_vec(vec![f0]), c_i0, 64)[0];
    ys[i0] = y_i0;
    let mut y = DVector::from_vec(vec![y_i0]);
    for i in i0..n_steps {
        let c = lo + ds * i as f64;
        y = ode::rk4_step(&sys, c, &y, ds);
        ys[i + 1] = y[0];
    }
    y = DVector::from_vec(vec![y_i0]);
    for i in (0..i0).rev() {
        let c = lo + ds * (i + 1) as f64;
        y = ode::rk4_step(&sys, c, &y, -ds);
        ys[i] = y[0];
    }
    let dys: Vec<f64> = (0..=n_steps)
        .map(|i| {
            let c = lo + ds * i as f64;
            g(c) * ys[i]
        })
        .collect();
    Ok(FFunction {
        kind: FKind::Table {
            table: HermiteTable::new(lo, ds, ys, dys),
            g,
        },
        range: (lo, hi),
    })
}

/// Closed forms of c(x) = (τ(1 − μ|x|²) + ⟨m, x⟩)/(1 + μ|x|²) and its
/// first and second coordinate derivatives, with m = μγ + η.
#[derive(Clone, Debug)]
struct FactorForm {
    mu: f64,
    tau: f64,
    m: DVector<f64>,
}

impl FactorForm {
    fn w(&self, x: &Point) -> f64 {
        1.0 + self.mu * x.norm_sq()
    }

    fn value(&self, x: &Point) -> f64 {
        (self.tau * (1.0 - self.mu * x.norm_sq()) + self.m.dot(x.coords())) / self.w(x)
    }

    fn grad(&self, x: &Point) -> DVector<f64> {
        let w = self.w(x);
        let c = self.value(x);
        (&self.m - x.coords() * (2.0 * self.mu * (self.tau + c))) / w
    }

    fn hess(&self, x: &Point) -> DMatrix<f64> {
        let n = x.dim();
        let w = self.w(x);
        let c = self.value(x);
        let dc = self.grad(x);
        let xs = x.coords();
        DMatrix::from_fn(n, n, |i, j| {
            let dij = if i == j { 1.0 } else { 0.0 };
            -(2.0 * self.mu / w) * (dc[i] * xs[j] + dc[j] * xs[i] + (self.tau + c) * dij)
        })
    }
}

/// A fully assembled locally projectively flat Randers instance: the chart
/// metric α of curvature μ, the exact 1-form β = f(c) dc, the candidate
/// conformal field V and the closed-form factor c.
#[derive(Clone)]
pub struct ProjFlatRandersInstance {
    pub chart: ConstCurvChart,
    pub alpha: MetricField,
    pub beta: OneFormField,
    pub v: VectorFieldGeom,
    pub factor: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    pub f: FFunction,
    /// Radius of the largest sampled centered ball with ‖β‖²_α ≤ 0.95.
    pub regular_radius: f64,
    pub params: Example72Params,
}

impl std::fmt::Debug for ProjFlatRandersInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProjFlatRandersInstance")
            .field("params", &self.params)
            .field("regular_radius", &self.regular_radius)
            .finish()
    }
}

impl ProjFlatRandersInstance {
    /// The Randers metric F = α + β of the instance.
    pub fn randers(&self) -> Result<AlphaBetaMetric> {
        AlphaBetaMetric::randers(self.alpha.clone(), self.beta.clone())
    }
}

/// Grid resolution and scan bound of the regularity search.
const SCAN_RES: f64 = 0.05;
const SCAN_MAX: f64 = 0.8;
/// Margin kept below the Randers bound ‖β‖²_α < 1.
const B2_LIMIT: f64 = 0.95;

fn grid_points(n: usize, radius: f64) -> Vec<DVector<f64>> {
    let k_max = (radius / SCAN_RES).floor() as i64;
    let mut idx = vec![-k_max; n];
    let mut out = Vec::new();
    loop {
        let x = DVector::from_fn(n, |i, _| idx[i] as f64 * SCAN_RES);
        if x.norm() <= radius {
            out.push(x);
        }
        // odometer increment
        let mut dim = 0;
        loop {
            idx[dim] += 1;
            if idx[dim] <= k_max {
                break;
            }
            idx[dim] = -k_max;
            dim += 1;
            if dim == n {
                return out;
            }
        }
    }
}

fn b2_at(form: &FactorForm, f: &FFunction, mu: f64, x: &Point) -> Result<f64> {
    let w = 1.0 + mu * x.norm_sq();
    let c = form.value(x);
    let fval = f.eval(c)?;
    let dc = form.grad(x);
    Ok(w * w / 4.0 * fval * fval * dc.norm_squared())
}

/// Assemble the instance: verify compatibility, solve the f-ODE over the
/// attained c-range (padded 10%), and record the largest centered ball on
/// which F = α + β stays regular with margin.
pub fn build_example72(params: &Example72Params) -> Result<ProjFlatRandersInstance> {
    let compat = check_compatibility(params);
    if !compat.pass {
        return Err(GeomError::PreconditionViolation(format!(
            "compatibility residuals {:.3e} / {:.3e} exceed 1e-10",
            compat.vector_residual, compat.scalar_residual
        )));
    }
    build_example72_unchecked(params)
}

/// Assembly without the compatibility gate, for negative-control runs that
/// deliberately exercise incompatible parameters. The f-ODE and the
/// regularity scan still apply.
pub fn build_example72_unchecked(params: &Example72Params) -> Result<ProjFlatRandersInstance> {
    let n = params.dim();
    let chart = ConstCurvChart::new(params.mu, n)?;
    let form = FactorForm {
        mu: params.mu,
        tau: params.tau,
        m: &params.gamma * params.mu + &params.eta,
    };

    // find a scan radius whose c-range admits the f-ODE
    let mut solved: Option<(FFunction, f64)> = None;
    let mut radius = SCAN_MAX;
    while radius >= SCAN_RES - 1e-12 {
        let pts: Vec<Point> = grid_points(n, radius)
            .into_iter()
            .map(Point::from)
            .filter(|p| 1.0 + params.mu * p.norm_sq() > 0.5)
            .collect();
        if pts.is_empty() {
            radius -= SCAN_RES;
            continue;
        }
        let mut c_lo = f64::INFINITY;
        let mut c_hi = f64::NEG_INFINITY;
        for p in &pts {
            let c = form.value(p);
            c_lo = c_lo.min(c);
            c_hi = c_hi.max(c);
        }
        let pad = 0.1 * (c_hi - c_lo).max(0.1 * (1.0 + c_hi.abs()));
        let range = (
            (c_lo - pad).min(params.c0),
            (c_hi + pad).max(params.c0),
        );
        match solve_f_ode(
            params.tau,
            params.mu,
            &params.gamma,
            &params.eta,
            range,
            params.c0,
            params.f0,
        ) {
            Ok(f) => {
                solved = Some((f, radius));
                break;
            }
            Err(GeomError::SingularOde { .. }) => {
                radius -= SCAN_RES;
            }
            Err(e) => return Err(e),
        }
    }
    let (f, scan_radius) = solved.ok_or(GeomError::EmptyRegularRegion)?;

    // largest centered ball with b² ≤ B2_LIMIT at every grid point
    let mut violation_radius = f64::INFINITY;
    for xv in grid_points(n, scan_radius) {
        let p = Point::from(xv);
        if 1.0 + params.mu * p.norm_sq() <= 0.5 {
            violation_radius = violation_radius.min(p.norm());
            continue;
        }
        match b2_at(&form, &f, params.mu, &p) {
            Ok(b2) if b2 <= B2_LIMIT => {}
            _ => violation_radius = violation_radius.min(p.norm()),
        }
    }
    let regular_radius = if violation_radius.is_infinite() {
        scan_radius
    } else {
        ((violation_radius / SCAN_RES).floor() - 1.0) * SCAN_RES
    };
    if regular_radius < SCAN_RES {
        return Err(GeomError::EmptyRegularRegion);
    }

    // β = f(c) dc with analytic derivatives through c's closed forms
    let (form_b, f_b) = (form.clone(), f.clone());
    let beta_coeff = Arc::new(move |x: &Point| {
        let c = form_b.value(x);
        form_b.grad(x) * f_b.eval(c).expect("c inside the solved f-range")
    });
    let (form_g, f_g) = (form.clone(), f.clone());
    let beta_grad = Arc::new(move |x: &Point| {
        let c = form_g.value(x);
        let fval = f_g.eval(c).expect("c inside the solved f-range");
        let fder = f_g.deriv(c).expect("c inside the solved f-range");
        let dc = form_g.grad(x);
        let hc = form_g.hess(x);
        let n = x.dim();
        DMatrix::from_fn(n, n, |i, j| fder * dc[i] * dc[j] + fval * hc[(i, j)])
    });
    let beta = OneFormField::new(n, beta_coeff).with_grad(beta_grad);

    // V of the general conformal-field form, factor from the same closed form
    let cvf = lemma22_general(params.mu, params.tau, &params.eta, &params.gamma, &params.q)?;
    let form_c = form.clone();
    let factor = Arc::new(move |x: &Point| form_c.value(x));

    Ok(ProjFlatRandersInstance {
        chart,
        alpha: chart.metric_field(),
        beta,
        v: cvf.field,
        factor,
        f,
        regular_radius,
        params: params.clone(),
    })
}

/// The coordinate-form transport residual of the second conformal
/// equation, `V^j ∂_j b_i + b_j ∂_i V^j + 2c b_i`.
pub fn beta_transport_residual(
    beta: &OneFormField,
    v: &VectorFieldGeom,
    c: f64,
    x: &Point,
) -> DVector<f64> {
    let n = beta.dim();
    let b = beta.coeffs(x);
    let db = beta.coeff_grad(x);
    let vx = v.eval(x);
    let jv = v.jacobian(x);
    DVector::from_fn(n, |i, _| {
        let mut val = 2.0 * c * b[i];
        for j in 0..n {
            val += vx[j] * db[(i, j)] + b[j] * jv[(j, i)];
        }
        val
    })
}

/// The two displayed residual vectors A₁ and A₂ of the construction,
/// evaluated literally; for compatible parameters both vanish, and in
/// general `A₁|x|² + A₂ = (1 + μ|x|²)² · (transport residual)`.
pub fn eval_a1_a2(
    params: &Example72Params,
    f: &FFunction,
    x: &Point,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = params.dim();
    let (mu, tau) = (params.mu, params.tau);
    let (eta, gamma, q) = (&params.eta, &params.gamma, &params.q);
    let form = FactorForm {
        mu,
        tau,
        m: gamma * mu + eta,
    };
    let c = form.value(x);
    let f0 = f.eval(c)?;
    let f1 = f.deriv(c)?;
    let xs = x.coords();
    let q_eta = q * eta;
    let q_gamma = q * gamma;
    let eta_sq = eta.norm_squared();
    let gamma_sq = gamma.norm_squared();
    let eta_gamma = eta.dot(gamma);
    let k_lin = (gamma * (4.0 * mu * tau) + &q_eta + &q_gamma * mu).dot(xs);
    let d_const = 2.0 * tau * c - 2.0 * c * c + mu * gamma_sq + eta_gamma;

    let mut a1 = DVector::zeros(n);
    let mut a2 = DVector::zeros(n);
    let a1_scalar = 2.0 * mu * c * c - 2.0 * mu * tau * c - 4.0 * mu * tau * tau
        - eta_sq
        - mu * eta_gamma;
    for i in 0..n {
        let drift =
            2.0 * (tau - c) * eta[i] - 2.0 * mu * (tau + c) * gamma[i] - q_eta[i] - mu * q_gamma[i];
        a1[i] = (2.0 * mu * (c + tau) * xs[i] - eta[i] - mu * gamma[i]) * a1_scalar * f1
            + mu * (drift + 4.0 * mu * (c * c - tau * tau) * xs[i]) * f0;
        a2[i] = (2.0 * mu * ((tau + c) * f1 + f0) * k_lin
            - 2.0 * mu * (tau + c) * d_const * f1
            - 2.0 * (mu * mu * gamma_sq - eta_sq - 2.0 * mu * tau * tau - 2.0 * mu * c * c) * f0)
            * xs[i]
            - (eta[i] + mu * gamma[i]) * f1 * k_lin
            + (eta[i] + mu * gamma[i]) * d_const * f1
            + drift * f0;
    }
    Ok((a1, a2))
}

/// The closed-form simple family: Q = 0, γ = 0, f = 1/c, requiring
/// `|η|² = −4μτ²` (so μ < 0). β and V take the displayed closed forms.
pub fn simple_family(mu: f64, tau: f64, eta: &DVector<f64>) -> Result<ProjFlatRandersInstance> {
    if mu >= 0.0 {
        return Err(GeomError::PreconditionViolation(format!(
            "the simple family requires μ < 0, got μ = {mu}"
        )));
    }
    let defect = (eta.norm_squared() + 4.0 * mu * tau * tau).abs();
    if defect > 1e-10 {
        return Err(GeomError::PreconditionViolation(format!(
            "|η|² + 4μτ² = {defect:.3e} must vanish"
        )));
    }
    let n = eta.len();
    let params = Example72Params::new(
        mu,
        tau,
        eta.clone(),
        DVector::zeros(n),
        DMatrix::zeros(n, n),
        tau,
        1.0 / tau,
    )?;
    let chart = ConstCurvChart::new(mu, n)?;
    let form = FactorForm {
        mu,
        tau,
        m: eta.clone(),
    };

    // β directly from the displayed formula b = dc / c
    let form_b = form.clone();
    let beta_coeff = Arc::new(move |x: &Point| {
        let w = 1.0 + mu * x.norm_sq();
        let numer = form_b.m.clone()
            - x.coords() * (2.0 * mu * (2.0 * tau + form_b.m.dot(x.coords())) / w);
        let denom = tau * (1.0 - mu * x.norm_sq()) + form_b.m.dot(x.coords());
        numer / denom
    });
    let form_g = form.clone();
    let beta_grad = Arc::new(move |x: &Point| {
        // ∂_j (c_i / c) = c_ij/c − c_i c_j / c²
        let c = form_g.value(x);
        let dc = form_g.grad(x);
        let hc = form_g.hess(x);
        let n = x.dim();
        DMatrix::from_fn(n, n, |i, j| hc[(i, j)] / c - dc[i] * dc[j] / (c * c))
    });
    let beta = OneFormField::new(n, beta_coeff).with_grad(beta_grad);

    // region scan: where is c positive and b² within margin
    let f = FFunction {
        kind: FKind::Reciprocal { k: 1.0 },
        range: (f64::MIN_POSITIVE, f64::MAX),
    };
    let mut violation_radius = f64::INFINITY;
    for xv in grid_points(n, SCAN_MAX) {
        let p = Point::from(xv);
        if 1.0 + mu * p.norm_sq() <= 0.5 || form.value(&p) <= 0.0 {
            violation_radius = violation_radius.min(p.norm());
            continue;
        }
        match b2_at(&form, &f, mu, &p) {
            Ok(b2) if b2 <= B2_LIMIT => {}
            _ => violation_radius = violation_radius.min(p.norm()),
        }
    }
    let regular_radius = if violation_radius.is_infinite() {
        SCAN_MAX
    } else {
        ((violation_radius / SCAN_RES).floor() - 1.0) * SCAN_RES
    };
    if regular_radius < SCAN_RES {
        return Err(GeomError::EmptyRegularRegion);
    }
    // restrict f's range to the attained c-values, padded
    let mut c_lo = f64::INFINITY;
    let mut c_hi = f64::NEG_INFINITY;
    for xv in grid_points(n, regular_radius) {
        let c = form.value(&Point::from(xv));
        c_lo = c_lo.min(c);
        c_hi = c_hi.max(c);
    }
    let pad = 0.1 * (c_hi - c_lo).max(0.1);
    let f = FFunction {
        kind: FKind::Reciprocal { k: 1.0 },
        range: (c_lo - pad, c_hi + pad),
    };

    let cvf = lemma22_general(mu, tau, eta, &DVector::zeros(n), &DMatrix::zeros(n, n))?;
    let form_c = form.clone();
    let factor = Arc::new(move |x: &Point| form_c.value(x));
    Ok(ProjFlatRandersInstance {
        chart,
        alpha: chart.metric_field(),
        beta,
        v: cvf.field,
        factor,
        f,
        regular_radius,
        params,
    })
}
