//! Flow-based verification of the pullback scaling laws: integrate the
//! flow φ_t of V together with its variational (Jacobian) equation and the
//! accumulated exponent σ_t = ∫₀ᵗ c(φ_s) ds, then compare
//! `F(φ_t(x), φ_{t*}(y))` against `e^{−2σ_t} F(x, y)` (conformal form) and
//! `e^{−2c(x)t} F(x, y)` (constant-exponent form).

use crate::alphabeta::AlphaBetaMetric;
use crate::error::{GeomError, Result};
use crate::geom::{Point, VectorFieldGeom};
use crate::num::ode;
use nalgebra::{DMatrix, DVector};

/// Optional chart-domain predicate for trajectories.
pub type DomainPredicate<'a> = &'a (dyn Fn(&Point) -> bool + Sync);

/// Endpoint, pushforward Jacobian and accumulated exponent of one flow.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub endpoint: Point,
    /// ∂φ_t/∂x at the start point (the pushforward of tangent vectors).
    pub jacobian: DMatrix<f64>,
    /// σ_t = ∫₀ᵗ c(φ_s) ds; zero when no factor was supplied.
    pub sigma: f64,
    /// Steps used at the accepted resolution.
    pub steps: usize,
    /// Number of step-halvings performed to converge the endpoint.
    pub halvings: usize,
}

/// Maximum number of step-halvings before accepting the endpoint.
const MAX_HALVINGS: usize = 6;
/// Endpoint-change threshold for accepting a resolution.
const ENDPOINT_TOL: f64 = 1e-10;

fn integrate_once(
    v: &VectorFieldGeom,
    factor: Option<&(dyn Fn(&Point) -> f64 + Sync)>,
    domain: Option<DomainPredicate>,
    x0: &Point,
    t: f64,
    steps: usize,
) -> Result<(DVector<f64>, usize)> {
    let n = x0.dim();
    // augmented state: x (n), J row-major (n²), σ (1)
    let mut state = DVector::zeros(n + n * n + 1);
    state.rows_mut(0, n).copy_from(x0.coords());
    for i in 0..n {
        state[n + i * n + i] = 1.0;
    }
    let rhs = |_t: f64, y: &DVector<f64>| {
        let x = Point::from(y.rows(0, n).into_owned());
        let vx = v.eval(&x);
        let dv = v.jacobian(&x);
        let mut out = DVector::zeros(n + n * n + 1);
        out.rows_mut(0, n).copy_from(&vx);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += dv[(i, k)] * y[n + k * n + j];
                }
                out[n + i * n + j] = acc;
            }
        }
        out[n + n * n] = factor.map_or(0.0, |c| c(&x));
        out
    };
    let h = t / steps as f64;
    let mut s = 0.0;
    for k in 0..steps {
        state = ode::rk4_step(&rhs, s, &state, h);
        s = (k + 1) as f64 * h;
        if let Some(dom) = domain {
            let x = Point::from(state.rows(0, n).into_owned());
            if !dom(&x) {
                return Err(GeomError::DomainEscape { t: s });
            }
        }
    }
    Ok((state, steps))
}

/// Integrate the flow of V for time `t` from `x0`, carrying the Jacobian
/// and (when `factor` is supplied) the exponent σ_t. The initial number of
/// steps is `max(100, ⌈|t|/step⌉)` with `step` defaulting to 1e−3, and the
/// step is halved until the endpoint moves less than 1e−10.
pub fn integrate_flow(
    v: &VectorFieldGeom,
    x0: &Point,
    t: f64,
    step: Option<f64>,
    factor: Option<&(dyn Fn(&Point) -> f64 + Sync)>,
    domain: Option<DomainPredicate>,
) -> Result<FlowResult> {
    let n = x0.dim();
    if t == 0.0 {
        return Ok(FlowResult {
            endpoint: x0.clone(),
            jacobian: DMatrix::identity(n, n),
            sigma: 0.0,
            steps: 0,
            halvings: 0,
        });
    }
    let base = step.unwrap_or(1e-3);
    let mut steps = ((t.abs() / base).ceil() as usize).max(100);
    let (mut state, _) = integrate_once(v, factor, domain, x0, t, steps)?;
    let mut halvings = 0;
    while halvings < MAX_HALVINGS {
        let (refined, _) = integrate_once(v, factor, domain, x0, t, steps * 2)?;
        let delta = (refined.rows(0, n) - state.rows(0, n)).norm();
        state = refined;
        steps *= 2;
        halvings += 1;
        if delta <= ENDPOINT_TOL {
            break;
        }
    }
    let endpoint = Point::from(state.rows(0, n).into_owned());
    let jacobian = DMatrix::from_fn(n, n, |i, j| state[n + i * n + j]);
    Ok(FlowResult {
        endpoint,
        jacobian,
        sigma: state[n + n * n],
        steps,
        halvings,
    })
}

/// Maximum relative errors of the two scaling laws over samples and times.
#[derive(Debug, Clone)]
pub struct ScalingCheck {
    /// max over samples of |F(φ_t x, J_t y) − e^{−2σ_t}F(x,y)| / F(x,y).
    pub max_err_sigma: f64,
    /// Same with e^{−2c(x)t} in place of e^{−2σ_t}.
    pub max_err_const: f64,
    /// (sample index, t) attaining `max_err_sigma`.
    pub worst_sigma: (usize, f64),
    /// (sample index, t) attaining `max_err_const`.
    pub worst_const: (usize, f64),
}

/// Evaluate both scaling laws for every sample pair and flow time.
pub fn check_scaling(
    f: &AlphaBetaMetric,
    v: &VectorFieldGeom,
    factor: &(dyn Fn(&Point) -> f64 + Sync),
    samples: &[(Point, DVector<f64>)],
    t_values: &[f64],
    domain: Option<DomainPredicate>,
) -> Result<ScalingCheck> {
    let mut out = ScalingCheck {
        max_err_sigma: 0.0,
        max_err_const: 0.0,
        worst_sigma: (0, 0.0),
        worst_const: (0, 0.0),
    };
    for (idx, (x, y)) in samples.iter().enumerate() {
        let f_xy = f.eval(x, y)?;
        for &t in t_values {
            let flow = integrate_flow(v, x, t, None, Some(factor), domain)?;
            let pushed = &flow.jacobian * y;
            let f_t = f.eval(&flow.endpoint, &pushed)?;
            let err_sigma = (f_t - (-2.0 * flow.sigma).exp() * f_xy).abs() / f_xy;
            let err_const = (f_t - (-2.0 * factor(x) * t).exp() * f_xy).abs() / f_xy;
            if err_sigma > out.max_err_sigma {
                out.max_err_sigma = err_sigma;
                out.worst_sigma = (idx, t);
            }
            if err_const > out.max_err_const {
                out.max_err_const = err_const;
                out.worst_const = (idx, t);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{MetricField, OneFormField};
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn zero_field_flow_is_identity() {
        let v = VectorFieldGeom::zero(2);
        let x0 = Point::from_slice(&[0.3, -0.4]).unwrap();
        let res = integrate_flow(&v, &x0, 0.7, None, None, None).unwrap();
        assert_eq!(res.endpoint, x0);
        assert_eq!(res.jacobian, DMatrix::identity(2, 2));
        assert_eq!(res.sigma, 0.0);
    }

    #[test]
    fn dilation_flow_closed_form() {
        let tau = 0.8;
        let v = VectorFieldGeom::dilation(tau, 2);
        let x0 = Point::from_slice(&[0.5, -0.2]).unwrap();
        let t = 0.4;
        let res = integrate_flow(&v, &x0, t, None, None, None).unwrap();
        let scale = (-2.0 * tau * t).exp();
        assert_relative_eq!(res.endpoint.coords(), &(x0.coords() * scale), epsilon = 1e-8);
        assert_relative_eq!(
            res.jacobian,
            DMatrix::identity(2, 2) * scale,
            epsilon = 1e-8
        );
    }

    #[test]
    fn flow_group_property() {
        // nonlinear field: V = (−x₁ + 0.3x₂², −x₂)
        let v = VectorFieldGeom::new(
            2,
            std::sync::Arc::new(|x: &Point| {
                let c = x.coords();
                dvector![-c[0] + 0.3 * c[1] * c[1], -c[1]]
            }),
        );
        let x0 = Point::from_slice(&[0.4, 0.6]).unwrap();
        let (t, s) = (0.3, 0.2);
        let whole = integrate_flow(&v, &x0, t + s, None, None, None).unwrap();
        let part1 = integrate_flow(&v, &x0, s, None, None, None).unwrap();
        let part2 = integrate_flow(&v, &part1.endpoint, t, None, None, None).unwrap();
        assert_relative_eq!(
            whole.endpoint.coords(),
            part2.endpoint.coords(),
            epsilon = 1e-7
        );
    }

    #[test]
    fn sigma_is_additive_along_the_flow() {
        let v = VectorFieldGeom::dilation(0.5, 2);
        let c = |x: &Point| 1.0 + x.norm_sq();
        let x0 = Point::from_slice(&[0.3, 0.1]).unwrap();
        let (t, s) = (0.25, 0.15);
        let whole = integrate_flow(&v, &x0, t + s, None, Some(&c), None).unwrap();
        let part1 = integrate_flow(&v, &x0, t, None, Some(&c), None).unwrap();
        let part2 = integrate_flow(&v, &part1.endpoint, s, None, Some(&c), None).unwrap();
        assert_relative_eq!(whole.sigma, part1.sigma + part2.sigma, epsilon = 1e-8);
    }

    #[test]
    fn variational_jacobian_matches_finite_differences() {
        let v = VectorFieldGeom::new(
            2,
            std::sync::Arc::new(|x: &Point| {
                let c = x.coords();
                dvector![c[1], -c[0].sin()]
            }),
        );
        let x0 = Point::from_slice(&[0.4, -0.1]).unwrap();
        let t = 0.5;
        let res = integrate_flow(&v, &x0, t, None, None, None).unwrap();
        let eps = 1e-5;
        for k in 0..2 {
            let mut xp = x0.coords().clone();
            xp[k] += eps;
            let mut xm = x0.coords().clone();
            xm[k] -= eps;
            let fp = integrate_flow(&v, &Point::from(xp), t, None, None, None).unwrap();
            let fm = integrate_flow(&v, &Point::from(xm), t, None, None, None).unwrap();
            let fd_col = (fp.endpoint.coords() - fm.endpoint.coords()) / (2.0 * eps);
            for i in 0..2 {
                assert!(
                    (res.jacobian[(i, k)] - fd_col[i]).abs() < 1e-6,
                    "J[{i},{k}] variational {} vs fd {}",
                    res.jacobian[(i, k)],
                    fd_col[i]
                );
            }
        }
    }

    #[test]
    fn domain_escape_is_reported() {
        let v = VectorFieldGeom::linear(DMatrix::identity(2, 2)); // outward flow
        let x0 = Point::from_slice(&[0.45, 0.0]).unwrap();
        let dom = |x: &Point| x.norm() < 0.5;
        let err = integrate_flow(&v, &x0, 1.0, None, None, Some(&dom));
        assert!(matches!(err, Err(GeomError::DomainEscape { .. })));
    }

    #[test]
    fn minkowski_randers_dilation_scaling() {
        // constant Randers data, V = −2τx homothetic with c ≡ τ:
        // both scaling forms hold to integrator accuracy
        let f = AlphaBetaMetric::randers(
            MetricField::euclidean(2),
            OneFormField::constant(dvector![0.4, 0.1]),
        )
        .unwrap();
        let tau = 0.7;
        let v = VectorFieldGeom::dilation(tau, 2);
        let c = move |_: &Point| tau;
        let samples = vec![
            (Point::from_slice(&[0.3, 0.2]).unwrap(), dvector![1.0, 0.3]),
            (Point::from_slice(&[-0.2, 0.4]).unwrap(), dvector![-0.5, 1.0]),
        ];
        let check = check_scaling(&f, &v, &c, &samples, &[0.1, 0.3, 0.5], None).unwrap();
        assert!(check.max_err_sigma <= 1e-6, "σ-form error {}", check.max_err_sigma);
        assert!(check.max_err_const <= 1e-6, "c-form error {}", check.max_err_const);
    }

    #[test]
    fn killing_rotation_leaves_norm_invariant() {
        let f = AlphaBetaMetric::randers(MetricField::euclidean(2), OneFormField::zero(2)).unwrap();
        let v = VectorFieldGeom::linear(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let c = |_: &Point| 0.0;
        let samples = vec![(Point::from_slice(&[0.3, 0.1]).unwrap(), dvector![0.8, -0.6])];
        let check = check_scaling(&f, &v, &c, &samples, &[0.2, 0.5], None).unwrap();
        assert!(check.max_err_sigma <= 1e-8);
        assert!(check.max_err_const <= 1e-8);
    }
}
