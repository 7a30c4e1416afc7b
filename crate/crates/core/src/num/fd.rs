//! Central finite differences with Richardson extrapolation.
//!
//! Steps are scaled by `1 + |x|` so accuracy degrades gracefully away from
//! the origin. The Richardson combination of two central differences has
//! O(h⁴) truncation, which keeps the derivative floor two orders below the
//! residual tolerances used elsewhere.

use nalgebra::DVector;
use std::ops::{Add, Div, Mul, Sub};

/// Default step for first derivatives, before the `1 + |x|` scaling.
pub const STEP1: f64 = 1e-5;
/// Default step for second derivatives, before the `1 + |x|` scaling.
pub const STEP2: f64 = 1e-4;

/// First-derivative step at a point of coordinate norm `x_norm`.
pub fn step1(x_norm: f64) -> f64 {
    STEP1 * (1.0 + x_norm)
}

/// Second-derivative step at a point of coordinate norm `x_norm`.
pub fn step2(x_norm: f64) -> f64 {
    STEP2 * (1.0 + x_norm)
}

/// Central difference of a scalar function of one variable.
pub fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Richardson-extrapolated central difference (fourth order).
pub fn central_richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d_h = central(&f, x, h);
    let d_h2 = central(&f, x, h / 2.0);
    (4.0 * d_h2 - d_h) / 3.0
}

/// Central partial derivative `∂f/∂x_k` of a vector-to-T function.
pub fn partial<T, F>(f: &F, x: &DVector<f64>, k: usize, h: f64) -> T
where
    F: Fn(&DVector<f64>) -> T,
    T: Sub<Output = T> + Div<f64, Output = T>,
{
    let mut xp = x.clone();
    xp[k] += h;
    let mut xm = x.clone();
    xm[k] -= h;
    (f(&xp) - f(&xm)) / (2.0 * h)
}

/// Richardson-extrapolated central partial derivative.
pub fn partial_richardson<T, F>(f: &F, x: &DVector<f64>, k: usize, h: f64) -> T
where
    F: Fn(&DVector<f64>) -> T,
    T: Sub<Output = T> + Div<f64, Output = T> + Mul<f64, Output = T>,
{
    let d_h: T = partial(f, x, k, h);
    let d_h2: T = partial(f, x, k, h / 2.0);
    (d_h2 * 4.0 - d_h) / 3.0
}

/// Second partial derivative `∂²f/∂x_k∂x_l` by central differences.
pub fn second_partial<T, F>(f: &F, x: &DVector<f64>, k: usize, l: usize, h: f64) -> T
where
    F: Fn(&DVector<f64>) -> T,
    T: Add<Output = T> + Sub<Output = T> + Div<f64, Output = T> + Mul<f64, Output = T>,
{
    if k == l {
        let mut xp = x.clone();
        xp[k] += h;
        let mut xm = x.clone();
        xm[k] -= h;
        (f(&xp) + f(&xm) - f(x) * 2.0) / (h * h)
    } else {
        let shift = |dk: f64, dl: f64| {
            let mut xs = x.clone();
            xs[k] += dk;
            xs[l] += dl;
            f(&xs)
        };
        (shift(h, h) + shift(-h, -h) - shift(h, -h) - shift(-h, h)) / (4.0 * h * h)
    }
}

/// Gradient of a scalar function of a vector, Richardson-extrapolated.
pub fn gradient<F: Fn(&DVector<f64>) -> f64>(f: &F, x: &DVector<f64>) -> DVector<f64> {
    let h = step1(x.norm());
    DVector::from_fn(x.len(), |k, _| partial_richardson(f, x, k, h))
}
