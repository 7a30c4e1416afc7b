//! Classical fixed-step fourth-order Runge-Kutta integration.

use nalgebra::DVector;

/// One RK4 step of size `h` for `y' = f(t, y)`.
pub fn rk4_step<F>(f: &F, t: f64, y: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    let k1 = f(t, y);
    let k2 = f(t + h / 2.0, &(y + &k1 * (h / 2.0)));
    let k3 = f(t + h / 2.0, &(y + &k2 * (h / 2.0)));
    let k4 = f(t + h, &(y + &k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` in `n` fixed steps.
pub fn rk4_integrate<F>(f: &F, t0: f64, y0: &DVector<f64>, t1: f64, n: usize) -> DVector<f64>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    let h = (t1 - t0) / n as f64;
    let mut y = y0.clone();
    let mut t = t0;
    for _ in 0..n {
        y = rk4_step(f, t, &y, h);
        t += h;
    }
    y
}
