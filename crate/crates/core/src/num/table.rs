//! Cubic Hermite interpolation on a uniform grid. Used for tabulated ODE
//! solutions where both values and first derivatives are known at the nodes.

/// Uniform-grid cubic Hermite table.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    x0: f64,
    dx: f64,
    ys: Vec<f64>,
    dys: Vec<f64>,
}

impl HermiteTable {
    pub fn new(x0: f64, dx: f64, ys: Vec<f64>, dys: Vec<f64>) -> Self {
        assert!(ys.len() == dys.len() && ys.len() >= 2);
        assert!(dx > 0.0);
        Self { x0, dx, ys, dys }
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.dx * (self.ys.len() - 1) as f64
    }

    fn segment(&self, x: f64) -> (usize, f64) {
        let s = (x - self.x0) / self.dx;
        let i = (s.floor() as isize).clamp(0, self.ys.len() as isize - 2) as usize;
        (i, s - i as f64)
    }

    /// Interpolated value; clamps to the end segments outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let (i, t) = self.segment(x);
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i]
            + h10 * self.dx * self.dys[i]
            + h01 * self.ys[i + 1]
            + h11 * self.dx * self.dys[i + 1]
    }

    /// Interpolated first derivative.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        let (i, t) = self.segment(x);
        let t2 = t * t;
        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -6.0 * t2 + 6.0 * t;
        let dh11 = 3.0 * t2 - 2.0 * t;
        (dh00 * self.ys[i] + dh01 * self.ys[i + 1]) / self.dx
            + dh10 * self.dys[i]
            + dh11 * self.dys[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| x.powi(3) - x + 2.0;
        let df = |x: f64| 3.0 * x * x - 1.0;
        let n = 11;
        let (x0, dx) = (-1.0, 0.2);
        let xs: Vec<f64> = (0..n).map(|i| x0 + dx * i as f64).collect();
        let table = HermiteTable::new(
            x0,
            dx,
            xs.iter().map(|&x| f(x)).collect(),
            xs.iter().map(|&x| df(x)).collect(),
        );
        for i in 0..50 {
            let x = -1.0 + 2.0 * i as f64 / 49.0;
            assert!((table.eval(x) - f(x)).abs() < 1e-13);
            assert!((table.eval_deriv(x) - df(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_function_interpolation_error_is_quartic() {
        let f = |x: f64| x.sin();
        let build = |n: usize| {
            let dx = 1.0 / (n - 1) as f64;
            HermiteTable::new(
                0.0,
                dx,
                (0..n).map(|i| f(dx * i as f64)).collect(),
                (0..n).map(|i| (dx * i as f64).cos()).collect(),
            )
        };
        let err = |t: &HermiteTable| {
            (0..1000)
                .map(|i| (t.eval(i as f64 / 999.0) - f(i as f64 / 999.0)).abs())
                .fold(0.0f64, f64::max)
        };
        let (e1, e2) = (err(&build(11)), err(&build(21)));
        assert!(e1 / e2 > 10.0, "expected ~16x reduction, got {}", e1 / e2);
    }
}
