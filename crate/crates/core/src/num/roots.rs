//! Scalar root finding: bracket scan, then bisection refined by Newton.

/// Scan `[lo, hi]` at `n` nodes and return all sign-change brackets.
/// Nodes where `f` is not finite are skipped.
pub fn scan_brackets<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let mut brackets = Vec::new();
    let n = n.max(2);
    let h = (hi - lo) / (n - 1) as f64;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..n {
        let x = lo + i as f64 * h;
        let y = f(x);
        if !y.is_finite() {
            prev = None;
            continue;
        }
        if y == 0.0 {
            brackets.push((x, x));
            prev = None;
            continue;
        }
        if let Some((px, py)) = prev {
            if py.signum() != y.signum() {
                brackets.push((px, x));
            }
        }
        prev = Some((x, y));
    }
    brackets
}

/// Refine a root inside a sign-change bracket by bisection, then polish with
/// Newton steps using a finite-difference derivative. Converges to roughly
/// machine precision in the abscissa for smooth functions.
pub fn bisect_newton<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, xtol: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum(), "bisect_newton needs a bracket");
    // bisection down to a narrow interval
    for _ in 0..200 {
        if (b - a).abs() <= xtol.max(1e-15 * (1.0 + a.abs())) {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let _ = (fa, fb);
    // Newton polish, constrained to the bracket
    let mut x = 0.5 * (a + b);
    for _ in 0..8 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        let h = 1e-7 * (1.0 + x.abs());
        let dfx = (f(x + h) - f(x - h)) / (2.0 * h);
        if dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let x_new = x - fx / dfx;
        if !(a..=b).contains(&x_new) {
            break;
        }
        if (x_new - x).abs() <= 1e-16 * (1.0 + x.abs()) {
            return x_new;
        }
        x = x_new;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_roots() {
        let f = |x: f64| x * x - 2.0;
        let brs = scan_brackets(&f, -3.0, 3.0, 64);
        assert_eq!(brs.len(), 2);
        let r = bisect_newton(&f, brs[1].0, brs[1].1, 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn skips_non_finite_nodes() {
        let f = |x: f64| 1.0 / x - 2.0; // pole at 0, root at 0.5
        let brs = scan_brackets(&f, -1.0, 1.0, 101);
        // the pole sits exactly on a node and is skipped; only the true root brackets
        assert_eq!(brs.len(), 1);
        let r = bisect_newton(&f, brs[0].0, brs[0].1, 1e-12);
        assert!((r - 0.5).abs() < 1e-13);
    }
}
