use crate::error::{GeomError, Result};
use crate::geom::{christoffel, MetricField, Point};
use nalgebra::{DMatrix, DVector};

/// Relative Gram threshold for rejecting near-collinear plane spans.
const PLANE_TOL: f64 = 1e-10;

/// Curvature tensor `R^i_{jkl}` with the convention
/// `R(∂_k, ∂_l)∂_j = R^i_{jkl} ∂_i`, assembled from the connection
/// coefficients and their first derivatives:
///
/// `R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{km}Γ^m_{lj} − Γ^i_{lm}Γ^m_{kj}`
fn riemann_mixed(metric: &MetricField, x: &Point) -> Result<Vec<Vec<DMatrix<f64>>>> {
    let n = metric.dim();
    let ainv = metric.inverse_at(x)?;
    let da = metric.coeff_grad(x)?;
    let dda = metric.coeff_hess(x)?;
    let gamma = christoffel(metric, x)?;

    // ∂_k a^{im} = −(a⁻¹ ∂_k a a⁻¹)^{im}
    let dainv: Vec<DMatrix<f64>> = (0..n).map(|k| -(&ainv * &da[k] * &ainv)).collect();

    // ∂_k Γ^i_{lj} = ½ ∂_k a^{im} (∂_l a_{mj} + ∂_j a_{ml} − ∂_m a_{lj})
    //             + ½ a^{im} (∂_k∂_l a_{mj} + ∂_k∂_j a_{ml} − ∂_k∂_m a_{lj})
    let mut dgamma = vec![vec![DMatrix::zeros(n, n); n]; n]; // [k][i](l, j)
    for k in 0..n {
        for i in 0..n {
            for l in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        acc += dainv[k][(i, m)]
                            * (da[l][(m, j)] + da[j][(m, l)] - da[m][(l, j)]);
                        acc += ainv[(i, m)]
                            * (dda[k][l][(m, j)] + dda[k][j][(m, l)] - dda[k][m][(l, j)]);
                    }
                    dgamma[k][i][(l, j)] = 0.5 * acc;
                }
            }
        }
    }

    let mut riem = vec![vec![DMatrix::zeros(n, n); n]; n]; // [i][j](k, l)
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dgamma[k][i][(l, j)] - dgamma[l][i][(k, j)];
                    for m in 0..n {
                        v += gamma[i][(k, m)] * gamma[m][(l, j)]
                            - gamma[i][(l, m)] * gamma[m][(k, j)];
                    }
                    riem[i][j][(k, l)] = v;
                }
            }
        }
    }
    Ok(riem)
}

/// Sectional curvature of the plane spanned by `x_vec` and `y_vec` at `x`:
/// `K = ⟨R(X, Y)Y, X⟩ / (‖X‖²‖Y‖² − ⟨X, Y⟩²)` in the metric.
pub fn sectional_curvature(
    metric: &MetricField,
    x: &Point,
    x_vec: &DVector<f64>,
    y_vec: &DVector<f64>,
) -> Result<f64> {
    let n = metric.dim();
    let a = metric.coeffs(x)?;
    let xx = (&a * x_vec).dot(x_vec);
    let yy = (&a * y_vec).dot(y_vec);
    let xy = (&a * x_vec).dot(y_vec);
    let gram = xx * yy - xy * xy;
    if gram <= PLANE_TOL * xx * yy {
        return Err(GeomError::DegeneratePlane);
    }
    let riem = riemann_mixed(metric, x)?;
    // ⟨R(X,Y)Y, X⟩ = a_{pi} X^p R^i_{jkl} Y^j X^k Y^l
    let mut num = 0.0;
    for i in 0..n {
        let mut ri = 0.0;
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    ri += riem[i][j][(k, l)] * y_vec[j] * x_vec[k] * y_vec[l];
                }
            }
        }
        let mut xi_low = 0.0;
        for p in 0..n {
            xi_low += a[(p, i)] * x_vec[p];
        }
        num += xi_low * ri;
    }
    Ok(num / gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::ConstCurvChart;
    use nalgebra::dvector;

    #[test]
    fn flat_metric_has_zero_curvature() {
        let m = MetricField::constant(DMatrix::identity(3, 3) * 2.5);
        let x = Point::from_slice(&[0.4, -0.2, 0.9]).unwrap();
        let k = sectional_curvature(&m, &x, &dvector![1.0, 0.0, 0.2], &dvector![0.0, 1.0, -0.4])
            .unwrap();
        assert!(k.abs() < 1e-6);
    }

    #[test]
    fn chart_curvature_equals_mu() {
        for &mu in &[1.0, -0.25] {
            let chart = ConstCurvChart::new(mu, 3).unwrap();
            let m = chart.metric_field();
            let x = Point::from_slice(&[0.3, -0.1, 0.25]).unwrap();
            let k =
                sectional_curvature(&m, &x, &dvector![1.0, 0.3, 0.0], &dvector![-0.2, 1.0, 0.5])
                    .unwrap();
            assert!((k - mu).abs() < 1e-5, "K = {k}, μ = {mu}");
        }
    }

    #[test]
    fn curvature_is_plane_independent_on_chart() {
        let chart = ConstCurvChart::new(-0.25, 3).unwrap();
        let m = chart.metric_field();
        let x = Point::from_slice(&[0.2, 0.4, -0.3]).unwrap();
        let k1 = sectional_curvature(&m, &x, &dvector![1.0, 0.0, 0.0], &dvector![0.0, 1.0, 0.0])
            .unwrap();
        let k2 = sectional_curvature(&m, &x, &dvector![0.3, -1.0, 0.7], &dvector![1.0, 0.5, 0.1])
            .unwrap();
        assert!((k1 - k2).abs() < 1e-5);
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let m = MetricField::euclidean(2);
        let x = Point::origin(2);
        let err = sectional_curvature(&m, &x, &dvector![1.0, 2.0], &dvector![2.0, 4.0]);
        assert!(matches!(err, Err(GeomError::DegeneratePlane)));
    }
}
