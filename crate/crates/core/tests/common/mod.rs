//! Shared helpers for the integration suites: seeded parameter generators
//! for the three solution cases, an independent finite-difference sectional
//! curvature oracle, and sampling utilities.

use finsler_cvf_core::families::{scale_rho_for_regularity, Theorem12Params, TheoremCase};
use finsler_cvf_core::geom::Point;
use finsler_cvf_core::num::halton::BallSampler;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ball_points(n: usize, radius: f64, count: usize, seed: u64) -> Vec<Point> {
    BallSampler::new(n, radius, seed)
        .points(count)
        .into_iter()
        .map(Point::from)
        .collect()
}

pub fn rand_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-scale..scale))
}

fn rand_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = rand_vec(rng, n, 1.0);
        let norm = v.norm();
        if norm > 0.3 {
            return v / norm;
        }
    }
}

/// Orthonormal pair spanning a random plane, optionally orthogonal to a
/// list of fixed directions.
fn orthonormal_pair(rng: &mut ChaCha8Rng, n: usize, avoid: &[DVector<f64>]) -> (DVector<f64>, DVector<f64>) {
    let project = |mut v: DVector<f64>, basis: &[DVector<f64>]| {
        for b in basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        v
    };
    loop {
        let u1 = project(rand_unit(rng, n), avoid);
        if u1.norm() < 0.3 {
            continue;
        }
        let u1 = u1.clone() / u1.norm();
        let mut basis: Vec<DVector<f64>> = avoid.to_vec();
        basis.push(u1.clone());
        let u2 = project(rand_unit(rng, n), &basis);
        if u2.norm() < 0.3 {
            continue;
        }
        let u2 = u2.clone() / u2.norm();
        return (u1, u2);
    }
}

/// ω(u₁u₂ᵀ − u₂u₁ᵀ); exactly skew-symmetric in floating point.
fn plane_rotation(u1: &DVector<f64>, u2: &DVector<f64>, omega: f64) -> DMatrix<f64> {
    let n = u1.len();
    DMatrix::from_fn(n, n, |i, j| omega * (u1[i] * u2[j] - u2[i] * u1[j]))
}

fn kernel_vector(rng: &mut ChaCha8Rng, n: usize, u1: &DVector<f64>, u2: &DVector<f64>, scale: f64) -> DVector<f64> {
    let mut v = rand_vec(rng, n, scale);
    let c1 = u1.dot(&v);
    v -= u1 * c1;
    let c2 = u2.dot(&v);
    v -= u2 * c2;
    v
}

fn nonzero(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    sign * rng.random_range(lo..hi)
}

/// A parameter set satisfying the constraint system of the given case
/// exactly (up to rounding), with ρ scaled into the Randers regularity
/// region on the ball of radius 0.5.
pub fn gen_case_params(case: TheoremCase, n: usize, rng: &mut ChaCha8Rng) -> Theorem12Params {
    let mut params = Theorem12Params::zeros(n);
    match case {
        TheoremCase::I => {
            params.tau = nonzero(rng, 0.3, 1.2);
            params.gamma = rand_vec(rng, n, 0.4);
            if rng.random_bool(0.5) {
                // Q = 0, e free
                params.e = rand_vec(rng, n, 0.4);
            } else {
                let (u1, u2) = orthonormal_pair(rng, n, &[]);
                params.q = plane_rotation(&u1, &u2, rng.random_range(0.5..1.5));
                params.e = kernel_vector(rng, n, &u1, &u2, 0.4);
            }
        }
        TheoremCase::II => {
            params.lambda = nonzero(rng, 0.3, 1.0);
            let (u1, u2) = orthonormal_pair(rng, n, &[]);
            params.q = plane_rotation(&u1, &u2, rng.random_range(0.5..1.5));
            params.e = rand_vec(rng, n, 0.4);
            params.gamma = &params.q * &params.e * (-1.0 / (2.0 * params.lambda));
        }
        TheoremCase::III => {
            params.mu = nonzero(rng, 0.2, 0.9);
            if rng.random_bool(0.5) {
                // γ ≠ 0, λ = 0, Q = 0, P restricted to the plane ⊥ γ,
                // d = μe − (2μ⟨e,γ⟩/|γ|²)γ
                params.gamma = rand_unit(rng, n) * rng.random_range(0.2..0.5);
                let ghat = params.gamma.clone() / params.gamma.norm();
                let (u1, u2) = orthonormal_pair(rng, n, &[ghat]);
                params.p = plane_rotation(&u1, &u2, rng.random_range(0.5..1.5));
                params.e = rand_vec(rng, n, 0.3);
                let k = -2.0 * params.mu * params.e.dot(&params.gamma)
                    / params.gamma.norm_squared();
                params.d = &params.e * params.mu + &params.gamma * k;
            } else {
                // γ = 0: commuting P = ρQ with d, e in the kernel of Q
                params.lambda = rng.random_range(-0.5..0.5);
                let (u1, u2) = orthonormal_pair(rng, n, &[]);
                params.q = plane_rotation(&u1, &u2, rng.random_range(0.5..1.5));
                params.p = &params.q * rng.random_range(-1.0..1.0);
                params.d = kernel_vector(rng, n, &u1, &u2, 0.3);
                params.e = kernel_vector(rng, n, &u1, &u2, 0.3);
            }
        }
    }
    scale_rho_for_regularity(&mut params, 0.5, 0.2).expect("chart is regular on the ball");
    params
}

/// Break exactly one constraint of the case, leaving the rest intact.
pub fn violate_one_constraint(
    case: TheoremCase,
    params: &Theorem12Params,
    rng: &mut ChaCha8Rng,
) -> Theorem12Params {
    let mut bad = params.clone();
    match case {
        TheoremCase::I => {
            // PQ − QP = 2τP fails for any nonzero P when Q = 0 and τ ≠ 0
            let (u1, u2) = orthonormal_pair(rng, bad.dim(), &[]);
            bad.q = DMatrix::zeros(bad.dim(), bad.dim());
            bad.p = plane_rotation(&u1, &u2, 0.8);
            if bad.tau == 0.0 {
                bad.tau = 0.7;
            }
        }
        TheoremCase::II => {
            // shift γ: breaks Qe = −2λγ + Pγ
            bad.gamma *= 1.5;
            if bad.gamma.norm() == 0.0 {
                bad.gamma = DVector::from_fn(bad.dim(), |i, _| if i == 0 { 0.3 } else { 0.0 });
            }
        }
        TheoremCase::III => {
            // shift d along γ (or outright when γ = 0): breaks ⟨d+μe,γ⟩ = 0
            // or the Qd equality respectively
            if bad.gamma.norm() > 0.0 {
                bad.d += &bad.gamma * 0.8;
            } else {
                bad.gamma = rand_unit(rng, bad.dim()) * 0.4;
            }
        }
    }
    bad
}

/// Independent sectional curvature oracle: the Riemann tensor assembled
/// purely from central finite differences of the coefficient closure,
/// including a nested difference for the connection derivatives. Shares no
/// derivative code with the library implementation.
pub fn fd_sectional_oracle(
    coeff: &dyn Fn(&Point) -> DMatrix<f64>,
    x: &Point,
    xv: &DVector<f64>,
    yv: &DVector<f64>,
) -> f64 {
    let n = x.dim();
    let shift = |p: &Point, k: usize, h: f64| {
        let mut c = p.coords().clone();
        c[k] += h;
        Point::from(c)
    };
    let gamma_at = |p: &Point| -> Vec<DMatrix<f64>> {
        let h = 1e-5 * (1.0 + p.norm());
        let a = coeff(p);
        let ainv = a.clone().try_inverse().expect("metric invertible");
        let da: Vec<DMatrix<f64>> = (0..n)
            .map(|k| (coeff(&shift(p, k, h)) - coeff(&shift(p, k, -h))) / (2.0 * h))
            .collect();
        (0..n)
            .map(|i| {
                DMatrix::from_fn(n, n, |j, k| {
                    let mut acc = 0.0;
                    for l in 0..n {
                        acc += ainv[(i, l)] * (da[j][(l, k)] + da[k][(l, j)] - da[l][(j, k)]);
                    }
                    0.5 * acc
                })
            })
            .collect()
    };
    let h2 = 1e-4 * (1.0 + x.norm());
    let gamma = gamma_at(x);
    let dgamma: Vec<Vec<DMatrix<f64>>> = (0..n)
        .map(|k| {
            let gp = gamma_at(&shift(x, k, h2));
            let gm = gamma_at(&shift(x, k, -h2));
            (0..n).map(|i| (&gp[i] - &gm[i]) / (2.0 * h2)).collect()
        })
        .collect();
    let a = coeff(x);
    // ⟨R(X,Y)Y, X⟩ with R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ-terms
    let mut num = 0.0;
    for i in 0..n {
        let mut ri = 0.0;
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut r = dgamma[k][i][(l, j)] - dgamma[l][i][(k, j)];
                    for m in 0..n {
                        r += gamma[i][(k, m)] * gamma[m][(l, j)]
                            - gamma[i][(l, m)] * gamma[m][(k, j)];
                    }
                    ri += r * yv[j] * xv[k] * yv[l];
                }
            }
        }
        let mut x_low = 0.0;
        for p in 0..n {
            x_low += a[(p, i)] * xv[p];
        }
        num += x_low * ri;
    }
    let xx = (&a * xv).dot(xv);
    let yy = (&a * yv).dot(yv);
    let xy = (&a * xv).dot(yv);
    num / (xx * yy - xy * xy)
}
