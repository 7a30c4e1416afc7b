//! Scenario dispatch: each kind maps to a pipeline over the library,
//! producing named checks with explicit thresholds.

use crate::report::{CheckResult, Report};
use crate::scenario::{
    ConfigError, ConfigResult, ConstantBaseSpec, ExpectSpec, FlowInstanceSpec, RecipeSpec,
    SamplingSpec, Scenario, ToleranceSpec,
};
use finsler_cvf_core::alphabeta::{AlphaBetaMetric, PhiFunction};
use finsler_cvf_core::cvf::{classify, extract_factor, lemma71_check, ClassifyTol, ConformalReport};
use finsler_cvf_core::deform::{
    deform_forward, deform_inverse, form_check, DeformationTriple, FormCheckTol,
};
use finsler_cvf_core::families::{
    check_constraints, specialize_corollary, verify_theorem12, Corollary, TheoremCase,
};
use finsler_cvf_core::flow::check_scaling;
use finsler_cvf_core::geom::{
    norm_sq, r_s_decompose, ConstCurvChart, MetricField, OneFormField, Point, VectorFieldGeom,
};
use finsler_cvf_core::num::halton::BallSampler;
use finsler_cvf_core::projflat::{
    build_example72, build_example72_unchecked, check_compatibility, eval_a1_a2, simple_family,
};
use finsler_cvf_core::GeomError;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::sync::Arc;

/// Tolerance pinned for exact-algebra constraint residuals.
const CONSTRAINT_TOL: f64 = 1e-10;
/// Closed-form and round-trip agreement tolerance.
const ROUNDTRIP_TOL: f64 = 1e-10;
/// Exactness tolerance for closed 1-forms and the A₁/A₂ residuals.
const CLOSED_FORM_TOL: f64 = 1e-8;
const LEMMA71_TOL: f64 = 1e-9;
const A1A2_TOL: f64 = 1e-8;
const ODE_RESIDUAL_TOL: f64 = 1e-7;

fn config_err(e: GeomError) -> ConfigError {
    ConfigError(e.to_string())
}

/// Sample chart points inside the ball, keeping the margin
/// 1 + μ|x|² > 1/2; the Halton prefix property keeps this deterministic.
fn sample_chart_points(
    dim: usize,
    sampling: &SamplingSpec,
    mu: f64,
) -> ConfigResult<(Vec<Point>, String)> {
    let note = format!(
        "samples: {} low-discrepancy points in |x| <= {} with margin 1 + mu|x|^2 > 1/2, seed {}",
        sampling.count, sampling.radius, sampling.seed
    );
    let sampler = BallSampler::new(dim, sampling.radius, sampling.seed);
    let mut fetch = sampling.count.max(4);
    for _ in 0..8 {
        let pts: Vec<Point> = sampler
            .points(fetch)
            .into_iter()
            .map(Point::from)
            .filter(|p| 1.0 + mu * p.norm_sq() > 0.5)
            .take(sampling.count)
            .collect();
        if pts.len() == sampling.count {
            return Ok((pts, note));
        }
        fetch *= 2;
    }
    Err(ConfigError(format!(
        "could not place {} samples of radius {} inside the chart of curvature {mu}",
        sampling.count, sampling.radius
    )))
}

fn worst_point(samples: &[Point], values: &[f64]) -> Option<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| samples[i].coords().iter().cloned().collect())
}

fn classification_checks(
    report: &ConformalReport,
    samples: &[Point],
    tol: &ToleranceSpec,
    expect: &ExpectSpec,
    expected_default: &[&str],
    checks: &mut Vec<CheckResult>,
) {
    checks.push(
        CheckResult::at_most("eq16-residual-r1-max", report.r1_max, tol.residual)
            .with_worst_point(worst_point(samples, &report.r1_samples)),
    );
    checks.push(
        CheckResult::at_most("eq16-residual-r2-max", report.r2_max, tol.residual)
            .with_worst_point(worst_point(samples, &report.r2_samples)),
    );
    checks.push(CheckResult::at_most(
        "eq15-fundamental-residual-max",
        report.fundamental_max,
        tol.residual,
    ));
    let class = report.classification.to_string();
    if let Some(expected) = &expect.classification {
        checks.push(CheckResult::boolean(
            format!("classification == {expected}"),
            class.eq_ignore_ascii_case(expected),
        ));
    } else {
        checks.push(CheckResult::boolean(
            format!("classification in {expected_default:?}"),
            expected_default.iter().any(|e| class == *e),
        ));
    }
    if let Some(bound) = expect.min_factor_stddev {
        checks.push(CheckResult::at_least(
            "factor-stddev",
            report.factor_stddev,
            bound,
        ));
    }
}

#[allow(clippy::too_many_arguments)]
fn run_theorem12(
    scenario: &Scenario,
    dimension: usize,
    case: TheoremCase,
    params_spec: &crate::scenario::ParamsSpec,
    sampling: &SamplingSpec,
    tol: &ToleranceSpec,
    expect: &ExpectSpec,
    corollary: Option<Corollary>,
) -> ConfigResult<Report> {
    let params = params_spec.to_params(dimension)?;
    let (samples, note) = sample_chart_points(dimension, sampling, params.mu)?;
    let mut checks = Vec::new();
    let mut notes = vec![note];

    let constraints = match corollary {
        None => check_constraints(case, &params),
        Some(which) => specialize_corollary(which, case, &params).map_err(config_err)?,
    };
    for res in &constraints.residuals {
        checks.push(CheckResult::at_most(
            format!("constraint[{}]: {}", constraints.case_tag, res.name),
            res.residual,
            CONSTRAINT_TOL,
        ));
    }

    // corollary cross-checks on the 1-form itself
    if corollary.is_some() {
        let chart = ConstCurvChart::new(params.mu, dimension).map_err(config_err)?;
        let rho = finsler_cvf_core::families::rho_field(&params);
        let fc = form_check(
            &chart.metric_field(),
            &rho,
            &samples,
            FormCheckTol::default(),
        )
        .map_err(config_err)?;
        match corollary {
            Some(Corollary::ClosedRho) => {
                checks.push(CheckResult::at_most(
                    "rho-closedness-skew-part",
                    fc.max_skew,
                    CLOSED_FORM_TOL,
                ));
            }
            Some(Corollary::HomotheticRho) => {
                checks.push(CheckResult::boolean("rho-is-homothetic", fc.is_homothetic));
                checks.push(CheckResult::at_most(
                    "rho-sigma-variance",
                    fc.sigma_variance,
                    FormCheckTol::default().abs,
                ));
            }
            None => {}
        }
    }

    let verification = verify_theorem12(
        case,
        &params,
        &PhiFunction::randers(),
        &samples,
        ClassifyTol {
            residual: tol.residual,
            factor: tol.factor,
        },
    )
    .map_err(config_err)?;
    let factor_tol = match case {
        TheoremCase::I => tol.factor,
        _ => tol.factor.min(1e-8),
    };
    checks.push(CheckResult::at_most(
        "factor-error |c - expected|",
        verification.factor_error_max,
        factor_tol,
    ));
    checks.push(CheckResult::at_most(
        "factor-stddev",
        verification.report.factor_stddev,
        tol.factor * (1.0 + verification.report.factor_mean.abs()),
    ));
    let expected_default = ["homothetic", "killing"];
    classification_checks(
        &verification.report,
        &samples,
        tol,
        expect,
        &expected_default,
        &mut checks,
    );
    notes.push(format!(
        "expected factor {}; observed mean {}",
        verification.expected_factor, verification.report.factor_mean
    ));
    Ok(Report::new(
        scenario.clone(),
        checks,
        Some(verification.report.classification.to_string()),
        notes,
    ))
}

fn constant_base(
    dimension: usize,
    base: &ConstantBaseSpec,
) -> ConfigResult<(MetricField, OneFormField)> {
    if base.beta.len() != dimension {
        return Err(ConfigError(format!(
            "base beta has length {}, expected {dimension}",
            base.beta.len()
        )));
    }
    if base.metric_scale <= 0.0 {
        return Err(ConfigError("metric_scale must be positive".into()));
    }
    Ok((
        MetricField::constant(DMatrix::identity(dimension, dimension) * base.metric_scale),
        OneFormField::constant(DVector::from_column_slice(&base.beta)),
    ))
}

fn recipe_triple(recipe: &RecipeSpec) -> ConfigResult<DeformationTriple> {
    match recipe {
        RecipeSpec::Navigation => Ok(DeformationTriple::navigation()),
        RecipeSpec::IsoS2d { k1, k2 } => {
            DeformationTriple::iso_s_2d(*k1, *k2).map_err(config_err)
        }
        RecipeSpec::DouglasN3 { k1, k2, k3 } => {
            DeformationTriple::douglas_n3(*k1, *k2, *k3).map_err(config_err)
        }
        RecipeSpec::Douglas2d { sign } => {
            DeformationTriple::douglas_2d(sign.to_sign()).map_err(config_err)
        }
    }
}

pub fn run_scenario(scenario: &Scenario) -> ConfigResult<Report> {
    match scenario {
        Scenario::Theorem12 {
            dimension,
            case,
            params,
            sampling,
            tolerances,
            expect,
        } => run_theorem12(
            scenario,
            *dimension,
            case.to_case(),
            params,
            sampling,
            tolerances,
            expect,
            None,
        ),
        Scenario::Corollary41 {
            dimension,
            case,
            params,
            sampling,
            tolerances,
        } => run_theorem12(
            scenario,
            *dimension,
            case.to_case(),
            params,
            sampling,
            tolerances,
            &ExpectSpec::default(),
            Some(Corollary::ClosedRho),
        ),
        Scenario::Corollary42 {
            dimension,
            case,
            params,
            sampling,
            tolerances,
        } => run_theorem12(
            scenario,
            *dimension,
            case.to_case(),
            params,
            sampling,
            tolerances,
            &ExpectSpec::default(),
            Some(Corollary::HomotheticRho),
        ),
        Scenario::Example72 {
            dimension,
            params,
            sampling,
            tolerances,
            expect,
        } => {
            let p = params.to_params(*dimension)?;
            let mut checks = Vec::new();
            let compat = check_compatibility(&p);
            checks.push(CheckResult::at_most(
                "compatibility-vector-equality",
                compat.vector_residual,
                CONSTRAINT_TOL,
            ));
            checks.push(CheckResult::at_most(
                "compatibility-scalar-equality",
                compat.scalar_residual,
                CONSTRAINT_TOL,
            ));
            let inst = build_example72_unchecked(&p).map_err(config_err)?;
            let mut effective = sampling.clone();
            effective.radius = effective.radius.min(inst.regular_radius);
            let (samples, note) = sample_chart_points(*dimension, &effective, p.mu)?;
            let mut notes = vec![note];
            notes.push(format!(
                "regularity region radius {} (|beta|^2 <= 0.95 margin)",
                inst.regular_radius
            ));
            let rep = classify(
                &inst.alpha,
                &inst.beta,
                &PhiFunction::randers(),
                &inst.v,
                &samples,
                ClassifyTol {
                    residual: tolerances.residual,
                    factor: tolerances.factor,
                },
            )
            .map_err(config_err)?;
            let mut expect = expect.clone();
            if expect.classification.is_none() {
                expect.classification = Some("conformal".into());
            }
            if expect.min_factor_stddev.is_none() {
                expect.min_factor_stddev = Some(0.1);
            }
            classification_checks(&rep, &samples, tolerances, &expect, &[], &mut checks);
            let factor = inst.factor.clone();
            let lemma71 = lemma71_check(
                &inst.alpha,
                &inst.beta,
                &move |x: &Point| factor(x),
                &samples,
            )
            .map_err(config_err)?;
            checks.push(CheckResult::at_most(
                "closed-beta-factor-proportionality",
                lemma71,
                LEMMA71_TOL,
            ));
            let a_norms: Vec<f64> = samples
                .par_iter()
                .map(|x| {
                    let (a1, a2) = eval_a1_a2(&p, &inst.f, x).expect("c in solved range");
                    a1.norm().max(a2.norm())
                })
                .collect();
            let worst_a = a_norms.iter().cloned().fold(0.0f64, f64::max);
            checks.push(
                CheckResult::at_most("a1-a2-residual-max", worst_a, A1A2_TOL)
                    .with_worst_point(worst_point(&samples, &a_norms)),
            );
            Ok(Report::new(
                scenario.clone(),
                checks,
                Some(rep.classification.to_string()),
                notes,
            ))
        }
        Scenario::SimpleFamily {
            dimension,
            mu,
            tau,
            eta,
            sampling,
            tolerances,
        } => {
            if eta.len() != *dimension {
                return Err(ConfigError(format!(
                    "eta has length {}, expected {dimension}",
                    eta.len()
                )));
            }
            let eta = DVector::from_column_slice(eta);
            let inst = simple_family(*mu, *tau, &eta).map_err(config_err)?;
            let mut effective = sampling.clone();
            effective.radius = effective.radius.min(inst.regular_radius);
            let (samples, note) = sample_chart_points(*dimension, &effective, *mu)?;
            let mut notes = vec![note];
            notes.push(format!("regularity region radius {}", inst.regular_radius));
            let mut checks = Vec::new();
            let rep = classify(
                &inst.alpha,
                &inst.beta,
                &PhiFunction::randers(),
                &inst.v,
                &samples,
                ClassifyTol {
                    residual: tolerances.residual,
                    factor: tolerances.factor,
                },
            )
            .map_err(config_err)?;
            let expect = ExpectSpec {
                classification: Some("conformal".into()),
                min_factor_stddev: Some(0.1),
                ..Default::default()
            };
            classification_checks(&rep, &samples, tolerances, &expect, &[], &mut checks);
            // agreement with the generic assembly
            let generic = build_example72(&inst.params).map_err(config_err)?;
            let mut disagreement: f64 = 0.0;
            let mut factor_gap: f64 = 0.0;
            for x in &samples {
                disagreement = disagreement
                    .max((inst.beta.coeffs(x) - generic.beta.coeffs(x)).norm())
                    .max((inst.v.eval(x) - generic.v.eval(x)).norm());
                let extracted = extract_factor(&inst.alpha, &inst.v, x).map_err(config_err)?;
                factor_gap = factor_gap.max((extracted - (inst.factor)(x)).abs());
            }
            checks.push(CheckResult::at_most(
                "closed-form-vs-generic-assembly",
                disagreement,
                ROUNDTRIP_TOL,
            ));
            checks.push(CheckResult::at_most(
                "extracted-factor-vs-closed-form",
                factor_gap,
                tolerances.factor,
            ));
            let factor = inst.factor.clone();
            let lemma71 = lemma71_check(
                &inst.alpha,
                &inst.beta,
                &move |x: &Point| factor(x),
                &samples,
            )
            .map_err(config_err)?;
            checks.push(CheckResult::at_most(
                "closed-beta-factor-proportionality",
                lemma71,
                LEMMA71_TOL,
            ));
            Ok(Report::new(
                scenario.clone(),
                checks,
                Some(rep.classification.to_string()),
                notes,
            ))
        }
        Scenario::DeformRecipe {
            dimension,
            recipe,
            base,
            sampling,
            tolerances,
            expect,
        } => {
            let (metric, beta) = constant_base(*dimension, base)?;
            let triple = recipe_triple(recipe)?;
            let origin = Point::origin(*dimension);
            let b2 = norm_sq(&metric, &beta, &origin).map_err(config_err)?;
            if !triple.contains(b2) {
                return Err(ConfigError(format!(
                    "base 1-form has b^2 = {b2}, outside the recipe interval {:?}",
                    triple.interval()
                )));
            }
            let (samples, note) = sample_chart_points(*dimension, sampling, 0.0)?;
            let mut notes = vec![note, format!("recipe {}", triple.label())];
            let pair = deform_forward(&metric, &beta, &triple);
            let fc = form_check(&pair.h, &pair.rho, &samples, FormCheckTol::default())
                .map_err(config_err)?;
            let mut checks = Vec::new();
            let expect_class = expect
                .classification
                .clone()
                .unwrap_or_else(|| "killing".into());
            let observed = if fc.is_killing {
                "killing"
            } else if fc.is_homothetic {
                "homothetic"
            } else if fc.is_conformal {
                "conformal"
            } else {
                "none"
            };
            checks.push(CheckResult::boolean(
                format!("deformed-rho classification == {expect_class}"),
                observed.eq_ignore_ascii_case(&expect_class),
            ));
            checks.push(CheckResult::at_most(
                "rtilde-norm-max",
                fc.max_rtilde,
                CLOSED_FORM_TOL.max(tolerances.residual),
            ));
            // pointwise inverse re-derives the base data
            let mut worst_metric: f64 = 0.0;
            let mut worst_beta: f64 = 0.0;
            let mut ambiguous = 0usize;
            for x in &samples {
                let inv = deform_inverse(&pair.h, &pair.rho, &triple, x, None)
                    .map_err(config_err)?;
                ambiguous += usize::from(inv.ambiguous());
                worst_metric = worst_metric
                    .max((inv.metric_coeffs - metric.coeffs(x).map_err(config_err)?).norm());
                worst_beta = worst_beta.max((inv.beta_coeffs - beta.coeffs(x)).norm());
            }
            if ambiguous > 0 {
                notes.push(format!(
                    "{ambiguous} samples bracketed multiple fixed points; smallest taken"
                ));
            }
            checks.push(CheckResult::at_most(
                "inverse-roundtrip-metric",
                worst_metric,
                ROUNDTRIP_TOL,
            ));
            checks.push(CheckResult::at_most(
                "inverse-roundtrip-beta",
                worst_beta,
                ROUNDTRIP_TOL,
            ));
            Ok(Report::new(
                scenario.clone(),
                checks,
                Some(observed.to_string()),
                notes,
            ))
        }
        Scenario::FlowCheck {
            dimension,
            instance,
            t_values,
            sampling,
            expect,
        } => {
            if t_values.is_empty() {
                return Err(ConfigError("t_values must be nonempty".into()));
            }
            let mut checks = Vec::new();
            let mut notes = Vec::new();
            match instance {
                FlowInstanceSpec::MinkowskiRanders { beta, tau } => {
                    if beta.len() != *dimension {
                        return Err(ConfigError("beta length mismatch".into()));
                    }
                    let f = AlphaBetaMetric::randers(
                        MetricField::euclidean(*dimension),
                        OneFormField::constant(DVector::from_column_slice(beta)),
                    )
                    .map_err(config_err)?;
                    let v = VectorFieldGeom::dilation(*tau, *dimension);
                    let tau = *tau;
                    let c = move |_: &Point| tau;
                    let pairs: Vec<(Point, DVector<f64>)> =
                        BallSampler::new(*dimension, sampling.radius, sampling.seed)
                            .pairs(sampling.count)
                            .into_iter()
                            .map(|(x, y)| (Point::from(x), y))
                            .collect();
                    let outcomes: Vec<_> = pairs
                        .par_iter()
                        .map(|sample| {
                            check_scaling(
                                &f,
                                &v,
                                &c,
                                std::slice::from_ref(sample),
                                t_values,
                                None,
                            )
                        })
                        .collect();
                    let mut err_sigma: f64 = 0.0;
                    let mut err_const: f64 = 0.0;
                    for o in outcomes {
                        let o = o.map_err(config_err)?;
                        err_sigma = err_sigma.max(o.max_err_sigma);
                        err_const = err_const.max(o.max_err_const);
                    }
                    let bound = expect.max_sigma_err.unwrap_or(1e-6);
                    checks.push(CheckResult::at_most("sigma-form-error", err_sigma, bound));
                    checks.push(CheckResult::at_most(
                        "const-exponent-form-error",
                        err_const,
                        bound,
                    ));
                    notes.push("homothetic dilation: both scaling laws must hold".into());
                }
                FlowInstanceSpec::SimpleFamily { mu, tau, eta } => {
                    if eta.len() != *dimension {
                        return Err(ConfigError("eta length mismatch".into()));
                    }
                    let inst = simple_family(*mu, *tau, &DVector::from_column_slice(eta))
                        .map_err(config_err)?;
                    let f = inst.randers().map_err(config_err)?;
                    let factor = inst.factor.clone();
                    let c = move |x: &Point| factor(x);
                    let radius = inst.regular_radius;
                    let mu_dom = *mu;
                    let domain =
                        move |x: &Point| x.norm() <= radius && 1.0 + mu_dom * x.norm_sq() > 0.5;
                    let pairs: Vec<(Point, DVector<f64>)> = BallSampler::new(
                        *dimension,
                        sampling.radius.min(0.5 * radius),
                        sampling.seed,
                    )
                    .pairs(sampling.count)
                    .into_iter()
                    .map(|(x, y)| (Point::from(x), y))
                    .collect();
                    let outcomes: Vec<_> = pairs
                        .par_iter()
                        .map(|sample| {
                            check_scaling(
                                &f,
                                &inst.v,
                                &c,
                                std::slice::from_ref(sample),
                                t_values,
                                Some(&domain),
                            )
                        })
                        .collect();
                    let mut err_sigma: f64 = 0.0;
                    let mut err_const: f64 = 0.0;
                    for o in outcomes {
                        let o = o.map_err(config_err)?;
                        err_sigma = err_sigma.max(o.max_err_sigma);
                        err_const = err_const.max(o.max_err_const);
                    }
                    checks.push(CheckResult::at_most(
                        "sigma-form-error",
                        err_sigma,
                        expect.max_sigma_err.unwrap_or(1e-5),
                    ));
                    if let Some(floor) = expect.min_const_err {
                        checks.push(CheckResult::at_least(
                            "const-exponent-form-error",
                            err_const,
                            floor,
                        ));
                        notes.push(
                            "non-constant factor: the constant-exponent law must fail".into(),
                        );
                    }
                    notes.push(format!("trajectories confined to |x| <= {radius}"));
                }
            }
            Ok(Report::new(scenario.clone(), checks, None, notes))
        }
        Scenario::IsoSNavigation {
            dimension,
            r_min,
            r_max,
            sampling,
            tolerances,
        } => {
            if !(0.0 < *r_min && r_min < r_max && *r_max < 1.0) {
                return Err(ConfigError(
                    "annulus must satisfy 0 < r_min < r_max < 1".into(),
                ));
            }
            let n = *dimension;
            let h = MetricField::euclidean(n);
            let rho = OneFormField::new(n, Arc::new(|x: &Point| x.coords().clone()))
                .with_grad(Arc::new(move |x: &Point| {
                    DMatrix::identity(x.dim(), x.dim())
                }));
            // annulus samples via the deterministic prefix of the ball sequence
            let sampler = BallSampler::new(n, *r_max, sampling.seed);
            let mut fetch = sampling.count.max(4);
            let samples: Vec<Point> = loop {
                let pts: Vec<Point> = sampler
                    .points(fetch)
                    .into_iter()
                    .map(Point::from)
                    .filter(|p| p.norm() >= *r_min)
                    .take(sampling.count)
                    .collect();
                if pts.len() == sampling.count || fetch > 64 * sampling.count {
                    break pts;
                }
                fetch *= 2;
            };
            let mut checks = Vec::new();
            let mut notes = vec![format!(
                "{} samples on the annulus {} <= |x| <= {}",
                samples.len(),
                r_min,
                r_max
            )];
            let fc = form_check(&h, &rho, &samples, FormCheckTol::default())
                .map_err(config_err)?;
            let sigma_err = fc
                .sigma_samples
                .iter()
                .fold(0.0f64, |m, s| m.max((s - 1.0).abs()));
            checks.push(CheckResult::boolean("rho-is-conformal", fc.is_conformal));
            checks.push(CheckResult::at_most("rho-sigma-vs-one", sigma_err, 1e-8));
            let triple = DeformationTriple::navigation();
            let (alpha, beta) =
                finsler_cvf_core::deform::inverse_fields(&h, &rho, &triple, None);
            let results: Vec<Result<(f64, f64), GeomError>> = samples
                .par_iter()
                .map(|x| {
                    let inv = deform_inverse(&h, &rho, &triple, x, None)?;
                    let closed_gap = (inv.t - x.norm_sq()).abs();
                    let (r, _s, s_vec) = r_s_decompose(&alpha, &beta, x)?;
                    let a = alpha.coeffs(x)?;
                    let ainv = finsler_cvf_core::geom::spd_inverse(&a)?;
                    let b = beta.coeffs(x);
                    let b2 = norm_sq(&alpha, &beta, x)?;
                    let theta = (&ainv * &r).trace() / (2.0 * (n as f64 - b2));
                    let eq48 = (&r - (&a - &b * b.transpose()) * (2.0 * theta)
                        + &b * s_vec.transpose()
                        + &s_vec * b.transpose())
                        .norm();
                    Ok((closed_gap, eq48))
                })
                .collect();
            let mut worst_gap: f64 = 0.0;
            let mut worst_eq48: f64 = 0.0;
            let mut eq48_values = Vec::with_capacity(samples.len());
            for r in results {
                let (gap, eq48) = r.map_err(config_err)?;
                worst_gap = worst_gap.max(gap);
                worst_eq48 = worst_eq48.max(eq48);
                eq48_values.push(eq48);
            }
            checks.push(CheckResult::at_most(
                "fixed-point-vs-closed-form",
                worst_gap,
                1e-9,
            ));
            checks.push(
                CheckResult::at_most("eq48-relation-residual", worst_eq48, tolerances.residual)
                    .with_worst_point(worst_point(&samples, &eq48_values)),
            );
            notes.push("navigation data (u, v, w) = (1-t, t-1, t-1)".into());
            Ok(Report::new(scenario.clone(), checks, None, notes))
        }
        Scenario::DouglasCheck {
            dimension,
            k1,
            k2,
            k3,
            p0,
            s_max,
            base,
            sampling,
            tolerances,
        } => {
            let phi =
                PhiFunction::douglas_ode(*k1, *k2, *k3, *p0, *s_max).map_err(config_err)?;
            let mut checks = Vec::new();
            let mut notes = Vec::new();
            // residual of the defining ODE across the interval
            let mut ode_residual: f64 = 0.0;
            for i in 0..=200 {
                let s = -s_max + 2.0 * s_max * i as f64 / 200.0;
                let lead = 1.0 + (k1 + k3) * s * s + k2 * s.powi(4);
                let res = lead * phi.d2phi(s).map_err(config_err)?
                    - (k1 + k2 * s * s)
                        * (phi.phi(s).map_err(config_err)?
                            - s * phi.dphi(s).map_err(config_err)?);
                ode_residual = ode_residual.max(res.abs());
            }
            checks.push(CheckResult::at_most(
                "phi-ode-residual",
                ode_residual,
                ODE_RESIDUAL_TOL,
            ));
            checks.push(CheckResult::boolean(
                "phi-passes-non-riemannian-guard",
                phi.riemannian_guard().is_ok(),
            ));
            // Case I w-recipe on a parallel 1-form: deformed rho is Killing
            let (metric, beta) = constant_base(*dimension, base)?;
            let triple = DeformationTriple::douglas_n3(*k1, *k2, *k3).map_err(config_err)?;
            let (samples, note) = sample_chart_points(*dimension, sampling, 0.0)?;
            notes.push(note);
            let pair = deform_forward(&metric, &beta, &triple);
            let fc = form_check(&pair.h, &pair.rho, &samples, FormCheckTol::default())
                .map_err(config_err)?;
            checks.push(CheckResult::at_most(
                "deformed-rtilde-max",
                fc.max_rtilde,
                CLOSED_FORM_TOL.max(tolerances.residual),
            ));
            checks.push(CheckResult::boolean(
                "deformed-rho-closed",
                fc.is_closed,
            ));
            Ok(Report::new(scenario.clone(), checks, None, notes))
        }
    }
}
