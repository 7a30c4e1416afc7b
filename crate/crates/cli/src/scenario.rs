//! Scenario file schema, validation and the bundled catalog.
//!
//! Scenarios are JSON with a `kind` tag. Vectors are arrays, matrices are
//! nested row-major arrays. Skew-symmetry of P and Q is validated exactly
//! on load; `"antisymmetrize": true` opts into replacing M by (M − Mᵀ)/2
//! before validation.

use finsler_cvf_core::families::{Theorem12Params, TheoremCase};
use finsler_cvf_core::projflat::Example72Params;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// A configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn default_count() -> usize {
    100
}

fn default_radius() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            count: default_count(),
            radius: default_radius(),
            seed: 0,
        }
    }
}

fn default_residual_tol() -> f64 {
    1e-6
}

fn default_factor_tol() -> f64 {
    1e-7
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "default_residual_tol")]
    pub residual: f64,
    #[serde(default = "default_factor_tol")]
    pub factor: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            residual: default_residual_tol(),
            factor: default_factor_tol(),
        }
    }
}

/// Parameters of the ρ/V families as plain JSON values.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub d: Option<Vec<f64>>,
    #[serde(default)]
    pub e: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma: Option<Vec<f64>>,
    #[serde(default)]
    pub eta: Option<Vec<f64>>,
    #[serde(default)]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub q: Option<Vec<Vec<f64>>>,
    /// Replace P and Q by their antisymmetric parts before validation.
    #[serde(default)]
    pub antisymmetrize: bool,
}

fn vec_from(opt: &Option<Vec<f64>>, n: usize, name: &str) -> ConfigResult<DVector<f64>> {
    match opt {
        None => Ok(DVector::zeros(n)),
        Some(v) if v.len() == n => Ok(DVector::from_column_slice(v)),
        Some(v) => Err(ConfigError(format!(
            "{name} has length {}, expected {n}",
            v.len()
        ))),
    }
}

fn matrix_from(
    opt: &Option<Vec<Vec<f64>>>,
    n: usize,
    name: &str,
    antisymmetrize: bool,
) -> ConfigResult<DMatrix<f64>> {
    let mut m = match opt {
        None => DMatrix::zeros(n, n),
        Some(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(ConfigError(format!("{name} must be a {n}x{n} matrix")));
            }
            DMatrix::from_fn(n, n, |i, j| rows[i][j])
        }
    };
    if antisymmetrize {
        m = (&m - m.transpose()) * 0.5;
    }
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)] != -m[(j, i)] {
                return Err(ConfigError(format!(
                    "{name} is not exactly skew-symmetric at ({i}, {j}); \
                     set \"antisymmetrize\": true to repair it explicitly"
                )));
            }
        }
    }
    Ok(m)
}

impl ParamsSpec {
    pub fn to_params(&self, n: usize) -> ConfigResult<Theorem12Params> {
        Theorem12Params::new(
            self.mu,
            self.lambda,
            self.tau,
            vec_from(&self.d, n, "d")?,
            vec_from(&self.e, n, "e")?,
            vec_from(&self.gamma, n, "gamma")?,
            vec_from(&self.eta, n, "eta")?,
            matrix_from(&self.p, n, "P", self.antisymmetrize)?,
            matrix_from(&self.q, n, "Q", self.antisymmetrize)?,
        )
        .map_err(|e| ConfigError(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    I,
    Ii,
    Iii,
}

impl CaseTag {
    pub fn to_case(self) -> TheoremCase {
        match self {
            CaseTag::I => TheoremCase::I,
            CaseTag::Ii => TheoremCase::II,
            CaseTag::Iii => TheoremCase::III,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example72Spec {
    pub mu: f64,
    pub tau: f64,
    pub eta: Vec<f64>,
    #[serde(default)]
    pub gamma: Option<Vec<f64>>,
    #[serde(default)]
    pub q: Option<Vec<Vec<f64>>>,
    /// Normalization point of the f-ODE; defaults to c(0) = τ.
    #[serde(default)]
    pub c0: Option<f64>,
    /// Normalization value f(c₀); defaults to 1.
    #[serde(default)]
    pub f0: Option<f64>,
}

impl Example72Spec {
    pub fn to_params(&self, n: usize) -> ConfigResult<Example72Params> {
        if self.eta.len() != n {
            return Err(ConfigError(format!(
                "eta has length {}, expected {n}",
                self.eta.len()
            )));
        }
        Example72Params::new(
            self.mu,
            self.tau,
            DVector::from_column_slice(&self.eta),
            vec_from(&self.gamma, n, "gamma")?,
            matrix_from(&self.q, n, "Q", false)?,
            self.c0.unwrap_or(self.tau),
            self.f0.unwrap_or(1.0),
        )
        .map_err(|e| ConfigError(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RecipeSpec {
    Navigation,
    #[serde(rename = "isoS-2d")]
    IsoS2d { k1: f64, k2: f64 },
    DouglasN3 { k1: f64, k2: f64, k3: f64 },
    #[serde(rename = "douglas-2d")]
    Douglas2d { sign: SignTag },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignTag {
    Plus,
    Minus,
}

impl SignTag {
    pub fn to_sign(self) -> finsler_cvf_core::alphabeta::Sign {
        match self {
            SignTag::Plus => finsler_cvf_core::alphabeta::Sign::Plus,
            SignTag::Minus => finsler_cvf_core::alphabeta::Sign::Minus,
        }
    }
}

/// Constant-coefficient base data (metric scale · δ, constant β).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantBaseSpec {
    #[serde(default = "default_metric_scale")]
    pub metric_scale: f64,
    pub beta: Vec<f64>,
}

fn default_metric_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FlowInstanceSpec {
    /// Constant Randers data with the dilation field V = −2τx, c ≡ τ.
    MinkowskiRanders { beta: Vec<f64>, tau: f64 },
    /// The non-homothetic closed-form family.
    SimpleFamily { mu: f64, tau: f64, eta: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExpectSpec {
    /// Expected classification label, one of none/conformal/homothetic/killing.
    #[serde(default)]
    pub classification: Option<String>,
    /// Lower bound on the sample stddev of the extracted factor.
    #[serde(default)]
    pub min_factor_stddev: Option<f64>,
    /// Upper bound on the σ-form flow error.
    #[serde(default)]
    pub max_sigma_err: Option<f64>,
    /// Lower bound on the constant-exponent flow error (the law must fail).
    #[serde(default)]
    pub min_const_err: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Scenario {
    #[serde(rename = "theorem12")]
    Theorem12 {
        dimension: usize,
        case: CaseTag,
        params: ParamsSpec,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        tolerances: ToleranceSpec,
        #[serde(default)]
        expect: ExpectSpec,
    },
    #[serde(rename = "corollary41")]
    Corollary41 {
        dimension: usize,
        case: CaseTag,
        params: ParamsSpec,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        tolerances: ToleranceSpec,
    },
    #[serde(rename = "corollary42")]
    Corollary42 {
        dimension: usize,
        case: CaseTag,
        params: ParamsSpec,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        tolerances: ToleranceSpec,
    },
    #[serde(rename = "example72")]
    Example72 {
        dimension: usize,
        params: Example72Spec,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        tolerances: ToleranceSpec,
        #[serde(default)]
        expect: ExpectSpec,
    },
    #[serde(rename = "simple-family")]
    SimpleFamily {
        dimension: usize,
        mu: f64,
        tau: f64,
        eta: Vec<f64>,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        tolerances: ToleranceSpec,
    },
    #[serde(rename = "deform-recipe")]
    DeformRecipe {
        dimension: usize,
        recipe: RecipeSpec,
        base: ConstantBaseSpec,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        tolerances: ToleranceSpec,
        #[serde(default)]
        expect: ExpectSpec,
    },
    #[serde(rename = "flow-check")]
    FlowCheck {
        dimension: usize,
        instance: FlowInstanceSpec,
        t_values: Vec<f64>,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        expect: ExpectSpec,
    },
    #[serde(rename = "isoS-navigation")]
    IsoSNavigation {
        dimension: usize,
        #[serde(default = "default_annulus_min")]
        r_min: f64,
        #[serde(default = "default_annulus_max")]
        r_max: f64,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        tolerances: ToleranceSpec,
    },
    #[serde(rename = "douglas-check")]
    DouglasCheck {
        dimension: usize,
        k1: f64,
        k2: f64,
        k3: f64,
        #[serde(default)]
        p0: f64,
        #[serde(default = "default_s_max")]
        s_max: f64,
        base: ConstantBaseSpec,
        #[serde(default)]
        sampling: SamplingSpec,
        #[serde(default)]
        tolerances: ToleranceSpec,
    },
}

fn default_annulus_min() -> f64 {
    0.1
}

fn default_annulus_max() -> f64 {
    0.7
}

fn default_s_max() -> f64 {
    0.7
}

impl Scenario {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Scenario::Theorem12 { .. } => "theorem12",
            Scenario::Corollary41 { .. } => "corollary41",
            Scenario::Corollary42 { .. } => "corollary42",
            Scenario::Example72 { .. } => "example72",
            Scenario::SimpleFamily { .. } => "simple-family",
            Scenario::DeformRecipe { .. } => "deform-recipe",
            Scenario::FlowCheck { .. } => "flow-check",
            Scenario::IsoSNavigation { .. } => "isoS-navigation",
            Scenario::DouglasCheck { .. } => "douglas-check",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Scenario::Theorem12 { dimension, .. }
            | Scenario::Corollary41 { dimension, .. }
            | Scenario::Corollary42 { dimension, .. }
            | Scenario::Example72 { dimension, .. }
            | Scenario::SimpleFamily { dimension, .. }
            | Scenario::DeformRecipe { dimension, .. }
            | Scenario::FlowCheck { dimension, .. }
            | Scenario::IsoSNavigation { dimension, .. }
            | Scenario::DouglasCheck { dimension, .. } => *dimension,
        }
    }

    pub fn sampling_mut(&mut self) -> Option<&mut SamplingSpec> {
        match self {
            Scenario::Theorem12 { sampling, .. }
            | Scenario::Corollary41 { sampling, .. }
            | Scenario::Corollary42 { sampling, .. }
            | Scenario::Example72 { sampling, .. }
            | Scenario::SimpleFamily { sampling, .. }
            | Scenario::DeformRecipe { sampling, .. }
            | Scenario::FlowCheck { sampling, .. }
            | Scenario::IsoSNavigation { sampling, .. }
            | Scenario::DouglasCheck { sampling, .. } => Some(sampling),
        }
    }

    pub fn tolerances_mut(&mut self) -> Option<&mut ToleranceSpec> {
        match self {
            Scenario::Theorem12 { tolerances, .. }
            | Scenario::Corollary41 { tolerances, .. }
            | Scenario::Corollary42 { tolerances, .. }
            | Scenario::Example72 { tolerances, .. }
            | Scenario::SimpleFamily { tolerances, .. }
            | Scenario::DeformRecipe { tolerances, .. }
            | Scenario::IsoSNavigation { tolerances, .. }
            | Scenario::DouglasCheck { tolerances, .. } => Some(tolerances),
            Scenario::FlowCheck { .. } => None,
        }
    }

    pub fn parse(text: &str) -> ConfigResult<Self> {
        let scenario: Scenario = serde_json::from_str(text)
            .map_err(|e| ConfigError(format!("failed to parse scenario: {e}")))?;
        if scenario.dimension() < 2 {
            return Err(ConfigError("dimension must be at least 2".into()));
        }
        if let Scenario::Theorem12 { dimension, .. } = &scenario {
            if *dimension < 3 {
                return Err(ConfigError(
                    "the classification scenarios require dimension >= 3".into(),
                ));
            }
        }
        Ok(scenario)
    }
}

/// A bundled golden scenario.
pub struct BundledScenario {
    pub name: &'static str,
    pub description: &'static str,
    pub json: &'static str,
}

macro_rules! bundled {
    ($name:literal, $desc:literal) => {
        BundledScenario {
            name: $name,
            description: $desc,
            json: include_str!(concat!("../scenarios/", $name, ".json")),
        }
    };
}

pub fn bundled_scenarios() -> Vec<BundledScenario> {
    vec![
        bundled!(
            "theorem12_case_i",
            "homothetic solution of case (i): c = tau at every sample"
        ),
        bundled!(
            "theorem12_case_ii",
            "Killing solution of case (ii) on the flat chart"
        ),
        bundled!(
            "theorem12_case_iii",
            "Killing solution of case (iii) on a curved chart"
        ),
        bundled!(
            "theorem12_case_i_negcontrol",
            "case (i) with one violated constraint; must exit 1"
        ),
        bundled!(
            "corollary41_case_iii",
            "closed-rho specialization: Qe = -2 lambda gamma with d = mu e, P = 0"
        ),
        bundled!(
            "corollary42_case_iii",
            "homothetic-rho specialization with the doubled R matrix"
        ),
        bundled!(
            "example72_standard",
            "non-homothetic conformal field on a projectively flat Randers chart (n = 2)"
        ),
        bundled!(
            "example72_n3",
            "the same construction in dimension 3"
        ),
        bundled!(
            "example72_negcontrol",
            "10% eta perturbation breaking compatibility; must exit 1"
        ),
        bundled!(
            "example72_simple_family",
            "closed-form simple family with f = 1/c"
        ),
        bundled!(
            "deform_navigation_roundtrip",
            "navigation deformation: conformality flags and pointwise inverse round trip"
        ),
        bundled!(
            "deform_isoS2d_smoke",
            "parallel beta through the isotropic-S 2d recipe: Killing rho"
        ),
        bundled!(
            "deform_douglas2d_smoke",
            "parallel beta through the 2d Douglas recipe: Killing rho"
        ),
        bundled!(
            "douglas_n3_check",
            "Douglas phi-ODE residual plus the Case I w-recipe smoke test"
        ),
        bundled!(
            "isoS_navigation",
            "flat-chart navigation inverse and the isotropic-S beta relation"
        ),
        bundled!(
            "flow_minkowski_dilation",
            "constant-exponent flow scaling for a homothetic dilation"
        ),
        bundled!(
            "flow_sigma_vs_c",
            "sigma-form holds while the constant-exponent form fails (non-homothetic)"
        ),
    ]
}

/// Load a scenario from a path, falling back to the bundled catalog when
/// the path does not exist but matches a bundled name.
pub fn load_scenario(path: &std::path::Path) -> ConfigResult<Scenario> {
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        return Scenario::parse(&text);
    }
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    for bundled in bundled_scenarios() {
        if bundled.name == stem {
            return Scenario::parse(bundled.json);
        }
    }
    Err(ConfigError(format!(
        "scenario file {} not found (and no bundled scenario of that name)",
        path.display()
    )))
}
