//! The scenario file: a `[defaults]` table and an array of `[[scenario]]`
//! tables. Polymorphic inputs (weights, profiles, operators) are kept as raw
//! TOML values here and typed during resolution, so diagnostics can name the
//! offending field.

use std::path::Path;

use rieszcone::conditions::{HardySide, SAlphaForm};
use rieszcone::operators::HardyVariant;
use rieszcone::verify::TestFamily;
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ScenarioSpec>,
}

/// Run-wide settings; command-line flags take precedence over these and
/// per-scenario fields over both.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub seed: Option<u64>,
    /// Supremum-scan points per decade.
    pub grid_density: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Conditions,
    Duality,
    Sweep,
    Oracle,
}

/// Which family of weight functionals a scenario evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    /// `H^a` or `H̃^a` on `L^p(w) → L^q(v)`.
    Hardy,
    /// `I_α` on the decreasing cone, (F1)–(F3).
    Riesz,
    /// `H` on the decreasing cone.
    HardyCone,
    /// The far piece `S_α`.
    FarPiece,
    /// Double Hardy operators on a product.
    ProductHardy,
    /// `H^{1,1}` on the bi-decreasing cone.
    DoubleHardyCone,
    /// `I_{α₁,α₂}` on the bi-decreasing cone, A₁–A₉.
    ProductRiesz,
    /// `I_{α₁,α₂}` from unweighted `L^p_dec`, condition B.
    ProductTrace,
}

/// `{ euclidean = n }`, `{ Q = .., sigmaS = .., c0 = .. }` or
/// `{ product = [ <group>, <group> ] }`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub euclidean: Option<u32>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    /// Defaults to `Q`, which normalizes `|B(e,1)| = 1`.
    #[serde(rename = "sigmaS")]
    pub sigma_s: Option<f64>,
    pub c0: Option<f64>,
    pub product: Option<Vec<GeometrySpec>>,
}

/// Radii for a single group, `[t, τ]` pairs for a product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Probes {
    Radii(Vec<f64>),
    Pairs(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub task: Task,
    pub theorem: Option<TheoremKind>,
    pub geometry: GeometrySpec,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    /// Dilations of the Hardy operators.
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub side: Option<HardySide>,
    pub variant: Option<HardyVariant>,
    pub form: Option<SAlphaForm>,
    pub w: Option<toml::Value>,
    pub v: Option<toml::Value>,
    /// The duality test function.
    pub g: Option<toml::Value>,
    /// The oracle input.
    pub f: Option<toml::Value>,
    pub operator: Option<toml::Value>,
    pub probes: Option<Probes>,
    pub families: Option<Vec<TestFamily<f64>>>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub grid_density: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    /// Oracle agreement tolerance, relative.
    pub tolerance: Option<f64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let config: Config = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        config.check_names()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Names become file names, so they must be unique and path-safe.
    fn check_names(&self) -> Result<(), RunError> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, s) in self.scenarios.iter().enumerate() {
            let ok = !s.name.is_empty()
                && s.name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
                && !s.name.starts_with('.');
            if !ok {
                return Err(RunError::Config(format!(
                    "scenario[{i}].name: {:?} must be non-empty and use only ASCII letters, digits, '-', '_' or '.'",
                    s.name
                )));
            }
            if !seen.insert(s.name.as_str()) {
                return Err(RunError::Config(format!("scenario[{i}].name: duplicate name {:?}", s.name)));
            }
        }
        Ok(())
    }
}
