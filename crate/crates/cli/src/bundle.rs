use rieszcone::conditions::ConditionReport;
use rieszcone::duality::{DualityReport, DualityRhs};
use rieszcone::verify::Verdict;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioSpec;

/// Everything written for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub scenario: ScenarioSpec,
    pub provenance: Provenance,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub records: Records,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// A theorem hypothesis or precondition failed: nothing was computed.
    Skipped { reason: String },
    Failed { message: String },
}

/// Settings that every number in the bundle depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub budget: usize,
    pub grid: Grid,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub scan_points: usize,
    pub scan_points_2d: usize,
    pub scan_refine: bool,
    pub quadrature_t_min: f64,
    pub quadrature_t_max: f64,
    pub cells_per_decade: usize,
    pub singular_decades: usize,
    pub gauss_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Three-decade ratio growth at or above which a trace is unbounded.
    pub unbounded_growth: f64,
    /// Three-decade ratio growth at or below which a trace is bounded.
    pub bounded_growth: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_relative: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Records {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionReport<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality: Option<DualityRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityRecord {
    /// Absent when a summand diverges; see `rhs_note`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<DualityRhs<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs_note: Option<String>,
    pub lhs: DualityReport<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub operator: String,
    pub probes: Vec<OracleProbe>,
    #[serde(with = "rieszcone::scalar::extended")]
    pub max_relative_deviation: f64,
    pub tolerance: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleProbe {
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(with = "rieszcone::scalar::extended")]
    pub engine: f64,
    /// `None` outside the oracle's domain.
    #[serde(default, with = "opt_extended", skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
    #[serde(default, with = "opt_extended", skip_serializing_if = "Option::is_none")]
    pub relative_deviation: Option<f64>,
}

mod opt_extended {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    struct Ext(#[serde(with = "rieszcone::scalar::extended")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Ext).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Ext>::deserialize(d)?.map(|e| e.0))
    }
}

impl ReportBundle {
    /// Whether the scenario contradicts its theorem or its oracle.
    pub fn inconsistent(&self) -> bool {
        let verdict = self.records.verdict.as_ref().is_some_and(|v| !v.consistent);
        let oracle = self.records.oracle.as_ref().is_some_and(|o| !o.agrees);
        verdict || oracle
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Failed { .. })
    }
}
