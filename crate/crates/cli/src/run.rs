//! Scenario resolution and execution.
//!
//! Every scenario is first resolved into a fully typed [`Job`], so a
//! malformed file fails as a whole before anything runs. Execution errors
//! are then confined to their scenario.

use rayon::prelude::*;
use rieszcone::conditions::{
    a_conditions, double_hardy_cone_conditions, hardy_condition, hardy_cone_conditions, product_hardy_conditions,
    s_alpha_conditions, thm31_conditions, trace_condition_b, ExponentPair, HardySide, SAlphaForm, ScanConfig,
};
use rieszcone::duality::{duality_lhs_maximize, duality_rhs};
use rieszcone::geometry::{GroupGeometry, ProductGeometry};
use rieszcone::operators::HardyVariant;
use rieszcone::quadrature::QuadratureConfig;
use rieszcone::radial::{BiDecreasingProfile, BiRadial, ProductWeight, RadialProfile, RadialWeight};
use rieszcone::verify::{
    brute_force_oracle, brute_force_oracle_product, theorem_consistency_sweep, OperatorSpec, ProductOperatorSpec,
    SweepSettings, TestFamily, TheoremScenario, BOUNDED_GROWTH, UNBOUNDED_GROWTH,
};
use serde::de::DeserializeOwned;

use crate::bundle::{DualityRecord, Grid, OracleProbe, OracleRecord, Provenance, Records, ReportBundle, Status, Tolerances};
use crate::config::{Config, Defaults, GeometrySpec, Probes, ScenarioSpec, Task, TheoremKind};
use crate::RunError;

const SWEEP_BUDGET: usize = 160;
const DUALITY_BUDGET: usize = 2000;
const ORACLE_TOLERANCE: f64 = 1e-4;

/// Command-line settings; each is overridden by the same field on a scenario.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_density: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
}

enum Weight {
    Radial(RadialProfile<f64>),
    Factors(RadialProfile<f64>, RadialProfile<f64>),
    Surface(BiRadial<f64>),
}

enum Problem {
    Hardy { geom: GroupGeometry<f64>, pair: ExponentPair<f64>, w: Weight, v: Weight, a: f64, side: HardySide },
    Riesz { geom: GroupGeometry<f64>, pair: ExponentPair<f64>, alpha: f64, w: Weight, v: Weight },
    HardyCone { geom: GroupGeometry<f64>, pair: ExponentPair<f64>, w: Weight, v: Weight },
    FarPiece { geom: GroupGeometry<f64>, pair: ExponentPair<f64>, alpha: f64, w: Weight, v: Weight, form: SAlphaForm },
    ProductHardy { geom: ProductGeometry<f64>, pair: ExponentPair<f64>, w: Weight, v: Weight, a: f64, b: f64, variant: HardyVariant },
    DoubleHardyCone { geom: ProductGeometry<f64>, pair: ExponentPair<f64>, w: Weight, v: Weight },
    ProductRiesz { geom: ProductGeometry<f64>, pair: ExponentPair<f64>, alpha1: f64, alpha2: f64, w: Weight, v: Weight },
    ProductTrace { geom: ProductGeometry<f64>, pair: ExponentPair<f64>, alpha1: f64, alpha2: f64, v: Weight },
}

enum Work {
    Conditions(Problem),
    Sweep(Problem, Option<Vec<TestFamily<f64>>>),
    Duality { geom: GroupGeometry<f64>, p: f64, w: Weight, g: RadialProfile<f64> },
    Oracle { geom: GroupGeometry<f64>, op: OperatorSpec<f64>, f: RadialProfile<f64>, probes: Vec<f64> },
    OracleProduct { geom: ProductGeometry<f64>, op: ProductOperatorSpec<f64>, f: BiRadial<f64>, probes: Vec<(f64, f64)> },
}

/// A resolved scenario.
pub struct Job {
    spec: ScenarioSpec,
    work: Work,
    seed: u64,
    budget: usize,
    scan: ScanConfig<f64>,
    tolerance: Option<f64>,
}

enum Geom {
    Single(GroupGeometry<f64>),
    Product(ProductGeometry<f64>),
}

/// Rewrites `{ family = "indicator", radius = R }` as the power profile
/// `t^0` on `[0, R)`, at any depth.
fn desugar(v: toml::Value) -> toml::Value {
    match v {
        toml::Value::Table(t) => {
            let mut t: toml::Table = t.into_iter().map(|(k, v)| (k, desugar(v))).collect();
            if t.get("family").and_then(|f| f.as_str()) == Some("indicator") {
                t.insert("family".into(), "power".into());
                t.insert("exponent".into(), 0.0.into());
                if let Some(r) = t.remove("radius") {
                    t.insert("hi".into(), r);
                }
            }
            toml::Value::Table(t)
        }
        toml::Value::Array(a) => toml::Value::Array(a.into_iter().map(desugar).collect()),
        other => other,
    }
}

struct Fields<'a> {
    spec: &'a ScenarioSpec,
}

impl<'a> Fields<'a> {
    fn err(&self, field: &str, msg: impl std::fmt::Display) -> RunError {
        RunError::Config(format!("scenario '{}': field `{field}`: {msg}", self.spec.name))
    }

    fn need<T: Copy>(&self, field: &str, v: Option<T>) -> Result<T, RunError> {
        v.ok_or_else(|| self.err(field, "required for this task"))
    }

    fn typed<T: DeserializeOwned>(&self, field: &str, v: &Option<toml::Value>) -> Result<T, RunError> {
        let v = v.as_ref().ok_or_else(|| self.err(field, "required for this task"))?;
        desugar(v.clone()).try_into().map_err(|e: toml::de::Error| self.err(field, e.message()))
    }

    fn group(&self, g: &GeometrySpec, field: &str) -> Result<GroupGeometry<f64>, RunError> {
        if g.product.is_some() {
            return Err(self.err(field, "nested products are not supported"));
        }
        let r = match (g.euclidean, g.q) {
            (Some(n), None) => {
                if g.sigma_s.is_some() || g.c0.is_some() {
                    return Err(self.err(field, "euclidean geometries fix sigmaS and c0"));
                }
                GroupGeometry::euclidean(n)
            }
            (None, Some(q)) => GroupGeometry::new(q, g.sigma_s.unwrap_or(q), g.c0.unwrap_or(1.0)),
            _ => return Err(self.err(field, "give exactly one of `euclidean` or `Q`")),
        };
        r.map_err(|e| self.err(field, e))
    }

    fn geometry(&self) -> Result<Geom, RunError> {
        let g = &self.spec.geometry;
        match &g.product {
            Some(list) => {
                if g.euclidean.is_some() || g.q.is_some() || g.sigma_s.is_some() || g.c0.is_some() {
                    return Err(self.err("geometry", "a product takes only `product = [g1, g2]`"));
                }
                let [g1, g2] = list.as_slice() else {
                    return Err(self.err("geometry.product", "expected exactly two factors"));
                };
                let pg = ProductGeometry::new(self.group(g1, "geometry.product[0]")?, self.group(g2, "geometry.product[1]")?)
                    .map_err(|e| self.err("geometry", e))?;
                Ok(Geom::Product(pg))
            }
            None => Ok(Geom::Single(self.group(g, "geometry")?)),
        }
    }

    fn pair(&self) -> Result<ExponentPair<f64>, RunError> {
        let p = self.need("p", self.spec.p)?;
        let q = self.need("q", self.spec.q)?;
        ExponentPair::new(p, q).map_err(|e| self.err("p", e))
    }

    fn radial(&self, field: &str, v: &Option<toml::Value>) -> Result<RadialProfile<f64>, RunError> {
        let p: RadialProfile<f64> = self.typed(field, v)?;
        p.validate().map_err(|e| self.err(field, e))?;
        Ok(p)
    }

    fn weight(&self, field: &str, v: &Option<toml::Value>, product: bool) -> Result<Weight, RunError> {
        if !product {
            return Ok(Weight::Radial(self.radial(field, v)?));
        }
        let value = v.as_ref().ok_or_else(|| self.err(field, "required for this task"))?;
        let table = value.as_table().ok_or_else(|| self.err(field, "expected a table"))?;
        let only = |key: &str| table.len() == 1 && table.contains_key(key);
        if only("factors") {
            let [a, b]: [RadialProfile<f64>; 2] =
                desugar(table["factors"].clone()).try_into().map_err(|e: toml::de::Error| self.err(field, e.message()))?;
            for p in [&a, &b] {
                p.validate().map_err(|e| self.err(field, e))?;
            }
            Ok(Weight::Factors(a, b))
        } else if only("surface") {
            let s: BiRadial<f64> =
                desugar(table["surface"].clone()).try_into().map_err(|e: toml::de::Error| self.err(field, e.message()))?;
            s.validate().map_err(|e| self.err(field, e))?;
            Ok(Weight::Surface(s))
        } else {
            Err(self.err(field, "product weights are `{ factors = [w1, w2] }` or `{ surface = { form = .. } }`"))
        }
    }

    fn theorem(&self) -> Result<TheoremKind, RunError> {
        self.spec.theorem.ok_or_else(|| self.err("theorem", "required for this task"))
    }

    fn single(&self, geom: &Geom, theorem: TheoremKind) -> Result<GroupGeometry<f64>, RunError> {
        match geom {
            Geom::Single(g) => Ok(*g),
            Geom::Product(_) => Err(self.err("geometry", format!("{theorem:?} needs a single group"))),
        }
    }

    fn product(&self, geom: &Geom, theorem: TheoremKind) -> Result<ProductGeometry<f64>, RunError> {
        match geom {
            Geom::Product(g) => Ok(*g),
            Geom::Single(_) => Err(self.err("geometry", format!("{theorem:?} needs a product geometry"))),
        }
    }

    fn problem(&self, geom: &Geom) -> Result<Problem, RunError> {
        let s = self.spec;
        let theorem = self.theorem()?;
        use TheoremKind as K;
        Ok(match theorem {
            K::Hardy => Problem::Hardy {
                geom: self.single(geom, theorem)?,
                pair: self.pair()?,
                w: self.weight("w", &s.w, false)?,
                v: self.weight("v", &s.v, false)?,
                a: s.a.unwrap_or(1.0),
                side: s.side.unwrap_or(HardySide::Near),
            },
            K::Riesz => Problem::Riesz {
                geom: self.single(geom, theorem)?,
                pair: self.pair()?,
                alpha: self.need("alpha", s.alpha)?,
                w: self.weight("w", &s.w, false)?,
                v: self.weight("v", &s.v, false)?,
            },
            K::HardyCone => Problem::HardyCone {
                geom: self.single(geom, theorem)?,
                pair: self.pair()?,
                w: self.weight("w", &s.w, false)?,
                v: self.weight("v", &s.v, false)?,
            },
            K::FarPiece => Problem::FarPiece {
                geom: self.single(geom, theorem)?,
                pair: self.pair()?,
                alpha: self.need("alpha", s.alpha)?,
                w: self.weight("w", &s.w, false)?,
                v: self.weight("v", &s.v, false)?,
                form: self.need("form", s.form)?,
            },
            K::ProductHardy => Problem::ProductHardy {
                geom: self.product(geom, theorem)?,
                pair: self.pair()?,
                w: self.weight("w", &s.w, true)?,
                v: self.weight("v", &s.v, true)?,
                a: s.a.unwrap_or(1.0),
                b: s.b.unwrap_or(1.0),
                variant: self.need("variant", s.variant)?,
            },
            K::DoubleHardyCone => Problem::DoubleHardyCone {
                geom: self.product(geom, theorem)?,
                pair: self.pair()?,
                w: self.weight("w", &s.w, true)?,
                v: self.weight("v", &s.v, true)?,
            },
            K::ProductRiesz => Problem::ProductRiesz {
                geom: self.product(geom, theorem)?,
                pair: self.pair()?,
                alpha1: self.need("alpha1", s.alpha1)?,
                alpha2: self.need("alpha2", s.alpha2)?,
                w: self.weight("w", &s.w, true)?,
                v: self.weight("v", &s.v, true)?,
            },
            K::ProductTrace => Problem::ProductTrace {
                geom: self.product(geom, theorem)?,
                pair: self.pair()?,
                alpha1: self.need("alpha1", s.alpha1)?,
                alpha2: self.need("alpha2", s.alpha2)?,
                v: self.weight("v", &s.v, true)?,
            },
        })
    }

    fn work(&self) -> Result<Work, RunError> {
        let s = self.spec;
        let geom = self.geometry()?;
        Ok(match s.task {
            Task::Conditions => Work::Conditions(self.problem(&geom)?),
            Task::Sweep => {
                let problem = self.problem(&geom)?;
                if matches!(problem, Problem::Hardy { .. } | Problem::ProductHardy { .. } | Problem::DoubleHardyCone { .. }) {
                    return Err(self.err("theorem", "sweeps cover riesz, hardy_cone, far_piece, product_riesz and product_trace"));
                }
                if let Some(fams) = &s.families {
                    for f in fams {
                        f.validate().map_err(|e| self.err("families", e))?;
                    }
                }
                Work::Sweep(problem, s.families.clone())
            }
            Task::Duality => {
                let Geom::Single(geom) = geom else {
                    return Err(self.err("geometry", "duality needs a single group"));
                };
                Work::Duality {
                    geom,
                    p: self.need("p", s.p)?,
                    w: self.weight("w", &s.w, false)?,
                    g: self.radial("g", &s.g)?,
                }
            }
            Task::Oracle => match geom {
                Geom::Single(geom) => {
                    let probes = match &s.probes {
                        Some(Probes::Radii(r)) => r.clone(),
                        Some(Probes::Pairs(_)) => return Err(self.err("probes", "a single group takes radii, not pairs")),
                        None => return Err(self.err("probes", "required for this task")),
                    };
                    Work::Oracle { geom, op: self.typed("operator", &s.operator)?, f: self.radial("f", &s.f)?, probes }
                }
                Geom::Product(geom) => {
                    let probes = match &s.probes {
                        Some(Probes::Pairs(r)) => r.iter().map(|p| (p[0], p[1])).collect(),
                        Some(Probes::Radii(r)) if r.is_empty() => Vec::new(),
                        Some(Probes::Radii(_)) => return Err(self.err("probes", "a product takes [t, tau] pairs")),
                        None => return Err(self.err("probes", "required for this task")),
                    };
                    let f: BiRadial<f64> = self.typed("f", &s.f)?;
                    f.validate().map_err(|e| self.err("f", e))?;
                    Work::OracleProduct { geom, op: self.typed("operator", &s.operator)?, f, probes }
                }
            },
        })
    }
}

fn scan_config(spec: &ScenarioSpec, defaults: &Defaults, flags: &Overrides, f: &Fields) -> Result<ScanConfig<f64>, RunError> {
    let pick = |s: Option<f64>, o: Option<f64>, d: Option<f64>| s.or(o).or(d);
    let mut scan = ScanConfig::default();
    let t_min = pick(spec.t_min, flags.t_min, defaults.t_min);
    let t_max = pick(spec.t_max, flags.t_max, defaults.t_max);
    if t_min.is_some() || t_max.is_some() {
        let (lo, hi) = (t_min.unwrap_or(scan.t_min), t_max.unwrap_or(scan.t_max));
        scan = scan.with_range(lo, hi).map_err(|e| f.err("t_min", e))?;
        let quad = QuadratureConfig::default();
        if !(lo < hi) {
            return Err(f.err("t_min", "t_min must be below t_max"));
        }
        scan = scan.with_quadrature(quad.with_range(lo, hi));
    }
    if let Some(d) = pick(spec.grid_density, flags.grid_density, defaults.grid_density) {
        scan = scan.with_density(d).map_err(|e| f.err("grid_density", e))?;
    }
    Ok(scan)
}

/// Resolves every scenario, failing on the first malformed one.
pub fn resolve(config: &Config, flags: &Overrides) -> Result<Vec<Job>, RunError> {
    config
        .scenarios
        .iter()
        .map(|spec| {
            let f = Fields { spec };
            let work = f.work()?;
            let scan = scan_config(spec, &config.defaults, flags, &f)?;
            let seed = spec.seed.or(flags.seed).or(config.defaults.seed).unwrap_or(0);
            let fallback = match spec.task {
                Task::Duality => DUALITY_BUDGET,
                _ => SWEEP_BUDGET,
            };
            let budget = spec.budget.or(config.defaults.budget).unwrap_or(fallback);
            let tolerance = match spec.task {
                Task::Oracle => match spec.tolerance.unwrap_or(ORACLE_TOLERANCE) {
                    t if t >= 0.0 && t.is_finite() => Some(t),
                    _ => return Err(f.err("tolerance", "must be finite and nonnegative")),
                },
                _ if spec.tolerance.is_some() => return Err(f.err("tolerance", "only oracle scenarios take a tolerance")),
                _ => None,
            };
            Ok(Job { spec: spec.clone(), work, seed, budget, scan, tolerance })
        })
        .collect()
}

type Lib<T> = rieszcone::Result<T>;

fn radial_weight(geom: &GroupGeometry<f64>, w: &Weight, cfg: &QuadratureConfig<f64>) -> Lib<RadialWeight<f64>> {
    match w {
        Weight::Radial(p) => RadialWeight::new(*geom, p.clone(), cfg),
        _ => unreachable!("resolved as a single-group weight"),
    }
}

fn product_weight(geom: &ProductGeometry<f64>, w: &Weight, cfg: &QuadratureConfig<f64>) -> Lib<ProductWeight<f64>> {
    match w {
        Weight::Factors(a, b) => Ok(ProductWeight::product(
            RadialWeight::new(geom.g1, a.clone(), cfg)?,
            RadialWeight::new(geom.g2, b.clone(), cfg)?,
        )),
        Weight::Surface(s) => ProductWeight::general(*geom, s.clone()),
        Weight::Radial(_) => unreachable!("resolved as a product weight"),
    }
}

fn conditions(problem: &Problem, scan: &ScanConfig<f64>) -> Lib<Vec<rieszcone::conditions::ConditionReport<f64>>> {
    let cfg = &scan.quadrature;
    let rw = |g: &GroupGeometry<f64>, w: &Weight| radial_weight(g, w, cfg);
    let pw = |g: &ProductGeometry<f64>, w: &Weight| product_weight(g, w, cfg);
    Ok(match problem {
        Problem::Hardy { geom, pair, w, v, a, side } => vec![hardy_condition(geom, *pair, &rw(geom, w)?, &rw(geom, v)?, *a, *side, scan)?],
        Problem::Riesz { geom, pair, alpha, w, v } => thm31_conditions(geom, *pair, *alpha, &rw(geom, w)?, &rw(geom, v)?, scan)?.to_vec(),
        Problem::HardyCone { geom, pair, w, v } => hardy_cone_conditions(geom, *pair, &rw(geom, w)?, &rw(geom, v)?, scan)?.to_vec(),
        Problem::FarPiece { geom, pair, alpha, w, v, form } => {
            vec![s_alpha_conditions(geom, *pair, *alpha, &rw(geom, w)?, &rw(geom, v)?, *form, scan)?]
        }
        Problem::ProductHardy { geom, pair, w, v, a, b, variant } => {
            vec![product_hardy_conditions(geom, *pair, &pw(geom, w)?, &pw(geom, v)?, *a, *b, *variant, scan)?]
        }
        Problem::DoubleHardyCone { geom, pair, w, v } => {
            double_hardy_cone_conditions(geom, *pair, &pw(geom, w)?, &pw(geom, v)?, scan)?.to_vec()
        }
        Problem::ProductRiesz { geom, pair, alpha1, alpha2, w, v } => {
            a_conditions(geom, *pair, *alpha1, *alpha2, &pw(geom, w)?, &pw(geom, v)?, scan)?.to_vec()
        }
        Problem::ProductTrace { geom, pair, alpha1, alpha2, v } => {
            vec![trace_condition_b(geom, *pair, *alpha1, *alpha2, &pw(geom, v)?, scan)?]
        }
    })
}

fn sweep_scenario(problem: &Problem, cfg: &QuadratureConfig<f64>) -> Lib<TheoremScenario<f64>> {
    let rw = |g: &GroupGeometry<f64>, w: &Weight| radial_weight(g, w, cfg);
    let pw = |g: &ProductGeometry<f64>, w: &Weight| product_weight(g, w, cfg);
    Ok(match problem {
        Problem::Riesz { geom, pair, alpha, w, v } => {
            TheoremScenario::Riesz { geom: *geom, pair: *pair, alpha: *alpha, w: rw(geom, w)?, v: rw(geom, v)? }
        }
        Problem::HardyCone { geom, pair, w, v } => TheoremScenario::HardyCone { geom: *geom, pair: *pair, w: rw(geom, w)?, v: rw(geom, v)? },
        Problem::FarPiece { geom, pair, alpha, w, v, form } => TheoremScenario::FarPiece {
            geom: *geom,
            pair: *pair,
            alpha: *alpha,
            w: rw(geom, w)?,
            v: rw(geom, v)?,
            form: *form,
        },
        Problem::ProductRiesz { geom, pair, alpha1, alpha2, w, v } => TheoremScenario::ProductRiesz {
            geom: *geom,
            pair: *pair,
            alpha1: *alpha1,
            alpha2: *alpha2,
            w: pw(geom, w)?,
            v: pw(geom, v)?,
        },
        Problem::ProductTrace { geom, pair, alpha1, alpha2, v } => {
            TheoremScenario::ProductTrace { geom: *geom, pair: *pair, alpha1: *alpha1, alpha2: *alpha2, v: pw(geom, v)? }
        }
        _ => unreachable!("rejected during resolution"),
    })
}

fn relative(engine: f64, oracle: f64) -> f64 {
    if engine == oracle {
        0.0
    } else {
        (engine - oracle).abs() / oracle.abs()
    }
}

fn oracle_record(operator: String, probes: Vec<OracleProbe>, tolerance: f64) -> OracleRecord {
    let max = probes.iter().filter_map(|p| p.relative_deviation).fold(0.0, f64::max);
    let agrees = probes.iter().all(|p| p.relative_deviation.map_or(true, |d| d <= tolerance));
    OracleRecord { operator, probes, max_relative_deviation: max, tolerance, agrees }
}

impl Job {
    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    fn execute(&self) -> Lib<Records> {
        let scan = &self.scan;
        let cfg = &scan.quadrature;
        let mut records = Records::default();
        match &self.work {
            Work::Conditions(p) => records.conditions = conditions(p, scan)?,
            Work::Sweep(p, families) => {
                let settings = SweepSettings { scan: scan.clone(), families: families.clone(), budget: self.budget, seed: self.seed };
                let verdict = theorem_consistency_sweep(&sweep_scenario(p, cfg)?, &settings)?;
                records.verdict = Some(verdict);
            }
            Work::Duality { geom, p, w, g } => {
                let w = radial_weight(geom, w, cfg)?;
                let (rhs, rhs_note) = match duality_rhs(geom, *p, &w, g, cfg) {
                    Ok(r) => (Some(r), None),
                    Err(e @ rieszcone::Error::Divergent { .. }) => (None, Some(e.to_string())),
                    Err(e) => return Err(e),
                };
                let lhs = duality_lhs_maximize(geom, *p, &w, g, self.budget, self.seed, scan)?;
                records.duality = Some(DualityRecord { rhs, rhs_note, lhs });
            }
            Work::Oracle { geom, op, f, probes } => {
                let engine = op.evaluate(geom, f, probes, cfg)?;
                let oracle = brute_force_oracle(geom, op, f, probes)?;
                let rows = probes
                    .iter()
                    .zip(engine.into_iter().zip(oracle))
                    .map(|(&t, (e, o))| OracleProbe { t, tau: None, engine: e, oracle: o, relative_deviation: o.map(|o| relative(e, o)) })
                    .collect();
                records.oracle = Some(oracle_record(op.label(), rows, self.tolerance.unwrap_or(ORACLE_TOLERANCE)));
            }
            Work::OracleProduct { geom, op, f, probes } => {
                let fd = BiDecreasingProfile::new(f.clone())?;
                let engine = op.evaluate(geom, &fd, probes, cfg)?;
                let oracle = brute_force_oracle_product(geom, op, f, probes)?;
                let rows = probes
                    .iter()
                    .zip(engine.into_iter().zip(oracle))
                    .map(|(&(t, tau), (e, o))| OracleProbe {
                        t,
                        tau: Some(tau),
                        engine: e,
                        oracle: o,
                        relative_deviation: o.map(|o| relative(e, o)),
                    })
                    .collect();
                records.oracle = Some(oracle_record(op.label(), rows, self.tolerance.unwrap_or(ORACLE_TOLERANCE)));
            }
        }
        Ok(records)
    }

    fn provenance(&self) -> Provenance {
        let (s, q) = (&self.scan, &self.scan.quadrature);
        Provenance {
            tool: "rieszcone".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: self.seed,
            budget: self.budget,
            grid: Grid {
                t_min: s.t_min,
                t_max: s.t_max,
                scan_points: s.points,
                scan_points_2d: s.points_2d,
                scan_refine: s.refine,
                quadrature_t_min: q.t_min,
                quadrature_t_max: q.t_max,
                cells_per_decade: q.cells_per_decade,
                singular_decades: q.singular_decades,
                gauss_points: q.rule().len(),
            },
            tolerances: Tolerances { unbounded_growth: UNBOUNDED_GROWTH, bounded_growth: BOUNDED_GROWTH, oracle_relative: self.tolerance },
        }
    }

    /// Runs the scenario; library failures are recorded, never raised.
    pub fn run(&self) -> ReportBundle {
        let (status, warnings, records) = match self.execute() {
            Ok(r) => (Status::Ok, Vec::new(), r),
            Err(rieszcone::Error::Precondition(reason)) => {
                let warning = format!("scenario skipped: hypothesis not satisfied: {reason}");
                (Status::Skipped { reason }, vec![warning], Records::default())
            }
            Err(e) => (Status::Failed { message: e.to_string() }, Vec::new(), Records::default()),
        };
        ReportBundle { scenario: self.spec.clone(), provenance: self.provenance(), status, warnings, records }
    }
}

/// Runs all jobs on a pool of `jobs` threads (all cores when `None`);
/// bundles come back in input order.
pub fn run_all(jobs: &[Job], threads: Option<usize>) -> Result<Vec<ReportBundle>, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| RunError::Io(format!("thread pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(Job::run).collect()))
}
