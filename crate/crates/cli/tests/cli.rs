use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rieszcone_cli::bundle::{ReportBundle, Status};
use rieszcone_cli::{run, Config, Outcome, Overrides};

const RIESZ_LINE: &str = r#"
[[scenario]]
name = "riesz-line"
task = "conditions"
theorem = "riesz"
geometry = { euclidean = 1 }
p = 2.0
q = 2.0
alpha = 0.5
w = { family = "power", exponent = 0.0 }
v = { family = "power", exponent = -1.0 }
"#;

const TRACE_ENDPOINT: &str = r#"
[[scenario]]
name = "trace-endpoint"
task = "conditions"
theorem = "product_trace"
geometry = { product = [{ euclidean = 1 }, { euclidean = 1 }] }
p = 2.0
q = 2.0
alpha1 = 0.5
alpha2 = 0.25
v = { factors = [{ family = "indicator", radius = 1.0 }, { family = "indicator", radius = 1.0 }] }
"#;

const MIXED: &str = r#"
[defaults]
seed = 11

[[scenario]]
name = "sweep"
task = "sweep"
theorem = "riesz"
geometry = { euclidean = 1 }
p = 2.0
q = 2.0
alpha = 0.5
w = { family = "power", exponent = 0.0 }
v = { family = "power", exponent = -1.0 }
families = [{ family = "indicator", lo = 1e-2, hi = 1e2, points = 30 }]
budget = 40

[[scenario]]
name = "dual"
task = "duality"
geometry = { euclidean = 1 }
p = 2.0
w = { family = "power", exponent = 0.0 }
g = { family = "indicator", radius = 1.0 }
budget = 200
seed = 3

[[scenario]]
name = "oracle"
task = "oracle"
geometry = { euclidean = 2 }
operator = { operator = "hardy", a = 1.0 }
f = { family = "shifted_power", shift = 1.0, exponent = -2.0 }
probes = [0.5, 1.0, 4.0]

[[scenario]]
name = "product-oracle"
task = "oracle"
geometry = { product = [{ euclidean = 1 }, { euclidean = 1 }] }
operator = { operator = "hardy", a = 1.0, b = 1.0, variant = "near_near" }
f = { form = "separable", terms = [{ coeff = 1.0, first = { family = "indicator", radius = 1.0 }, second = { family = "exponential", rate = -1.0 } }] }
probes = [[0.5, 0.5], [2.0, 3.0]]
"#;

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn cli(config: &str, out: &Path, extra: &[&str]) -> Output {
    let dir = out.parent().unwrap();
    let path = dir.join(format!("{}.toml", out.file_name().unwrap().to_string_lossy()));
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_rieszcone"))
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn read(path: PathBuf) -> String {
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn rows(csv_text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn empty_config_exits_cleanly() {
    let d = tmp();
    let out = d.path().join("out");
    let o = cli("", &out, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(out.join("conditions.csv")), "scenario,condition,value,argmax,verdict\n");
    assert!(rows(&read(out.join("summary.csv"))).is_empty());
    assert_eq!(std::fs::read_dir(out.join("plots")).unwrap().count(), 0);
}

#[test]
fn riesz_power_weights_give_unit_f1() {
    let d = tmp();
    let out = d.path().join("out");
    let o = cli(RIESZ_LINE, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = rows(&read(out.join("conditions.csv")));
    let f1 = table.iter().find(|r| r[1] == "F1").expect("F1 row");
    assert_eq!(f1[0], "riesz-line");
    assert!((f1[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-9, "{f1:?}");
    assert!(f1[3].parse::<f64>().is_ok());
    assert_eq!(f1[4], "finite");
    assert!(out.join("riesz-line.json").exists());
    assert!(out.join("plots/riesz-line__scan_F1.csv").exists());
}

#[test]
fn trace_endpoint_is_skipped_with_warning() {
    let d = tmp();
    let out = d.path().join("out");
    let o = cli(TRACE_ENDPOINT, &out, &[]);
    assert_eq!(o.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("warning: trace-endpoint"), "{stderr}");
    let b: ReportBundle = serde_json::from_str(&read(out.join("trace-endpoint.json"))).unwrap();
    let Status::Skipped { reason } = &b.status else { panic!("{:?}", b.status) };
    assert!(reason.contains("Qᵢ/p"), "{reason}");
    assert_eq!(b.warnings.len(), 1);
    assert_eq!(rows(&read(out.join("summary.csv")))[0][2], "skipped");
}

#[test]
fn malformed_configs_name_the_field() {
    let cases = [
        (RIESZ_LINE.replace("alpha = 0.5\n", ""), "`alpha`"),
        (RIESZ_LINE.replace("p = 2.0", "p = \"two\""), "p"),
        (RIESZ_LINE.replace("exponent = -1.0 }", "exponent = -1.0, bogus = 1 }"), "`v`"),
        (RIESZ_LINE.replace("task =", "colour = 1\ntask ="), "colour"),
        (RIESZ_LINE.replace("euclidean = 1", "euclidean = 1, Q = 2.0"), "`geometry`"),
        (RIESZ_LINE.replace("riesz-line", "../escape"), "name"),
        (format!("{RIESZ_LINE}{RIESZ_LINE}"), "duplicate"),
        (RIESZ_LINE.replace("theorem = \"riesz\"", "theorem = \"product_riesz\""), "`geometry`"),
    ];
    for (text, needle) in cases {
        let d = tmp();
        let out = d.path().join("out");
        let o = cli(&text, &out, &[]);
        let stderr = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(1), "{needle}: {stderr}");
        assert!(stderr.contains(needle), "expected {needle} in: {stderr}");
        assert!(!out.exists(), "nothing is written for a malformed file");
    }
}

#[test]
fn library_failures_exit_one_and_disagreement_exits_two() {
    let d = tmp();
    let failing = r#"
[[scenario]]
name = "bad-p"
task = "duality"
geometry = { euclidean = 1 }
p = 0.5
w = { family = "power", exponent = 0.0 }
g = { family = "indicator", radius = 1.0 }
"#;
    let o = cli(&format!("{failing}{RIESZ_LINE}"), &d.path().join("a"), &[]);
    assert_eq!(o.status.code(), Some(1));
    // the other scenario still runs
    assert!(d.path().join("a/riesz-line.json").exists());

    let strict = r#"
[[scenario]]
name = "strict"
task = "oracle"
geometry = { euclidean = 1 }
operator = { operator = "riesz", alpha = 0.5 }
f = { family = "shifted_power", shift = 1.0, exponent = -3.0 }
probes = [0.3, 2.0]
tolerance = 0.0
"#;
    let o = cli(strict, &d.path().join("b"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let relaxed = strict.replace("tolerance = 0.0", "tolerance = 1e-4");
    assert_eq!(cli(&relaxed, &d.path().join("c"), &[]).status.code(), Some(0));
}

#[test]
fn bundles_round_trip_through_json() {
    let d = tmp();
    let config = Config::parse(&format!("{MIXED}{TRACE_ENDPOINT}")).unwrap();
    let bundles = run(&config, d.path(), &Overrides::default(), Some(1)).unwrap();
    assert_eq!(Outcome::of(&bundles), Outcome::Clean);
    for b in &bundles {
        let text = read(d.path().join(format!("{}.json", b.scenario.name)));
        let back: ReportBundle = serde_json::from_str(&text).unwrap();
        // NaN fields defeat `==`, so compare re-serializations as well
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
        assert_eq!(back.scenario, b.scenario);
        assert_eq!(back.status, b.status);
        assert_eq!(back.provenance, b.provenance);
    }
    let oracle = &bundles[2].records.oracle.as_ref().unwrap();
    assert!(oracle.agrees, "{oracle:?}");
    let product = &bundles[3].records.oracle.as_ref().unwrap();
    assert!(product.agrees && product.probes[1].tau == Some(3.0), "{product:?}");
}

#[test]
fn settings_follow_precedence() {
    let d = tmp();
    let config = Config::parse(MIXED).unwrap();
    let flags = Overrides { seed: Some(99), grid_density: Some(20.0), t_min: Some(1e-4), t_max: Some(1e4) };
    let b = run(&config, d.path(), &flags, Some(1)).unwrap();
    // scenario field beats flag, flag beats [defaults]
    assert_eq!(b[1].provenance.seed, 3);
    assert_eq!(b[0].provenance.seed, 99);
    assert_eq!(b[0].provenance.budget, 40);
    assert_eq!(b[2].provenance.budget, 160);
    let g = &b[0].provenance.grid;
    assert_eq!((g.t_min, g.t_max, g.quadrature_t_min, g.quadrature_t_max), (1e-4, 1e4, 1e-4, 1e4));
    // 20 per decade over eight decades, both ends included
    assert_eq!(g.scan_points, 161);
    assert_eq!(b[2].provenance.tolerances.oracle_relative, Some(1e-4));

    let e = tmp();
    let b = run(&config, e.path(), &Overrides::default(), Some(1)).unwrap();
    assert_eq!(b[0].provenance.seed, 11);
    assert_eq!(b[1].provenance.budget, 200);
}

#[test]
fn plot_series_match_traces() {
    let d = tmp();
    let config = Config::parse(MIXED).unwrap();
    let b = run(&config, d.path(), &Overrides::default(), Some(1)).unwrap();
    let verdict = b[0].records.verdict.as_ref().unwrap();
    assert_eq!(verdict.ratio.family_trace.len(), 1);
    let trace = &verdict.ratio.family_trace[0];
    let series = rows(&read(d.path().join(format!("plots/sweep__trace_{}.csv", trace.family))));
    assert_eq!(series.len(), trace.points.len());
    assert_eq!(series.len(), 30);
    for (row, [x, _]) in series.iter().zip(&trace.points) {
        assert_eq!(row[0].parse::<f64>().unwrap(), *x);
    }
    let plots: Vec<_> = std::fs::read_dir(d.path().join("plots")).unwrap().map(|e| e.unwrap().file_name()).collect();
    // duality and oracle scenarios carry neither scans nor traces
    assert!(plots.iter().all(|n| n.to_string_lossy().starts_with("sweep__")), "{plots:?}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let d = tmp();
    let config = format!("{MIXED}{RIESZ_LINE}{TRACE_ENDPOINT}");
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    assert_eq!(cli(&config, &a, &["--jobs", "1"]).status.code(), Some(0));
    assert_eq!(cli(&config, &b, &["--jobs", "3"]).status.code(), Some(0));
    let mut files = vec![PathBuf::from("conditions.csv"), PathBuf::from("summary.csv")];
    for e in std::fs::read_dir(a.join("plots")).unwrap() {
        files.push(Path::new("plots").join(e.unwrap().file_name()));
    }
    for e in std::fs::read_dir(&a).unwrap() {
        let n = PathBuf::from(e.unwrap().file_name());
        if n.extension().is_some_and(|x| x == "json") {
            files.push(n);
        }
    }
    assert!(files.len() > 8);
    for f in files {
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{}", f.display());
    }
}
