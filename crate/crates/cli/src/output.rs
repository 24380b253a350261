//! Output layout:
//!
//! ```text
//! <out>/<scenario>.json        one bundle per scenario
//! <out>/summary.csv            one row per scenario
//! <out>/conditions.csv         one row per evaluated functional
//! <out>/plots/<scenario>__scan_<id>.csv     (t, value)
//! <out>/plots/<scenario>__trace_<family>.csv (parameter, ratio)
//! ```
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::io::Write;
use std::path::Path;

use rieszcone::conditions::ConditionReport;

use crate::bundle::{ReportBundle, Status};
use crate::config::Task;
use crate::RunError;

fn io(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Io(format!("{}: {e}", path.display()))
}

/// Writes `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io(path, e))?;
    tmp.persist(path).map_err(|e| io(path, e.error))?;
    Ok(())
}

/// Shortest round-trip form; keeps a trailing `.0` and spells `inf`/`NaN`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn file_part(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '-' }).collect()
}

fn task_name(t: Task) -> &'static str {
    match t {
        Task::Conditions => "conditions",
        Task::Duality => "duality",
        Task::Sweep => "sweep",
        Task::Oracle => "oracle",
    }
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| RunError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| RunError::Io(format!("csv: {e}")))
}

fn series(header: [&str; 2], points: &[[f64; 2]]) -> Result<Vec<u8>, RunError> {
    csv_bytes(&header, points.iter().map(|[x, y]| vec![num(*x), num(*y)]).collect())
}

fn condition_rows(b: &ReportBundle) -> impl Iterator<Item = &ConditionReport<f64>> {
    let sweep = b.records.verdict.iter().flat_map(|v| v.conditions.iter());
    b.records.conditions.iter().chain(sweep)
}

fn summary_row(b: &ReportBundle) -> Vec<String> {
    let (status, detail) = match &b.status {
        Status::Ok => ("ok", String::new()),
        Status::Skipped { reason } => ("skipped", reason.clone()),
        Status::Failed { message } => ("failed", message.clone()),
    };
    let r = &b.records;
    let verdict = match &r.verdict {
        Some(v) if v.indeterminate => "indeterminate",
        Some(v) if v.consistent => "consistent",
        Some(_) => "inconsistent",
        None => match &r.oracle {
            Some(o) if o.agrees => "agrees",
            Some(_) => "disagrees",
            None => "",
        },
    };
    let ratio_bounded = r.verdict.as_ref().and_then(|v| v.ratio_bounded).map(|x| x.to_string()).unwrap_or_default();
    let best = r.verdict.as_ref().map(|v| v.ratio.best_ratio).or(r.duality.as_ref().map(|d| d.lhs.lhs_lower_bound));
    let rhs = r.duality.as_ref().and_then(|d| d.rhs.as_ref()).map(|x| x.mass_term + x.level_term);
    let deviation = r.oracle.as_ref().map(|o| o.max_relative_deviation);
    vec![
        b.scenario.name.clone(),
        task_name(b.scenario.task).into(),
        status.into(),
        verdict.into(),
        ratio_bounded,
        opt(best),
        opt(rhs),
        opt(deviation),
        detail,
    ]
}

/// Writes the full output tree for a run.
pub fn write_all(out: &Path, bundles: &[ReportBundle]) -> Result<(), RunError> {
    let plots = out.join("plots");
    std::fs::create_dir_all(&plots).map_err(|e| io(&plots, e))?;
    let mut conditions = Vec::new();
    for b in bundles {
        let name = &b.scenario.name;
        let json = serde_json::to_vec_pretty(b).map_err(|e| RunError::Io(format!("{name}: {e}")))?;
        write_atomic(&out.join(format!("{name}.json")), &json)?;
        for c in condition_rows(b) {
            conditions.push(vec![name.clone(), c.id.clone(), num(c.value), c.argmax.to_string(), c.finite.as_str().into()]);
            if !c.scan.is_empty() {
                let path = plots.join(format!("{name}__scan_{}.csv", file_part(&c.id)));
                write_atomic(&path, &series(["t", "value"], &c.scan)?)?;
            }
        }
        for tr in b.records.verdict.iter().flat_map(|v| v.ratio.family_trace.iter()) {
            let path = plots.join(format!("{name}__trace_{}.csv", file_part(&tr.family)));
            write_atomic(&path, &series(["parameter", "ratio"], &tr.points)?)?;
        }
    }
    let header = ["scenario", "condition", "value", "argmax", "verdict"];
    write_atomic(&out.join("conditions.csv"), &csv_bytes(&header, conditions)?)?;
    let header =
        ["scenario", "task", "status", "verdict", "ratio_bounded", "best_ratio", "rhs", "max_relative_deviation", "detail"];
    write_atomic(&out.join("summary.csv"), &csv_bytes(&header, bundles.iter().map(summary_row).collect())?)?;
    Ok(())
}
