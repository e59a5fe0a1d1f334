//! Report emission: `report.json` (machine) and `summary.txt` (human).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use glq_core::analysis::DiagnosticRecord;
use glq_core::gl::io::read_field;
use glq_core::gl::StopReason;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::experiment::{AnalysisReport, Bundle, ANALYSIS_FILE};
use crate::{to_json, write_file, CliError};

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Section order of the summary.
pub const SECTIONS: [&str; 6] = ["solve", "monotonicity", "identities", "measure", "singular-set", "quantization"];

/// A trivial-class run must end with energy at most this.
pub const TRIVIAL_ENERGY: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub embedding_scale: f64,
    pub slope_target: f64,
    pub sections: BTreeMap<String, Vec<DiagnosticRecord>>,
    pub hard_pass: bool,
    /// Names of hard records with a failing verdict.
    pub failed_hard: Vec<String>,
}

impl Report {
    pub fn records(&self) -> impl Iterator<Item = &DiagnosticRecord> {
        self.sections.values().flatten()
    }

    pub fn find(&self, name: &str) -> Option<&DiagnosticRecord> {
        self.records().find(|r| r.name == name)
    }
}

pub fn section_of(name: &str) -> &'static str {
    let head = name.split('/').next().unwrap_or(name);
    match head {
        "monotonicity" => "monotonicity",
        "pohozaev" | "stationarity" => "identities",
        "measure" => "measure",
        "singular-set" => "singular-set",
        "quantization" | "quantization-trend" => "quantization",
        _ => "solve",
    }
}

fn solve_records(bundle: &Bundle) -> Vec<DiagnosticRecord> {
    let bounds = bundle.config.bounds;
    bundle
        .runs
        .iter()
        .map(|run| {
            let log = run.eps.ln().abs() + 1.0;
            let mut r = DiagnosticRecord::new(format!("solve/run{}", run.index))
                .input("eps", run.eps)
                .value("energy", run.energy)
                .value("dirichlet", run.dirichlet)
                .value("potential", run.potential)
                .value("iterations", run.iterations)
                .value("evaluations", run.evaluations)
                .value("stop", run.stop)
                .value("grad_sup", run.grad_sup)
                .value("boundary_energy", run.boundary_energy)
                .value("bc_bounds", run.bc_bounds)
                .verdict("converged", run.stop == StopReason::Converged)
                .hard();
            if let Some(m) = bounds.and_then(|b| b.m) {
                r = r.tolerance("energy_bound", m * log).verdict("energy_within_declared_bound", run.energy <= m * log);
            }
            if let Some(m0) = bounds.and_then(|b| b.m0) {
                r = r
                    .tolerance("boundary_bound", m0 * log)
                    .verdict("boundary_within_declared_bound", run.boundary_energy <= m0 * log);
            }
            if bundle.slope_target == 0.0 {
                r = r.tolerance("zero_energy", TRIVIAL_ENERGY).verdict("zero_energy", run.energy <= TRIVIAL_ENERGY);
            }
            r
        })
        .collect()
}

/// Checks the bundle is complete and every field verifies; lists absent files.
pub fn check_bundle(out: &Path) -> Result<Bundle, CliError> {
    let bundle = Bundle::load(out)?;
    let missing: Vec<String> = bundle
        .expected_files()
        .into_iter()
        .filter(|p| !out.join(p).is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Missing(missing));
    }
    for run in &bundle.runs {
        read_field(&out.join(&run.field))?;
    }
    Ok(bundle)
}

/// Builds the report from a bundle directory and writes both report files.
pub fn emit_report(out: &Path) -> Result<Report, CliError> {
    let bundle = check_bundle(out)?;
    let mut records = solve_records(&bundle);
    let analysis = out.join(ANALYSIS_FILE);
    if analysis.is_file() {
        let text = fs::read_to_string(&analysis)?;
        let a: AnalysisReport =
            serde_json::from_str(&text).map_err(|e| CliError::Corrupt(format!("{}: {e}", analysis.display())))?;
        records.extend(a.records);
    }
    let mut sections: BTreeMap<String, Vec<DiagnosticRecord>> = BTreeMap::new();
    for r in records {
        sections.entry(section_of(&r.name).to_string()).or_default().push(r);
    }
    let failed_hard: Vec<String> =
        sections.values().flatten().filter(|r| r.hard && !r.passed()).map(|r| r.name.clone()).collect();
    let report = Report {
        embedding_scale: bundle.embedding_scale,
        slope_target: bundle.slope_target,
        sections,
        hard_pass: failed_hard.is_empty(),
        failed_hard,
    };
    write_file(&out.join(REPORT_FILE), to_json(&report)?.as_bytes())?;
    write_file(&out.join(SUMMARY_FILE), summary(&report).as_bytes())?;
    Ok(report)
}

fn num(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.4e}"),
            _ => n.to_string(),
        },
        Value::Array(a) if a.len() <= 8 => format!("[{}]", a.iter().map(num).collect::<Vec<_>>().join(", ")),
        Value::Array(a) => format!("[{} entries]", a.len()),
        Value::Bool(b) => b.to_string(),
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        Value::Object(_) => "{…}".into(),
    }
}

/// Values worth a line in the summary; the JSON has everything.
const HEADLINE: [&str; 17] = [
    "energy",
    "iterations",
    "stop",
    "slope",
    "slope_target",
    "intercept",
    "relative_slope_error",
    "ansatz_energy",
    "quantity",
    "worst_violation",
    "relative",
    "worst_relative",
    "total_mass",
    "density_profile",
    "flagged",
    "clusters",
    "densities",
];

/// Human summary with rounded numbers.
pub fn summary(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "embedding scale {:.4}; slope target {:.6}", report.embedding_scale, report.slope_target);
    for sec in SECTIONS {
        let Some(recs) = report.sections.get(sec) else { continue };
        let _ = writeln!(s, "\n[{sec}]");
        for r in recs {
            let status = if r.passed() { "pass" } else if r.hard { "FAIL" } else { "fail (soft)" };
            let _ = writeln!(s, "  {} .. {status}", r.name);
            for k in HEADLINE {
                if let Some(v) = r.values.get(k) {
                    let _ = writeln!(s, "    {k} = {}", num(v));
                }
            }
            if let Some(Value::Array(rows)) = r.values.get("records") {
                for row in rows {
                    let _ = writeln!(
                        s,
                        "    density {} nearest {} gap {}",
                        num(&row["density"]),
                        num(&row["nearest"]["label"]),
                        num(&row["relative_gap"])
                    );
                }
            }
            for (k, v) in &r.verdicts {
                if !v {
                    let _ = writeln!(s, "    failed: {k}");
                }
            }
        }
    }
    let _ = writeln!(s, "\nhard verdicts: {}", if report.hard_pass { "all pass" } else { "FAILED" });
    for n in &report.failed_hard {
        let _ = writeln!(s, "  {n}");
    }
    s
}

/// Reads a previously written report.
pub fn load_report(out: &Path) -> Result<Report, CliError> {
    let path = out.join(REPORT_FILE);
    let text = fs::read_to_string(&path).map_err(|_| CliError::Missing(vec![path.display().to_string()]))?;
    serde_json::from_str(&text).map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))
}
