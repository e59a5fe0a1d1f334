//! Solving an ε-schedule into a bundle and analyzing a bundle.
//!
//! Bundle layout under the output directory:
//!
//! ```text
//! config.json  bundle.json  analysis.json  report.json  summary.txt
//! fields/run<i>.{json,bin}  traces/run<i>.csv
//! profiles/*.csv  singular/*.csv
//! ```

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use glq_core::analysis::{
    clearing_out_constant, density_at, density_profile, extract_singular_set, fit_log_law, lower_bound_quantity,
    monotonicity_profile, pohozaev_residual, quantization_report, stationarity_residual, write_profile_csv,
    AnalysisError, DiagnosticRecord, EnergyMeasure, FieldAnalysis, NormSource,
};
use glq_core::gl::io::{read_field, write_field};
use glq_core::gl::{
    boundary_vortex_data, degree_ansatz_2d, energy, initial_guess, minimize, perturbation_test, BcBounds, ClassSpec,
    GridField, SigmaSpec, StopReason,
};
use glq_core::homotopy::{circle_norm, norm_star, ClassTable, NormTable};
use glq_core::loops::emin_table;
use glq_core::manifold::{EmbeddedManifold, ManifoldId, Potential, PotentialField};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::report::{emit_report, Report};
use crate::{to_json, write_file, CliError};

pub const CONFIG_FILE: &str = "config.json";
pub const BUNDLE_FILE: &str = "bundle.json";
pub const ANALYSIS_FILE: &str = "analysis.json";

/// Samples and relaxation steps for the projective-plane norm table.
const NORM_LOOP_SAMPLES: usize = 128;
const NORM_LOOP_STEPS: usize = 20_000;
/// Perturbations may lower the energy by at most this fraction of it (rounding).
const PERTURBATION_SLACK: f64 = 1e-12;
/// Lower-bound trend: fitted slope against `log(1/ε)` at least `−this·π`.
const LOWER_BOUND_SLOPE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub eps: f64,
    /// Paths relative to the bundle directory.
    pub field: String,
    pub trace: String,
    pub energy: f64,
    pub dirichlet: f64,
    pub potential: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub stop: StopReason,
    pub grad_sup: f64,
    pub boundary_energy: f64,
    pub bc_bounds: BcBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub config: ExperimentConfig,
    pub embedding_scale: f64,
    /// `|σ|_*` of the class around each singular point or line.
    pub class_norm: f64,
    /// Number of singular points (2D) or length of the singular line (3D).
    pub singular_measure: f64,
    /// Expected slope of `E_ε` against `log(1/ε)`.
    pub slope_target: f64,
    pub runs: Vec<RunRecord>,
}

impl Bundle {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(BUNDLE_FILE);
        let text = fs::read_to_string(&path).map_err(|_| CliError::Missing(vec![path.display().to_string()]))?;
        serde_json::from_str(&text).map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))
    }

    pub fn field(&self, dir: &Path, run: &RunRecord) -> Result<GridField, CliError> {
        Ok(read_field(&dir.join(&run.field))?)
    }

    /// Every file the bundle refers to.
    pub fn expected_files(&self) -> Vec<PathBuf> {
        let mut v = vec![PathBuf::from(CONFIG_FILE), PathBuf::from(BUNDLE_FILE)];
        for r in &self.runs {
            v.push(PathBuf::from(&r.field));
            v.push(PathBuf::from(&r.field).with_extension("bin"));
            v.push(PathBuf::from(&r.trace));
        }
        if !self.config.analysis.is_empty() {
            v.push(PathBuf::from(ANALYSIS_FILE));
        }
        v
    }
}

/// The analysis file: records in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub records: Vec<DiagnosticRecord>,
}

pub fn potential_of(cfg: &ExperimentConfig) -> Result<Potential, CliError> {
    let manifold = EmbeddedManifold::from_spec(&cfg.manifold)?;
    Ok(Potential::from_spec(&cfg.potential, manifold)?)
}

/// Norms of a finite fundamental group from relaxed loops.
pub fn loop_norm_table(manifold: EmbeddedManifold) -> Result<NormTable, CliError> {
    let (emin, group) = emin_table(manifold, NORM_LOOP_SAMPLES, NORM_LOOP_STEPS)?;
    let table = ClassTable::new(group)?;
    Ok(norm_star(&emin, &table)?)
}

fn class_norm(cfg: &ExperimentConfig, manifold: EmbeddedManifold) -> Result<f64, CliError> {
    if matches!(cfg.bc.sigma, SigmaSpec::Constant) {
        return Ok(0.0);
    }
    match (manifold.id(), cfg.bc.class) {
        (ManifoldId::Circle, ClassSpec::Degree { d }) => Ok(circle_norm(d)),
        (ManifoldId::ProjectivePlane, ClassSpec::Projective { nontrivial }) => {
            if nontrivial {
                let t = loop_norm_table(manifold)?;
                Ok(t.norms[1])
            } else {
                Ok(0.0)
            }
        }
        (ManifoldId::Sphere, _) => Ok(0.0),
        (id, class) => Err(CliError::Config(format!("class {class:?} does not apply to {}", id.as_str()))),
    }
}

fn singular_measure(cfg: &ExperimentConfig) -> f64 {
    match &cfg.bc.sigma {
        SigmaSpec::Constant => 0.0,
        SigmaSpec::Points { points } => points.len() as f64,
        SigmaSpec::Axis { axis } => cfg.domain.extent.get(*axis).copied().unwrap_or(0.0),
    }
}

/// Solves every ε of the schedule and writes fields, traces and `bundle.json`.
pub fn solve_schedule(cfg: &ExperimentConfig, out: &Path) -> Result<Bundle, CliError> {
    for w in cfg.validate()? {
        warn!("{w}");
    }
    fs::create_dir_all(out)?;
    write_file(&out.join(CONFIG_FILE), to_json(cfg)?.as_bytes())?;
    let potential = potential_of(cfg)?;
    let manifold = *potential.manifold();
    let domain = cfg.domain.build()?;
    let mut solver = cfg.solver;
    solver.seed = cfg.seed;
    let mut runs = Vec::new();
    for (index, &eps) in cfg.eps_schedule.iter().enumerate() {
        let bc = boundary_vortex_data(&domain, &potential, cfg.bc.sigma.clone(), cfg.bc.class, eps)?;
        let start = initial_guess(&bc, eps)?;
        let outcome = minimize(&start, &solver)?;
        info!(
            "ε = {eps}: E = {:.6} after {} iterations ({:?})",
            outcome.energy, outcome.iterations, outcome.stop
        );
        let stem = format!("run{index}");
        write_field(&outcome.field, &out.join("fields"), &stem)?;
        let trace = format!("traces/{stem}.csv");
        fs::create_dir_all(out.join("traces"))?;
        let file = fs::File::create(out.join(&trace))?;
        outcome.write_trace_csv(std::io::BufWriter::new(file))?;
        let e = energy(&outcome.field);
        runs.push(RunRecord {
            index,
            eps,
            field: format!("fields/{stem}.json"),
            trace,
            energy: e.total,
            dirichlet: e.dirichlet,
            potential: e.potential,
            iterations: outcome.iterations,
            evaluations: outcome.evaluations,
            stop: outcome.stop,
            grad_sup: outcome.grad_sup,
            boundary_energy: bc.boundary_energy(),
            bc_bounds: bc.bounds,
        });
    }
    let class_norm = class_norm(cfg, manifold)?;
    let measure = singular_measure(cfg);
    let bundle = Bundle {
        config: cfg.clone(),
        embedding_scale: manifold.scale(),
        class_norm,
        singular_measure: measure,
        slope_target: class_norm * measure,
        runs,
    };
    write_file(&out.join(BUNDLE_FILE), to_json(&bundle)?.as_bytes())?;
    Ok(bundle)
}

/// Solve, analyze (when any diagnostic is switched on) and report.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<Report, CliError> {
    solve_schedule(cfg, out)?;
    if !cfg.analysis.is_empty() {
        analyze_bundle(out)?;
    }
    emit_report(out)
}

fn center_or(cfg: &ExperimentConfig, p: &Option<Vec<f64>>) -> Vec<f64> {
    p.clone().unwrap_or_else(|| cfg.domain.center())
}

fn default_norm_source(bundle: &Bundle) -> Result<NormSource, CliError> {
    let cfg = &bundle.config;
    let manifold = EmbeddedManifold::from_spec(&cfg.manifold)?;
    Ok(match manifold.id() {
        ManifoldId::Circle => {
            let d = match cfg.bc.class {
                ClassSpec::Degree { d } => d.unsigned_abs() as u32,
                ClassSpec::Projective { .. } => 0,
            };
            NormSource::CircleClosedForm { max_degree: d + 2 }
        }
        _ => NormSource::Table { table: loop_norm_table(manifold)? },
    })
}

/// Distance from `x` to the singular set of the boundary pattern.
fn distance_to_sigma(cfg: &ExperimentConfig, x: &[f64]) -> Option<f64> {
    let c = cfg.domain.center();
    match &cfg.bc.sigma {
        SigmaSpec::Constant => None,
        SigmaSpec::Axis { axis } => {
            Some((0..cfg.dim).filter(|a| a != axis).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>().sqrt())
        }
        SigmaSpec::Points { points } => points
            .iter()
            .map(|p| p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            .reduce(f64::min),
    }
}

struct RunDiagnostics {
    records: Vec<DiagnosticRecord>,
    densities: Vec<f64>,
    lower_bound: Option<f64>,
    ansatz_offset: Option<f64>,
}

fn analyze_run(
    bundle: &Bundle,
    run: &RunRecord,
    field: &GridField,
    out: &Path,
    source: Option<&NormSource>,
) -> Result<RunDiagnostics, CliError> {
    let cfg = &bundle.config;
    let t = &cfg.analysis;
    let tag = format!("run{}", run.index);
    let a = FieldAnalysis::new(field);
    let h = a.h();
    let mut records = Vec::new();
    let mut densities = Vec::new();
    let mut lower_bound = None;
    let mut ansatz_offset = None;
    let base = |name: &str| {
        DiagnosticRecord::new(format!("{name}/{tag}")).input("eps", run.eps).input("h", h)
    };

    if t.competitor.is_some() {
        if let ClassSpec::Degree { d } = cfg.bc.class {
            let ansatz = degree_ansatz_2d(d, run.eps, &field.domain, &field.potential)?;
            let ea = energy(&ansatz).total;
            let offset = ea - PI * (d * d) as f64 * (1.0 / run.eps).ln();
            ansatz_offset = Some(offset);
            records.push(
                base("competitor")
                    .input("degree", d)
                    .value("minimized_energy", run.energy)
                    .value("ansatz_energy", ea)
                    .value("ansatz_minus_log_law", offset)
                    .verdict("minimized_below_ansatz", run.energy <= ea)
                    .hard(),
            );
        }
    }
    if let Some(lb) = &t.lower_bound {
        let x = center_or(cfg, &lb.center);
        let s = lower_bound_quantity(&a, &x, lb.radius, bundle.class_norm)?;
        lower_bound = Some(s.quantity);
        records.push(
            base("lower-bound")
                .input("center", &x)
                .input("radius", lb.radius)
                .input("target_norm", bundle.class_norm)
                .value("ball_energy", s.ball_energy)
                .value("circle_energy", s.circle_energy)
                .value("quantity", s.quantity),
        );
    }
    if let Some(p) = &t.perturbation {
        let trials = perturbation_test(field, p.count, p.amplitude, cfg.seed);
        let worst = trials.iter().map(|t| t.delta_energy).fold(f64::INFINITY, f64::min);
        let slack = PERTURBATION_SLACK * run.energy.max(1.0);
        records.push(
            base("perturbation")
                .input("count", p.count)
                .input("amplitude", p.amplitude)
                .input("seed", cfg.seed)
                .value("trials", &trials)
                .value("min_delta_energy", if trials.is_empty() { 0.0 } else { worst })
                .tolerance("delta_energy_floor", -slack)
                .verdict("local_minimum", trials.iter().all(|t| t.delta_energy >= -slack))
                .hard(),
        );
    }
    if let Some(m) = &t.monotonicity {
        let x = center_or(cfg, &m.center);
        let p = monotonicity_profile(&a, &x, &m.radii)?;
        let tol = m.slack_constant * h / m.radii[0];
        let csv = out.join(format!("profiles/monotonicity_{tag}.csv"));
        fs::create_dir_all(csv.parent().unwrap())?;
        write_profile_csv(fs::File::create(&csv)?, &p.radii, &p.values)?;
        let mut r = base("monotonicity")
            .input("center", &x)
            .input("radii", &p.radii)
            .value("profile", &p.values)
            .value("worst_violation", p.worst_violation)
            .value("advisory", p.advisory)
            .value("residual_sup", a.residual_sup)
            .tolerance("worst_violation", tol)
            .verdict("nondecreasing_within_slack", p.worst_violation <= tol);
        if !p.advisory {
            r = r.hard();
        }
        records.push(r);
    }
    if let Some(pz) = &t.pohozaev {
        let x = center_or(cfg, &pz.center);
        let p = pohozaev_residual(&a, &x, pz.radius)?;
        let mut r = base("pohozaev")
            .input("center", &x)
            .input("radius", pz.radius)
            .value("lhs", p.lhs)
            .value("rhs", p.rhs)
            .value("absolute", p.absolute)
            .value("relative", p.relative)
            .value("ball_energy", p.ball_energy)
            .value("advisory", p.advisory)
            .tolerance("relative", pz.tolerance)
            .verdict("identity_holds", p.relative <= pz.tolerance);
        if !p.advisory {
            r = r.hard();
        }
        records.push(r);
    }
    if let Some(st) = &t.stationarity {
        let res = stationarity_residual(&a, &st.tests)?;
        let worst = res.iter().map(|s| s.relative).fold(0.0, f64::max);
        let mut r = base("stationarity")
            .input("tests", &st.tests)
            .value("values", res.iter().map(|s| s.value).collect::<Vec<_>>())
            .value("scales", res.iter().map(|s| s.scale).collect::<Vec<_>>())
            .value("relative", res.iter().map(|s| s.relative).collect::<Vec<_>>())
            .value("worst_relative", worst)
            .value("advisory", !a.critical)
            .tolerance("relative", st.tolerance)
            .verdict("identity_holds", worst <= st.tolerance);
        if a.critical {
            r = r.hard();
        }
        records.push(r);
    }
    let measure = EnergyMeasure::from_analysis(&a)?;
    if let Some(mt) = &t.measure {
        let x = center_or(cfg, &mt.center);
        let p = density_profile(&measure, &x, &mt.radii)?;
        let csv = out.join(format!("profiles/density_{tag}.csv"));
        fs::create_dir_all(csv.parent().unwrap())?;
        write_profile_csv(fs::File::create(&csv)?, &p.radii, &p.values)?;
        records.push(
            base("measure")
                .input("center", &x)
                .input("radii", &p.radii)
                .value("total_mass", measure.total())
                .value("density_profile", &p.values)
                .value("worst_decrease", p.worst_decrease)
                .verdict("density_nondecreasing_trend", p.nondecreasing),
        );
    }
    if let Some(sg) = &t.singular_set {
        let r = sg.radius.unwrap_or(8.0 * h);
        let mut rec = base("singular-set").input("eta", sg.eta).input("radius", r);
        match extract_singular_set(&a, sg.eta, r) {
            Ok(s) => {
                let csv = out.join(format!("singular/cloud_{tag}.csv"));
                fs::create_dir_all(csv.parent().unwrap())?;
                s.write_cloud_csv(fs::File::create(&csv)?)?;
                let spread = s
                    .points
                    .iter()
                    .filter_map(|p| distance_to_sigma(cfg, &p[..cfg.dim]))
                    .fold(0.0, f64::max);
                let co = clearing_out_constant(&a, sg.eta, r)?;
                rec = rec
                    .value("flagged", s.points.len())
                    .value("probed", s.probed)
                    .value("clusters", s.cluster_count)
                    .value("threshold", s.threshold)
                    .value("max_distance_to_sigma", spread)
                    .value("segments", &s.segments)
                    .value("clearing_out_constant", co.constant)
                    .verdict("precondition", true);
            }
            Err(AnalysisError::Precondition(msg)) => {
                rec = rec.value("error", msg).verdict("precondition", false);
            }
            Err(e) => return Err(e.into()),
        }
        records.push(rec);
    }
    if let (Some(q), Some(source)) = (&t.quantization, source) {
        for p in &q.probes {
            densities.push(density_at(&measure, p, q.radius)?);
        }
        let rep = quantization_report(&densities, source, q.tolerance)?;
        records.push(
            base("quantization")
                .input("probes", &q.probes)
                .input("radius", q.radius)
                .input("embedding_scale", bundle.embedding_scale)
                .value("densities", &densities)
                .value("records", &rep)
                .tolerance("relative_gap", q.tolerance)
                .verdict("within_tolerance", rep.iter().all(|r| r.pass)),
        );
    }
    Ok(RunDiagnostics { records, densities, lower_bound, ansatz_offset })
}

/// Runs every switched-on diagnostic from the bundle on disk and writes `analysis.json`.
pub fn analyze_bundle(out: &Path) -> Result<AnalysisReport, CliError> {
    let bundle = Bundle::load(out)?;
    let cfg = &bundle.config;
    let t = &cfg.analysis;
    let source = match &t.quantization {
        Some(q) => Some(match &q.source {
            Some(s) => s.clone(),
            None => default_norm_source(&bundle)?,
        }),
        None => None,
    };
    let mut records = Vec::new();
    let mut per_run = Vec::new();
    for run in &bundle.runs {
        let field = bundle.field(out, run)?;
        let d = analyze_run(&bundle, run, &field, out, source.as_ref())?;
        records.extend(d.records.iter().cloned());
        per_run.push(d);
    }
    let eps: Vec<f64> = bundle.runs.iter().map(|r| r.eps).collect();
    if let Some(lf) = &t.log_fit {
        let energies: Vec<f64> = bundle.runs.iter().map(|r| r.energy).collect();
        let fit = fit_log_law(&eps, &energies)?;
        let rel = if bundle.slope_target > 0.0 {
            (fit.slope - bundle.slope_target).abs() / bundle.slope_target
        } else {
            fit.slope.abs()
        };
        records.push(
            DiagnosticRecord::new("log-fit")
                .input("eps", &eps)
                .input("energies", &energies)
                .value("slope", fit.slope)
                .value("intercept", fit.intercept)
                .value("residuals", &fit.residuals)
                .value("slope_target", bundle.slope_target)
                .value("relative_slope_error", rel)
                .tolerance("relative_slope_error", lf.tolerance)
                .verdict("slope_matches_norm", rel <= lf.tolerance),
        );
    }
    let offsets: Vec<f64> = per_run.iter().filter_map(|d| d.ansatz_offset).collect();
    if offsets.len() >= 2 {
        let (lo, hi) = offsets.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
        let drift = (hi - lo) / mean.abs();
        records.push(
            DiagnosticRecord::new("competitor-drift")
                .input("eps", &eps)
                .value("ansatz_minus_log_law", &offsets)
                .value("relative_drift", drift)
                .tolerance("relative_drift", 0.2)
                .verdict("bounded_offset", drift <= 0.2),
        );
    }
    let lbs: Vec<f64> = per_run.iter().filter_map(|d| d.lower_bound).collect();
    if lbs.len() >= 2 {
        let fit = fit_log_law(&eps, &lbs)?;
        let floor = -LOWER_BOUND_SLOPE * PI;
        records.push(
            DiagnosticRecord::new("lower-bound-trend")
                .input("eps", &eps)
                .value("quantities", &lbs)
                .value("slope", fit.slope)
                .value("intercept", fit.intercept)
                .tolerance("slope_floor", floor)
                .verdict("finite_intercept", fit.intercept.is_finite())
                .verdict("no_decreasing_trend", fit.slope >= floor),
        );
    }
    if let (Some(q), Some(src)) = (&t.quantization, &source) {
        if per_run.len() >= 2 {
            let rows: Vec<Vec<f64>> = per_run
                .iter()
                .map(|d| quantization_report(&d.densities, src, q.tolerance).map(|r| r.iter().map(|x| x.relative_gap).collect()))
                .collect::<Result<_, AnalysisError>>()?;
            let improving = rows.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b < a));
            records.push(
                DiagnosticRecord::new("quantization-trend")
                    .input("eps", &eps)
                    .value("relative_gaps", &rows)
                    .verdict("gap_shrinks_with_eps", improving),
            );
        }
    }
    let report = AnalysisReport { records };
    write_file(&out.join(ANALYSIS_FILE), to_json(&report)?.as_bytes())?;
    Ok(report)
}
