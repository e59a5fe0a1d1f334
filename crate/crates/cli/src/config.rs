//! Experiment configuration and its validation.

use std::path::{Path, PathBuf};

use glq_core::analysis::{NormSource, TestField};
use glq_core::gl::{ClassSpec, Domain, SigmaSpec, SolverConfig};
use glq_core::manifold::{ManifoldSpec, PotentialSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub lower: Vec<f64>,
    pub extent: Vec<f64>,
    pub counts: Vec<usize>,
}

impl DomainConfig {
    pub fn build(&self) -> Result<Domain, CliError> {
        Ok(Domain::new(self.lower.clone(), self.extent.clone(), self.counts.clone())?)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.extent).map(|(l, e)| l + 0.5 * e).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcConfig {
    pub sigma: SigmaSpec,
    pub class: ClassSpec,
}

/// Declared constants of the energy bounds `E ≤ M(|log ε|+1)` and
/// `E(g, ∂Ω) ≤ M₀(|log ε|+1)`, checked after each solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredBounds {
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub m0: Option<f64>,
}

fn default_slope_tolerance() -> f64 {
    0.1
}
fn default_one() -> f64 {
    1.0
}
fn default_identity_tolerance() -> f64 {
    0.05
}
fn default_eta() -> f64 {
    0.3
}
fn default_probe_radius() -> f64 {
    0.3
}
fn default_quantization_tolerance() -> f64 {
    0.25
}
fn default_perturbation_count() -> usize {
    8
}
fn default_amplitude() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogFitToggle {
    #[serde(default = "default_slope_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicityToggle {
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    pub radii: Vec<f64>,
    /// Allowed violation is `slack_constant · h / r_min`.
    #[serde(default = "default_one")]
    pub slack_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PohozaevToggle {
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    pub radius: f64,
    /// On the residual relative to the ball energy.
    #[serde(default = "default_identity_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarityToggle {
    pub tests: Vec<TestField>,
    /// On `|∫A:∇φ| / ∫|A:∇φ|`.
    #[serde(default = "default_identity_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureToggle {
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularSetToggle {
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Probe radius; defaults to `8h`.
    #[serde(default)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizationToggle {
    pub probes: Vec<Vec<f64>>,
    #[serde(default = "default_probe_radius")]
    pub radius: f64,
    #[serde(default = "default_quantization_tolerance")]
    pub tolerance: f64,
    /// Defaults to the closed form on the circle and the relaxed loop table otherwise.
    #[serde(default)]
    pub source: Option<NormSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundToggle {
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompetitorToggle {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationToggle {
    #[serde(default = "default_perturbation_count")]
    pub count: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

/// Each present entry switches a diagnostic on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisToggles {
    #[serde(default)]
    pub log_fit: Option<LogFitToggle>,
    #[serde(default)]
    pub competitor: Option<CompetitorToggle>,
    #[serde(default)]
    pub lower_bound: Option<LowerBoundToggle>,
    #[serde(default)]
    pub perturbation: Option<PerturbationToggle>,
    #[serde(default)]
    pub monotonicity: Option<MonotonicityToggle>,
    #[serde(default)]
    pub pohozaev: Option<PohozaevToggle>,
    #[serde(default)]
    pub stationarity: Option<StationarityToggle>,
    #[serde(default)]
    pub measure: Option<MeasureToggle>,
    #[serde(default)]
    pub singular_set: Option<SingularSetToggle>,
    #[serde(default)]
    pub quantization: Option<QuantizationToggle>,
}

impl AnalysisToggles {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub manifold: ManifoldSpec,
    pub potential: PotentialSpec,
    pub dim: usize,
    pub domain: DomainConfig,
    /// Strictly decreasing.
    pub eps_schedule: Vec<f64>,
    pub bc: BcConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub analysis: AnalysisToggles,
    #[serde(default)]
    pub bounds: Option<DeclaredBounds>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config schema: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn eps_min(&self) -> f64 {
        self.eps_schedule.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Schema-level checks that precede any computation. Returns warnings.
    pub fn validate(&self) -> Result<Vec<String>, CliError> {
        let mut warnings = Vec::new();
        let d = &self.domain;
        if !(self.dim == 2 || self.dim == 3) {
            return Err(CliError::Config(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        if d.lower.len() != self.dim || d.extent.len() != self.dim || d.counts.len() != self.dim {
            return Err(CliError::Config(format!("domain lower/extent/counts must have {} entries", self.dim)));
        }
        let domain = d.build()?;
        if self.eps_schedule.is_empty() {
            return Err(CliError::Config("eps_schedule is empty".into()));
        }
        if self.eps_schedule.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(CliError::Config("every ε must lie in (0, 1)".into()));
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::Config("eps_schedule must be strictly decreasing".into()));
        }
        let eps_min = self.eps_min();
        if domain.h > eps_min {
            return Err(CliError::Config(format!(
                "resolution: h = {} exceeds the smallest ε = {eps_min}",
                domain.h
            )));
        }
        if domain.h > 0.5 * eps_min {
            warnings.push(format!("resolution: h = {} exceeds ε_min/2 = {}", domain.h, 0.5 * eps_min));
        }
        self.solver.validate()?;
        if let Some(b) = self.bounds {
            if b.m.is_some_and(|v| !(v > 0.0)) || b.m0.is_some_and(|v| !(v > 0.0)) {
                return Err(CliError::Config("declared bounds must be positive".into()));
            }
        }
        self.validate_analysis(&domain)?;
        Ok(warnings)
    }

    fn point(&self, p: &Option<Vec<f64>>) -> Vec<f64> {
        p.clone().unwrap_or_else(|| self.domain.center())
    }

    fn check_ball(&self, domain: &Domain, x: &[f64], r: f64, what: &str) -> Result<(), CliError> {
        if x.len() != self.dim {
            return Err(CliError::Config(format!("{what}: center must have {} coordinates", self.dim)));
        }
        let dist = domain.distance_to_boundary(x);
        if !(r > 0.0) || r > dist {
            return Err(CliError::Geometry(format!("{what}: radius {r} does not fit (distance to boundary {dist})")));
        }
        Ok(())
    }

    fn validate_analysis(&self, domain: &Domain) -> Result<(), CliError> {
        let a = &self.analysis;
        let increasing = |r: &[f64], what: &str| {
            if r.is_empty() || r.windows(2).any(|w| w[1] <= w[0]) {
                Err(CliError::Config(format!("{what}: radii must be nonempty and strictly increasing")))
            } else {
                Ok(())
            }
        };
        if let Some(t) = &a.monotonicity {
            increasing(&t.radii, "monotonicity")?;
            self.check_ball(domain, &self.point(&t.center), *t.radii.last().unwrap(), "monotonicity")?;
        }
        if let Some(t) = &a.measure {
            increasing(&t.radii, "measure")?;
            self.check_ball(domain, &self.point(&t.center), *t.radii.last().unwrap(), "measure")?;
        }
        if let Some(t) = &a.pohozaev {
            self.check_ball(domain, &self.point(&t.center), t.radius, "pohozaev")?;
        }
        if let Some(t) = &a.stationarity {
            for test in &t.tests {
                test.validate(domain)?;
            }
        }
        if let Some(t) = &a.quantization {
            if t.probes.is_empty() {
                return Err(CliError::Config("quantization: no probes".into()));
            }
            for p in &t.probes {
                self.check_ball(domain, p, t.radius, "quantization")?;
            }
        }
        if let Some(t) = &a.lower_bound {
            if self.dim != 2 {
                return Err(CliError::Config("lower_bound is a 2D diagnostic".into()));
            }
            self.check_ball(domain, &self.point(&t.center), t.radius, "lower_bound")?;
        }
        if a.competitor.is_some() && (self.dim != 2 || !matches!(self.bc.class, ClassSpec::Degree { .. })) {
            return Err(CliError::Config("competitor needs a 2D degree-class run".into()));
        }
        if let Some(t) = &a.singular_set {
            if !(t.eta > 0.0) {
                return Err(CliError::Config("singular_set: η must be positive".into()));
            }
        }
        if a.log_fit.is_some() && self.eps_schedule.len() < 2 {
            return Err(CliError::Config("log_fit needs at least two ε values".into()));
        }
        Ok(())
    }
}
