//! The `homotopy` and `geodesic` subcommands.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use glq_core::gl::ClassSpec;
use glq_core::homotopy::{
    norm_star, verify_sum_properties, ClassTable, EminTable, FiniteGroup, GroupFile, NormTable, SumPropertyReport,
};
use glq_core::loops::{detect_class, emin_table, loop_energy, max_step, relax_geodesic, LoopClass, LoopSamples};
use glq_core::manifold::{random_unit, EmbeddedManifold, ManifoldId, ManifoldSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{to_json, write_file, CliError};

pub const HOMOTOPY_FILE: &str = "homotopy.json";
pub const GEODESIC_FILE: &str = "geodesic.json";

/// A built-in group by name (`Z<k>`, `D<n>`, `Q8`, ...) or an explicit table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSource {
    Builtin(String),
    Table(GroupFile),
}

impl GroupSource {
    pub fn build(&self) -> Result<FiniteGroup, CliError> {
        Ok(match self {
            Self::Builtin(name) => FiniteGroup::builtin(name)?,
            Self::Table(file) => FiniteGroup::from_file(file.clone())?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopyConfig {
    pub group: GroupSource,
    /// Least loop energy per class; takes precedence over `manifold`.
    #[serde(default)]
    pub emin: Option<EminTable>,
    /// Relax loops in this manifold to obtain the energies.
    #[serde(default)]
    pub manifold: Option<ManifoldSpec>,
    #[serde(default = "default_loop_samples")]
    pub loop_samples: usize,
    #[serde(default = "default_relax_steps")]
    pub relax_steps: usize,
}

fn default_loop_samples() -> usize {
    128
}

fn default_relax_steps() -> usize {
    20_000
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRow {
    pub class_id: usize,
    pub label: String,
    pub members: Vec<String>,
    pub negation: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomotopyOutput {
    pub group: GroupFile,
    pub classes: Vec<ClassRow>,
    /// `sums[a][b]` lists the class ids of `a + b`.
    pub sums: Vec<Vec<Vec<usize>>>,
    pub sum_properties: SumPropertyReport,
    pub emin: Option<EminTable>,
    pub norms: Option<NormTable>,
}

impl HomotopyOutput {
    pub fn passed(&self) -> bool {
        self.sum_properties.holds()
    }
}

pub fn run_homotopy(cfg: &HomotopyConfig, out: &Path) -> Result<HomotopyOutput, CliError> {
    let group = cfg.group.build()?;
    let sum_properties = verify_sum_properties(&group);
    if !sum_properties.holds() {
        // the class table needs an associative group; report what was found
        let output = HomotopyOutput {
            group: group.to_file(),
            classes: Vec::new(),
            sums: Vec::new(),
            sum_properties,
            emin: None,
            norms: None,
        };
        write_file(&out.join(HOMOTOPY_FILE), to_json(&output)?.as_bytes())?;
        return Ok(output);
    }
    let table = ClassTable::new(group.clone())?;
    let emin = match (&cfg.emin, &cfg.manifold) {
        (Some(e), _) => Some(e.clone()),
        (None, Some(spec)) => {
            let manifold = EmbeddedManifold::from_spec(spec)?;
            let (e, g) = emin_table(manifold, cfg.loop_samples, cfg.relax_steps)?;
            if g.table() != group.table() {
                return Err(CliError::Config(format!(
                    "the fundamental group of {} is {}, not {}",
                    manifold.id().as_str(),
                    g.name(),
                    group.name()
                )));
            }
            Some(EminTable::new(group.name(), e.values))
        }
        (None, None) => None,
    };
    let norms = emin.as_ref().map(|e| norm_star(e, &table)).transpose()?;
    let k = table.len();
    let classes = (0..k)
        .map(|id| ClassRow {
            class_id: id,
            label: table.class_label(id),
            members: table.class(id).members.iter().map(|&g| group.label(g).to_string()).collect(),
            negation: table.negation(id),
        })
        .collect();
    let sums = (0..k).map(|a| (0..k).map(|b| table.sum_ids(a, b).iter().copied().collect()).collect()).collect();
    let output = HomotopyOutput { group: group.to_file(), classes, sums, sum_properties, emin, norms };
    write_file(&out.join(HOMOTOPY_FILE), to_json(&output)?.as_bytes())?;
    Ok(output)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    pub manifold: ManifoldSpec,
    /// Starting class; ignored for the sphere.
    #[serde(default)]
    pub class: Option<ClassSpec>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_relax_steps")]
    pub steps: usize,
    /// Heat step as a fraction of the stability limit.
    #[serde(default = "default_step_fraction")]
    pub step_fraction: f64,
    /// Ambient amplitude of the random displacement of the starting loop.
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    256
}

fn default_step_fraction() -> f64 {
    0.8
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicOutput {
    pub manifold: ManifoldSpec,
    pub samples: usize,
    pub step: f64,
    pub initial_energy: f64,
    pub energy: f64,
    pub steps_taken: usize,
    pub converged: bool,
    pub max_increase: f64,
    pub initial_class: LoopClass,
    pub final_class: LoopClass,
    pub class_conserved: bool,
}

impl GeodesicOutput {
    pub fn passed(&self) -> bool {
        self.converged && self.class_conserved
    }
}

fn starting_loop(cfg: &GeodesicConfig, manifold: EmbeddedManifold) -> Result<LoopSamples, CliError> {
    let k = cfg.samples;
    let ell = match (manifold.id(), cfg.class) {
        (ManifoldId::Circle, Some(ClassSpec::Degree { d })) => LoopSamples::circle_degree(d, k)?,
        (ManifoldId::Circle, None) => LoopSamples::circle_degree(0, k)?,
        (ManifoldId::ProjectivePlane, Some(ClassSpec::Projective { nontrivial: true })) => {
            LoopSamples::projective_half_turn(manifold, k)?
        }
        (ManifoldId::ProjectivePlane, _) => LoopSamples::from_fn(manifold, k, |t| {
            let n = [0.6 * t.cos(), 0.6 * t.sin(), 0.8];
            manifold.from_director(&n)
        })?,
        // a circle of latitude, contractible towards the pole
        (ManifoldId::Sphere, _) => LoopSamples::from_fn(manifold, k, |t| vec![0.6 * t.cos(), 0.6 * t.sin(), 0.8])?,
        (id, Some(c)) => return Err(CliError::Config(format!("class {c:?} does not apply to {}", id.as_str()))),
    };
    if cfg.noise == 0.0 {
        return Ok(ell);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dim = manifold.ambient_dim();
    let pts = ell
        .points()
        .map(|p| {
            let u = random_unit(&mut rng, dim);
            let moved: Vec<f64> = p.iter().zip(&u).map(|(a, b)| a + cfg.noise * b).collect();
            manifold.project(&moved)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LoopSamples::new(manifold, pts)?)
}

pub fn run_geodesic(cfg: &GeodesicConfig, out: &Path) -> Result<GeodesicOutput, CliError> {
    if !(cfg.step_fraction > 0.0 && cfg.step_fraction <= 1.0) {
        return Err(CliError::Config("step_fraction must lie in (0, 1]".into()));
    }
    let manifold = EmbeddedManifold::from_spec(&cfg.manifold)?;
    let start = starting_loop(cfg, manifold)?;
    let step = cfg.step_fraction * max_step(cfg.samples);
    let relax = relax_geodesic(&start, cfg.steps, step)?;
    let initial_class = detect_class(&start)?;
    let final_class = detect_class(&relax.relaxed)?;
    fs::create_dir_all(out)?;
    start.write_csv(BufWriter::new(fs::File::create(out.join("loop_initial.csv"))?))?;
    relax.relaxed.write_csv(BufWriter::new(fs::File::create(out.join("loop_relaxed.csv"))?))?;
    let mut trace = String::from("step,energy\n");
    for (i, e) in relax.energy_trace.iter().enumerate() {
        trace.push_str(&format!("{i},{e}\n"));
    }
    write_file(&out.join("energy_trace.csv"), trace.as_bytes())?;
    let output = GeodesicOutput {
        manifold: manifold.spec(),
        samples: cfg.samples,
        step,
        initial_energy: loop_energy(&start),
        energy: relax.energy,
        steps_taken: relax.steps_taken,
        converged: relax.converged,
        max_increase: relax.max_increase,
        initial_class,
        final_class,
        class_conserved: initial_class == final_class,
    };
    write_file(&out.join(GEODESIC_FILE), to_json(&output)?.as_bytes())?;
    Ok(output)
}
