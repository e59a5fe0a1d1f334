//! Discrete closed loops in a vacuum manifold: Dirichlet loop energy, geodesic
//! relaxation by projected heat flow, and free homotopy class detection.
//!
//! A loop is `K` samples at `θ_k = 2πk/K`. Consecutive samples must stay closer
//! than the projection reach so the projected piecewise-linear interpolant is a
//! well-defined loop in `N` of a definite class.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homotopy::{EminTable, FiniteGroup};
use crate::manifold::{EmbeddedManifold, ManifoldError, ManifoldId, ManifoldSpec};

pub const MIN_SAMPLES: usize = 8;

/// Energy change below which relaxation stops.
pub const RELAX_STOP: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("a loop needs at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample {index} has {got} coordinates, expected {expected}")]
    Dimension { index: usize, got: usize, expected: usize },
    #[error("class safety: sample {index} is at distance {distance:.3e} from the manifold (reach {reach})")]
    OffManifold { index: usize, distance: f64, reach: f64 },
    #[error("class safety: gap {gap:.3e} after sample {index} is not below the reach {reach}")]
    GapTooLarge { index: usize, gap: f64, reach: f64 },
    #[error("step size {step} exceeds the stability limit {limit:.3e}")]
    StepTooLarge { step: f64, limit: f64 },
    #[error("class safety during relaxation at step {step}: {source}")]
    Projection { step: usize, source: ManifoldError },
    #[error("the circle has infinitely many classes; use the closed form π d²")]
    InfiniteGroup,
    #[error("loop file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopSamples {
    manifold: EmbeddedManifold,
    dim: usize,
    points: Vec<f64>,
}

impl LoopSamples {
    /// Validates sample count, distance to `N` and consecutive gaps.
    pub fn new(manifold: EmbeddedManifold, points: Vec<Vec<f64>>) -> Result<Self, LoopError> {
        let dim = manifold.ambient_dim();
        let mut flat = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(LoopError::Dimension { index, got: p.len(), expected: dim });
            }
            flat.extend_from_slice(p);
        }
        let s = Self { manifold, dim, points: flat };
        s.check()?;
        Ok(s)
    }

    /// Samples `curve(θ_k)` at `K` equispaced parameters.
    pub fn from_fn(
        manifold: EmbeddedManifold,
        k: usize,
        curve: impl Fn(f64) -> Vec<f64>,
    ) -> Result<Self, LoopError> {
        let pts = (0..k).map(|i| curve(2.0 * PI * i as f64 / k as f64)).collect();
        Self::new(manifold, pts)
    }

    /// `θ ↦ (cos dθ, sin dθ)` on the unit circle.
    pub fn circle_degree(d: i64, k: usize) -> Result<Self, LoopError> {
        Self::from_fn(EmbeddedManifold::circle(), k, |t| {
            let a = d as f64 * t;
            vec![a.cos(), a.sin()]
        })
    }

    /// Director rotating by `π` in the `e₁e₂` plane: the nontrivial class.
    pub fn projective_half_turn(manifold: EmbeddedManifold, k: usize) -> Result<Self, LoopError> {
        Self::from_fn(manifold, k, |t| {
            manifold.from_director(&[(0.5 * t).cos(), (0.5 * t).sin(), 0.0])
        })
    }

    fn check(&self) -> Result<(), LoopError> {
        let k = self.len();
        if k < MIN_SAMPLES {
            return Err(LoopError::TooFewSamples(k));
        }
        let reach = self.manifold.reach();
        for i in 0..k {
            let d = self.manifold.distance(self.point(i));
            if !(d < reach) {
                return Err(LoopError::OffManifold { index: i, distance: d, reach });
            }
            let gap = dist(self.point(i), self.point((i + 1) % k));
            if !(gap < reach) {
                return Err(LoopError::GapTooLarge { index: i, gap, reach });
            }
        }
        Ok(())
    }

    pub fn manifold(&self) -> &EmbeddedManifold {
        &self.manifold
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    /// Same loop starting at sample `shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let k = self.len();
        let mut points = Vec::with_capacity(self.points.len());
        for i in 0..k {
            points.extend_from_slice(self.point((i + shift) % k));
        }
        Self { points, ..*self }
    }

    /// Same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        let k = self.len();
        let mut points = Vec::with_capacity(self.points.len());
        for i in 0..k {
            points.extend_from_slice(self.point((k - i) % k));
        }
        Self { points, ..*self }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LoopError> {
        let mut out = out;
        let scale = match self.manifold.id() {
            ManifoldId::ProjectivePlane => format!(";scale={}", self.manifold.scale()),
            _ => String::new(),
        };
        writeln!(out, "#manifold={};K={}{}", self.manifold.id().as_str(), self.len(), scale)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record((0..self.dim).map(|c| format!("y{c}")))?;
        for p in self.points() {
            w.write_record(p.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self, LoopError> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        let header = header
            .trim()
            .strip_prefix("#")
            .ok_or_else(|| LoopError::Format("missing `#manifold=...;K=...` header".into()))?;
        let mut id = None;
        let mut k = None;
        let mut scale = None;
        for field in header.split(';') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| LoopError::Format(format!("bad header field `{field}`")))?;
            match key {
                "manifold" => id = ManifoldId::parse(value),
                "K" => k = value.parse::<usize>().ok(),
                "scale" => scale = value.parse::<f64>().ok(),
                _ => return Err(LoopError::Format(format!("unknown header key `{key}`"))),
            }
        }
        let (id, k) = match (id, k) {
            (Some(id), Some(k)) => (id, k),
            _ => return Err(LoopError::Format("header needs a known manifold id and K".into())),
        };
        let manifold = EmbeddedManifold::from_spec(&ManifoldSpec { id, embedding_scale: scale, reach: None })
            .map_err(|e| LoopError::Format(e.to_string()))?;
        let mut rdr = csv::Reader::from_reader(input);
        let mut points = Vec::with_capacity(k);
        for rec in rdr.records() {
            let rec = rec?;
            let p = rec
                .iter()
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| LoopError::Format(format!("row {}: {e}", points.len())))?;
            points.push(p);
        }
        if points.len() != k {
            return Err(LoopError::Format(format!("header says K={k}, found {} rows", points.len())));
        }
        Self::new(manifold, points)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `½ Σ |p_{k+1} − p_k|² / Δθ`.
pub fn loop_energy(ell: &LoopSamples) -> f64 {
    let k = ell.len();
    let dtheta = 2.0 * PI / k as f64;
    let sum: f64 = (0..k)
        .map(|i| {
            let d = dist(ell.point(i), ell.point((i + 1) % k));
            d * d
        })
        .sum();
    0.5 * sum / dtheta
}

/// Largest stable heat step `Δθ²/2`.
pub fn max_step(k: usize) -> f64 {
    let dtheta = 2.0 * PI / k as f64;
    0.5 * dtheta * dtheta
}

#[derive(Debug, Clone)]
pub struct Relaxation {
    pub energy: f64,
    pub relaxed: LoopSamples,
    pub steps_taken: usize,
    /// Stopped on an energy change below [`RELAX_STOP`] rather than the budget.
    pub converged: bool,
    pub energy_trace: Vec<f64>,
    /// Class detected every 100 steps (and at the end).
    pub class_trace: Vec<(usize, LoopClass)>,
    /// Largest energy increase seen between consecutive steps.
    pub max_increase: f64,
}

/// Projected explicit heat flow `p ← Π(p + τ Δ_θ p)`.
pub fn relax_geodesic(ell: &LoopSamples, steps: usize, step_size: f64) -> Result<Relaxation, LoopError> {
    let k = ell.len();
    let limit = max_step(k);
    if !(step_size > 0.0 && step_size <= limit) {
        return Err(LoopError::StepTooLarge { step: step_size, limit });
    }
    let dtheta = 2.0 * PI / k as f64;
    let c = step_size / (dtheta * dtheta);
    let m = ell.manifold;
    let dim = ell.dim;
    let mut cur = ell.clone();
    let mut next = vec![0.0; cur.points.len()];
    let mut trial = vec![0.0; dim];
    let mut energy = loop_energy(&cur);
    let mut trace = vec![energy];
    let mut classes = vec![(0, detect_class(&cur)?)];
    let mut max_increase: f64 = 0.0;
    let mut converged = false;
    let mut taken = 0;
    for step in 1..=steps {
        for i in 0..k {
            let (p, a, b) = (cur.point(i), cur.point((i + k - 1) % k), cur.point((i + 1) % k));
            for j in 0..dim {
                trial[j] = p[j] + c * (a[j] - 2.0 * p[j] + b[j]);
            }
            m.project_into(&trial, &mut next[i * dim..(i + 1) * dim])
                .map_err(|source| LoopError::Projection { step, source })?;
        }
        std::mem::swap(&mut cur.points, &mut next);
        taken = step;
        let e = loop_energy(&cur);
        max_increase = max_increase.max(e - energy);
        let change = (energy - e).abs();
        energy = e;
        trace.push(e);
        if step % 100 == 0 {
            classes.push((step, detect_class(&cur)?));
        }
        if change < RELAX_STOP {
            converged = true;
            break;
        }
    }
    cur.check()?;
    if classes.last().map(|c| c.0) != Some(taken) {
        classes.push((taken, detect_class(&cur)?));
    }
    Ok(Relaxation {
        energy,
        relaxed: cur,
        steps_taken: taken,
        converged,
        energy_trace: trace,
        class_trace: classes,
        max_increase,
    })
}

/// Free homotopy class of a loop in a built-in manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopClass {
    /// Winding number in the circle.
    Degree(i64),
    /// Class in `π₁(RP²) = Z/2`.
    Projective { nontrivial: bool },
    /// The sphere is simply connected.
    Trivial,
}

impl LoopClass {
    /// Index into the class list of the manifold's finite fundamental group.
    pub fn class_id(&self) -> Option<usize> {
        match self {
            LoopClass::Degree(_) => None,
            LoopClass::Projective { nontrivial } => Some(*nontrivial as usize),
            LoopClass::Trivial => Some(0),
        }
    }
}

pub fn detect_class(ell: &LoopSamples) -> Result<LoopClass, LoopError> {
    ell.check()?;
    let k = ell.len();
    match ell.manifold.id() {
        ManifoldId::Circle => {
            let mut total = 0.0;
            for i in 0..k {
                let (a, b) = (ell.point(i), ell.point((i + 1) % k));
                // angle of b relative to a
                total += (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
            }
            Ok(LoopClass::Degree((total / (2.0 * PI)).round() as i64))
        }
        ManifoldId::Sphere => Ok(LoopClass::Trivial),
        ManifoldId::ProjectivePlane => {
            let director = |i: usize| -> Result<[f64; 3], LoopError> {
                let p = ell.manifold.project(ell.point(i)).map_err(|source| LoopError::Projection {
                    step: 0,
                    source,
                })?;
                Ok(ell.manifold.director(&p).expect("points on the manifold are uniaxial"))
            };
            let start = director(0)?;
            let mut n = start;
            for i in 1..=k {
                let mut next = director(i % k)?;
                if next.iter().zip(&n).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
                    next = next.map(|v| -v);
                }
                n = next;
            }
            let back: f64 = n.iter().zip(&start).map(|(a, b)| a * b).sum();
            Ok(LoopClass::Projective { nontrivial: back < 0.0 })
        }
    }
}

/// Relaxed least loop energy per class of a built-in manifold, indexed like the
/// class list of its fundamental group.
pub fn emin_table(
    manifold: EmbeddedManifold,
    k: usize,
    steps: usize,
) -> Result<(EminTable, FiniteGroup), LoopError> {
    match manifold.id() {
        ManifoldId::Circle => Err(LoopError::InfiniteGroup),
        ManifoldId::Sphere => {
            let g = FiniteGroup::cyclic(1);
            Ok((EminTable::new(g.name(), vec![0.0]), g))
        }
        ManifoldId::ProjectivePlane => {
            let g = FiniteGroup::cyclic(2);
            let rep = LoopSamples::projective_half_turn(manifold, k)?;
            let r = relax_geodesic(&rep, steps, 0.8 * max_step(k))?;
            Ok((EminTable::new(g.name(), vec![0.0, r.energy]), g))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_loop_energies() {
        for d in 1..=3i64 {
            let ell = LoopSamples::circle_degree(d, 256).unwrap();
            let e = loop_energy(&ell);
            let exact = PI * (d * d) as f64;
            assert!((e - exact).abs() < 1e-3 * exact, "d={d}: {e}");
            assert_eq!(detect_class(&ell).unwrap(), LoopClass::Degree(d));
        }
        let constant = LoopSamples::from_fn(EmbeddedManifold::circle(), 16, |_| vec![1.0, 0.0]).unwrap();
        assert_eq!(loop_energy(&constant), 0.0);
        assert_eq!(detect_class(&constant).unwrap(), LoopClass::Degree(0));
    }

    #[test]
    fn class_safety_is_enforced() {
        assert!(matches!(
            LoopSamples::circle_degree(1, 4),
            Err(LoopError::TooFewSamples(4))
        ));
        // 8 samples of degree 3 jump by 3π/4 > reach
        assert!(matches!(
            LoopSamples::circle_degree(3, 8),
            Err(LoopError::GapTooLarge { .. })
        ));
        let ell = LoopSamples::circle_degree(1, 64).unwrap();
        assert!(matches!(
            relax_geodesic(&ell, 10, 1.0),
            Err(LoopError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn half_turn_is_nontrivial() {
        let m = EmbeddedManifold::projective_plane_isometric();
        let ell = LoopSamples::projective_half_turn(m, 64).unwrap();
        assert_eq!(detect_class(&ell).unwrap(), LoopClass::Projective { nontrivial: true });
        assert_eq!(
            detect_class(&ell.rotated(17)).unwrap(),
            LoopClass::Projective { nontrivial: true }
        );
        let full = LoopSamples::from_fn(m, 64, |t| m.from_director(&[t.cos(), t.sin(), 0.0])).unwrap();
        assert_eq!(detect_class(&full).unwrap(), LoopClass::Projective { nontrivial: false });
    }

    #[test]
    fn csv_roundtrip() {
        let m = EmbeddedManifold::projective_plane_isometric();
        let ell = LoopSamples::projective_half_turn(m, 32).unwrap();
        let mut buf = Vec::new();
        ell.write_csv(&mut buf).unwrap();
        let back = LoopSamples::read_csv(&buf[..]).unwrap();
        assert_eq!(back, ell);
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(matches!(LoopSamples::read_csv(cut.as_bytes()), Err(LoopError::Format(_))));
    }
}
