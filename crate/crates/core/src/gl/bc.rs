//! Dirichlet data carrying a prescribed singular pattern, its bounds, and its
//! boundary energy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::manifold::{EmbeddedManifold, ManifoldId, Potential, PotentialField};

use super::energy::Shape;
use super::{Domain, GlError, GridField};

/// Where the boundary data is singular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pattern", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SigmaSpec {
    /// No singularity: the constant map at the manifold's base point.
    Constant,
    /// 3D only: the line through the box center along `axis`; `Σ` is the pair
    /// of points where it meets the boundary.
    Axis { axis: usize },
    /// 2D only: phase winding around each listed point.
    Points { points: Vec<Vec<f64>> },
}

/// Homotopy class carried around each singular point or line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassSpec {
    /// Winding degree in the circle.
    Degree { d: i64 },
    /// Half turn of the director in the projective plane.
    Projective { nontrivial: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcDescriptor {
    pub sigma: SigmaSpec,
    pub class: ClassSpec,
    pub eps: f64,
}

/// Sampled constants for `|g| ≤ C₀`, `g ∈ N` off the `ε`-neighbourhood of
/// `Σ`, and `|∇_{∂Ω} g| ≤ C₀ / max(dist(x, Σ), ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcBounds {
    pub sup_norm: f64,
    /// Largest `dist(g(x), N)` over boundary nodes with `dist(x, Σ) ≥ ε`.
    pub off_manifold: f64,
    pub gradient_weighted: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletBC {
    pub domain: Domain,
    pub potential: Potential,
    pub descriptor: BcDescriptor,
    /// Boundary node indices, ascending.
    pub nodes: Vec<usize>,
    /// `m` values per entry of `nodes`.
    pub values: Vec<f64>,
    pub bounds: BcBounds,
}

/// Analytic boundary map for a descriptor.
pub struct BoundaryMap<'a> {
    domain: &'a Domain,
    manifold: EmbeddedManifold,
    desc: &'a BcDescriptor,
}

impl<'a> BoundaryMap<'a> {
    pub fn new(domain: &'a Domain, manifold: EmbeddedManifold, desc: &'a BcDescriptor) -> Result<Self, GlError> {
        let ok = match (&desc.sigma, desc.class, manifold.id()) {
            (SigmaSpec::Constant, _, _) => true,
            (SigmaSpec::Axis { axis }, ClassSpec::Degree { .. }, ManifoldId::Circle)
            | (SigmaSpec::Axis { axis }, ClassSpec::Projective { .. }, ManifoldId::ProjectivePlane) => {
                domain.dim == 3 && *axis < 3
            }
            (SigmaSpec::Points { points }, ClassSpec::Degree { .. }, ManifoldId::Circle)
            | (SigmaSpec::Points { points }, ClassSpec::Projective { .. }, ManifoldId::ProjectivePlane) => {
                domain.dim == 2 && !points.is_empty() && points.iter().all(|p| p.len() == 2)
            }
            _ => false,
        };
        if !ok {
            return Err(GlError::Config(format!(
                "unsupported singular pattern {:?} with class {:?} for {} in {}D",
                desc.sigma,
                desc.class,
                manifold.id().as_str(),
                domain.dim
            )));
        }
        if !(desc.eps > 0.0) {
            return Err(GlError::Config("boundary data needs ε > 0".into()));
        }
        Ok(Self { domain, manifold, desc })
    }

    fn center(&self, a: usize) -> f64 {
        self.domain.lower[a] + 0.5 * self.domain.extent[a]
    }

    /// `dist(x, Σ)`; infinite for constant data.
    pub fn sigma_distance(&self, x: &[f64]) -> f64 {
        match &self.desc.sigma {
            SigmaSpec::Constant => f64::INFINITY,
            SigmaSpec::Axis { axis } => {
                let mut best = f64::INFINITY;
                for end in [self.domain.lower[*axis], self.domain.upper(*axis)] {
                    let mut d2 = 0.0;
                    for a in 0..3 {
                        let c = if a == *axis { end } else { self.center(a) };
                        d2 += (x[a] - c) * (x[a] - c);
                    }
                    best = best.min(d2.sqrt());
                }
                best
            }
            SigmaSpec::Points { points } => points
                .iter()
                .map(|p| ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Total winding angle of `x` around the pattern.
    fn angle(&self, x: &[f64]) -> f64 {
        match &self.desc.sigma {
            SigmaSpec::Constant => 0.0,
            SigmaSpec::Axis { axis } => {
                let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
                (x[q] - self.center(q)).atan2(x[p] - self.center(p))
            }
            SigmaSpec::Points { points } => points.iter().map(|c| (x[1] - c[1]).atan2(x[0] - c[0])).sum(),
        }
    }

    /// Unit value in `N` carrying the class, before the core scaling.
    fn phase(&self, x: &[f64]) -> Vec<f64> {
        if let SigmaSpec::Constant = self.desc.sigma {
            return self.manifold.base_point();
        }
        let theta = self.angle(x);
        match self.desc.class {
            ClassSpec::Degree { d } => {
                let a = d as f64 * theta;
                vec![a.cos(), a.sin()]
            }
            ClassSpec::Projective { nontrivial } => {
                let half = if nontrivial { 0.5 * theta } else { 0.0 };
                let mut n = [0.0; 3];
                // the director turns in the plane orthogonal to the axis (e₁e₂ in 2D)
                let (p, q) = match self.desc.sigma {
                    SigmaSpec::Axis { axis } => ((axis + 1) % 3, (axis + 2) % 3),
                    _ => (0, 1),
                };
                n[p] = half.cos();
                n[q] = half.sin();
                self.manifold.from_director(&n)
            }
        }
    }

    /// `g_ε(x) = min(dist(x,Σ)/ε, 1) · phase(x)`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let eta = (self.sigma_distance(x) / self.desc.eps).min(1.0);
        let mut y = self.phase(x);
        if eta < 1.0 {
            y.iter_mut().for_each(|v| *v *= eta);
        }
        y
    }
}

/// Generates the boundary data and samples its bounds.
pub fn boundary_vortex_data(
    domain: &Domain,
    potential: &Potential,
    sigma: SigmaSpec,
    class: ClassSpec,
    eps: f64,
) -> Result<DirichletBC, GlError> {
    let descriptor = BcDescriptor { sigma, class, eps };
    let manifold = *potential.manifold();
    let map = BoundaryMap::new(domain, manifold, &descriptor)?;
    let nodes = domain.boundary_nodes();
    let m = manifold.ambient_dim();
    let mut values = Vec::with_capacity(nodes.len() * m);
    let mut sup: f64 = 0.0;
    let mut off: f64 = 0.0;
    let mut grad_w: f64 = 0.0;
    let step = 0.25 * domain.h.min(eps);
    for &v in &nodes {
        let idx = domain.node_multi(v);
        let x = domain.node_coord(&idx[..domain.dim]);
        let x = &x[..domain.dim];
        let y = map.eval(x);
        sup = sup.max(y.iter().map(|c| c * c).sum::<f64>().sqrt());
        let dsig = map.sigma_distance(x);
        if dsig >= eps {
            off = off.max(manifold.distance(&y));
        }
        // tangential directions: axes along which the node is not on a face
        let mut g2 = 0.0;
        for a in 0..domain.dim {
            if idx[a] == 0 || idx[a] == domain.counts[a] {
                continue;
            }
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[a] += step;
            xm[a] -= step;
            let (gp, gm) = (map.eval(&xp), map.eval(&xm));
            g2 += gp.iter().zip(&gm).map(|(p, q)| ((p - q) / (2.0 * step)).powi(2)).sum::<f64>();
        }
        grad_w = grad_w.max(g2.sqrt() * dsig.max(eps));
        values.extend_from_slice(&y);
    }
    let bounds = BcBounds {
        sup_norm: sup,
        off_manifold: off,
        gradient_weighted: grad_w,
        c0: sup.max(grad_w),
    };
    Ok(DirichletBC {
        domain: domain.clone(),
        potential: potential.clone(),
        descriptor,
        nodes,
        values,
        bounds,
    })
}

impl DirichletBC {
    pub fn m(&self) -> usize {
        self.values.len() / self.nodes.len().max(1)
    }

    /// Writes the boundary values into `field` and marks them read-only.
    pub fn apply(&self, field: &mut GridField) -> Result<(), GlError> {
        if field.domain != self.domain || field.m != self.m() {
            return Err(GlError::Config("boundary data was generated for a different grid".into()));
        }
        let m = field.m;
        for (k, &v) in self.nodes.iter().enumerate() {
            field.values[v * m..(v + 1) * m].copy_from_slice(&self.values[k * m..(k + 1) * m]);
        }
        field.bc = Some(self.descriptor.clone());
        Ok(())
    }

    /// Node array with the boundary values and zeros inside.
    pub fn full_values(&self) -> Vec<f64> {
        let m = self.m();
        let mut out = vec![0.0; self.domain.node_count() * m];
        for (k, &v) in self.nodes.iter().enumerate() {
            out[v * m..(v + 1) * m].copy_from_slice(&self.values[k * m..(k + 1) * m]);
        }
        out
    }

    /// `E_ε(g, ∂Ω)` by cell quadrature on each boundary face.
    pub fn boundary_energy(&self) -> f64 {
        boundary_energy(&self.domain, self.m(), self.descriptor.eps, &self.potential, &self.full_values())
    }
}

/// Surface energy `∫_{∂Ω} ½|∇_{∂Ω} u|² + f(u)/ε²` of the boundary trace of a
/// nodal array, face by face with the same cell rule as the bulk energy.
pub fn boundary_energy<P: PotentialField + ?Sized>(
    domain: &Domain,
    m: usize,
    eps: f64,
    pot: &P,
    values: &[f64],
) -> f64 {
    let sh = Shape::of(domain);
    let dim = domain.dim;
    let h = domain.h;
    let mut df = vec![0.0; m];
    let mut total = 0.0;
    for normal in 0..dim {
        let tang: Vec<usize> = (0..dim).filter(|&a| a != normal).collect();
        for side in [0, domain.counts[normal]] {
            let mut face = 0.0;
            // cells of the face: ranges over the tangential axes
            let c0 = domain.counts[tang[0]];
            let c1 = if tang.len() > 1 { domain.counts[tang[1]] } else { 1 };
            for i in 0..c0 {
                for j in 0..c1 {
                    let mut base = side * sh.s[normal] + i * sh.s[tang[0]];
                    if tang.len() > 1 {
                        base += j * sh.s[tang[1]];
                    }
                    let corners = 1usize << tang.len();
                    let edges = (corners / 2) as f64;
                    let (mut fsum, mut dsum) = (0.0, 0.0);
                    for corner in 0..corners {
                        let mut v = base;
                        for (t, &a) in tang.iter().enumerate() {
                            if corner >> t & 1 == 1 {
                                v += sh.s[a];
                            }
                        }
                        fsum += pot.value_grad(&values[v * m..(v + 1) * m], &mut df);
                        for (t, &a) in tang.iter().enumerate() {
                            if corner >> t & 1 == 0 {
                                let w = v + sh.s[a];
                                for c in 0..m {
                                    let d = (values[w * m + c] - values[v * m + c]) / h;
                                    dsum += d * d;
                                }
                            }
                        }
                    }
                    face += 0.5 * dsum / edges + fsum / (corners as f64 * eps * eps);
                }
            }
            total += face * h.powi(tang.len() as i32);
        }
    }
    total
}

/// Continuum energy of the ansatz `η_ε(ρ)(cos dθ, sin dθ)` on the unit disk
/// with the quartic potential: `πd² log(1/ε) + π(1+d²)/2 + π/6` (zero for `d = 0`).
pub fn ansatz_disk_energy(d: i64, eps: f64) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let d2 = (d * d) as f64;
    PI * d2 * (1.0 / eps).ln() + 0.5 * PI * (1.0 + d2) + PI / 6.0
}
