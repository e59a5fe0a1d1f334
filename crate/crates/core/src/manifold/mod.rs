//! Built-in vacuum manifolds embedded in Euclidean space, their nearest-point
//! projection, and admissible potentials vanishing on them.
//!
//! The projective plane is realized as uniaxial Q-tensors `s (n⊗n − I/3)`
//! inside the five-dimensional space of symmetric traceless 3×3 matrices,
//! with coordinates orthonormal for the Frobenius product. For `s = 1/√2`
//! the embedding is an isometry from the round sphere of radius 1 modulo `±`.

mod nondegeneracy;
mod potential;
pub mod sym3;

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homotopy::FiniteGroup;

pub use nondegeneracy::{check_nondegeneracy, NondegeneracyReport, Witness, WitnessKind};
pub use potential::{Potential, PotentialField, PotentialKind, PotentialSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifoldError {
    #[error("point at distance {distance:.6} from the manifold is outside the projection reach {reach:.6}")]
    ReachExceeded { distance: f64, reach: f64 },
    #[error("expected a point of dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid manifold or potential: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ManifoldId {
    #[serde(rename = "circle-S1")]
    Circle,
    #[serde(rename = "sphere-S2")]
    Sphere,
    #[serde(rename = "projective-RP2-qtensor")]
    ProjectivePlane,
}

impl ManifoldId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ManifoldId::Circle => "circle-S1",
            ManifoldId::Sphere => "sphere-S2",
            ManifoldId::ProjectivePlane => "projective-RP2-qtensor",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Circle, Self::Sphere, Self::ProjectivePlane]
            .into_iter()
            .find(|id| id.as_str() == s)
    }
}

/// Fundamental group of a built-in manifold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pi1 {
    Trivial,
    Integers,
    Finite(FiniteGroup),
}

/// Serializable description of a manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub id: ManifoldId,
    #[serde(default)]
    pub embedding_scale: Option<f64>,
    #[serde(default)]
    pub reach: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedManifold {
    id: ManifoldId,
    scale: f64,
    reach: f64,
}

impl EmbeddedManifold {
    pub fn circle() -> Self {
        Self {
            id: ManifoldId::Circle,
            scale: 1.0,
            reach: 0.5,
        }
    }

    pub fn sphere() -> Self {
        Self {
            id: ManifoldId::Sphere,
            scale: 1.0,
            reach: 0.5,
        }
    }

    /// Uniaxial Q-tensors with amplitude `s`; reach `0.3 s`.
    pub fn projective_plane(s: f64) -> Self {
        Self {
            id: ManifoldId::ProjectivePlane,
            scale: s,
            reach: 0.3 * s,
        }
    }

    /// Projective plane with the isometric amplitude `1/√2`.
    pub fn projective_plane_isometric() -> Self {
        Self::projective_plane(FRAC_1_SQRT_2)
    }

    pub fn from_spec(spec: &ManifoldSpec) -> Result<Self, ManifoldError> {
        let mut m = match spec.id {
            ManifoldId::Circle => Self::circle(),
            ManifoldId::Sphere => Self::sphere(),
            ManifoldId::ProjectivePlane => {
                let s = spec.embedding_scale.unwrap_or(FRAC_1_SQRT_2);
                if !(s.is_finite() && s > 0.0) {
                    return Err(ManifoldError::Invalid(format!("embedding scale {s} must be positive")));
                }
                Self::projective_plane(s)
            }
        };
        if let Some(r) = spec.reach {
            if !(r.is_finite() && r > 0.0 && r <= m.max_reach()) {
                return Err(ManifoldError::Invalid(format!(
                    "reach {r} must lie in (0, {}]",
                    m.max_reach()
                )));
            }
            m.reach = r;
        }
        Ok(m)
    }

    pub fn spec(&self) -> ManifoldSpec {
        ManifoldSpec {
            id: self.id,
            embedding_scale: match self.id {
                ManifoldId::ProjectivePlane => Some(self.scale),
                _ => None,
            },
            reach: Some(self.reach),
        }
    }

    /// Focal radius: 1 for the unit spheres, `s/2` for the Q-tensor embedding
    /// (where the two lower eigenvalues cross the top one).
    fn max_reach(&self) -> f64 {
        match self.id {
            ManifoldId::Circle | ManifoldId::Sphere => 1.0,
            ManifoldId::ProjectivePlane => 0.5 * self.scale,
        }
    }

    pub fn id(&self) -> ManifoldId {
        self.id
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Projection reach `δ_N`.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    pub fn ambient_dim(&self) -> usize {
        match self.id {
            ManifoldId::Circle => 2,
            ManifoldId::Sphere => 3,
            ManifoldId::ProjectivePlane => 5,
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self.id {
            ManifoldId::Circle => 1,
            _ => 2,
        }
    }

    /// `max |y|` over the manifold.
    pub fn ambient_bound(&self) -> f64 {
        match self.id {
            ManifoldId::Circle | ManifoldId::Sphere => 1.0,
            ManifoldId::ProjectivePlane => self.scale * (2.0f64 / 3.0).sqrt(),
        }
    }

    pub fn pi1(&self) -> Pi1 {
        match self.id {
            ManifoldId::Circle => Pi1::Integers,
            ManifoldId::Sphere => Pi1::Trivial,
            ManifoldId::ProjectivePlane => Pi1::Finite(FiniteGroup::cyclic(2)),
        }
    }

    fn check_dim(&self, y: &[f64]) -> Result<(), ManifoldError> {
        if y.len() != self.ambient_dim() {
            return Err(ManifoldError::Dimension {
                expected: self.ambient_dim(),
                got: y.len(),
            });
        }
        Ok(())
    }

    /// Euclidean distance to the manifold, defined everywhere.
    pub fn distance(&self, y: &[f64]) -> f64 {
        self.distance_squared(y).sqrt()
    }

    pub fn distance_squared(&self, y: &[f64]) -> f64 {
        match self.id {
            ManifoldId::Circle | ManifoldId::Sphere => {
                let r = norm(y);
                (r - 1.0) * (r - 1.0)
            }
            ManifoldId::ProjectivePlane => {
                // |Q − s(nn − I/3)|² = |Q|² − 2 s n·Qn + 2s²/3, minimized by the top eigenvector
                let q = sym3::from_vec5(y);
                let lmax = sym3::eigenvalues(&q)[0];
                let s = self.scale;
                let d2 = dot(y, y) - 2.0 * s * lmax + 2.0 * s * s / 3.0;
                d2.max(0.0)
            }
        }
    }

    /// Nearest point on the manifold, valid within the reach.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>, ManifoldError> {
        let mut out = vec![0.0; self.ambient_dim()];
        self.project_into(y, &mut out)?;
        Ok(out)
    }

    pub fn project_into(&self, y: &[f64], out: &mut [f64]) -> Result<(), ManifoldError> {
        self.check_dim(y)?;
        match self.id {
            ManifoldId::Circle | ManifoldId::Sphere => {
                let r = norm(y);
                if (r - 1.0).abs() >= self.reach {
                    return Err(ManifoldError::ReachExceeded {
                        distance: (r - 1.0).abs(),
                        reach: self.reach,
                    });
                }
                for (o, v) in out.iter_mut().zip(y) {
                    *o = v / r;
                }
            }
            ManifoldId::ProjectivePlane => {
                let q = sym3::from_vec5(y);
                let (lmax, n) = sym3::top_eigenpair(&q);
                let s = self.scale;
                let d2 = (dot(y, y) - 2.0 * s * lmax + 2.0 * s * s / 3.0).max(0.0);
                let d = d2.sqrt();
                let n = match n {
                    Some(n) if d < self.reach => n,
                    _ => {
                        return Err(ManifoldError::ReachExceeded {
                            distance: d,
                            reach: self.reach,
                        })
                    }
                };
                out.copy_from_slice(&sym3::uniaxial(&n, s));
            }
        }
        Ok(())
    }

    /// Membership up to `tol` in the defining equations.
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        if y.len() != self.ambient_dim() {
            return false;
        }
        match self.id {
            ManifoldId::Circle | ManifoldId::Sphere => (dot(y, y) - 1.0).abs() <= tol,
            ManifoldId::ProjectivePlane => {
                // Q² = (s/3) Q + (2s²/9) I together with |Q|² = 2s²/3 and tr Q = 0
                let q = sym3::from_vec5(y);
                let s = self.scale;
                let mut worst: f64 = (dot(y, y) - 2.0 * s * s / 3.0).abs();
                for i in 0..3 {
                    for j in 0..3 {
                        let qq: f64 = (0..3).map(|k| q[i][k] * q[k][j]).sum();
                        let rhs = s / 3.0 * q[i][j] + if i == j { 2.0 * s * s / 9.0 } else { 0.0 };
                        worst = worst.max((qq - rhs).abs());
                    }
                }
                worst <= tol
            }
        }
    }

    /// A fixed reference point on the manifold.
    pub fn base_point(&self) -> Vec<f64> {
        match self.id {
            ManifoldId::Circle => vec![1.0, 0.0],
            ManifoldId::Sphere => vec![0.0, 0.0, 1.0],
            ManifoldId::ProjectivePlane => sym3::uniaxial(&[0.0, 0.0, 1.0], self.scale).to_vec(),
        }
    }

    /// Point on the projective plane with director `n`; panics for other manifolds.
    pub fn from_director(&self, n: &[f64; 3]) -> Vec<f64> {
        assert_eq!(self.id, ManifoldId::ProjectivePlane);
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        sym3::uniaxial(&[n[0] / len, n[1] / len, n[2] / len], self.scale).to_vec()
    }

    /// Director (top eigenvector) of a Q-tensor point, up to sign.
    pub fn director(&self, y: &[f64]) -> Option<[f64; 3]> {
        sym3::top_eigenpair(&sym3::from_vec5(y)).1
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self.id {
            ManifoldId::Circle => random_unit(rng, 2),
            ManifoldId::Sphere => random_unit(rng, 3),
            ManifoldId::ProjectivePlane => {
                let n = random_unit(rng, 3);
                self.from_director(&[n[0], n[1], n[2]])
            }
        }
    }

    /// Orthonormal basis of the tangent space at `p ∈ N`.
    pub fn tangent_basis(&self, p: &[f64]) -> Vec<Vec<f64>> {
        match self.id {
            ManifoldId::Circle => vec![vec![-p[1], p[0]]],
            ManifoldId::Sphere => {
                let helper = if p[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let t1 = normalize(&reject(&helper, p));
                let t2 = cross3(p, &t1);
                vec![t1, t2]
            }
            ManifoldId::ProjectivePlane => {
                let n = self.director(p).expect("point on the manifold has a director");
                let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let t1 = normalize(&reject(&helper, &n));
                let t2 = cross3(&n, &t1);
                [t1, t2]
                    .iter()
                    .map(|t| {
                        let mut q = [[0.0; 3]; 3];
                        for i in 0..3 {
                            for j in 0..3 {
                                q[i][j] = t[i] * n[j] + n[i] * t[j];
                            }
                        }
                        normalize(&sym3::to_vec5(&q))
                    })
                    .collect()
            }
        }
    }

    /// Uniformly random unit normal vector at `p ∈ N`.
    pub fn random_normal<R: Rng + ?Sized>(&self, p: &[f64], rng: &mut R) -> Vec<f64> {
        let basis = self.tangent_basis(p);
        loop {
            let mut v = random_unit(rng, self.ambient_dim());
            for t in &basis {
                let c = dot(&v, t);
                for (vi, ti) in v.iter_mut().zip(t) {
                    *vi -= c * ti;
                }
            }
            if norm(&v) > 1e-3 {
                return normalize(&v);
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

fn reject(a: &[f64], unit: &[f64]) -> Vec<f64> {
    let c = dot(a, unit);
    a.iter().zip(unit).map(|(x, u)| x - c * u).collect()
}

fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Uniform point on the unit sphere of `R^dim` (rejection from the cube).
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circle_projection() {
        let c = EmbeddedManifold::circle();
        assert_eq!(c.project(&[2.0 - 0.6, 0.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(c.project(&[0.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(
            c.project(&[2.0, 0.0]),
            Err(ManifoldError::ReachExceeded { .. })
        ));
        assert!(matches!(c.project(&[1.0, 0.0, 0.0]), Err(ManifoldError::Dimension { .. })));
    }

    #[test]
    fn projections_land_on_manifold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [
            EmbeddedManifold::circle(),
            EmbeddedManifold::sphere(),
            EmbeddedManifold::projective_plane_isometric(),
            EmbeddedManifold::projective_plane(1.3),
        ] {
            for _ in 0..200 {
                let p = m.random_point(&mut rng);
                assert!(m.contains(&p, 1e-12));
                let nu = m.random_normal(&p, &mut rng);
                let t = rng.gen_range(0.0..0.95) * m.reach();
                let y: Vec<f64> = p.iter().zip(&nu).map(|(a, b)| a + t * b).collect();
                let q = m.project(&y).unwrap();
                assert!(m.contains(&q, 1e-12));
                let d: f64 = norm(&y.iter().zip(&q).map(|(a, b)| a - b).collect::<Vec<_>>());
                assert!((d - t).abs() < 1e-10, "{:?}: {d} vs {t}", m.id());
                assert!((m.distance(&y) - t).abs() < 1e-7);
                let qq = m.project(&q).unwrap();
                assert!(norm(&qq.iter().zip(&q).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-12);
            }
        }
    }

    #[test]
    fn qtensor_embedding_is_isometric_at_unit_half_root_two() {
        let m = EmbeddedManifold::projective_plane_isometric();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = random_unit(&mut rng, 3);
            let n = [n[0], n[1], n[2]];
            let t = random_unit(&mut rng, 3);
            let c = n[0] * t[0] + n[1] * t[1] + n[2] * t[2];
            let dn: Vec<f64> = (0..3).map(|i| t[i] - c * n[i]).collect();
            let mut dq = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    dq[i][j] = m.scale() * (dn[i] * n[j] + n[i] * dn[j]);
                }
            }
            let dq = sym3::to_vec5(&dq);
            let ratio = dot(&dq, &dq) / dot(&dn, &dn);
            assert!((ratio - 1.0).abs() < 1e-10, "{ratio}");
        }
    }

    #[test]
    fn spec_roundtrip() {
        let m = EmbeddedManifold::projective_plane(0.9);
        assert_eq!(EmbeddedManifold::from_spec(&m.spec()).unwrap(), m);
        assert!(EmbeddedManifold::from_spec(&ManifoldSpec {
            id: ManifoldId::Circle,
            embedding_scale: None,
            reach: Some(2.0),
        })
        .is_err());
    }
}
