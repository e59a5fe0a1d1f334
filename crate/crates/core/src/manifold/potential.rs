use serde::{Deserialize, Serialize};

use super::{dot, EmbeddedManifold, ManifoldError, ManifoldId};

/// Anything that can play the role of the potential `f` with gradient `Df`.
pub trait PotentialField: Sync {
    fn manifold(&self) -> &EmbeddedManifold;

    /// Writes `Df(y)` into `grad` and returns `f(y)`.
    fn value_grad(&self, y: &[f64], grad: &mut [f64]) -> f64;

    fn value(&self, y: &[f64]) -> f64 {
        let mut g = vec![0.0; y.len()];
        self.value_grad(y, &mut g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `½ (|y|² − 1)²`, for the unit circle and sphere.
    GlQuartic,
    /// `φ(dist²(y, N))`, linear near `N` and constant far away.
    CanonicalDist2 {
        #[serde(default)]
        cap_value: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    GlQuartic,
    CanonicalDist2 { cap_value: f64 },
}

/// A potential vanishing exactly on a built-in manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    manifold: EmbeddedManifold,
}

impl Potential {
    pub fn gl_quartic(manifold: EmbeddedManifold) -> Result<Self, ManifoldError> {
        match manifold.id() {
            ManifoldId::Circle | ManifoldId::Sphere => Ok(Self {
                kind: PotentialKind::GlQuartic,
                manifold,
            }),
            ManifoldId::ProjectivePlane => Err(ManifoldError::Invalid(
                "the quartic potential vanishes on the unit sphere, not on the Q-tensor manifold"
                    .into(),
            )),
        }
    }

    /// Canonical potential with the default cap `δ_N²`.
    pub fn canonical(manifold: EmbeddedManifold) -> Self {
        let cap = manifold.reach() * manifold.reach();
        Self::canonical_with_cap(manifold, cap).expect("default cap is positive")
    }

    pub fn canonical_with_cap(manifold: EmbeddedManifold, cap_value: f64) -> Result<Self, ManifoldError> {
        if !(cap_value.is_finite() && cap_value > 0.0) {
            return Err(ManifoldError::Invalid(format!("cap value {cap_value} must be positive")));
        }
        Ok(Self {
            kind: PotentialKind::CanonicalDist2 { cap_value },
            manifold,
        })
    }

    pub fn from_spec(spec: &PotentialSpec, manifold: EmbeddedManifold) -> Result<Self, ManifoldError> {
        match spec {
            PotentialSpec::GlQuartic => Self::gl_quartic(manifold),
            PotentialSpec::CanonicalDist2 { cap_value: None } => Ok(Self::canonical(manifold)),
            PotentialSpec::CanonicalDist2 { cap_value: Some(c) } => Self::canonical_with_cap(manifold, *c),
        }
    }

    pub fn spec(&self) -> PotentialSpec {
        match self.kind {
            PotentialKind::GlQuartic => PotentialSpec::GlQuartic,
            PotentialKind::CanonicalDist2 { cap_value } => PotentialSpec::CanonicalDist2 {
                cap_value: Some(cap_value),
            },
        }
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    /// Rough bound on the Hessian of `f` over the states reached in practice;
    /// sets the default explicit step.
    pub fn curvature_bound(&self) -> f64 {
        match self.kind {
            // 6|y|² − 2 with |y| up to ~1.15
            PotentialKind::GlQuartic => 6.0,
            PotentialKind::CanonicalDist2 { cap_value } => {
                let d2 = self.manifold.reach() * self.manifold.reach();
                2.0 + 8.0 * (cap_value / d2).max(1.0)
            }
        }
    }

    /// Blend `φ(t)` and `φ'(t)` for the canonical potential.
    fn blend(&self, t: f64, cap: f64) -> (f64, f64) {
        let d2 = self.manifold.reach() * self.manifold.reach();
        let (t1, t2) = (0.25 * d2, d2);
        if t <= t1 {
            (t, 1.0)
        } else if t >= t2 {
            (cap, 0.0)
        } else {
            let w = t2 - t1;
            let x = (t - t1) / w;
            let s = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
            let ds = 30.0 * x * x * (1.0 - x) * (1.0 - x) / w;
            ((1.0 - s) * t + s * cap, (1.0 - s) + ds * (cap - t))
        }
    }
}

impl PotentialField for Potential {
    fn manifold(&self) -> &EmbeddedManifold {
        &self.manifold
    }

    #[inline]
    fn value_grad(&self, y: &[f64], grad: &mut [f64]) -> f64 {
        match self.kind {
            PotentialKind::GlQuartic => {
                let r2m1 = dot(y, y) - 1.0;
                for (g, v) in grad.iter_mut().zip(y) {
                    *g = 2.0 * r2m1 * v;
                }
                0.5 * r2m1 * r2m1
            }
            PotentialKind::CanonicalDist2 { cap_value } => {
                let t = self.manifold.distance_squared(y);
                let (phi, dphi) = self.blend(t, cap_value);
                if dphi == 0.0 || t == 0.0 {
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    return phi;
                }
                match self.manifold.id() {
                    ManifoldId::Circle | ManifoldId::Sphere => {
                        let r = dot(y, y).sqrt();
                        let c = 2.0 * dphi * (1.0 - 1.0 / r);
                        for (g, v) in grad.iter_mut().zip(y) {
                            *g = c * v;
                        }
                    }
                    ManifoldId::ProjectivePlane => {
                        let mut p = [0.0; 5];
                        match self.manifold.project_into(y, &mut p) {
                            Ok(()) => {
                                for ((g, v), q) in grad.iter_mut().zip(y).zip(&p) {
                                    *g = 2.0 * dphi * (v - q);
                                }
                            }
                            // dist < reach whenever φ' ≠ 0, so this is a rounding corner case
                            Err(_) => grad.iter_mut().for_each(|g| *g = 0.0),
                        }
                    }
                }
                phi
            }
        }
    }
}
