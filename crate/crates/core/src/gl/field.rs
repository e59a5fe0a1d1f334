use crate::manifold::{Potential, PotentialField};

use super::{BcDescriptor, Domain, GlError};

/// A map `Ω_h → R^m` sampled at grid nodes; row-major with axis 0 slowest and
/// components innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub domain: Domain,
    pub m: usize,
    pub eps: f64,
    pub potential: Potential,
    pub values: Vec<f64>,
    /// Set once Dirichlet data is attached; boundary nodes are then read-only.
    pub bc: Option<BcDescriptor>,
}

impl GridField {
    pub fn new(domain: Domain, eps: f64, potential: Potential, values: Vec<f64>) -> Result<Self, GlError> {
        let m = potential.manifold().ambient_dim();
        if values.len() != domain.node_count() * m {
            return Err(GlError::Config(format!(
                "field has {} values, expected {} nodes × {m}",
                values.len(),
                domain.node_count()
            )));
        }
        if !(eps > 0.0 && eps < domain.min_extent()) {
            return Err(GlError::Config(format!(
                "ε = {eps} must be positive and below the smallest box extent {}",
                domain.min_extent()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GlError::Config(format!("non-finite value at offset {i}")));
        }
        Ok(Self { domain, m, eps, potential, values, bc: None })
    }

    /// Field evaluating `g` at every node.
    pub fn from_fn(
        domain: Domain,
        eps: f64,
        potential: Potential,
        g: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Result<Self, GlError> {
        let m = potential.manifold().ambient_dim();
        let mut values = Vec::with_capacity(domain.node_count() * m);
        for v in 0..domain.node_count() {
            let x = domain.node_coord(&domain.node_multi(v));
            let y = g(&x[..domain.dim]);
            debug_assert_eq!(y.len(), m);
            values.extend_from_slice(&y);
        }
        Self::new(domain, eps, potential, values)
    }

    pub fn constant(domain: Domain, eps: f64, potential: Potential, y: &[f64]) -> Result<Self, GlError> {
        let values = y.iter().copied().cycle().take(domain.node_count() * y.len()).collect();
        Self::new(domain, eps, potential, values)
    }

    pub fn node(&self, v: usize) -> &[f64] {
        &self.values[v * self.m..(v + 1) * self.m]
    }

    pub fn node_mut(&mut self, v: usize) -> &mut [f64] {
        &mut self.values[v * self.m..(v + 1) * self.m]
    }

    pub fn h(&self) -> f64 {
        self.domain.h
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    /// Multilinear interpolation at `x` (clamped to the box).
    pub fn sample(&self, x: &[f64], out: &mut [f64]) {
        interpolate(&self.domain, self.m, &self.values, x, out)
    }

    /// Copy with the values replaced.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self { values, ..self.clone() }
    }
}

/// Multilinear interpolation of a nodal array with `m` components per node.
pub fn interpolate(domain: &Domain, m: usize, values: &[f64], x: &[f64], out: &mut [f64]) {
    let n = domain.nodes_per_axis();
    let strides = domain.node_strides();
    let mut base = 0;
    let mut frac = [0.0; 3];
    for a in 0..domain.dim {
        let t = ((x[a] - domain.lower[a]) / domain.h).clamp(0.0, domain.counts[a] as f64);
        let i = (t.floor() as usize).min(n[a] - 2);
        frac[a] = t - i as f64;
        base += i * strides[a];
    }
    out.iter_mut().for_each(|o| *o = 0.0);
    for corner in 0..(1usize << domain.dim) {
        let mut w = 1.0;
        let mut off = base;
        for a in 0..domain.dim {
            if corner >> a & 1 == 1 {
                w *= frac[a];
                off += strides[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        if w != 0.0 {
            for c in 0..m {
                out[c] += w * values[off * m + c];
            }
        }
    }
}
