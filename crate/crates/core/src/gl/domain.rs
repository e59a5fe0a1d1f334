use serde::{Deserialize, Serialize};

use super::GlError;

pub const MIN_COUNT: usize = 16;

/// Axis-aligned box split into `counts[a]` cells of side `h` along each axis.
/// Nodes sit at cell corners, so axis `a` carries `counts[a] + 1` nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub dim: usize,
    pub lower: Vec<f64>,
    pub extent: Vec<f64>,
    pub counts: Vec<usize>,
    pub h: f64,
}

impl Domain {
    pub fn new(lower: Vec<f64>, extent: Vec<f64>, counts: Vec<usize>) -> Result<Self, GlError> {
        let dim = counts.len();
        if !(dim == 2 || dim == 3) || lower.len() != dim || extent.len() != dim {
            return Err(GlError::Config(format!(
                "domain needs 2 or 3 axes with matching lower/extent/counts, got {}/{}/{}",
                lower.len(),
                extent.len(),
                dim
            )));
        }
        if let Some(c) = counts.iter().find(|&&c| c < MIN_COUNT) {
            return Err(GlError::Config(format!("grid count {c} is below the minimum {MIN_COUNT}")));
        }
        if extent.iter().any(|e| !(e.is_finite() && *e > 0.0)) || lower.iter().any(|l| !l.is_finite()) {
            return Err(GlError::Config("box extents must be positive and finite".into()));
        }
        let h = extent[0] / counts[0] as f64;
        for a in 1..dim {
            let ha = extent[a] / counts[a] as f64;
            if (ha - h).abs() > 1e-12 * h {
                return Err(GlError::Config(format!(
                    "spacing must be uniform: axis 0 has h={h}, axis {a} has h={ha}"
                )));
            }
        }
        Ok(Self { dim, lower, extent, counts, h })
    }

    /// The box `[-half, half]^dim` with `count` cells per axis.
    pub fn cube(dim: usize, half: f64, count: usize) -> Result<Self, GlError> {
        Self::new(vec![-half; dim], vec![2.0 * half; dim], vec![count; dim])
    }

    pub fn nodes_per_axis(&self) -> Vec<usize> {
        self.counts.iter().map(|c| c + 1).collect()
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().map(|c| c + 1).product()
    }

    pub fn cell_count(&self) -> usize {
        self.counts.iter().product()
    }

    /// Node strides (in nodes, not values); axis 0 is slowest.
    pub fn node_strides(&self) -> Vec<usize> {
        strides(&self.nodes_per_axis())
    }

    pub fn cell_strides(&self) -> Vec<usize> {
        strides(&self.counts)
    }

    pub fn node_multi(&self, mut node: usize) -> [usize; 3] {
        let n = self.nodes_per_axis();
        let mut idx = [0; 3];
        for a in (0..self.dim).rev() {
            idx[a] = node % n[a];
            node /= n[a];
        }
        idx
    }

    pub fn node_flat(&self, idx: &[usize]) -> usize {
        let n = self.nodes_per_axis();
        idx.iter().zip(&n).fold(0, |acc, (i, na)| acc * na + i)
    }

    pub fn node_coord(&self, idx: &[usize]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.lower[a] + idx[a] as f64 * self.h;
        }
        x
    }

    pub fn cell_multi(&self, mut cell: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.dim).rev() {
            idx[a] = cell % self.counts[a];
            cell /= self.counts[a];
        }
        idx
    }

    pub fn cell_center(&self, idx: &[usize]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.lower[a] + (idx[a] as f64 + 0.5) * self.h;
        }
        x
    }

    pub fn is_boundary_node(&self, idx: &[usize]) -> bool {
        (0..self.dim).any(|a| idx[a] == 0 || idx[a] == self.counts[a])
    }

    /// Flat indices of all boundary nodes, ascending.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&v| self.is_boundary_node(&self.node_multi(v)))
            .collect()
    }

    /// Lebesgue measure of the box.
    pub fn volume(&self) -> f64 {
        self.extent.iter().product()
    }

    pub fn upper(&self, a: usize) -> f64 {
        self.lower[a] + self.extent[a]
    }

    /// Distance from `x` to the boundary of the box.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        (0..self.dim)
            .map(|a| (x[a] - self.lower[a]).min(self.upper(a) - x[a]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_extent(&self) -> f64 {
        self.extent.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn strides(n: &[usize]) -> Vec<usize> {
    let mut s = vec![1; n.len()];
    for a in (0..n.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * n[a + 1];
    }
    s
}
