//! Discrete energy on cells, its exact gradient, and the Euler–Lagrange residual.
//!
//! Per cell, `e = ½ Σ_a mean_{edges ∥ a} |Δ_a u|²/h² + mean_{corners} f(u)/ε²`.
//! Summed over cells this equals a node/edge sum in which an edge or node is
//! weighted by the fraction of its cells present, i.e. by `½` per axis on which
//! it lies on the boundary. At interior nodes the gradient is therefore
//! `hⁿ (−Δ_h u + ε⁻² Df(u))` with the `(2n+1)`-point Laplacian.

use rayon::prelude::*;

use crate::manifold::PotentialField;

use super::{Domain, GridField};

const MAX_M: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub total: f64,
    pub dirichlet: f64,
    pub potential: f64,
}

/// Node shape padded to three axes (a 2D grid gets a trailing axis of length 1).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Shape {
    pub n: [usize; 3],
    pub s: [usize; 3],
    pub real: [bool; 3],
    pub dim: usize,
    pub h: f64,
}

impl Shape {
    pub fn of(d: &Domain) -> Self {
        let mut n = [1; 3];
        let mut real = [false; 3];
        for a in 0..d.dim {
            n[a] = d.counts[a] + 1;
            real[a] = true;
        }
        Self {
            n,
            s: [n[1] * n[2], n[2], 1],
            real,
            dim: d.dim,
            h: d.h,
        }
    }

    #[inline]
    fn half(&self, a: usize, i: usize) -> f64 {
        if self.real[a] && (i == 0 || i == self.n[a] - 1) {
            0.5
        } else {
            1.0
        }
    }
}

/// Energy (Dirichlet and potential parts) and, optionally, its gradient with
/// respect to every nodal value (boundary nodes included).
pub(crate) fn evaluate<P: PotentialField + ?Sized>(
    domain: &Domain,
    m: usize,
    eps: f64,
    pot: &P,
    u: &[f64],
    grad: Option<&mut [f64]>,
) -> Energy {
    let sh = Shape::of(domain);
    let slice = sh.s[0] * m;
    let cd = sh.h.powi(sh.dim as i32 - 2);
    let cp = sh.h.powi(sh.dim as i32) / (eps * eps);
    let parts: Vec<(f64, f64)> = match grad {
        Some(g) => g
            .par_chunks_mut(slice)
            .enumerate()
            .map(|(i, gs)| slice_kernel(&sh, m, cd, cp, pot, u, i, Some(gs)))
            .collect(),
        None => (0..sh.n[0])
            .into_par_iter()
            .map(|i| slice_kernel(&sh, m, cd, cp, pot, u, i, None))
            .collect(),
    };
    let (mut dir, mut potl) = (0.0, 0.0);
    for (a, b) in parts {
        dir += a;
        potl += b;
    }
    Energy { total: dir + potl, dirichlet: dir, potential: potl }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn slice_kernel<P: PotentialField + ?Sized>(
    sh: &Shape,
    m: usize,
    cd: f64,
    cp: f64,
    pot: &P,
    u: &[f64],
    i: usize,
    mut g: Option<&mut [f64]>,
) -> (f64, f64) {
    let mut dir = 0.0;
    let mut potl = 0.0;
    let mut df = [0.0; MAX_M];
    let hi = sh.half(0, i);
    for j in 0..sh.n[1] {
        let hj = sh.half(1, j);
        for k in 0..sh.n[2] {
            let hk = sh.half(2, k);
            let v = i * sh.s[0] + j * sh.s[1] + k;
            let wv = hi * hj * hk;
            let uv = &u[v * m..(v + 1) * m];
            let f = pot.value_grad(uv, &mut df[..m]);
            potl += cp * wv * f;
            let local = v - i * sh.s[0];
            let mut gv = [0.0; MAX_M];
            if g.is_some() {
                for c in 0..m {
                    gv[c] = cp * wv * df[c];
                }
            }
            let idx = [i, j, k];
            let hs = [hi, hj, hk];
            for a in 0..3 {
                if !sh.real[a] {
                    continue;
                }
                let we = wv / hs[a];
                if idx[a] + 1 < sh.n[a] {
                    let w = v + sh.s[a];
                    let uw = &u[w * m..(w + 1) * m];
                    let mut d2 = 0.0;
                    for c in 0..m {
                        let d = uv[c] - uw[c];
                        d2 += d * d;
                        gv[c] += cd * we * d;
                    }
                    dir += 0.5 * cd * we * d2;
                }
                if g.is_some() && idx[a] > 0 {
                    let w = v - sh.s[a];
                    for c in 0..m {
                        gv[c] += cd * we * (uv[c] - u[w * m + c]);
                    }
                }
            }
            if let Some(gs) = g.as_deref_mut() {
                gs[local * m..(local + 1) * m].copy_from_slice(&gv[..m]);
            }
        }
    }
    (dir, potl)
}

/// Total discrete energy.
pub fn energy(field: &GridField) -> Energy {
    evaluate(&field.domain, field.m, field.eps, &field.potential, &field.values, None)
}

/// Energy together with its gradient (all nodes).
pub fn energy_gradient(field: &GridField, grad: &mut [f64]) -> Energy {
    evaluate(&field.domain, field.m, field.eps, &field.potential, &field.values, Some(grad))
}

/// Per-cell energy density `e_ε` and cell-averaged first differences.
#[derive(Debug, Clone, PartialEq)]
pub struct CellData {
    /// `e_ε` per cell (not multiplied by `hⁿ`).
    pub density: Vec<f64>,
    /// The `f(u)/ε²` part of `density`.
    pub potential: Vec<f64>,
    /// Per cell, `n × m` averaged derivatives `∂_a u^c`, axis-major.
    pub gradient: Vec<f64>,
    pub dim: usize,
    pub m: usize,
}

impl CellData {
    pub fn total(&self, h: f64) -> f64 {
        self.density.iter().sum::<f64>() * h.powi(self.dim as i32)
    }

    pub fn cell_gradient(&self, cell: usize) -> &[f64] {
        let k = self.dim * self.m;
        &self.gradient[cell * k..(cell + 1) * k]
    }
}

pub fn cell_data(field: &GridField) -> CellData {
    let d = &field.domain;
    let m = field.m;
    let sh = Shape::of(d);
    let dim = d.dim;
    let mut cells = [1usize; 3];
    cells[..dim].copy_from_slice(&d.counts);
    let per = cells[1] * cells[2];
    let nm = dim * m;
    let mut density = vec![0.0; d.cell_count()];
    let mut potential = vec![0.0; d.cell_count()];
    let mut gradient = vec![0.0; d.cell_count() * nm];
    let h = d.h;
    let eps2 = field.eps * field.eps;
    let u = &field.values;
    let corners = 1usize << dim;
    let edges = (corners / 2) as f64;
    density
        .par_chunks_mut(per)
        .zip(potential.par_chunks_mut(per))
        .zip(gradient.par_chunks_mut(per * nm))
        .enumerate()
        .for_each(|(i, ((ds, ps), gs))| {
            let mut df = [0.0; MAX_M];
            for j in 0..cells[1] {
                for k in 0..cells[2] {
                    let local = j * cells[2] + k;
                    let base = i * sh.s[0] + j * sh.s[1] + k * sh.s[2];
                    let mut fsum = 0.0;
                    let mut dsum = 0.0;
                    let gcell = &mut gs[local * nm..(local + 1) * nm];
                    for corner in 0..corners {
                        let off = corner_offset(&sh, corner);
                        let v = base + off;
                        fsum += field.potential.value_grad(&u[v * m..(v + 1) * m], &mut df[..m]);
                        for a in 0..dim {
                            if corner >> a & 1 == 0 {
                                let w = v + sh.s[a];
                                for c in 0..m {
                                    let diff = (u[w * m + c] - u[v * m + c]) / h;
                                    dsum += diff * diff;
                                    gcell[a * m + c] += diff / edges;
                                }
                            }
                        }
                    }
                    ps[local] = fsum / (corners as f64 * eps2);
                    ds[local] = 0.5 * dsum / edges + ps[local];
                }
            }
        });
    CellData { density, potential, gradient, dim, m }
}

#[inline]
fn corner_offset(sh: &Shape, corner: usize) -> usize {
    (0..sh.dim).filter(|a| corner >> a & 1 == 1).map(|a| sh.s[a]).sum()
}

/// `Δ_h u − ε⁻² Df(u)` at interior nodes (zero on the boundary) and its sup-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub values: Vec<f64>,
    pub sup: f64,
}

pub fn el_residual(field: &GridField) -> Residual {
    let mut g = vec![0.0; field.values.len()];
    energy_gradient(field, &mut g);
    let hn = field.h().powi(field.dim() as i32);
    let d = &field.domain;
    let m = field.m;
    let mut sup: f64 = 0.0;
    for v in 0..d.node_count() {
        let interior = !d.is_boundary_node(&d.node_multi(v));
        for c in 0..m {
            let r = if interior { -g[v * m + c] / hn } else { 0.0 };
            g[v * m + c] = r;
            sup = sup.max(r.abs());
        }
    }
    Residual { values: g, sup }
}
