//! Deterministic starting fields: discrete harmonic extension of the boundary
//! data blended toward the manifold, and the explicit degree-`d` competitor.

use rayon::prelude::*;

use crate::manifold::{ManifoldId, Potential, PotentialField};

use super::energy::Shape;
use super::{DirichletBC, Domain, GlError, GridField};

/// Solves `Δ_h v = 0` inside with `v = g` on the boundary, component by
/// component (matrix-free conjugate gradients).
pub fn harmonic_extension(bc: &DirichletBC, tol: f64, max_iter: usize) -> Vec<f64> {
    let d = &bc.domain;
    let m = bc.m();
    let full = bc.full_values();
    let sh = Shape::of(d);
    let nn = d.node_count();
    let interior: Vec<bool> = (0..nn).map(|v| !d.is_boundary_node(&d.node_multi(v))).collect();
    let mut out = full.clone();
    for c in 0..m {
        let g: Vec<f64> = (0..nn).map(|v| full[v * m + c]).collect();
        // b = boundary contributions moved to the right-hand side of A x = b, A = −Δ_h h²
        let mut b = vec![0.0; nn];
        apply_neg_laplacian(&sh, &interior, &g, &mut b, true);
        b.iter_mut().for_each(|x| *x = -*x);
        let x = cg(&sh, &interior, &b, tol, max_iter);
        for v in 0..nn {
            if interior[v] {
                out[v * m + c] = x[v];
            }
        }
    }
    out
}

/// `y = A x` restricted to interior rows, `A = 2n I − Σ neighbours`. With
/// `boundary_only`, only couplings to boundary nodes are applied (used to form
/// the right-hand side).
fn apply_neg_laplacian(sh: &Shape, interior: &[bool], x: &[f64], y: &mut [f64], boundary_only: bool) {
    let slice = sh.s[0];
    y.par_chunks_mut(slice).enumerate().for_each(|(i, ys)| {
        for (local, yv) in ys.iter_mut().enumerate() {
            let v = i * slice + local;
            if !interior[v] {
                *yv = 0.0;
                continue;
            }
            let mut acc = if boundary_only { 0.0 } else { 2.0 * sh.dim as f64 * x[v] };
            for a in 0..sh.dim {
                for w in [v - sh.s[a], v + sh.s[a]] {
                    if boundary_only != interior[w] {
                        acc -= x[w];
                    }
                }
            }
            *yv = acc;
        }
    });
}

fn cg(sh: &Shape, interior: &[bool], b: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        a.par_chunks(sh.s[0])
            .zip(b.par_chunks(sh.s[0]))
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    };
    let mut rr = dot(&r, &r);
    let stop = tol * tol * rr.max(1e-300);
    for _ in 0..max_iter {
        if rr <= stop || rr == 0.0 {
            break;
        }
        apply_neg_laplacian(sh, interior, &p, &mut ap, false);
        let alpha = rr / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    x
}

/// Harmonic extension, then `u = w Π(v) + (1 − w) v` with
/// `w = clamp(1 − dist(v, N)/δ_N, 0, 1)`; boundary values attached.
pub fn initial_guess(bc: &DirichletBC, eps: f64) -> Result<GridField, GlError> {
    let v = harmonic_extension(bc, 1e-10, 20 * bc.domain.node_count().max(1000));
    let manifold = *bc.potential.manifold();
    let m = manifold.ambient_dim();
    let reach = manifold.reach();
    let mut u = v;
    let mut p = vec![0.0; m];
    for y in u.chunks_exact_mut(m) {
        let dist = manifold.distance(y);
        let w = (1.0 - dist / reach).clamp(0.0, 1.0);
        if w > 0.0 && manifold.project_into(y, &mut p).is_ok() {
            for c in 0..m {
                y[c] = w * p[c] + (1.0 - w) * y[c];
            }
        }
    }
    let mut field = GridField::new(bc.domain.clone(), eps, bc.potential.clone(), u)?;
    bc.apply(&mut field)?;
    Ok(field)
}

/// `w = η_ε(ρ)(cos dθ, sin dθ)`, `η_ε(ρ) = min(ρ/ε, 1)`, centred in a 2D box
/// with a circle-valued potential; the constant `(1, 0)` for `d = 0`.
pub fn degree_ansatz_2d(d: i64, eps: f64, domain: &Domain, potential: &Potential) -> Result<GridField, GlError> {
    if domain.dim != 2 || potential.manifold().id() != ManifoldId::Circle {
        return Err(GlError::Config("the degree ansatz needs a 2D grid and a circle target".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(GlError::Config(format!("ansatz needs 0 < ε < 1/2, got {eps}")));
    }
    let c = [
        domain.lower[0] + 0.5 * domain.extent[0],
        domain.lower[1] + 0.5 * domain.extent[1],
    ];
    GridField::from_fn(domain.clone(), eps, potential.clone(), |x| {
        if d == 0 {
            return vec![1.0, 0.0];
        }
        let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
        let rho = (dx * dx + dy * dy).sqrt();
        let eta = (rho / eps).min(1.0);
        let t = d as f64 * dy.atan2(dx);
        vec![eta * t.cos(), eta * t.sin()]
    })
}
