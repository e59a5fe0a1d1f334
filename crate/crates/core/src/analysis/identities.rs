//! Pohozaev identity on balls and the stress-energy pairing with test vector fields.
//!
//! The Pohozaev residual is evaluated on the union `U` of cells whose centers
//! lie in the ball. `U` is a Lipschitz polytope, so the identity holds on it with
//! outer normal `±e_a` on each face; face values are averages of the two
//! adjacent cells.

use serde::{Deserialize, Serialize};

use super::{check_ball, for_cells_in_ball, AnalysisError, FieldAnalysis, INCLUSION_SLACK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohozaevResidual {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `(n−2)/2 ∫|∇u|² + n ε⁻² ∫ f(u)` over `U`.
    pub lhs: f64,
    /// `∫_∂U (y−x)·ν e_ε − ((y−x)·∇u) : ∂_ν u`.
    pub rhs: f64,
    pub absolute: f64,
    /// `absolute / E_ε(u, U)`.
    pub relative: f64,
    pub ball_energy: f64,
    pub advisory: bool,
}

pub fn pohozaev_residual(a: &FieldAnalysis, x: &[f64], r: f64) -> Result<PohozaevResidual, AnalysisError> {
    let d = a.domain();
    check_ball(d, x, r)?;
    let n = d.dim;
    let m = a.field.m;
    let h = d.h;
    let hn = a.cell_volume();
    let hf = h.powi(n as i32 - 1);
    let cells = &a.cells;
    let strides = d.cell_strides();
    let r2 = r * r * (1.0 + INCLUSION_SLACK);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut ball = 0.0;
    let mut gf = [0.0; 15];
    for_cells_in_ball(d, x, r, |c, center| {
        let e = cells.density[c];
        let p = cells.potential[c];
        lhs += ((n as f64 - 2.0) * (e - p) + n as f64 * p) * hn;
        ball += e * hn;
        let idx = d.cell_multi(c);
        let g = cells.cell_gradient(c);
        for ax in 0..n {
            for s in [-1.0f64, 1.0] {
                let mut nb = center;
                nb[ax] += s * h;
                let d2: f64 = (0..n).map(|b| (nb[b] - x[b]).powi(2)).sum();
                let exists = if s < 0.0 { idx[ax] > 0 } else { idx[ax] + 1 < d.counts[ax] };
                if exists && d2 <= r2 {
                    continue;
                }
                let ef = if exists {
                    let cn = if s < 0.0 { c - strides[ax] } else { c + strides[ax] };
                    let gn = cells.cell_gradient(cn);
                    for (k, v) in gf[..n * m].iter_mut().enumerate() {
                        *v = 0.5 * (g[k] + gn[k]);
                    }
                    0.5 * (e + cells.density[cn])
                } else {
                    gf[..n * m].copy_from_slice(g);
                    e
                };
                let mut yx = [0.0; 3];
                for b in 0..n {
                    yx[b] = center[b] - x[b];
                }
                yx[ax] += s * 0.5 * h;
                let mut flux = 0.0;
                for k in 0..n {
                    for comp in 0..m {
                        flux += yx[k] * s * gf[ax * m + comp] * gf[k * m + comp];
                    }
                }
                rhs += (s * yx[ax] * ef - flux) * hf;
            }
        }
    });
    let absolute = (lhs - rhs).abs();
    Ok(PohozaevResidual {
        center: x.to_vec(),
        radius: r,
        lhs,
        rhs,
        absolute,
        relative: if ball > 0.0 { absolute / ball } else { 0.0 },
        ball_energy: ball,
        advisory: !a.critical,
    })
}

/// Per-cell `A_{jk} = (e_ε δ_{jk} − ∂_j u : ∂_k u)/|log ε|`, row-major `n × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StressTensorField {
    pub dim: usize,
    pub tensors: Vec<f64>,
    /// `μ_ε` density with respect to Lebesgue measure, `e_ε/|log ε|`.
    pub density: Vec<f64>,
}

impl StressTensorField {
    pub fn at(&self, cell: usize) -> &[f64] {
        let k = self.dim * self.dim;
        &self.tensors[cell * k..(cell + 1) * k]
    }

    pub fn cell_count(&self) -> usize {
        self.density.len()
    }
}

pub fn stress_tensor(a: &FieldAnalysis) -> Result<StressTensorField, AnalysisError> {
    let eps = a.field.eps;
    if !(eps < 1.0) {
        return Err(AnalysisError::Config(format!("ε = {eps} must be below 1 for |log ε| normalization")));
    }
    let log = eps.ln().abs();
    let n = a.dim();
    let m = a.field.m;
    let cells = &a.cells;
    let count = cells.density.len();
    let mut tensors = vec![0.0; count * n * n];
    for c in 0..count {
        let g = cells.cell_gradient(c);
        let e = cells.density[c];
        let t = &mut tensors[c * n * n..(c + 1) * n * n];
        for j in 0..n {
            for k in j..n {
                let gg: f64 = (0..m).map(|i| g[j * m + i] * g[k * m + i]).sum();
                let v = (if j == k { e } else { 0.0 } - gg) / log;
                t[j * n + k] = v;
                t[k * n + j] = v;
            }
        }
    }
    let density = cells.density.iter().map(|e| e / log).collect();
    Ok(StressTensorField { dim: n, tensors, density })
}

/// Built-in compactly supported vector fields `φ` built on the bump
/// `ψ(y) = (1 − |y−c|²/ρ²)³₊`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestField {
    /// `φ = ξ ψ`.
    Translation { center: Vec<f64>, radius: f64, direction: Vec<f64> },
    /// `φ = (y − c) ψ`.
    Dilation { center: Vec<f64>, radius: f64 },
}

impl TestField {
    fn center_radius(&self) -> (&[f64], f64) {
        match self {
            Self::Translation { center, radius, .. } | Self::Dilation { center, radius } => (center, *radius),
        }
    }

    /// Checks that the support is a compact subset of the open domain.
    pub fn validate(&self, domain: &crate::gl::Domain) -> Result<(), AnalysisError> {
        let (c, rho) = self.center_radius();
        if c.len() != domain.dim {
            return Err(AnalysisError::Interface(format!("test field center has {} coordinates", c.len())));
        }
        if let Self::Translation { direction, .. } = self {
            if direction.len() != domain.dim || direction.iter().all(|v| *v == 0.0) {
                return Err(AnalysisError::Interface("translation direction must be a nonzero vector".into()));
            }
        }
        let dist = domain.distance_to_boundary(c);
        if !(rho > 0.0 && rho < dist) {
            return Err(AnalysisError::Interface(format!(
                "test field support (radius {rho}) is not compactly contained in the domain (distance {dist})"
            )));
        }
        Ok(())
    }

    /// `J[j][k] = ∂_k φ_j(y)`.
    pub fn jacobian(&self, y: &[f64]) -> [[f64; 3]; 3] {
        let (c, rho) = self.center_radius();
        let n = c.len();
        let mut z = [0.0; 3];
        for a in 0..n {
            z[a] = y[a] - c[a];
        }
        let s = (0..n).map(|a| z[a] * z[a]).sum::<f64>() / (rho * rho);
        let mut j = [[0.0; 3]; 3];
        if s >= 1.0 {
            return j;
        }
        let psi = (1.0 - s).powi(3);
        let dpsi = |k: usize| -6.0 * (1.0 - s).powi(2) * z[k] / (rho * rho);
        match self {
            Self::Translation { direction, .. } => {
                for a in 0..n {
                    for k in 0..n {
                        j[a][k] = direction[a] * dpsi(k);
                    }
                }
            }
            Self::Dilation { .. } => {
                for a in 0..n {
                    for k in 0..n {
                        j[a][k] = z[a] * dpsi(k) + if a == k { psi } else { 0.0 };
                    }
                }
            }
        }
        j
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityResidual {
    pub test: TestField,
    /// `∫ A_{jk} ∂_k φ_j dx`.
    pub value: f64,
    /// `∫ |A_{jk} ∂_k φ_j| dx`.
    pub scale: f64,
    pub relative: f64,
    pub advisory: bool,
}

pub fn stationarity_residual(
    a: &FieldAnalysis,
    tests: &[TestField],
) -> Result<Vec<StationarityResidual>, AnalysisError> {
    for t in tests {
        t.validate(a.domain())?;
    }
    let stress = stress_tensor(a)?;
    let d = a.domain();
    let n = d.dim;
    let hn = a.cell_volume();
    Ok(tests
        .iter()
        .map(|t| {
            let (c, rho) = t.center_radius();
            let (mut value, mut scale) = (0.0, 0.0);
            for_cells_in_ball(d, c, rho, |cell, y| {
                let jac = t.jacobian(&y[..n]);
                let at = stress.at(cell);
                for j in 0..n {
                    for k in 0..n {
                        let v = at[j * n + k] * jac[j][k];
                        value += v;
                        scale += v.abs();
                    }
                }
            });
            value *= hn;
            scale *= hn;
            StationarityResidual {
                test: t.clone(),
                value,
                scale,
                relative: if scale > 0.0 { value.abs() / scale } else { 0.0 },
                advisory: !a.critical,
            }
        })
        .collect())
}
