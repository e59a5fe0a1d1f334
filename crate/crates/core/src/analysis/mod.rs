//! Diagnostics on discrete fields: ball energies, the normalized energy
//! measure, monotonicity, the Pohozaev and stress-energy identities,
//! clearing-out extraction, densities and quantization.
//!
//! Ball quantities use cell-center inclusion in the closed ball.

mod fits;
mod identities;
mod measure;
mod monotonicity;
mod quantization;
mod record;
mod singular;

use thiserror::Error;

use crate::gl::{cell_data, el_residual, CellData, Domain, GridField};

pub use fits::{fit_log_law, lower_bound_quantity, LogFit, LowerBoundSample};
pub use identities::{
    pohozaev_residual, stationarity_residual, stress_tensor, PohozaevResidual, StationarityResidual,
    StressTensorField, TestField,
};
pub use measure::{density_at, density_profile, energy_measure, DensityProfile, EnergyMeasure};
pub use monotonicity::{fit_quadrature_constant, monotonicity_profile, worst_decrease, MonotonicityProfile};
pub use quantization::{quantization_report, NormSource, NormValue, QuantizationRecord};
pub use record::{write_profile_csv, DiagnosticRecord};
pub use singular::{
    ball_energies, clearing_out_constant, extract_singular_set, ClearingOut, Segment, SingularSetEstimate,
};

/// Residual sup-norm below which a field counts as a critical point.
pub const CRITICAL_RESIDUAL: f64 = 1e-3;

/// `ω_{n−2}`, the volume of the unit ball in `R^{n−2}`.
pub fn omega(dim: usize) -> f64 {
    match dim {
        2 => 1.0,
        3 => 2.0,
        _ => std::f64::consts::PI,
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("interface: {0}")]
    Interface(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A field with its cell data and criticality status computed once.
#[derive(Debug, Clone)]
pub struct FieldAnalysis<'a> {
    pub field: &'a GridField,
    pub cells: CellData,
    pub residual_sup: f64,
    /// `residual_sup ≤ threshold`; results on non-critical fields are advisory.
    pub critical: bool,
}

impl<'a> FieldAnalysis<'a> {
    pub fn new(field: &'a GridField) -> Self {
        Self::with_threshold(field, CRITICAL_RESIDUAL)
    }

    pub fn with_threshold(field: &'a GridField, threshold: f64) -> Self {
        let residual_sup = el_residual(field).sup;
        Self { field, cells: cell_data(field), residual_sup, critical: residual_sup <= threshold }
    }

    pub fn domain(&self) -> &Domain {
        &self.field.domain
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn h(&self) -> f64 {
        self.field.h()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim() as i32)
    }

    /// `E_ε(u, B_r(x))`.
    pub fn ball_energy(&self, x: &[f64], r: f64) -> f64 {
        let mut e = 0.0;
        for_cells_in_ball(self.domain(), x, r, |c, _| e += self.cells.density[c]);
        e * self.cell_volume()
    }

    /// `E_ε(u, B_r(x))` after checking that the ball lies in the domain.
    pub fn checked_ball_energy(&self, x: &[f64], r: f64) -> Result<f64, AnalysisError> {
        check_ball(self.domain(), x, r)?;
        Ok(self.ball_energy(x, r))
    }
}

pub(crate) const INCLUSION_SLACK: f64 = 1e-12;

pub(crate) fn check_ball(domain: &Domain, x: &[f64], r: f64) -> Result<(), AnalysisError> {
    if x.len() != domain.dim {
        return Err(AnalysisError::Geometry(format!("center has {} coordinates, domain is {}D", x.len(), domain.dim)));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(AnalysisError::Geometry(format!("radius {r} must be positive")));
    }
    let d = domain.distance_to_boundary(x);
    if r > d * (1.0 + INCLUSION_SLACK) {
        return Err(AnalysisError::Geometry(format!("radius {r} exceeds the distance {d} to the boundary")));
    }
    Ok(())
}

/// Visits cells whose center lies in the closed ball, in increasing flat index.
pub(crate) fn for_cells_in_ball(domain: &Domain, x: &[f64], r: f64, mut visit: impl FnMut(usize, [f64; 3])) {
    let dim = domain.dim;
    let h = domain.h;
    let r2 = r * r * (1.0 + INCLUSION_SLACK);
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    for a in 0..dim {
        let t0 = ((x[a] - r - domain.lower[a]) / h - 0.5).floor();
        let t1 = ((x[a] + r - domain.lower[a]) / h - 0.5).ceil();
        let top = domain.counts[a] as f64 - 1.0;
        if t1 < 0.0 || t0 > top {
            return;
        }
        lo[a] = t0.max(0.0) as usize;
        hi[a] = t1.min(top) as usize;
    }
    let strides = domain.cell_strides();
    let (i1, j1, k1) = (hi[0], if dim > 1 { hi[1] } else { 0 }, if dim > 2 { hi[2] } else { 0 });
    for i in lo[0]..=i1 {
        for j in lo[1]..=j1 {
            for k in lo[2]..=k1 {
                let idx = [i, j, k];
                let c = domain.cell_center(&idx[..dim]);
                let d2: f64 = (0..dim).map(|a| (c[a] - x[a]).powi(2)).sum();
                if d2 <= r2 {
                    let flat: usize = (0..dim).map(|a| idx[a] * strides[a]).sum();
                    visit(flat, c);
                }
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::gl::{Domain, GridField};
    use crate::manifold::{EmbeddedManifold, Potential};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn quartic() -> Potential {
        Potential::gl_quartic(EmbeddedManifold::circle()).unwrap()
    }

    pub fn constant(dim: usize, count: usize) -> GridField {
        GridField::constant(Domain::cube(dim, 1.0, count).unwrap(), 0.1, quartic(), &[1.0, 0.0]).unwrap()
    }

    pub fn random(dim: usize, count: usize, seed: u64) -> GridField {
        let d = Domain::cube(dim, 1.0, count).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..d.node_count() * 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        GridField::new(d, 0.1, quartic(), vals).unwrap()
    }

    /// `tanh(ρ/ε) (x₁, x₂)/ρ` with `ρ = |(x₁, x₂)|` on `[-1,1]ⁿ`.
    pub fn vortex(dim: usize, count: usize, eps: f64) -> GridField {
        let d = Domain::cube(dim, 1.0, count).unwrap();
        GridField::from_fn(d, eps, quartic(), |x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r == 0.0 {
                return vec![0.0, 0.0];
            }
            let s = (r / eps).tanh();
            vec![s * x[0] / r, s * x[1] / r]
        })
        .unwrap()
    }
}
