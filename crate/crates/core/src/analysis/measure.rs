//! The normalized energy measure `μ_ε = e_ε(u) dx / |log ε|` and its densities.

use serde::{Deserialize, Serialize};

use crate::gl::{Domain, GridField};

use super::{check_ball, for_cells_in_ball, omega, worst_decrease, AnalysisError, FieldAnalysis};

/// Per-cell masses `e_ε hⁿ / |log ε|`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMeasure {
    pub domain: Domain,
    pub mass: Vec<f64>,
    pub eps: f64,
}

impl EnergyMeasure {
    pub fn from_analysis(a: &FieldAnalysis) -> Result<Self, AnalysisError> {
        let eps = a.field.eps;
        let log = eps.ln().abs();
        if !(eps < 1.0) {
            return Err(AnalysisError::Config(format!("ε = {eps} must be below 1 for |log ε| normalization")));
        }
        let scale = a.cell_volume() / log;
        let mass = a.cells.density.iter().map(|e| e * scale).collect();
        Ok(Self { domain: a.domain().clone(), mass, eps })
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `μ(B̄_r(x))` by cell-center inclusion.
    pub fn ball(&self, x: &[f64], r: f64) -> f64 {
        let mut s = 0.0;
        for_cells_in_ball(&self.domain, x, r, |c, _| s += self.mass[c]);
        s
    }

    /// Mass of cells whose center lies in the half-open box `[lo, hi)`.
    pub fn box_mass(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let d = &self.domain;
        let mut s = 0.0;
        for (c, m) in self.mass.iter().enumerate() {
            let x = d.cell_center(&d.cell_multi(c));
            if (0..d.dim).all(|a| x[a] >= lo[a] && x[a] < hi[a]) {
                s += m;
            }
        }
        s
    }
}

pub fn energy_measure(field: &GridField) -> Result<EnergyMeasure, AnalysisError> {
    EnergyMeasure::from_analysis(&FieldAnalysis::new(field))
}

/// `Θ_r = μ(B̄_r(x)) / (ω_{n−2} r^{n−2})`.
pub fn density_at(measure: &EnergyMeasure, x: &[f64], r: f64) -> Result<f64, AnalysisError> {
    check_ball(&measure.domain, x, r)?;
    let n = measure.domain.dim as i32;
    Ok(measure.ball(x, r) / (omega(measure.domain.dim) * r.powi(n - 2)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest drop between consecutive radii (0 when non-decreasing).
    pub worst_decrease: f64,
    /// The limit measure is monotone; at finite ε this is a trend only.
    pub nondecreasing: bool,
}

pub fn density_profile(measure: &EnergyMeasure, x: &[f64], radii: &[f64]) -> Result<DensityProfile, AnalysisError> {
    let values = radii.iter().map(|&r| density_at(measure, x, r)).collect::<Result<Vec<_>, _>>()?;
    let w = worst_decrease(&values);
    Ok(DensityProfile { center: x.to_vec(), radii: radii.to_vec(), values, worst_decrease: w, nondecreasing: w == 0.0 })
}
