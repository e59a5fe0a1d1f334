//! Nearest admissible density value `|σ|_*` for measured densities.

use serde::{Deserialize, Serialize};

use crate::homotopy::{circle_norm, NormTable};

use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum NormSource {
    /// Norms of a finite fundamental group.
    Table { table: NormTable },
    /// `|d|_* = π|d|` for `d = 0..=max_degree`.
    CircleClosedForm { max_degree: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub label: String,
    pub value: f64,
}

impl NormSource {
    pub fn candidates(&self) -> Vec<NormValue> {
        match self {
            Self::Table { table } => table
                .classes
                .iter()
                .map(|c| NormValue { label: c.label.clone(), value: c.norm })
                .collect(),
            Self::CircleClosedForm { max_degree } => (0..=*max_degree as i64)
                .map(|d| NormValue { label: format!("d={d}"), value: circle_norm(d) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationRecord {
    pub probe: usize,
    pub density: f64,
    pub nearest: NormValue,
    /// `|Θ − v|/v`, or `|Θ|` when the nearest value is 0.
    pub relative_gap: f64,
    pub pass: bool,
}

/// Ties go to the first candidate in source order.
pub fn quantization_report(
    densities: &[f64],
    source: &NormSource,
    tolerance: f64,
) -> Result<Vec<QuantizationRecord>, AnalysisError> {
    let candidates = source.candidates();
    if candidates.is_empty() {
        return Err(AnalysisError::Config("norm source has no values".into()));
    }
    Ok(densities
        .iter()
        .enumerate()
        .map(|(probe, &density)| {
            let mut best = &candidates[0];
            for c in &candidates[1..] {
                if (density - c.value).abs() < (density - best.value).abs() {
                    best = c;
                }
            }
            let gap = if best.value > 0.0 { (density - best.value).abs() / best.value } else { density.abs() };
            QuantizationRecord { probe, density, nearest: best.clone(), relative_gap: gap, pass: gap <= tolerance }
        })
        .collect())
}
