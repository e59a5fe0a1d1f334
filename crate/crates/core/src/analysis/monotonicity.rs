//! The scaled ball energies `r^{2−n} E_ε(u, B_r(x))`, non-decreasing in `r` for critical points.

use serde::{Deserialize, Serialize};

use super::{check_ball, AnalysisError, FieldAnalysis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityProfile {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub worst_violation: f64,
    /// The field is not a converged critical point; the verdict is indicative only.
    pub advisory: bool,
}

impl MonotonicityProfile {
    pub fn nondecreasing(&self) -> bool {
        self.worst_violation == 0.0
    }
}

/// Largest `values[i] − values[i+1]` over consecutive entries, floored at zero.
pub fn worst_decrease(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
}

/// Radii must be increasing.
pub fn monotonicity_profile(
    a: &FieldAnalysis,
    x: &[f64],
    radii: &[f64],
) -> Result<MonotonicityProfile, AnalysisError> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalysisError::Config("radii must be strictly increasing".into()));
    }
    let n = a.dim() as i32;
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        check_ball(a.domain(), x, r)?;
        values.push(r.powi(2 - n) * a.ball_energy(x, r));
    }
    Ok(MonotonicityProfile {
        center: x.to_vec(),
        radii: radii.to_vec(),
        worst_violation: worst_decrease(&values),
        values,
        advisory: !a.critical,
    })
}

/// `C_q = max_r |p_h(r) − p_{h/2}(r)| · r / h` from two profiles on the same radii,
/// the first at grid spacing `h`.
pub fn fit_quadrature_constant(coarse: &MonotonicityProfile, fine: &MonotonicityProfile, h: f64) -> f64 {
    coarse
        .radii
        .iter()
        .zip(coarse.values.iter().zip(&fine.values))
        .map(|(r, (pc, pf))| (pc - pf).abs() * r / h)
        .fold(0.0, f64::max)
}
