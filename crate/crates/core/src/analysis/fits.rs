//! Least-squares log-law fits and the 2D lower-bound quantity.

use serde::{Deserialize, Serialize};

use crate::gl::interpolate;
use crate::manifold::PotentialField;

use super::{check_ball, AnalysisError, FieldAnalysis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Per-point `value − (slope·log(1/ε) + intercept)`.
    pub residuals: Vec<f64>,
}

/// Least squares of `values` against `log(1/ε)`.
pub fn fit_log_law(eps: &[f64], values: &[f64]) -> Result<LogFit, AnalysisError> {
    if eps.len() != values.len() || eps.len() < 2 {
        return Err(AnalysisError::Config("a log fit needs at least two (ε, value) pairs".into()));
    }
    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = values.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(AnalysisError::Config("ε values must be distinct".into()));
    }
    let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(values).map(|(x, y)| y - slope * x - intercept).collect();
    Ok(LogFit { slope, intercept, residuals })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundSample {
    pub eps: f64,
    pub radius: f64,
    pub ball_energy: f64,
    /// `E_ε(u, ∂B_r)` with the tangential derivative only.
    pub circle_energy: f64,
    /// `E_ε(u,B_r) + r·E_ε(u,∂B_r) − target·log(r/ε)`.
    pub quantity: f64,
}

/// 2D only. The circle is sampled at `K ≥ 64` points with about four samples per cell.
pub fn lower_bound_quantity(
    a: &FieldAnalysis,
    x: &[f64],
    r: f64,
    target: f64,
) -> Result<LowerBoundSample, AnalysisError> {
    if a.dim() != 2 {
        return Err(AnalysisError::Config("the lower-bound quantity is defined for 2D fields".into()));
    }
    check_ball(a.domain(), x, r)?;
    let f = a.field;
    let m = f.m;
    let eps = f.eps;
    let k = ((8.0 * std::f64::consts::PI * r / a.h()).ceil() as usize).max(64);
    let dt = 2.0 * std::f64::consts::PI / k as f64;
    let mut samples = vec![0.0; k * m];
    for i in 0..k {
        let t = i as f64 * dt;
        let p = [x[0] + r * t.cos(), x[1] + r * t.sin()];
        interpolate(&f.domain, m, &f.values, &p, &mut samples[i * m..(i + 1) * m]);
    }
    let ds = r * dt;
    let mut circle = 0.0;
    for i in 0..k {
        let u = &samples[i * m..(i + 1) * m];
        let w = &samples[((i + 1) % k) * m..((i + 1) % k + 1) * m];
        let d2: f64 = u.iter().zip(w).map(|(p, q)| (q - p).powi(2)).sum();
        circle += 0.5 * d2 / ds + f.potential.value(u) / (eps * eps) * ds;
    }
    let ball = a.ball_energy(x, r);
    Ok(LowerBoundSample {
        eps,
        radius: r,
        ball_energy: ball,
        circle_energy: circle,
        quantity: ball + r * circle - target * (r / eps).ln(),
    })
}
