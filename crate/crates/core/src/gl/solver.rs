//! Descent on the discrete energy with the boundary layer pinned.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::energy::evaluate;
use super::{GlError, GridField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StepRule {
    /// `u ← u − τ ∇E / hⁿ`; `τ` defaults to `h²/(4n(1 + M h²/ε²))`.
    Fixed {
        #[serde(default)]
        step: Option<f64>,
    },
    /// Like `Fixed`, but a step that raises the energy is retried at half size;
    /// accepted steps grow the size by 10%.
    Adaptive {
        #[serde(default)]
        initial: Option<f64>,
    },
    /// Polak–Ribière conjugate gradients with an Armijo-safeguarded secant
    /// line search.
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop when the sup-norm of the energy gradient over interior nodes is below this.
    pub tolerance: f64,
    pub step_rule: StepRule,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            tolerance: 1e-8,
            step_rule: StepRule::ConjugateGradient,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), GlError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(GlError::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(GlError::Config("max_iterations must be positive".into()));
        }
        match self.step_rule {
            StepRule::Fixed { step: Some(s) } | StepRule::Adaptive { initial: Some(s) } if !(s > 0.0) => {
                Err(GlError::Config(format!("step size must be positive, got {s}")))
            }
            _ => Ok(()),
        }
    }
}

/// Largest fixed step for which the descent is monotone.
pub fn default_step(field: &GridField) -> f64 {
    let h = field.h();
    let n = field.dim() as f64;
    let m = field.potential.curvature_bound();
    h * h / (4.0 * n * (1.0 + m * h * h / (field.eps * field.eps)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub energy: f64,
    pub grad_sup: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    BudgetExhausted,
    /// The line search could not lower the energy any further (rounding floor).
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub field: GridField,
    pub trace: Vec<TraceRow>,
    pub stop: StopReason,
    pub energy: f64,
    pub grad_sup: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

impl SolveOutcome {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<(), GlError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "energy", "grad_sup_norm"])?;
        for r in &self.trace {
            w.write_record([r.iteration.to_string(), r.energy.to_string(), r.grad_sup.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Problem<'a> {
    field: &'a GridField,
    pinned: Vec<bool>,
    evals: usize,
}

impl Problem<'_> {
    /// Energy and projected gradient (zero on pinned values).
    fn eval(&mut self, u: &[f64], g: &mut [f64]) -> Result<f64, GlError> {
        self.evals += 1;
        let f = self.field;
        let e = evaluate(&f.domain, f.m, f.eps, &f.potential, u, Some(g)).total;
        let m = f.m;
        for (v, p) in self.pinned.iter().enumerate() {
            if *p {
                g[v * m..(v + 1) * m].iter_mut().for_each(|x| *x = 0.0);
            }
        }
        if !e.is_finite() {
            return Err(GlError::Divergence { iteration: 0 });
        }
        Ok(e)
    }
}

/// Relative energy slack below which a line-search step counts as non-increasing.
pub const ROUNDING_SLACK: f64 = 1e-14;

fn sup(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |a: f64, b| a.max(b.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // fixed-order chunked sum keeps results independent of the thread pool
    a.chunks(4096)
        .zip(b.chunks(4096))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .sum()
}

/// Minimizes the energy of `field` over its interior values.
///
/// Boundary nodes are pinned when a Dirichlet condition is attached; otherwise
/// all values move (natural boundary).
pub fn minimize(field: &GridField, config: &SolverConfig) -> Result<SolveOutcome, GlError> {
    config.validate()?;
    let d = &field.domain;
    let pinned: Vec<bool> = if field.bc.is_some() {
        (0..d.node_count()).map(|v| d.is_boundary_node(&d.node_multi(v))).collect()
    } else {
        vec![false; d.node_count()]
    };
    let mut prob = Problem { field, pinned, evals: 0 };
    let hn = field.h().powi(field.dim() as i32);
    let tau0 = default_step(field);
    let n = field.values.len();
    let mut u = field.values.clone();
    let mut g = vec![0.0; n];
    let wrap = |e: GlError, it: usize| match e {
        GlError::Divergence { .. } => GlError::Divergence { iteration: it },
        other => other,
    };
    let mut e = prob.eval(&u, &mut g).map_err(|x| wrap(x, 0))?;
    let mut gs = sup(&g);
    let mut trace = vec![TraceRow { iteration: 0, energy: e, grad_sup: gs }];
    let mut stop = StopReason::BudgetExhausted;
    let mut it = 0;

    let mut trial = vec![0.0; n];
    let mut gt = vec![0.0; n];
    match config.step_rule {
        StepRule::Fixed { step } | StepRule::Adaptive { initial: step } => {
            let adaptive = matches!(config.step_rule, StepRule::Adaptive { .. });
            let mut tau = step.unwrap_or(if adaptive { 2.0 * tau0 } else { tau0 });
            while it < config.max_iterations {
                if gs <= config.tolerance {
                    stop = StopReason::Converged;
                    break;
                }
                it += 1;
                let mut halvings = 0;
                loop {
                    let c = tau / hn;
                    for i in 0..n {
                        trial[i] = u[i] - c * g[i];
                    }
                    let et = prob.eval(&trial, &mut gt).map_err(|x| wrap(x, it))?;
                    if !adaptive || et <= e {
                        std::mem::swap(&mut u, &mut trial);
                        std::mem::swap(&mut g, &mut gt);
                        e = et;
                        if adaptive {
                            tau *= 1.1;
                        }
                        break;
                    }
                    tau *= 0.5;
                    halvings += 1;
                    if halvings > 60 {
                        stop = StopReason::Stalled;
                        break;
                    }
                }
                if stop == StopReason::Stalled {
                    break;
                }
                gs = sup(&g);
                trace.push(TraceRow { iteration: it, energy: e, grad_sup: gs });
            }
        }
        StepRule::ConjugateGradient => {
            let mut dir: Vec<f64> = g.iter().map(|x| -x).collect();
            let mut cand = vec![0.0; n];
            let mut gc = vec![0.0; n];
            let mut alpha = tau0 / hn;
            let mut gg = dot(&g, &g);
            const C1: f64 = 1e-4;
            while it < config.max_iterations {
                // energy differences below this are rounding noise; accept such
                // steps so the gradient can still be driven down
                let slack = ROUNDING_SLACK * e.abs().max(1.0);
                if gs <= config.tolerance {
                    stop = StopReason::Converged;
                    break;
                }
                it += 1;
                let mut slope = dot(&g, &dir);
                if slope >= 0.0 {
                    for i in 0..n {
                        dir[i] = -g[i];
                    }
                    slope = -gg;
                }
                // probe at the previous step length, then a secant step on φ'(α)
                let probe = alpha;
                for i in 0..n {
                    trial[i] = u[i] + probe * dir[i];
                }
                let ep = prob.eval(&trial, &mut gt).map_err(|x| wrap(x, it))?;
                let sp = dot(&gt, &dir);
                let mut take_cand = None;
                if sp > slope {
                    let a = (probe * slope / (slope - sp)).min(8.0 * probe);
                    if (a - probe).abs() > 1e-3 * probe {
                        for i in 0..n {
                            cand[i] = u[i] + a * dir[i];
                        }
                        let ec = prob.eval(&cand, &mut gc).map_err(|x| wrap(x, it))?;
                        if ec <= e + C1 * a * slope + slack && ec <= ep + slack {
                            take_cand = Some((a, ec));
                        }
                    }
                } else {
                    // no curvature seen yet: try longer steps next time
                    alpha *= 2.0;
                }
                let (a, ea) = match take_cand {
                    Some(x) => {
                        std::mem::swap(&mut trial, &mut cand);
                        std::mem::swap(&mut gt, &mut gc);
                        x
                    }
                    None => {
                        let mut a = probe;
                        let mut ea = ep;
                        let mut tries = 0;
                        while ea > e + C1 * a * slope + slack && tries < 60 {
                            tries += 1;
                            a *= 0.5;
                            for i in 0..n {
                                trial[i] = u[i] + a * dir[i];
                            }
                            ea = prob.eval(&trial, &mut gt).map_err(|x| wrap(x, it))?;
                        }
                        if ea > e + C1 * a * slope + slack {
                            stop = StopReason::Stalled;
                            break;
                        }
                        (a, ea)
                    }
                };
                let gg_new = dot(&gt, &gt);
                let cross = dot(&gt, &g);
                std::mem::swap(&mut u, &mut trial);
                std::mem::swap(&mut g, &mut gt);
                e = ea;
                if take_cand.is_some() || a < probe {
                    alpha = a;
                }
                let beta = ((gg_new - cross) / gg).max(0.0);
                gg = gg_new;
                for i in 0..n {
                    dir[i] = -g[i] + beta * dir[i];
                }
                gs = sup(&g);
                trace.push(TraceRow { iteration: it, energy: e, grad_sup: gs });
            }
        }
    }
    if stop == StopReason::BudgetExhausted && gs <= config.tolerance {
        stop = StopReason::Converged;
    }
    let out = field.with_values(u);
    Ok(SolveOutcome {
        field: out,
        trace,
        stop,
        energy: e,
        grad_sup: gs,
        iterations: it,
        evaluations: prob.evals,
    })
}

/// Energy change under one compactly supported bump perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub center: [f64; 3],
    pub radius: f64,
    pub delta_energy: f64,
}

/// Adds `amplitude · ψ(|x − c|/r) · ξ` for random centres `c`, radii `r` and
/// unit directions `ξ ∈ R^m`, with `ψ(t) = (1 − t²)²` on `t < 1`, and records
/// the energy change. Supports stay at least one cell inside the boundary.
pub fn perturbation_test(
    field: &GridField,
    count: usize,
    amplitude: f64,
    seed: u64,
) -> Vec<Perturbation> {
    let d = &field.domain;
    let m = field.m;
    let base = super::energy(field).total;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let strides = d.node_strides();
    for _ in 0..count {
        let radius = rng.gen_range(4.0..12.0) * d.h;
        let mut c = [0.0; 3];
        for a in 0..d.dim {
            let lo = d.lower[a] + radius + d.h;
            let hi = d.upper(a) - radius - d.h;
            c[a] = if hi > lo { rng.gen_range(lo..hi) } else { d.lower[a] + 0.5 * d.extent[a] };
        }
        let xi = crate::manifold::random_unit(&mut rng, m);
        let mut vals = field.values.clone();
        // visit only the bounding box of the bump
        let lo: Vec<usize> = (0..d.dim)
            .map(|a| (((c[a] - radius - d.lower[a]) / d.h).floor().max(0.0)) as usize)
            .collect();
        let hi: Vec<usize> = (0..d.dim)
            .map(|a| ((((c[a] + radius - d.lower[a]) / d.h).ceil()) as usize).min(d.counts[a]))
            .collect();
        let range = |a: usize| if a < d.dim { lo[a]..=hi[a] } else { 0..=0 };
        for i in range(0) {
            for j in range(1) {
                for k in range(2) {
                    let idx = [i, j, k];
                    let x = d.node_coord(&idx[..d.dim]);
                    let r2: f64 =
                        (0..d.dim).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>() / (radius * radius);
                    if r2 < 1.0 && !d.is_boundary_node(&idx[..d.dim]) {
                        let w = amplitude * (1.0 - r2).powi(2);
                        let v: usize = (0..d.dim).map(|a| idx[a] * strides[a]).sum();
                        for q in 0..m {
                            vals[v * m + q] += w * xi[q];
                        }
                    }
                }
            }
        }
        let e = super::energy(&field.with_values(vals)).total;
        out.push(Perturbation { center: c, radius, delta_energy: e - base });
    }
    out
}
