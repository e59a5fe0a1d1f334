//! Sampling check of the two-sided quadratic bounds on `f` and `Df·(y − Π(y))`
//! in a tube around `N`, and of the segment bound `f(ty + (1−t)Π(y)) ≤ M t² f(y)`.
//!
//! The constants produced are empirical estimates over the sample, not
//! certified bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dot, random_unit, ManifoldError, ManifoldId, PotentialField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `f(y) < 0`.
    Negative,
    /// `f ≠ 0` at a point of `N`.
    NonzeroOnManifold,
    /// Lower quadratic bound fails (`f` or `Df·(y−Π)` not ≥ c·dist²).
    Degenerate,
    /// Segment bound ratio is unbounded (f(y) = 0 off the manifold with positive segment values).
    SegmentUnbounded,
    /// `f` is (numerically) zero on a large sphere.
    VanishesAtInfinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub manifold: ManifoldId,
    pub delta: f64,
    pub sample_count: usize,
    pub seed: u64,
    /// `[min, max]` of `f(y)/dist²`.
    pub value_ratio: [f64; 2],
    /// `[min, max]` of `Df(y)·(y−Π(y))/dist²`.
    pub gradient_ratio: [f64; 2],
    /// `max f(ty + (1−t)Π(y)) / (t² f(y))` over the sample and the `t` grid.
    pub segment_ratio: f64,
    pub m_f: f64,
    pub big_m_f: f64,
    pub delta_f: f64,
    /// Always true: constants come from sampling.
    pub estimates_only: bool,
    pub witnesses: Vec<Witness>,
}

impl NondegeneracyReport {
    pub fn admissible(&self) -> bool {
        self.witnesses.is_empty()
    }
}

const T_GRID: usize = 20;
const MAX_WITNESSES_PER_KIND: usize = 4;

/// Samples `sample_count` points of the `delta`-tube and checks the bounds.
pub fn check_nondegeneracy<P: PotentialField + ?Sized>(
    pot: &P,
    delta: f64,
    sample_count: usize,
    seed: u64,
) -> Result<NondegeneracyReport, ManifoldError> {
    let m = *pot.manifold();
    if !(delta > 0.0 && delta < m.reach()) {
        return Err(ManifoldError::Invalid(format!(
            "tube radius {delta} must lie in (0, {})",
            m.reach()
        )));
    }
    if sample_count == 0 {
        return Err(ManifoldError::Invalid("sample count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = m.ambient_dim();
    let mut witnesses = Vec::new();
    let push = |w: Witness, ws: &mut Vec<Witness>| {
        if ws.iter().filter(|x| x.kind == w.kind).count() < MAX_WITNESSES_PER_KIND {
            ws.push(w);
        }
    };

    let mut vr = [f64::INFINITY, f64::NEG_INFINITY];
    let mut gr = [f64::INFINITY, f64::NEG_INFINITY];
    let mut seg: f64 = 0.0;
    let mut grad = vec![0.0; dim];
    let mut z = vec![0.0; dim];

    for _ in 0..sample_count {
        let p = m.random_point(&mut rng);
        let f0 = pot.value_grad(&p, &mut grad);
        if f0.abs() > 1e-12 {
            push(
                Witness { kind: WitnessKind::NonzeroOnManifold, point: p.clone(), value: f0 },
                &mut witnesses,
            );
        }
        let nu = m.random_normal(&p, &mut rng);
        let t = delta * rng.gen_range(0.05..1.0);
        let y: Vec<f64> = p.iter().zip(&nu).map(|(a, b)| a + t * b).collect();
        let proj = m.project(&y)?;
        let d2 = m.distance_squared(&y);
        let fy = pot.value_grad(&y, &mut grad);
        if fy < 0.0 {
            push(Witness { kind: WitnessKind::Negative, point: y.clone(), value: fy }, &mut witnesses);
        }
        let diff: Vec<f64> = y.iter().zip(&proj).map(|(a, b)| a - b).collect();
        let r_val = fy / d2;
        let r_grad = dot(&grad, &diff) / d2;
        vr = [vr[0].min(r_val), vr[1].max(r_val)];
        gr = [gr[0].min(r_grad), gr[1].max(r_grad)];
        if !(r_val > 1e-12 && r_grad > 1e-12) {
            push(
                Witness { kind: WitnessKind::Degenerate, point: y.clone(), value: r_val.min(r_grad) },
                &mut witnesses,
            );
        }
        for k in 1..=T_GRID {
            let s = k as f64 / T_GRID as f64;
            for ((zi, yi), pi) in z.iter_mut().zip(&y).zip(&proj) {
                *zi = s * yi + (1.0 - s) * pi;
            }
            let fz = pot.value(&z);
            if fy > 0.0 {
                seg = seg.max(fz / (s * s * fy));
            } else if fz > 0.0 {
                seg = f64::INFINITY;
                push(
                    Witness { kind: WitnessKind::SegmentUnbounded, point: y.clone(), value: fz },
                    &mut witnesses,
                );
                break;
            }
        }
    }

    // coercivity at infinity: sample spheres of growing radius
    for radius in [10.0, 100.0, 1000.0] {
        let mut worst = f64::INFINITY;
        let mut at = Vec::new();
        for _ in 0..64 {
            let v: Vec<f64> = random_unit(&mut rng, dim).into_iter().map(|x| x * radius).collect();
            let fv = pot.value(&v);
            if fv < worst {
                worst = fv;
                at = v;
            }
        }
        if !(worst > 1e-12) {
            push(Witness { kind: WitnessKind::VanishesAtInfinity, point: at, value: worst }, &mut witnesses);
        }
    }

    let m_f = vr[0].min(gr[0]);
    let big_m_f = vr[1].max(gr[1]).max(seg);
    Ok(NondegeneracyReport {
        manifold: m.id(),
        delta,
        sample_count,
        seed,
        value_ratio: vr,
        gradient_ratio: gr,
        segment_ratio: seg,
        m_f,
        big_m_f,
        delta_f: delta,
        estimates_only: true,
        witnesses,
    })
}
