//! Clearing-out based extraction of the singular set.
//!
//! A cell center `x` is flagged when `E_ε(u, B_r(x)) > η r^{n−2} log(r/ε)`.
//! Only centers whose ball lies in the domain are probed.

use std::collections::VecDeque;
use std::io::Write;

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnalysisError, FieldAnalysis, INCLUSION_SLACK};

/// `E_ε(u, B_r(x))` at every cell center `x` whose ball lies in the domain.
pub fn ball_energies(a: &FieldAnalysis, r: f64) -> Vec<Option<f64>> {
    let d = a.domain();
    let n = d.dim;
    let h = d.h;
    let reach = (r / h).floor() as isize;
    let r2 = r * r * (1.0 + INCLUSION_SLACK);
    let strides = d.cell_strides();
    let mut offsets: Vec<[isize; 3]> = Vec::new();
    let span = |a: usize| if a < n { -reach..=reach } else { 0..=0 };
    for i in span(0) {
        for j in span(1) {
            for k in span(2) {
                if ((i * i + j * j + k * k) as f64) * h * h <= r2 {
                    offsets.push([i, j, k]);
                }
            }
        }
    }
    let hn = a.cell_volume();
    (0..d.cell_count())
        .into_par_iter()
        .map(|c| {
            let idx = d.cell_multi(c);
            let x = d.cell_center(&idx[..n]);
            if d.distance_to_boundary(&x[..n]) * (1.0 + INCLUSION_SLACK) < r {
                return None;
            }
            let mut e = 0.0;
            for o in &offsets {
                let flat: isize = (0..n).map(|a| (idx[a] as isize + o[a]) * strides[a] as isize).sum();
                e += a.cells.density[flat as usize];
            }
            Some(e * hn)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub cluster: usize,
    pub start: [f64; 3],
    pub end: [f64; 3],
    /// Unit principal direction.
    pub direction: [f64; 3],
    pub points: usize,
    /// Largest distance of a cluster point from the fitted line.
    pub max_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSetEstimate {
    pub eta: f64,
    pub radius: f64,
    pub eps: f64,
    pub threshold: f64,
    /// Flagged cell centers in increasing cell order.
    pub points: Vec<[f64; 3]>,
    pub cells: Vec<usize>,
    /// Cluster id per point; clusters are numbered by their first cell.
    pub clusters: Vec<usize>,
    pub cluster_count: usize,
    pub probed: usize,
    /// Principal-component segments, one per cluster (3D only).
    pub segments: Vec<Segment>,
}

impl SingularSetEstimate {
    /// CSV with columns `x,y,z,flag,cluster`, one row per flagged point.
    pub fn write_cloud_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "z", "flag", "cluster"])?;
        for (p, c) in self.points.iter().zip(&self.clusters) {
            w.write_record([p[0].to_string(), p[1].to_string(), p[2].to_string(), "1".into(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn extract_singular_set(a: &FieldAnalysis, eta: f64, r: f64) -> Result<SingularSetEstimate, AnalysisError> {
    let eps = a.field.eps;
    if !(eta > 0.0) {
        return Err(AnalysisError::Precondition(format!("η = {eta} must be positive")));
    }
    if !(eps < r / 4.0) {
        return Err(AnalysisError::Precondition(format!("ε = {eps} must be below r/4 = {}", r / 4.0)));
    }
    let d = a.domain();
    let n = d.dim;
    let threshold = eta * r.powi(n as i32 - 2) * (r / eps).ln();
    let energies = ball_energies(a, r);
    let probed = energies.iter().filter(|e| e.is_some()).count();
    let cells: Vec<usize> = energies
        .iter()
        .enumerate()
        .filter_map(|(c, e)| e.filter(|&v| v > threshold).map(|_| c))
        .collect();
    let points: Vec<[f64; 3]> = cells.iter().map(|&c| d.cell_center(&d.cell_multi(c))).collect();
    let (clusters, cluster_count) = label_clusters(a, &cells);
    let segments = if n == 3 {
        (0..cluster_count)
            .map(|k| {
                let pts: Vec<[f64; 3]> =
                    points.iter().zip(&clusters).filter(|(_, &c)| c == k).map(|(p, _)| *p).collect();
                fit_segment(k, &pts)
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(SingularSetEstimate {
        eta,
        radius: r,
        eps,
        threshold,
        points,
        cells,
        clusters,
        cluster_count,
        probed,
        segments,
    })
}

/// Connected components under the full `3ⁿ − 1` neighbourhood.
fn label_clusters(a: &FieldAnalysis, cells: &[usize]) -> (Vec<usize>, usize) {
    let d = a.domain();
    let n = d.dim;
    let strides = d.cell_strides();
    let mut slot = vec![usize::MAX; d.cell_count()];
    for (i, &c) in cells.iter().enumerate() {
        slot[c] = i;
    }
    let mut label = vec![usize::MAX; cells.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..cells.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let idx = d.cell_multi(cells[i]);
            for off in 0..3usize.pow(n as u32) {
                let mut flat = 0isize;
                let mut ok = true;
                let mut t = off;
                for a in 0..n {
                    let v = idx[a] as isize + (t % 3) as isize - 1;
                    t /= 3;
                    if v < 0 || v >= d.counts[a] as isize {
                        ok = false;
                        break;
                    }
                    flat += v * strides[a] as isize;
                }
                if !ok {
                    continue;
                }
                let j = slot[flat as usize];
                if j != usize::MAX && label[j] == usize::MAX {
                    label[j] = count;
                    queue.push_back(j);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

fn fit_segment(cluster: usize, pts: &[[f64; 3]]) -> Segment {
    let k = pts.len() as f64;
    let mut mean = [0.0; 3];
    for p in pts {
        for a in 0..3 {
            mean[a] += p[a] / k;
        }
    }
    let mut cov = Matrix3::<f64>::zeros();
    for p in pts {
        for i in 0..3 {
            for j in 0..3 {
                cov[(i, j)] += (p[i] - mean[i]) * (p[j] - mean[j]) / k;
            }
        }
    }
    let eig = SymmetricEigen::new(cov);
    let top = (0..3usize).max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j])).unwrap_or(0);
    let mut dir = [eig.eigenvectors[(0, top)], eig.eigenvectors[(1, top)], eig.eigenvectors[(2, top)]];
    // Orient deterministically: largest component positive.
    let lead = (0..3usize).max_by(|&i, &j| dir[i].abs().total_cmp(&dir[j].abs())).unwrap_or(0);
    if dir[lead] < 0.0 {
        dir.iter_mut().for_each(|v| *v = -*v);
    }
    let (mut tmin, mut tmax, mut off) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for p in pts {
        let z = [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]];
        let t = z[0] * dir[0] + z[1] * dir[1] + z[2] * dir[2];
        tmin = tmin.min(t);
        tmax = tmax.max(t);
        let perp2 = z.iter().map(|v| v * v).sum::<f64>() - t * t;
        off = off.max(perp2.max(0.0).sqrt());
    }
    let at = |t: f64| [mean[0] + t * dir[0], mean[1] + t * dir[1], mean[2] + t * dir[2]];
    Segment { cluster, start: at(tmin), end: at(tmax), direction: dir, points: pts.len(), max_offset: off }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClearingOut {
    pub eta: f64,
    pub radius: f64,
    /// `max E_ε(u, B_{r/2}(x)) / r^{n−2}` over probed, unflagged centers.
    pub constant: f64,
    pub unflagged: usize,
    pub worst_center: Option<[f64; 3]>,
}

/// Fits the bounded-energy constant of the clearing-out conclusion.
pub fn clearing_out_constant(a: &FieldAnalysis, eta: f64, r: f64) -> Result<ClearingOut, AnalysisError> {
    let set = extract_singular_set(a, eta, r)?;
    let d = a.domain();
    let n = d.dim;
    let big = ball_energies(a, r);
    let half = ball_energies(a, r / 2.0);
    let scale = r.powi(n as i32 - 2);
    let mut flagged = vec![false; d.cell_count()];
    for &c in &set.cells {
        flagged[c] = true;
    }
    let mut constant = 0.0;
    let mut worst = None;
    let mut unflagged = 0;
    for c in 0..d.cell_count() {
        if big[c].is_none() || flagged[c] {
            continue;
        }
        unflagged += 1;
        let v = half[c].unwrap_or(0.0) / scale;
        if v > constant {
            constant = v;
            worst = Some(d.cell_center(&d.cell_multi(c)));
        }
    }
    Ok(ClearingOut { eta, radius: r, constant, unflagged, worst_center: worst })
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;

    #[test]
    fn constant_field_has_empty_singular_set() {
        let f = constant(3, 16);
        let a = FieldAnalysis::new(&f);
        let s = extract_singular_set(&a, 0.3, 0.5).unwrap();
        assert!(s.points.is_empty() && s.segments.is_empty());
        assert!(s.probed > 0);
    }

    #[test]
    fn ball_energies_match_direct_quadrature() {
        let f = random(3, 16, 4);
        let a = FieldAnalysis::new(&f);
        let e = ball_energies(&a, 0.3);
        let d = a.domain();
        for c in [0usize, 700, 1500, 2047] {
            let x = d.cell_center(&d.cell_multi(c));
            match e[c] {
                Some(v) => assert!((v - a.ball_energy(&x, 0.3)).abs() <= 1e-12 * v),
                None => assert!(d.distance_to_boundary(&x) < 0.3),
            }
        }
    }

    #[test]
    fn vortex_line_is_one_vertical_cluster() {
        let f = vortex(3, 32, 0.02);
        let a = FieldAnalysis::new(&f);
        let s = extract_singular_set(&a, 3.0, 0.125).unwrap();
        assert_eq!(s.cluster_count, 1);
        let seg = &s.segments[0];
        assert!(seg.direction[2] > 0.999, "{seg:?}");
        assert!(s.points.iter().all(|p| p[0].hypot(p[1]) < 0.125));
    }

    #[test]
    fn two_dimensional_vortex_cluster_contains_the_center() {
        let f = vortex(2, 64, 0.02);
        let a = FieldAnalysis::new(&f);
        let s = extract_singular_set(&a, 0.3, 0.2).unwrap();
        assert_eq!(s.cluster_count, 1);
        assert!(s.points.iter().any(|p| p[0].abs() < 0.02 && p[1].abs() < 0.02));
    }

    #[test]
    fn precondition_on_radius() {
        let f = constant(2, 16);
        let a = FieldAnalysis::new(&f);
        assert!(matches!(extract_singular_set(&a, 0.3, 0.4), Err(AnalysisError::Precondition(_))));
    }

    #[test]
    fn cloud_csv_has_header_and_rows() {
        let f = vortex(2, 64, 0.02);
        let a = FieldAnalysis::new(&f);
        let s = extract_singular_set(&a, 0.3, 0.2).unwrap();
        let mut buf = Vec::new();
        s.write_cloud_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,z,flag,cluster\n"));
        assert_eq!(text.lines().count(), s.points.len() + 1);
    }
}
