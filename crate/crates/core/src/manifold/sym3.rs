//! Symmetric traceless 3×3 matrices as vectors of R⁵, and the top eigenpair.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const INV_SQRT_6: f64 = 0.408_248_290_463_863_f64;

pub type Mat3 = [[f64; 3]; 3];

/// Orthonormal coordinates (Frobenius inner product) of a symmetric traceless matrix.
pub fn to_vec5(q: &Mat3) -> [f64; 5] {
    [
        (q[0][0] - q[1][1]) * FRAC_1_SQRT_2,
        (2.0 * q[2][2] - q[0][0] - q[1][1]) * INV_SQRT_6,
        SQRT_2 * q[0][1],
        SQRT_2 * q[0][2],
        SQRT_2 * q[1][2],
    ]
}

pub fn from_vec5(y: &[f64]) -> Mat3 {
    let a = y[0] * FRAC_1_SQRT_2;
    let b = y[1] * INV_SQRT_6;
    let q01 = y[2] * FRAC_1_SQRT_2;
    let q02 = y[3] * FRAC_1_SQRT_2;
    let q12 = y[4] * FRAC_1_SQRT_2;
    [
        [a - b, q01, q02],
        [q01, -a - b, q12],
        [q02, q12, 2.0 * b],
    ]
}

/// `s (n⊗n − I/3)` in R⁵ coordinates.
pub fn uniaxial(n: &[f64; 3], s: f64) -> [f64; 5] {
    let mut q = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            q[i][j] = s * (n[i] * n[j] - if i == j { 1.0 / 3.0 } else { 0.0 });
        }
    }
    to_vec5(&q)
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm2(a: &[f64; 3]) -> f64 {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
}

/// Eigenvalues in descending order (closed-form trigonometric solution).
pub fn eigenvalues(a: &Mat3) -> [f64; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let d0 = a[0][0] - q;
    let d1 = a[1][1] - q;
    let d2 = a[2][2] - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    if p2 == 0.0 {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    let b = [
        [d0 / p, a[0][1] / p, a[0][2] / p],
        [a[0][1] / p, d1 / p, a[1][2] / p],
        [a[0][2] / p, a[1][2] / p, d2 / p],
    ];
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let l2 = 3.0 * q - l1 - l3;
    [l1, l2, l3]
}

/// Unit eigenvector for a simple eigenvalue `lambda`; `None` if the eigenvalue
/// is (numerically) repeated.
pub fn eigenvector(a: &Mat3, lambda: f64) -> Option<[f64; 3]> {
    let rows = [
        [a[0][0] - lambda, a[0][1], a[0][2]],
        [a[1][0], a[1][1] - lambda, a[1][2]],
        [a[2][0], a[2][1], a[2][2] - lambda],
    ];
    let candidates = [
        cross(&rows[0], &rows[1]),
        cross(&rows[0], &rows[2]),
        cross(&rows[1], &rows[2]),
    ];
    let (best, n2) = candidates
        .iter()
        .map(|c| (c, norm2(c)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("three candidates");
    let scale = rows.iter().map(norm2).fold(0.0, f64::max);
    if n2 <= 1e-24 * scale * scale || n2 == 0.0 {
        return None;
    }
    let inv = 1.0 / n2.sqrt();
    Some([best[0] * inv, best[1] * inv, best[2] * inv])
}

/// Largest eigenvalue and its eigenvector.
pub fn top_eigenpair(a: &Mat3) -> (f64, Option<[f64; 3]>) {
    let [l1, ..] = eigenvalues(a);
    (l1, eigenvector(a, l1))
}

/// Symmetric 3×3 eigen-decomposition by cyclic Jacobi sweeps; descending
/// eigenvalues with eigenvectors as columns. Used where all three pairs matter.
pub fn jacobi_eigen(a: &Mat3) -> ([f64; 3], Mat3) {
    let mut m = *a;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..50 {
        let off = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
        if off < 1e-30 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if m[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }
    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let vals = [m[order[0]][order[0]], m[order[1]][order[1]], m[order[2]][order[2]]];
    let mut vecs = [[0.0; 3]; 3];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..3 {
            vecs[row][col] = v[row][src];
        }
    }
    (vals, vecs)
}
