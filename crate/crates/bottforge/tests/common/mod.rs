//! Brute-force reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use bottforge::examples::qsh_closed_form;
use bottforge::{CMat, C64};

/// Unit vector spanning the (numerically) one-dimensional kernel of `m`.
pub fn null_vector(m: &CMat) -> (CMat, f64) {
    let n = m.ncols();
    // kernel of m = eigenvector of m†m with the smallest eigenvalue
    let h = m.adjoint() * m;
    let eig = h.symmetric_eigen();
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .unwrap();
    let v = CMat::from_fn(n, 1, |r, _| eig.eigenvectors[(r, idx)]);
    (v, val.max(0.0).sqrt())
}

/// Frame (8×1) of `A ∩ span{e_i : i ∈ idx}` for the closed-form charge-conserving fiber.
pub fn qsh_block_frame(k0: f64, k1: f64, idx: &[usize; 2]) -> CMat {
    let f = qsh_closed_form(k0, k1);
    let q = f.clone().qr().q();
    let p = &q * q.adjoint();
    let comp = CMat::identity(8, 8) - p;
    let restricted = CMat::from_fn(8, 2, |r, c| comp[(r, idx[c])]);
    let (v, _) = null_vector(&restricted);
    let mut out = CMat::zeros(8, 1);
    for (c, &i) in idx.iter().enumerate() {
        out[(i, 0)] = v[(c, 0)];
    }
    out
}

/// Lattice field strength on a `n0 × n1` rectangle: `k0 ∈ [-π/2, π/2]` (open ends at the poles),
/// `k1` periodic, plaquettes `(i,j) → (i+1,j) → (i+1,j+1) → (i,j+1)`.
pub fn rectangle_chern(n0: usize, n1: usize, frame: impl Fn(f64, f64) -> CMat) -> f64 {
    let k0 = |i: usize| -PI / 2.0 + PI * i as f64 / n0 as f64;
    let k1 = |j: usize| 2.0 * PI * j as f64 / n1 as f64;
    let grid: Vec<Vec<CMat>> = (0..=n0)
        .map(|i| (0..n1).map(|j| frame(k0(i), k1(j))).collect())
        .collect();
    let link = |a: &CMat, b: &CMat| {
        let d = (a.adjoint() * b).determinant();
        d / d.norm()
    };
    let mut total = 0.0;
    for i in 0..n0 {
        for j in 0..n1 {
            let jn = (j + 1) % n1;
            let u = link(&grid[i][j], &grid[i + 1][j])
                * link(&grid[i + 1][j], &grid[i + 1][jn])
                * link(&grid[i + 1][jn], &grid[i][jn])
                * link(&grid[i][jn], &grid[i][j]);
            total += u.arg();
        }
    }
    total / (2.0 * PI)
}

/// Pfaffian by expansion along the first row.
pub fn pfaffian_expansion(a: &CMat) -> C64 {
    let n = a.nrows();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    if n % 2 == 1 {
        return C64::new(0.0, 0.0);
    }
    let mut total = C64::new(0.0, 0.0);
    for j in 1..n {
        let keep: Vec<usize> = (1..n).filter(|&x| x != j).collect();
        let minor = CMat::from_fn(keep.len(), keep.len(), |r, c| a[(keep[r], keep[c])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += a[(0, j)] * sign * pfaffian_expansion(&minor);
    }
    total
}

/// `(1/2πi) ∮ tr(U⁻¹ dU/dk) dk` by the trapezoid rule with central differences.
pub fn trapezoid_winding(samples: usize, u: impl Fn(f64) -> CMat) -> f64 {
    let h = 2.0 * PI / samples as f64;
    let eps = 1e-5;
    let mut total = C64::new(0.0, 0.0);
    for s in 0..samples {
        let k = s as f64 * h;
        let du = (u(k + eps) - u(k - eps)) / C64::new(2.0 * eps, 0.0);
        let inv = u(k).try_inverse().unwrap();
        total += (inv * du).trace() * h;
    }
    (total / C64::new(0.0, 2.0 * PI)).re
}
