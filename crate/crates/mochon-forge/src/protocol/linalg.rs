//! Small dense real linear-algebra helpers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigen-decomposition of the symmetric part of `m`.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let s = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(s)
}

/// Smallest eigenvalue of the symmetric part of `m`; `+∞` for an empty
/// matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    sym_eigen(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest absolute eigenvalue of the symmetric part of `m`.
pub fn sym_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    sym_eigen(m).eigenvalues.iter().fold(0.0, |a: f64, &e| a.max(e.abs()))
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

/// Rank-one projector `v vᵀ / ‖v‖²`.
pub fn projector(v: &DVector<f64>) -> DMatrix<f64> {
    let n2 = v.norm_squared();
    v * v.transpose() / n2
}

/// Removes the components of `v` along the orthonormal `basis`, twice.
fn orthogonalize(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(v);
            v.axpy(-c, b, 1.0);
        }
    }
}

/// Appends to `basis` orthonormal vectors drawn from the standard basis
/// vectors `candidates` by modified Gram–Schmidt, picking at each step the
/// candidate with the largest residual, until `count` vectors were added.
pub(crate) fn complete_from_candidates(
    basis: &mut Vec<DVector<f64>>,
    dim: usize,
    candidates: &[usize],
    count: usize,
) -> Vec<DVector<f64>> {
    let mut added = Vec::with_capacity(count);
    let mut used = vec![false; candidates.len()];
    for _ in 0..count {
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for (ci, &c) in candidates.iter().enumerate() {
            if used[ci] {
                continue;
            }
            let mut r = DVector::zeros(dim);
            r[c] = 1.0;
            orthogonalize(&mut r, basis);
            let n = r.norm();
            if best.as_ref().map_or(true, |b| n > b.2 + 1e-12) {
                best = Some((ci, r, n));
            }
        }
        let (ci, r, n) = best.expect("candidate pool exhausted");
        assert!(n > 1e-8, "orthonormal completion degenerated");
        used[ci] = true;
        let r = r / n;
        basis.push(r.clone());
        added.push(r);
    }
    added
}

/// Orthogonal `U` with `U φⱼ = e_{targets[j]}` for the orthonormal columns
/// `φⱼ` of `phi`. Coordinates untouched by every `φⱼ` and outside `targets`
/// are mapped to themselves.
pub fn unitary_from_columns(phi: &DMatrix<f64>, targets: &[usize]) -> DMatrix<f64> {
    let n = phi.nrows();
    assert_eq!(phi.ncols(), targets.len());
    let mut is_target = vec![false; n];
    for &t in targets {
        is_target[t] = true;
    }
    let touched: Vec<bool> = (0..n)
        .map(|i| phi.row(i).iter().any(|v| v.abs() > 1e-15))
        .collect();
    let mut u = DMatrix::zeros(n, n);
    for (j, &t) in targets.iter().enumerate() {
        for i in 0..n {
            u[(t, i)] = phi[(i, j)];
        }
    }
    let mut fixed = Vec::new();
    let mut free_targets = Vec::new();
    let mut candidates = Vec::new();
    for i in 0..n {
        if !touched[i] && !is_target[i] {
            fixed.push(i);
        } else {
            candidates.push(i);
            if !is_target[i] {
                free_targets.push(i);
            }
        }
    }
    for &i in &fixed {
        u[(i, i)] = 1.0;
    }
    let mut basis: Vec<DVector<f64>> = (0..phi.ncols()).map(|j| phi.column(j).into_owned()).collect();
    let extra = complete_from_candidates(&mut basis, n, &candidates, free_targets.len());
    for (a, &g) in extra.iter().zip(&free_targets) {
        for i in 0..n {
            u[(g, i)] = a[i];
        }
    }
    u
}

/// `‖UᵀU − I‖` as the largest absolute entry.
pub fn unitarity_defect(u: &DMatrix<f64>) -> f64 {
    let g = u.transpose() * u;
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let e = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - e).abs());
        }
    }
    worst
}
