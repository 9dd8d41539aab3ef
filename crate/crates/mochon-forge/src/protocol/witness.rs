//! Matrix witnesses `0 ⪯ X ⪯ Y`, `ψ` for elementary line transitions, and
//! their standard form over a coordinate set `S`.

use nalgebra::{DMatrix, DVector};

use super::linalg::{direct_sum, min_eigenvalue, projector, sym_eigen, sym_norm};
use super::ProtocolError;
use crate::numeric::rational::to_f64;
use crate::pointgame::SupportFunction1D;
use crate::validity::{check_elementary, ElementaryMove};

/// Eigenvalues closer than this are one spectral value.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Default relative feasibility tolerance for synthesized witnesses.
pub const WITNESS_TOL: f64 = 1e-10;
/// Squared norms below this count as no weight.
const WEIGHT_EPS: f64 = 1e-24;

/// `l = prob[X, ψ]`, `r = prob[Y, ψ]` with `0 ⪯ X ⪯ Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct EbmWitness {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub psi: DVector<f64>,
    /// Padding eigenvalue used on the part of `Y` that `ψ` does not see.
    pub lambda: f64,
}

/// Numerical invariants of a witness against its line functions.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    /// `λ_min(Y − X)`.
    pub min_gap: f64,
    /// `λ_min(X)`.
    pub min_x: f64,
    pub y_norm: f64,
    /// Largest weight mismatch of either reconstruction.
    pub prob_error: f64,
}

impl WitnessReport {
    /// `λ_min(Y − X) ≥ −tol·‖Y‖`, `X ⪰ −tol·‖Y‖` and weights within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        let floor = -tol * self.y_norm.max(1.0);
        self.min_gap >= floor && self.min_x >= floor && self.prob_error <= tol
    }
}

/// Clustered spectral weights `z ↦ ⟨ψ|Π^[z]|ψ⟩` of a symmetric matrix.
pub fn spectral_weights(z: &DMatrix<f64>, psi: &DVector<f64>, tol: f64) -> Vec<(f64, f64)> {
    clusters(z, tol)
        .into_iter()
        .map(|(v, cols)| (v, cols.iter().map(|c| c.dot(psi).powi(2)).sum()))
        .collect()
}

/// Eigenvalue clusters with their eigenvectors, ascending.
fn clusters(z: &DMatrix<f64>, tol: f64) -> Vec<(f64, Vec<DVector<f64>>)> {
    if z.nrows() == 0 {
        return Vec::new();
    }
    let e = sym_eigen(z);
    let mut order: Vec<usize> = (0..z.nrows()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let mut out: Vec<(f64, Vec<DVector<f64>>, f64)> = Vec::new();
    for i in order {
        let v = e.eigenvalues[i];
        let col = e.eigenvectors.column(i).into_owned();
        match out.last_mut() {
            Some((_, cols, last)) if v - *last <= tol * last.abs().max(1.0) => {
                cols.push(col);
                *last = v;
            }
            _ => out.push((v, vec![col], v)),
        }
    }
    out.into_iter()
        .map(|(first, cols, last)| ((first + last) / 2.0, cols))
        .collect()
}

fn line_f64(l: &SupportFunction1D) -> Vec<(f64, f64)> {
    l.iter().map(|(x, w)| (to_f64(x), to_f64(w))).collect()
}

fn prob_mismatch(weights: &[(f64, f64)], line: &[(f64, f64)]) -> f64 {
    let mut err: f64 = 0.0;
    let mut matched = vec![false; line.len()];
    for &(v, w) in weights {
        match line
            .iter()
            .position(|&(x, _)| (x - v).abs() <= CLUSTER_TOL * x.abs().max(1.0))
        {
            Some(i) => {
                matched[i] = true;
                err = err.max((line[i].1 - w).abs());
            }
            None => err = err.max(w),
        }
    }
    for (i, &(_, w)) in line.iter().enumerate() {
        if !matched[i] {
            err = err.max(w);
        }
    }
    err
}

impl EbmWitness {
    /// The 0-dimensional witness of the empty transition.
    pub fn empty() -> Self {
        EbmWitness {
            x: DMatrix::zeros(0, 0),
            y: DMatrix::zeros(0, 0),
            psi: DVector::zeros(0),
            lambda: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    /// `prob[X, ψ]` as clustered `(value, weight)` pairs.
    pub fn prob_x(&self) -> Vec<(f64, f64)> {
        spectral_weights(&self.x, &self.psi, CLUSTER_TOL)
    }

    /// `prob[Y, ψ]` as clustered `(value, weight)` pairs.
    pub fn prob_y(&self) -> Vec<(f64, f64)> {
        spectral_weights(&self.y, &self.psi, CLUSTER_TOL)
    }

    /// Measures the witness against the `before` and `after` lines.
    pub fn check(&self, before: &SupportFunction1D, after: &SupportFunction1D) -> WitnessReport {
        let significant = |v: Vec<(f64, f64)>| v.into_iter().filter(|p| p.1 > 1e-14).collect::<Vec<_>>();
        let px = significant(self.prob_x());
        let py = significant(self.prob_y());
        WitnessReport {
            min_gap: min_eigenvalue(&(&self.y - &self.x)),
            min_x: min_eigenvalue(&self.x),
            y_norm: sym_norm(&self.y),
            prob_error: prob_mismatch(&px, &line_f64(before)).max(prob_mismatch(&py, &line_f64(after))),
        }
    }
}

/// Witness for one raise, merge or split.
///
/// Raise: `X = [x]`, `Y = [x′]`. Merge: `X = diag(xᵢ)`,
/// `Y = x_t·P_u + Λ(I − P_u)` with `u = ψ/‖ψ‖`. Split: `X = x·P_u`,
/// `Y = diag(xᵢ)`. `Λ` starts at `max(lambda_floor, max support + 1)`; for a
/// merge it is doubled and then bisected down to the smallest value with
/// `λ_min(Y − X) ≥ −tol·‖Y‖`.
pub fn synthesize_witness(mv: &ElementaryMove, lambda_floor: f64, tol: f64) -> Result<EbmWitness, ProtocolError> {
    match check_elementary(mv) {
        Ok(true) => {}
        Ok(false) => return Err(ProtocolError::NotElementarilyValid(format!("{mv:?}"))),
        Err(e) => return Err(ProtocolError::NotElementarilyValid(e.to_string())),
    }
    let support_max = mv.to_line().iter().map(|(x, _)| to_f64(x)).fold(0.0, f64::max);
    let support_max = match mv {
        ElementaryMove::Raise { x, x_new, .. } => support_max.max(to_f64(x)).max(to_f64(x_new)),
        ElementaryMove::Merge { sources, target } => sources
            .iter()
            .map(|s| to_f64(&s.0))
            .fold(support_max.max(to_f64(target)), f64::max),
        ElementaryMove::Split { source, targets } => targets
            .iter()
            .map(|t| to_f64(&t.0))
            .fold(support_max.max(to_f64(&source.0)), f64::max),
    };
    let lambda0 = lambda_floor.max(support_max + 1.0);
    let sqrt_vec = |ws: &[(f64, f64)]| DVector::from_iterator(ws.len(), ws.iter().map(|p| p.1.sqrt()));
    let pairs = |v: &[(crate::numeric::Rational, crate::numeric::Rational)]| -> Vec<(f64, f64)> {
        v.iter().map(|(x, w)| (to_f64(x), to_f64(w))).collect()
    };
    match mv {
        ElementaryMove::Raise { x, x_new, w } => Ok(EbmWitness {
            x: DMatrix::from_element(1, 1, to_f64(x)),
            y: DMatrix::from_element(1, 1, to_f64(x_new)),
            psi: DVector::from_element(1, to_f64(w).sqrt()),
            lambda: lambda0,
        }),
        ElementaryMove::Split { source, targets } => {
            let t = pairs(targets);
            let psi = sqrt_vec(&t);
            let y = DMatrix::from_diagonal(&DVector::from_iterator(t.len(), t.iter().map(|p| p.0)));
            let x = projector(&psi) * to_f64(&source.0);
            Ok(EbmWitness { x, y, psi, lambda: lambda0 })
        }
        ElementaryMove::Merge { sources, target } => {
            let s = pairs(sources);
            let psi = sqrt_vec(&s);
            let x = DMatrix::from_diagonal(&DVector::from_iterator(s.len(), s.iter().map(|p| p.0)));
            let pu = projector(&psi);
            let id = DMatrix::<f64>::identity(s.len(), s.len());
            let xt = to_f64(target);
            let y_of = |lam: f64| &pu * xt + (&id - &pu) * lam;
            let ok = |lam: f64| {
                let y = y_of(lam);
                min_eigenvalue(&(&y - &x)) >= -tol * sym_norm(&y)
            };
            let mut lam = lambda0;
            if !ok(lam) {
                let mut lo = lam;
                let mut hi = lam * 2.0;
                while !ok(hi) {
                    lo = hi;
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return Err(ProtocolError::NotElementarilyValid(format!(
                            "no padding eigenvalue makes {mv:?} feasible"
                        )));
                    }
                }
                for _ in 0..80 {
                    if hi - lo <= 1e-9 * hi {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                lam = hi;
            }
            Ok(EbmWitness {
                x,
                y: y_of(lam),
                psi,
                lambda: lam,
            })
        }
    }
}

/// Witness for the stationary line `w[z] → w[z]`.
pub fn stationary_witness(z: f64, w: f64) -> EbmWitness {
    EbmWitness {
        x: DMatrix::from_element(1, 1, z),
        y: DMatrix::from_element(1, 1, z),
        psi: DVector::from_element(1, w.sqrt()),
        lambda: 0.0,
    }
}

/// Block-diagonal `X`, `Y` and concatenated `ψ`; the probability functions
/// add.
pub fn direct_sum_witnesses(ws: &[EbmWitness]) -> EbmWitness {
    if ws.is_empty() {
        return EbmWitness::empty();
    }
    let xs: Vec<&DMatrix<f64>> = ws.iter().map(|w| &w.x).collect();
    let ys: Vec<&DMatrix<f64>> = ws.iter().map(|w| &w.y).collect();
    let psi = DVector::from_iterator(
        ws.iter().map(|w| w.dim()).sum(),
        ws.iter().flat_map(|w| w.psi.iter().copied()),
    );
    EbmWitness {
        x: direct_sum(&xs),
        y: direct_sum(&ys),
        psi,
        lambda: ws.iter().map(|w| w.lambda).fold(0.0, f64::max),
    }
}

/// Index of `|b, z, z′⟩` in the `2|S|²`-dimensional standard space.
pub fn lemma_index(n: usize, b: usize, z: usize, z2: usize) -> usize {
    (b * n + z) * n + z2
}

/// Witness in standard form over `S = {s₀ < … < s_{n−1}}`:
/// `Y = Σ s_j |0,j,j⟩⟨0,j,j| + Λ Σ |1,j,j⟩⟨1,j,j|`,
/// `X = Σ s_j |φ_j⟩⟨φ_j|`, `ψ = Σ √r(s_j)|0,j,j⟩ = Σ √l(s_j)|φ_j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalWitness {
    pub n: usize,
    /// Column `j` is `φ(s_j)`.
    pub phi: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub psi: DVector<f64>,
    pub lambda: f64,
}

impl CanonicalWitness {
    pub fn as_witness(&self) -> EbmWitness {
        EbmWitness {
            x: self.x.clone(),
            y: self.y.clone(),
            psi: self.psi.clone(),
            lambda: self.lambda,
        }
    }
}

/// Brings `w` to standard form over the coordinates `s` (ascending).
///
/// Each spectral value of `Y` that `ψ` sees keeps one eigenvector carrying
/// `ψ`'s component; each value of `X` likewise. Both families span a space
/// `H` of dimension at most `|supp l| + |supp r|`. Restricted to `H`, the
/// rest of `Y` is raised to `Λ` and the rest of `X` lowered to 0, which keeps
/// `X ⪯ Y` and both probability functions. `H` is then embedded with the
/// `Y` carriers on `|0,j,j⟩` and the remainder on `|1,k,k⟩`, and every
/// value of `S` missing from `X` gets an unused direction whose `Y` value is
/// at least that value.
pub fn canonicalize_witness(w: &EbmWitness, s: &[f64]) -> Result<CanonicalWitness, ProtocolError> {
    let n = s.len();
    let big = 2 * n * n;
    let label = |v: f64| {
        s.iter()
            .position(|&z| (z - v).abs() <= CLUSTER_TOL * z.abs().max(1.0))
    };
    let max_s = s.iter().copied().fold(0.0, f64::max);
    let mut lambda = w.lambda.max(max_s + 1.0);

    let mut carriers: Vec<(usize, DVector<f64>)> = Vec::new();
    for (v, cols) in clusters(&w.y, CLUSTER_TOL) {
        let proj: DVector<f64> = cols.iter().fold(DVector::zeros(w.dim()), |acc, c| acc + c * c.dot(&w.psi));
        if proj.norm_squared() > WEIGHT_EPS {
            let j = label(v).ok_or_else(|| {
                ProtocolError::Canonicalization(format!("Y eigenvalue {v} carries weight but is not in S"))
            })?;
            if carriers.iter().any(|c| c.0 == j) {
                return Err(ProtocolError::Canonicalization(format!("two Y clusters map to {}", s[j])));
            }
            let nrm = proj.norm();
            carriers.push((j, proj / nrm));
        }
    }

    let mut xcar: Vec<(usize, DVector<f64>)> = Vec::new();
    let mut residual = w.psi.clone();
    for (v, cols) in clusters(&w.x, CLUSTER_TOL) {
        if v.abs() <= CLUSTER_TOL {
            continue;
        }
        let proj: DVector<f64> = cols.iter().fold(DVector::zeros(w.dim()), |acc, c| acc + c * c.dot(&w.psi));
        if proj.norm_squared() > WEIGHT_EPS {
            let j = label(v).ok_or_else(|| {
                ProtocolError::Canonicalization(format!("X eigenvalue {v} carries weight but is not in S"))
            })?;
            if xcar.iter().any(|c| c.0 == j) {
                return Err(ProtocolError::Canonicalization(format!("two X clusters map to {}", s[j])));
            }
            residual -= &proj;
            let nrm = proj.norm();
            xcar.push((j, proj / nrm));
        }
    }
    if residual.norm_squared() > WEIGHT_EPS {
        let j = label(0.0)
            .ok_or_else(|| ProtocolError::Canonicalization("weight on X kernel but 0 is not in S".into()))?;
        let nrm = residual.norm();
        xcar.push((j, residual / nrm));
    }

    let mut basis: Vec<DVector<f64>> = carriers.iter().map(|c| c.1.clone()).collect();
    let mut rest: Vec<DVector<f64>> = Vec::new();
    for (_, u) in &xcar {
        let mut r = u.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&r);
                r.axpy(-c, b, 1.0);
            }
        }
        let nrm = r.norm();
        if nrm > 1e-9 {
            r /= nrm;
            basis.push(r.clone());
            rest.push(r);
        }
    }
    if rest.len() > n {
        return Err(ProtocolError::Canonicalization(format!(
            "{} padding directions exceed |S| = {n}",
            rest.len()
        )));
    }
    for r in &rest {
        lambda = lambda.max(r.dot(&(&w.y * r)));
    }
    if !rest.is_empty() {
        let rm = DMatrix::from_columns(&rest);
        lambda = lambda.max(sym_norm(&(rm.transpose() * &w.y * &rm)));
    }

    let embed = |v: &DVector<f64>| {
        let mut out = DVector::zeros(big);
        for (j, c) in &carriers {
            out[lemma_index(n, 0, *j, *j)] += c.dot(v);
        }
        for (k, r) in rest.iter().enumerate() {
            out[lemma_index(n, 1, k, k)] += r.dot(v);
        }
        out
    };
    let mut phi = DMatrix::zeros(big, n);
    let mut have = vec![false; n];
    for (j, u) in &xcar {
        phi.set_column(*j, &embed(u));
        have[*j] = true;
    }
    let mut diag_used = vec![false; n];
    for (j, _) in &carriers {
        diag_used[*j] = true;
    }
    let mut pool = rest.len();
    for j in 0..n {
        if have[j] {
            continue;
        }
        let idx = if !diag_used[j] {
            lemma_index(n, 0, j, j)
        } else if s[j] == 0.0 && n > 1 {
            lemma_index(n, 0, j, (j + 1) % n)
        } else {
            if pool >= n {
                return Err(ProtocolError::Canonicalization(format!(
                    "no free padding direction for {}",
                    s[j]
                )));
            }
            pool += 1;
            lemma_index(n, 1, pool - 1, pool - 1)
        };
        phi[(idx, j)] = 1.0;
    }

    let mut y = DMatrix::zeros(big, big);
    for j in 0..n {
        y[(lemma_index(n, 0, j, j), lemma_index(n, 0, j, j))] = s[j];
        y[(lemma_index(n, 1, j, j), lemma_index(n, 1, j, j))] = lambda;
    }
    let mut x = DMatrix::zeros(big, big);
    for j in 0..n {
        let c = phi.column(j);
        x += c * c.transpose() * s[j];
    }
    Ok(CanonicalWitness {
        n,
        phi,
        x,
        y,
        psi: embed(&w.psi),
        lambda,
    })
}
