//! Protocol → point game, by projecting the honest states onto the joint
//! eigenspaces of the per-round duals.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use serde::Serialize;

use super::linalg::sym_eigen;
use super::{Actor, ProtocolDescription, ProtocolError};
use crate::numeric::rational::Rational;
use crate::pointgame::{Orientation, Point2D, PointGame, SupportFunction2D};

/// Knobs for [`extract_point_game`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractOptions {
    /// Eigenvalues closer than this are one cluster.
    pub cluster_tol: f64,
    /// Largest denominator allowed when snapping to rationals.
    pub max_denominator: u64,
    /// Weights at or below this are dropped.
    pub weight_floor: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            cluster_tol: super::CLUSTER_TOL,
            max_denominator: 1_000_000,
            weight_floor: 1e-12,
        }
    }
}

/// Extracted frames before snapping, and the snapped game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractedGame {
    /// `(x, y, weight)` triples of each kept frame, in game order.
    pub raw_frames: Vec<Vec<(f64, f64, f64)>>,
    #[serde(skip)]
    pub game: PointGame,
    /// Largest `|snapped − raw|` over all coordinates and weights.
    pub max_snap_error: f64,
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// from the continued fraction and its last semiconvergent.
pub fn best_rational(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return Rational::from_integer(BigInt::from(0));
    }
    let neg = x < 0.0;
    let v0 = x.abs();
    let max_den = max_den.max(1) as i128;
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    let mut v = v0;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let a = a as i128;
        let q2 = q0 + a * q1;
        if q2 > max_den {
            let k = (max_den - q0) / q1;
            let (sp, sq) = (p0 + k * p1, q0 + k * q1);
            let err_semi = (sp as f64 / sq as f64 - v0).abs();
            let err_conv = (p1 as f64 / q1 as f64 - v0).abs();
            if err_semi < err_conv {
                p1 = sp;
                q1 = sq;
            }
            break;
        }
        let p2 = p0 + a * p1;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac <= f64::EPSILON * v.max(1.0) {
            break;
        }
        v = 1.0 / frac;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

/// Eigenvalue clusters `(value, basis)` of a symmetric matrix, ascending.
fn eigen_clusters(z: &DMatrix<f64>, tol: f64) -> Vec<(f64, DMatrix<f64>)> {
    let e = sym_eigen(z);
    let mut order: Vec<usize> = (0..z.nrows()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for i in order {
        let v = e.eigenvalues[i];
        match groups.last_mut() {
            Some((vals, cols)) if v - *vals.last().unwrap() <= tol => {
                vals.push(v);
                cols.push(i);
            }
            _ => groups.push((vec![v], vec![i])),
        }
    }
    groups
        .into_iter()
        .map(|(vals, cols)| {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let q = DMatrix::from_columns(&cols.iter().map(|&c| e.eigenvectors.column(c)).collect::<Vec<_>>());
            (mean, q)
        })
        .collect()
}

fn check_gaps(cl: &[(f64, DMatrix<f64>)], round: usize, tol: f64) -> Result<(), ProtocolError> {
    for w in cl.windows(2) {
        let gap = w[1].0 - w[0].0;
        if gap < 10.0 * tol {
            return Err(ProtocolError::AmbiguousEigenvalueClustering { round, gap });
        }
    }
    Ok(())
}

/// `prob[Z_A, Z_B, ψ]` as `(z_A, z_B, weight)` triples.
fn joint_weights(
    p: &ProtocolDescription,
    za: &[(f64, DMatrix<f64>)],
    zb: &[(f64, DMatrix<f64>)],
    psi: &DVector<f64>,
    floor: f64,
) -> Vec<(f64, f64, f64)> {
    let lay = p.layout();
    let mut w = vec![vec![0.0; zb.len()]; za.len()];
    for m in 0..lay.dim_m() {
        let block = lay.middle_block(psi, m);
        for (i, (_, qa)) in za.iter().enumerate() {
            let left = qa.transpose() * &block;
            for (j, (_, qb)) in zb.iter().enumerate() {
                w[i][j] += (&left * qb).norm_squared();
            }
        }
    }
    let mut out = Vec::new();
    for (i, (va, _)) in za.iter().enumerate() {
        for (j, (vb, _)) in zb.iter().enumerate() {
            if w[i][j] > floor {
                out.push((*va, *vb, w[i][j]));
            }
        }
    }
    out
}

/// Frame `p_{n−i}` is the joint spectral distribution of `ψ_i` under
/// `Z_{A,i} ⊗ I ⊗ Z_{B,i}`. Frames of idle rounds are dropped; the
/// remaining transitions take the orientation of the round's actor.
pub fn extract_point_game(p: &ProtocolDescription, opts: &ExtractOptions) -> Result<ExtractedGame, ProtocolError> {
    p.validate()?;
    let n = p.num_rounds();
    let tol = opts.cluster_tol;
    let mut raw: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); n + 1];
    for i in 0..=n {
        let ca = eigen_clusters(&p.z_a_rounds[i], tol);
        let cb = eigen_clusters(&p.z_b_rounds[i], tol);
        check_gaps(&ca, i, tol)?;
        check_gaps(&cb, i, tol)?;
        raw[n - i] = joint_weights(p, &ca, &cb, &p.honest_states[i], opts.weight_floor);
    }

    let mut kept = vec![0usize];
    let mut orientations = Vec::new();
    for s in 0..n {
        let round = &p.rounds[n - s - 1];
        if round.source_transition.is_some() {
            kept.push(s + 1);
            orientations.push(match round.actor {
                Actor::Alice => Orientation::Horizontal,
                Actor::Bob => Orientation::Vertical,
            });
        }
    }

    let mut max_err: f64 = 0.0;
    let mut snap = |v: f64| {
        let r = best_rational(v, opts.max_denominator);
        max_err = max_err.max((crate::numeric::rational::to_f64(&r) - v).abs());
        r
    };
    let mut frames = Vec::with_capacity(kept.len());
    for &j in &kept {
        let mut f = SupportFunction2D::new();
        for &(x, y, w) in &raw[j] {
            f.add_weight(Point2D::new(snap(x), snap(y)), snap(w));
        }
        frames.push(f);
    }
    let game = PointGame::new(frames, orientations).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    Ok(ExtractedGame {
        raw_frames: kept.iter().map(|&j| raw[j].clone()).collect(),
        game,
        max_snap_error: max_err,
    })
}
