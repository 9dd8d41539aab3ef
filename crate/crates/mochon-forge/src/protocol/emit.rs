//! Point game with elementary transitions → explicit protocol.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::linalg::unitary_from_columns;
use super::witness::{canonicalize_witness, direct_sum_witnesses, lemma_index, stationary_witness, synthesize_witness};
use super::{Actor, Layout, ProtocolDescription, ProtocolError, Round, Tolerances};
use crate::numeric::rational::{format_rational, to_f64, Rational};
use crate::pointgame::{Orientation, PointGame, SupportFunction1D, SupportFunction2D};
use crate::validity::ElementaryMove;

/// Knobs for [`emit_protocol_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmitOptions {
    pub tolerances: Tolerances,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            tolerances: Tolerances::default(),
        }
    }
}

/// What happens on one line between two frames.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineMove {
    /// Nothing moves.
    Identity,
    /// `stationary` weight stays put while `mv` acts on the rest.
    Move {
        stationary: Vec<(Rational, Rational)>,
        mv: ElementaryMove,
    },
}

/// Splits `before → after` into the common part `min(before, after)` and a
/// single raise, merge or split of the remainder. `None` when the
/// remainder has any other shape.
pub fn decompose_line(before: &SupportFunction1D, after: &SupportFunction1D) -> Option<LineMove> {
    let mut stationary = Vec::new();
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    let mut keys: Vec<&Rational> = before.iter().map(|p| p.0).chain(after.iter().map(|p| p.0)).collect();
    keys.sort();
    keys.dedup();
    for z in keys {
        let l = before.weight(z);
        let r = after.weight(z);
        let s = if l < r { l.clone() } else { r.clone() };
        if !s.is_zero() {
            stationary.push((z.clone(), s.clone()));
        }
        if l > s {
            sources.push((z.clone(), &l - &s));
        }
        if r > s {
            targets.push((z.clone(), &r - &s));
        }
    }
    let mv = match (sources.len(), targets.len()) {
        (0, 0) => return Some(LineMove::Identity),
        (1, 1) if sources[0].1 == targets[0].1 => {
            let (x, w) = sources.pop().unwrap();
            let (x_new, _) = targets.pop().unwrap();
            ElementaryMove::Raise { x, x_new, w }
        }
        (s, 1) if s >= 2 => ElementaryMove::Merge {
            sources,
            target: targets.pop().unwrap().0,
        },
        (1, t) if t >= 2 => ElementaryMove::Split {
            source: sources.pop().unwrap(),
            targets,
        },
        _ => return None,
    };
    Some(LineMove::Move { stationary, mv })
}

/// [`emit_protocol_with`] with default tolerances.
pub fn emit_protocol(g: &PointGame) -> Result<ProtocolDescription, ProtocolError> {
    emit_protocol_with(g, &EmitOptions::default())
}

/// Game slot `s` is played by Bob for even `s` and by Alice for odd `s`, and
/// is protocol round `n − s`. Each transition takes the next slot of its
/// party (vertical moves are Bob's); a skipped slot is idle. The slot count
/// is padded to be even so that the last round belongs to Bob.
fn schedule(orientations: &[Orientation]) -> Vec<Option<usize>> {
    let mut slots = Vec::new();
    for (t, &o) in orientations.iter().enumerate() {
        let want = if slots.len() % 2 == 0 {
            Orientation::Vertical
        } else {
            Orientation::Horizontal
        };
        if o != want {
            slots.push(None);
        }
        slots.push(Some(t));
    }
    if slots.len() % 2 == 1 {
        slots.push(None);
    }
    slots
}

struct Indexed {
    coords: Vec<Rational>,
    values: Vec<f64>,
    index: BTreeMap<Rational, usize>,
}

impl Indexed {
    fn new(set: impl IntoIterator<Item = Rational>) -> Self {
        let coords: Vec<Rational> = set.into_iter().collect();
        let values = coords.iter().map(to_f64).collect();
        let index = coords.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Indexed { coords, values, index }
    }
}

fn line_witness_unitary(
    before: &SupportFunction1D,
    after: &SupportFunction1D,
    s: &[f64],
    lambda_floor: f64,
    tol: f64,
) -> Result<Option<(DMatrix<f64>, f64)>, Option<ProtocolError>> {
    if before == after {
        return Ok(None);
    }
    let (stationary, mv) = match decompose_line(before, after) {
        Some(LineMove::Identity) => return Ok(None),
        Some(LineMove::Move { stationary, mv }) => (stationary, mv),
        None => return Err(None),
    };
    let mut parts = vec![synthesize_witness(&mv, lambda_floor, tol).map_err(Some)?];
    parts.extend(stationary.iter().map(|(z, w)| stationary_witness(to_f64(z), to_f64(w))));
    let w = direct_sum_witnesses(&parts);
    let c = canonicalize_witness(&w, s).map_err(Some)?;
    let n = s.len();
    let targets: Vec<usize> = (0..n).map(|j| lemma_index(n, 0, j, j)).collect();
    Ok(Some((unitary_from_columns(&c.phi, &targets), c.lambda)))
}

/// Lifts `g` to a protocol with dual certificate.
///
/// The first frame must be `½[0,1] + ½[1,0]` and the last a single point of
/// weight 1. Every line of every transition must change by one raise,
/// merge or split on top of weight that stays put.
pub fn emit_protocol_with(g: &PointGame, opts: &EmitOptions) -> Result<ProtocolDescription, ProtocolError> {
    if g.first() != &SupportFunction2D::initial() {
        return Err(ProtocolError::InvalidGame("first frame is not ½[0,1] + ½[1,0]".into()));
    }
    let (fin, fin_w) = g
        .last()
        .as_single_point()
        .ok_or_else(|| ProtocolError::InvalidGame("last frame is not a single point".into()))?;
    if !fin_w.is_one() {
        return Err(ProtocolError::InvalidGame(format!(
            "final weight is {}, not 1",
            format_rational(fin_w)
        )));
    }
    if let Some(i) = g.frames().iter().position(|f| !f.is_nonnegative()) {
        return Err(ProtocolError::InvalidGame(format!("frame {i} has negative weight")));
    }
    let (xs, ys) = g.coordinate_sets();
    let sa = Indexed::new(xs);
    let sb = Indexed::new(ys);
    let lay = Layout {
        na: sa.coords.len(),
        nb: sb.coords.len(),
    };
    let max_coord = sa.values.iter().chain(&sb.values).copied().fold(0.0, f64::max);
    let lambda_floor = max_coord + 1.0;
    let tol = opts.tolerances.witness;

    let slots = schedule(g.orientations());
    let n = slots.len();
    let mut slot_frame = Vec::with_capacity(n + 1);
    slot_frame.push(0usize);
    for s in &slots {
        let last = *slot_frame.last().unwrap();
        slot_frame.push(s.map_or(last, |t| t + 1));
    }

    let jobs: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| {
            let count = if s % 2 == 0 { lay.na } else { lay.nb };
            (0..count).map(move |c| (s, c))
        })
        .collect();
    let results: Vec<Result<Option<(DMatrix<f64>, f64)>, ProtocolError>> = jobs
        .par_iter()
        .map(|&(s, c)| {
            let Some(t) = slots[s] else {
                return Ok(None);
            };
            let before = &g.frames()[slot_frame[s]];
            let after = &g.frames()[slot_frame[s + 1]];
            let (o, coord, moving, label) = if s % 2 == 0 {
                (Orientation::Vertical, &sa.coords[c], &sb.values, "x")
            } else {
                (Orientation::Horizontal, &sb.coords[c], &sa.values, "y")
            };
            line_witness_unitary(&before.line(o, coord), &after.line(o, coord), moving, lambda_floor, tol).map_err(|e| {
                e.unwrap_or_else(|| ProtocolError::NonElementaryTransition {
                    index: t,
                    line: format!("{label}={}", format_rational(coord)),
                })
            })
        })
        .collect();

    let mut lambda = lambda_floor;
    let mut blocks: Vec<Vec<DMatrix<f64>>> = (0..n).map(|_| Vec::new()).collect();
    for (&(s, _), r) in jobs.iter().zip(results) {
        let d = if s % 2 == 0 { lay.bob_block() } else { lay.alice_block() };
        let u = match r? {
            None => DMatrix::identity(d, d),
            Some((u, lam)) => {
                lambda = lambda.max(lam);
                if s % 2 == 0 {
                    lemma_to_bob(&u, lay.nb)
                } else {
                    u
                }
            }
        };
        blocks[s].push(u);
    }

    let ia = |z: &Rational| sa.index[z];
    let ib = |z: &Rational| sb.index[z];
    let one = Rational::one();
    let mut z_a = DMatrix::zeros(lay.dim_a(), lay.dim_a());
    for j in 0..lay.na {
        z_a[(lay.a_index(0, j), lay.a_index(0, j))] = sa.values[j];
        z_a[(lay.a_index(1, j), lay.a_index(1, j))] = lambda;
    }
    let mut z_b = DMatrix::zeros(lay.dim_b(), lay.dim_b());
    for j in 0..lay.nb {
        z_b[(lay.b_index(j, 0), lay.b_index(j, 0))] = sb.values[j];
        z_b[(lay.b_index(j, 1), lay.b_index(j, 1))] = lambda;
    }
    let mut pi_a1 = DMatrix::zeros(lay.dim_a(), lay.dim_a());
    pi_a1[(lay.a_index(0, ia(&one)), lay.a_index(0, ia(&one)))] = 1.0;
    let pi_a0 = DMatrix::identity(lay.dim_a(), lay.dim_a()) - &pi_a1;
    let mut pi_b0 = DMatrix::zeros(lay.dim_b(), lay.dim_b());
    pi_b0[(lay.b_index(ib(&one), 0), lay.b_index(ib(&one), 0))] = 1.0;
    let pi_b1 = DMatrix::identity(lay.dim_b(), lay.dim_b()) - &pi_b0;

    let z_a_rounds = (0..=n)
        .map(|i| if i + 1 >= n { pi_a1.clone() } else { z_a.clone() })
        .collect();
    let z_b_rounds = (0..=n)
        .map(|i| if i == n { pi_b0.clone() } else { z_b.clone() })
        .collect();

    let mut e_a = DMatrix::zeros(lay.alice_block(), lay.alice_block());
    for z in 0..lay.na {
        let k = lay.alice_local(0, z, z);
        e_a[(k, k)] = 1.0;
    }
    let mut e_b = DMatrix::zeros(lay.bob_block(), lay.bob_block());
    for z in 0..lay.nb {
        let k = lay.bob_local(z, z, 0);
        e_b[(k, k)] = 1.0;
    }

    let encode = |f: &SupportFunction2D| {
        let w: Vec<(usize, usize, f64)> = f.iter().map(|(p, w)| (ia(&p.x), ib(&p.y), to_f64(w))).collect();
        lay.encode(&w)
    };
    let honest_states: Vec<DVector<f64>> = (0..=n).map(|i| encode(&g.frames()[slot_frame[n - i]])).collect();

    let unit = |d: usize, k: usize| {
        let mut v = DVector::zeros(d);
        v[k] = 1.0;
        v
    };
    let (bx, by) = (ia(&fin.x), ib(&fin.y));
    let rounds = (1..=n)
        .map(|i| {
            let s = n - i;
            Round {
                actor: Actor::of_round(i),
                source_transition: slots[s],
                blocks: std::mem::take(&mut blocks[s]),
            }
        })
        .collect();
    let p = ProtocolDescription {
        s_a: sa.coords.clone(),
        s_b: sb.coords.clone(),
        lambda,
        tolerances: opts.tolerances,
        rounds,
        initial_a: unit(lay.dim_a(), lay.a_index(0, bx)),
        initial_m: unit(lay.dim_m(), bx * lay.nb + by),
        initial_b: unit(lay.dim_b(), lay.b_index(by, 0)),
        honest_states,
        e_a,
        e_b,
        z_a,
        z_b,
        z_a_rounds,
        z_b_rounds,
        pi_a: [pi_a0, pi_a1],
        pi_b: [pi_b0, pi_b1],
    };
    p.validate()?;
    Ok(p)
}

/// Reorders a unitary from `|b, z, z′⟩` to Bob's `|z′⟩_{B′}|z, b⟩_B`.
fn lemma_to_bob(u: &DMatrix<f64>, nb: usize) -> DMatrix<f64> {
    let lay = Layout { na: 1, nb };
    let d = u.nrows();
    let mut perm = vec![0; d];
    for b in 0..2 {
        for z in 0..nb {
            for z2 in 0..nb {
                perm[lemma_index(nb, b, z, z2)] = lay.bob_local(z2, z, b);
            }
        }
    }
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(perm[i], perm[j])] = u[(i, j)];
        }
    }
    out
}
