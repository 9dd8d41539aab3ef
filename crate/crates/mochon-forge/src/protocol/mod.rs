//! Lifting point games with elementary transitions to explicit protocols,
//! verifying their dual certificates, simulating honest play and extracting
//! the point game back. This is the only floating-point module.
//!
//! Registers: Alice holds `A = span{|b, z_A⟩}`, the message space is
//! `M = A′ ⊗ B′` with bases `|z_A⟩`, `|z_B⟩`, and Bob holds
//! `B = span{|z_B, b⟩}`, where `b ∈ {0, 1}` and `z_A ∈ S_A`, `z_B ∈ S_B` index
//! the coordinate sets of the game. Rounds are numbered `1..n`; odd rounds
//! are Alice's and even rounds Bob's. Round `i` maps `ψ_{i−1}` to
//! `ψ_i = E_i U_i ψ_{i−1}`. The point game runs backward in protocol time:
//! `ψ_0` encodes the final point and `ψ_n` the initial frame.

pub mod emit;
pub mod extract;
pub mod linalg;
pub mod simulate;
pub mod verify;
pub mod witness;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numeric::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::pointgame::FORMAT_VERSION;

pub use emit::{decompose_line, emit_protocol, emit_protocol_with, EmitOptions, LineMove};
pub use extract::{best_rational, extract_point_game, ExtractOptions, ExtractedGame};
pub use simulate::{simulate_honest, HonestRun};
pub use verify::{verify_dual_feasibility, ConstraintCheck, DualReport};
pub use witness::{
    canonicalize_witness, direct_sum_witnesses, synthesize_witness, CanonicalWitness, EbmWitness,
    WitnessReport, CLUSTER_TOL, WITNESS_TOL,
};

/// Errors of the protocol module.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("elementary condition fails: {0}")]
    NotElementarilyValid(String),
    #[error("transition {index} line {line} is not a single raise, merge or split")]
    NonElementaryTransition { index: usize, line: String },
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("canonicalization failed: {0}")]
    Canonicalization(String),
    #[error("round {round}: eigenvalue clusters only {gap:e} apart")]
    AmbiguousEigenvalueClustering { round: usize, gap: f64 },
    #[error("malformed protocol: {0}")]
    Malformed(String),
}

/// Party acting in a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Actor {
    Alice,
    Bob,
}

impl Actor {
    /// Alice acts in odd rounds.
    pub fn of_round(i: usize) -> Self {
        if i % 2 == 1 {
            Actor::Alice
        } else {
            Actor::Bob
        }
    }

    pub fn other(self) -> Self {
        match self {
            Actor::Alice => Actor::Bob,
            Actor::Bob => Actor::Alice,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Actor::Alice => "A",
            Actor::Bob => "B",
        }
    }
}

impl Serialize for Actor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Actor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "A" => Ok(Actor::Alice),
            "B" => Ok(Actor::Bob),
            other => Err(serde::de::Error::custom(format!("actor must be \"A\" or \"B\", got {other:?}"))),
        }
    }
}

/// Tolerances the protocol was built with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative feasibility slack allowed in merge witnesses.
    pub witness: f64,
    /// Absolute eigenvalue clustering tolerance.
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            witness: WITNESS_TOL,
            cluster: CLUSTER_TOL,
        }
    }
}

/// Index arithmetic for `A ⊗ A′ ⊗ B′ ⊗ B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub na: usize,
    pub nb: usize,
}

impl Layout {
    pub fn dim_a(&self) -> usize {
        2 * self.na
    }

    pub fn dim_m(&self) -> usize {
        self.na * self.nb
    }

    pub fn dim_b(&self) -> usize {
        2 * self.nb
    }

    pub fn dim(&self) -> usize {
        self.dim_a() * self.dim_m() * self.dim_b()
    }

    /// Alice's block dimension, `A ⊗ A′`.
    pub fn alice_block(&self) -> usize {
        2 * self.na * self.na
    }

    /// Bob's block dimension, `B′ ⊗ B`.
    pub fn bob_block(&self) -> usize {
        2 * self.nb * self.nb
    }

    pub fn a_index(&self, b: usize, z: usize) -> usize {
        b * self.na + z
    }

    pub fn b_index(&self, z: usize, b: usize) -> usize {
        z * 2 + b
    }

    /// `|b, z⟩_A |z2⟩_{A′}`.
    pub fn alice_local(&self, b: usize, z: usize, z2: usize) -> usize {
        self.a_index(b, z) * self.na + z2
    }

    /// `|z2⟩_{B′} |z, b⟩_B`.
    pub fn bob_local(&self, z2: usize, z: usize, b: usize) -> usize {
        z2 * self.dim_b() + self.b_index(z, b)
    }

    /// Full index of `|a_idx⟩_A |za2⟩_{A′} |zb2⟩_{B′} |b_idx⟩_B`.
    pub fn full(&self, a_idx: usize, za2: usize, zb2: usize, b_idx: usize) -> usize {
        ((a_idx * self.na + za2) * self.nb + zb2) * self.dim_b() + b_idx
    }

    /// `Σ √p(z_A, z_B) |0, z_A⟩ |z_A, z_B⟩ |z_B, 0⟩` from index-weight triples.
    pub fn encode(&self, weights: &[(usize, usize, f64)]) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        for &(za, zb, w) in weights {
            v[self.full(self.a_index(0, za), za, zb, self.b_index(zb, 0))] += w.sqrt();
        }
        v
    }

    /// `U ψ` for an Alice round: block `zb2` acts on `A ⊗ A′`.
    pub fn apply_alice(&self, blocks: &[DMatrix<f64>], psi: &DVector<f64>) -> DVector<f64> {
        let d = self.alice_block();
        let db = self.dim_b();
        let mut out = DVector::zeros(psi.len());
        let mut col = DVector::zeros(d);
        for zb2 in 0..self.nb {
            for bi in 0..db {
                for l in 0..d {
                    col[l] = psi[(l * self.nb + zb2) * db + bi];
                }
                let r = &blocks[zb2] * &col;
                for l in 0..d {
                    out[(l * self.nb + zb2) * db + bi] = r[l];
                }
            }
        }
        out
    }

    /// `U ψ` for a Bob round: block `za2` acts on `B′ ⊗ B`.
    pub fn apply_bob(&self, blocks: &[DMatrix<f64>], psi: &DVector<f64>) -> DVector<f64> {
        let d = self.bob_block();
        let mut out = DVector::zeros(psi.len());
        for ai in 0..self.dim_a() {
            for za2 in 0..self.na {
                let base = (ai * self.na + za2) * d;
                let r = &blocks[za2] * psi.rows(base, d);
                out.rows_mut(base, d).copy_from(&r);
            }
        }
        out
    }

    /// `(X_A ⊗ I ⊗ X_B) ψ`.
    pub fn apply_ab(&self, xa: &DMatrix<f64>, xb: &DMatrix<f64>, psi: &DVector<f64>) -> DVector<f64> {
        let (da, dm, db) = (self.dim_a(), self.dim_m(), self.dim_b());
        let mut out = DVector::zeros(psi.len());
        for m in 0..dm {
            let block = self.middle_block(psi, m);
            let r = xa * block * xb.transpose();
            for a in 0..da {
                for b in 0..db {
                    out[(a * dm + m) * db + b] = r[(a, b)];
                }
            }
        }
        out
    }

    /// `Ψ_m[a, b] = ψ[a, m, b]`.
    pub fn middle_block(&self, psi: &DVector<f64>, m: usize) -> DMatrix<f64> {
        let (da, dm, db) = (self.dim_a(), self.dim_m(), self.dim_b());
        DMatrix::from_fn(da, db, |a, b| psi[(a * dm + m) * db + b])
    }
}

/// One protocol round. Idle rounds carry identity blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub actor: Actor,
    /// Game transition realized by this round, `None` for an idle round.
    pub source_transition: Option<usize>,
    /// Alice: one block per `z_B` on `A ⊗ A′`. Bob: one per `z_A` on `B′ ⊗ B`.
    pub blocks: Vec<DMatrix<f64>>,
}

/// Explicit protocol and its dual certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolDescription {
    pub s_a: Vec<Rational>,
    pub s_b: Vec<Rational>,
    /// Padding eigenvalue of `Z_A` and `Z_B`.
    pub lambda: f64,
    pub tolerances: Tolerances,
    pub rounds: Vec<Round>,
    /// `ψ_{A,0}`, `ψ_{M,0}`, `ψ_{B,0}`.
    pub initial_a: DVector<f64>,
    pub initial_m: DVector<f64>,
    pub initial_b: DVector<f64>,
    /// `ψ_0, …, ψ_n`.
    pub honest_states: Vec<DVector<f64>>,
    /// `Σ |0, z, z⟩⟨0, z, z|` on `A ⊗ A′`.
    pub e_a: DMatrix<f64>,
    /// `Σ |z, z, 0⟩⟨z, z, 0|` on `B′ ⊗ B`.
    pub e_b: DMatrix<f64>,
    pub z_a: DMatrix<f64>,
    pub z_b: DMatrix<f64>,
    /// `Z_{A,0}, …, Z_{A,n}`.
    pub z_a_rounds: Vec<DMatrix<f64>>,
    pub z_b_rounds: Vec<DMatrix<f64>>,
    /// `[Π_A^(0), Π_A^(1)]`.
    pub pi_a: [DMatrix<f64>; 2],
    pub pi_b: [DMatrix<f64>; 2],
}

impl ProtocolDescription {
    pub fn layout(&self) -> Layout {
        Layout {
            na: self.s_a.len(),
            nb: self.s_b.len(),
        }
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn s_a_f64(&self) -> Vec<f64> {
        self.s_a.iter().map(to_f64).collect()
    }

    pub fn s_b_f64(&self) -> Vec<f64> {
        self.s_b.iter().map(to_f64).collect()
    }

    /// `ψ_{A,0} ⊗ ψ_{M,0} ⊗ ψ_{B,0}`.
    pub fn initial_product(&self) -> DVector<f64> {
        let am = self.initial_a.kronecker(&self.initial_m);
        am.kronecker(&self.initial_b)
    }

    /// `E_i U_i ψ` for round `i` (1-based).
    pub fn apply_round(&self, i: usize, psi: &DVector<f64>) -> DVector<f64> {
        let lay = self.layout();
        let r = &self.rounds[i - 1];
        match r.actor {
            Actor::Alice => {
                let e: Vec<DMatrix<f64>> = r.blocks.iter().map(|u| &self.e_a * u).collect();
                lay.apply_alice(&e, psi)
            }
            Actor::Bob => {
                let e: Vec<DMatrix<f64>> = r.blocks.iter().map(|u| &self.e_b * u).collect();
                lay.apply_bob(&e, psi)
            }
        }
    }

    /// Structural consistency of dimensions and round data.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let lay = self.layout();
        let n = self.rounds.len();
        let bad = |m: String| Err(ProtocolError::Malformed(m));
        if lay.na == 0 || lay.nb == 0 {
            return bad("empty coordinate set".into());
        }
        let square = |m: &DMatrix<f64>, d: usize| m.nrows() == d && m.ncols() == d;
        if self.initial_a.len() != lay.dim_a() || self.initial_m.len() != lay.dim_m() || self.initial_b.len() != lay.dim_b() {
            return bad("initial state dimensions".into());
        }
        if self.honest_states.len() != n + 1 || self.honest_states.iter().any(|h| h.len() != lay.dim()) {
            return bad(format!("need {} honest states of dimension {}", n + 1, lay.dim()));
        }
        if self.z_a_rounds.len() != n + 1 || self.z_b_rounds.len() != n + 1 {
            return bad(format!("need {} per-round duals", n + 1));
        }
        let a_ops = [&self.z_a, &self.pi_a[0], &self.pi_a[1]];
        if a_ops.iter().any(|m| !square(m, lay.dim_a())) || self.z_a_rounds.iter().any(|m| !square(m, lay.dim_a())) {
            return bad("Alice operator dimensions".into());
        }
        let b_ops = [&self.z_b, &self.pi_b[0], &self.pi_b[1]];
        if b_ops.iter().any(|m| !square(m, lay.dim_b())) || self.z_b_rounds.iter().any(|m| !square(m, lay.dim_b())) {
            return bad("Bob operator dimensions".into());
        }
        if !square(&self.e_a, lay.alice_block()) || !square(&self.e_b, lay.bob_block()) {
            return bad("projection dimensions".into());
        }
        for (i, r) in self.rounds.iter().enumerate() {
            if r.actor != Actor::of_round(i + 1) {
                return bad(format!("round {} has the wrong actor", i + 1));
            }
            let (count, d) = match r.actor {
                Actor::Alice => (lay.nb, lay.alice_block()),
                Actor::Bob => (lay.na, lay.bob_block()),
            };
            if r.blocks.len() != count || r.blocks.iter().any(|b| !square(b, d)) {
                return bad(format!("round {} needs {count} blocks of size {d}", i + 1));
            }
        }
        Ok(())
    }
}

// ----- JSON -----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDto {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

fn clean(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

impl From<&DMatrix<f64>> for MatrixDto {
    fn from(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(clean(m[(r, c)]));
            }
        }
        MatrixDto {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl MatrixDto {
    fn into_matrix(self) -> Result<DMatrix<f64>, String> {
        if self.data.len() != self.rows * self.cols {
            return Err(format!(
                "{}x{} matrix with {} entries",
                self.rows,
                self.cols,
                self.data.len()
            ));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

fn vec_dto(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().map(clean).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimsDto {
    a: usize,
    m: usize,
    b: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderDto {
    dims: DimsDto,
    lambda: f64,
    tolerances: Tolerances,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoundDto {
    actor: Actor,
    source_transition: Option<usize>,
    blocks: Vec<MatrixDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialDto {
    a: Vec<f64>,
    m: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionsDto {
    e_a: MatrixDto,
    e_b: MatrixDto,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DualsDto {
    z_a: MatrixDto,
    z_b: MatrixDto,
    z_a_rounds: Vec<MatrixDto>,
    z_b_rounds: Vec<MatrixDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PovmsDto {
    pi_a: [MatrixDto; 2],
    pi_b: [MatrixDto; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolDto {
    format: u32,
    header: HeaderDto,
    s_a: Vec<String>,
    s_b: Vec<String>,
    rounds: Vec<RoundDto>,
    initial_state: InitialDto,
    honest_states: Vec<Vec<f64>>,
    projections: ProjectionsDto,
    duals: DualsDto,
    povms: PovmsDto,
}

impl Serialize for ProtocolDescription {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let lay = self.layout();
        let m = |x: &DMatrix<f64>| MatrixDto::from(x);
        ProtocolDto {
            format: FORMAT_VERSION,
            header: HeaderDto {
                dims: DimsDto {
                    a: lay.dim_a(),
                    m: lay.dim_m(),
                    b: lay.dim_b(),
                },
                lambda: self.lambda,
                tolerances: self.tolerances,
            },
            s_a: self.s_a.iter().map(format_rational).collect(),
            s_b: self.s_b.iter().map(format_rational).collect(),
            rounds: self
                .rounds
                .iter()
                .map(|r| RoundDto {
                    actor: r.actor,
                    source_transition: r.source_transition,
                    blocks: r.blocks.iter().map(m).collect(),
                })
                .collect(),
            initial_state: InitialDto {
                a: vec_dto(&self.initial_a),
                m: vec_dto(&self.initial_m),
                b: vec_dto(&self.initial_b),
            },
            honest_states: self.honest_states.iter().map(vec_dto).collect(),
            projections: ProjectionsDto {
                e_a: m(&self.e_a),
                e_b: m(&self.e_b),
            },
            duals: DualsDto {
                z_a: m(&self.z_a),
                z_b: m(&self.z_b),
                z_a_rounds: self.z_a_rounds.iter().map(m).collect(),
                z_b_rounds: self.z_b_rounds.iter().map(m).collect(),
            },
            povms: PovmsDto {
                pi_a: [m(&self.pi_a[0]), m(&self.pi_a[1])],
                pi_b: [m(&self.pi_b[0]), m(&self.pi_b[1])],
            },
        }
        .serialize(s)
    }
}

fn from_dto(dto: ProtocolDto) -> Result<ProtocolDescription, String> {
    if dto.format != FORMAT_VERSION {
        return Err(format!("unsupported format version {}", dto.format));
    }
    let parse = |v: Vec<String>| -> Result<Vec<Rational>, String> {
        v.iter().map(|s| parse_rational(s).map_err(|e| e.to_string())).collect()
    };
    let mats = |v: Vec<MatrixDto>| -> Result<Vec<DMatrix<f64>>, String> { v.into_iter().map(MatrixDto::into_matrix).collect() };
    let [pa0, pa1] = dto.povms.pi_a;
    let [pb0, pb1] = dto.povms.pi_b;
    let p = ProtocolDescription {
        s_a: parse(dto.s_a)?,
        s_b: parse(dto.s_b)?,
        lambda: dto.header.lambda,
        tolerances: dto.header.tolerances,
        rounds: dto
            .rounds
            .into_iter()
            .map(|r| {
                Ok(Round {
                    actor: r.actor,
                    source_transition: r.source_transition,
                    blocks: mats(r.blocks)?,
                })
            })
            .collect::<Result<_, String>>()?,
        initial_a: DVector::from_vec(dto.initial_state.a),
        initial_m: DVector::from_vec(dto.initial_state.m),
        initial_b: DVector::from_vec(dto.initial_state.b),
        honest_states: dto.honest_states.into_iter().map(DVector::from_vec).collect(),
        e_a: dto.projections.e_a.into_matrix()?,
        e_b: dto.projections.e_b.into_matrix()?,
        z_a: dto.duals.z_a.into_matrix()?,
        z_b: dto.duals.z_b.into_matrix()?,
        z_a_rounds: mats(dto.duals.z_a_rounds)?,
        z_b_rounds: mats(dto.duals.z_b_rounds)?,
        pi_a: [pa0.into_matrix()?, pa1.into_matrix()?],
        pi_b: [pb0.into_matrix()?, pb1.into_matrix()?],
    };
    let lay = p.layout();
    let d = &dto.header.dims;
    if d.a != lay.dim_a() || d.m != lay.dim_m() || d.b != lay.dim_b() {
        return Err("header dimensions disagree with the coordinate sets".into());
    }
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

impl<'de> Deserialize<'de> for ProtocolDescription {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_dto(ProtocolDto::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
