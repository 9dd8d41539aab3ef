//! Numerical check of the dual certificate of a protocol.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::{min_eigenvalue, sym_norm, unitarity_defect};
use super::{Actor, ProtocolDescription};

/// One checked constraint. `passed` iff `value ≤ bound` for residual-type
/// checks and `value ≥ bound` for eigenvalue-type checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub constraint: &'static str,
    pub party: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Outcome of [`verify_dual_feasibility`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualReport {
    pub passed: bool,
    /// Certified `P_B* ≤ β`.
    pub beta: f64,
    /// Certified `P_A* ≤ α`.
    pub alpha: f64,
    pub tol: f64,
    pub failures: usize,
    /// `⟨ψ_i| Z_{A,i} ⊗ I ⊗ Z_{B,i} |ψ_i⟩` for `i = 0..n`.
    pub chain: Vec<f64>,
    pub checks: Vec<ConstraintCheck>,
}

fn upper(constraint: &'static str, party: Actor, round: Option<usize>, block: Option<usize>, value: f64, bound: f64) -> ConstraintCheck {
    ConstraintCheck {
        constraint,
        party: party.tag(),
        round,
        block,
        value,
        bound,
        passed: value <= bound,
    }
}

fn lower(constraint: &'static str, party: Actor, round: Option<usize>, block: Option<usize>, value: f64, bound: f64) -> ConstraintCheck {
    ConstraintCheck {
        passed: value >= bound,
        ..upper(constraint, party, round, block, value, bound)
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a: f64, v| a.max(v.abs()))
}

/// `Z ⊗ I_d` with `Z` on the leading factor.
fn kron_left(z: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    z.kronecker(&DMatrix::<f64>::identity(d, d))
}

/// `I_d ⊗ Z` with `Z` on the trailing factor.
fn kron_right(z: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    DMatrix::<f64>::identity(d, d).kronecker(z)
}

/// Checks, for every round, positivity of the duals, the party's LMI
/// `Z_{i−1} ⊗ I − U†E(Z_i ⊗ I)EU ⪰ 0` per controlled block, the other
/// party's equality `Z_i = Z_{i−1}`, unitarity, the projections and the
/// honest states; then `Z_{A,n} = Π_A^(1)`, `Z_{B,n} = Π_B^(0)`, and that
/// `ψ_{A,0}`, `ψ_{B,0}` are eigenvectors of `Z_{A,0}`, `Z_{B,0}`, whose
/// eigenvalues are the reported `β`, `α`. Eigenvalue checks use the bound
/// `−tol·max(‖Z‖, 1)`; residual checks use `tol` scaled the same way.
pub fn verify_dual_feasibility(p: &ProtocolDescription, tol: f64) -> DualReport {
    let mut checks = Vec::new();
    if p.validate().is_err() {
        checks.push(ConstraintCheck {
            constraint: "structure",
            party: "-",
            round: None,
            block: None,
            value: 1.0,
            bound: 0.0,
            passed: false,
        });
        return DualReport {
            passed: false,
            beta: f64::NAN,
            alpha: f64::NAN,
            tol,
            failures: 1,
            chain: Vec::new(),
            checks,
        };
    }
    let lay = p.layout();
    let n = p.num_rounds();
    let scale = |m: &DMatrix<f64>| sym_norm(m).max(1.0);

    for i in 0..=n {
        let za = &p.z_a_rounds[i];
        let zb = &p.z_b_rounds[i];
        checks.push(lower("psd", Actor::Alice, Some(i), None, min_eigenvalue(za), -tol * scale(za)));
        checks.push(lower("psd", Actor::Bob, Some(i), None, min_eigenvalue(zb), -tol * scale(zb)));
        checks.push(upper("symmetric", Actor::Alice, Some(i), None, max_abs(&(za - za.transpose())), tol * scale(za)));
        checks.push(upper("symmetric", Actor::Bob, Some(i), None, max_abs(&(zb - zb.transpose())), tol * scale(zb)));
    }

    for (e, party) in [(&p.e_a, Actor::Alice), (&p.e_b, Actor::Bob)] {
        checks.push(upper("projection", party, None, None, max_abs(&(e * e - e)).max(max_abs(&(e - e.transpose()))), tol));
    }

    let per_round: Vec<Vec<ConstraintCheck>> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let r = &p.rounds[i - 1];
            let (zp, zc, other_p, other_c, e) = match r.actor {
                Actor::Alice => (&p.z_a_rounds[i - 1], &p.z_a_rounds[i], &p.z_b_rounds[i - 1], &p.z_b_rounds[i], &p.e_a),
                Actor::Bob => (&p.z_b_rounds[i - 1], &p.z_b_rounds[i], &p.z_a_rounds[i - 1], &p.z_a_rounds[i], &p.e_b),
            };
            let other = r.actor.other();
            checks_equal(&mut out, other, i, other_p, other_c, tol);
            let (lhs, mid) = match r.actor {
                Actor::Alice => (kron_left(zp, lay.na), kron_left(zc, lay.na)),
                Actor::Bob => (kron_right(zp, lay.nb), kron_right(zc, lay.nb)),
            };
            let emid = e * &mid * e;
            let bound = -tol * scale(&lhs).max(scale(&mid));
            for (k, u) in r.blocks.iter().enumerate() {
                out.push(upper("unitarity", r.actor, Some(i), Some(k), unitarity_defect(u), tol));
                let m = &lhs - u.transpose() * &emid * u;
                out.push(lower("lmi", r.actor, Some(i), Some(k), min_eigenvalue(&m), bound));
            }
            let next = p.apply_round(i, &p.honest_states[i - 1]);
            out.push(upper("honest", r.actor, Some(i), None, (next - &p.honest_states[i]).norm(), tol));
            out
        })
        .collect();
    checks.extend(per_round.into_iter().flatten());

    checks.push(upper("final", Actor::Alice, Some(n), None, max_abs(&(&p.z_a_rounds[n] - &p.pi_a[1])), tol));
    checks.push(upper("final", Actor::Bob, Some(n), None, max_abs(&(&p.z_b_rounds[n] - &p.pi_b[0])), tol));
    for (pi, party) in [(&p.pi_a, Actor::Alice), (&p.pi_b, Actor::Bob)] {
        let d = pi[0].nrows();
        let sum = &pi[0] + &pi[1] - DMatrix::<f64>::identity(d, d);
        let idem = max_abs(&(&pi[0] * &pi[0] - &pi[0])).max(max_abs(&(&pi[1] * &pi[1] - &pi[1])));
        checks.push(upper("povm", party, None, None, max_abs(&sum).max(idem), tol));
    }

    let (beta, ra) = rayleigh(&p.z_a_rounds[0], &p.initial_a);
    let (alpha, rb) = rayleigh(&p.z_b_rounds[0], &p.initial_b);
    checks.push(upper("eigenvector", Actor::Alice, Some(0), None, ra, tol * scale(&p.z_a_rounds[0])));
    checks.push(upper("eigenvector", Actor::Bob, Some(0), None, rb, tol * scale(&p.z_b_rounds[0])));
    let init = p.initial_product();
    checks.push(upper("initial", Actor::Alice, Some(0), None, (&init - &p.honest_states[0]).norm(), tol));

    let chain: Vec<f64> = (0..=n)
        .map(|i| {
            let v = lay.apply_ab(&p.z_a_rounds[i], &p.z_b_rounds[i], &p.honest_states[i]);
            p.honest_states[i].dot(&v)
        })
        .collect();
    for i in 1..=n {
        let slack = tol * chain[i - 1].abs().max(1.0);
        checks.push(upper("chain", Actor::of_round(i), Some(i), None, chain[i] - chain[i - 1], slack));
    }

    let failures = checks.iter().filter(|c| !c.passed).count();
    DualReport {
        passed: failures == 0,
        beta,
        alpha,
        tol,
        failures,
        chain,
        checks,
    }
}

fn checks_equal(out: &mut Vec<ConstraintCheck>, party: Actor, i: usize, prev: &DMatrix<f64>, cur: &DMatrix<f64>, tol: f64) {
    out.push(upper("equality", party, Some(i), None, max_abs(&(cur - prev)), tol * sym_norm(prev).max(1.0)));
}

/// Rayleigh quotient of `z` at `v` and the eigen-residual `‖zv − ρv‖/‖v‖`.
fn rayleigh(z: &DMatrix<f64>, v: &nalgebra::DVector<f64>) -> (f64, f64) {
    let n2 = v.norm_squared();
    if n2 == 0.0 {
        return (f64::NAN, f64::INFINITY);
    }
    let zv = z * v;
    let rho = v.dot(&zv) / n2;
    (rho, (zv - v * rho).norm() / n2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::super::emit::tests::{a5_game, two_move_game};
    use super::super::{emit_protocol, Layout, Round, Tolerances};
    use super::*;
    use crate::numeric::rational::int;
    use nalgebra::DVector;

    fn failing(r: &DualReport) -> Vec<&ConstraintCheck> {
        r.checks.iter().filter(|c| !c.passed).collect()
    }

    #[test]
    fn a5_certificate() {
        let p = emit_protocol(&a5_game()).unwrap();
        let r = verify_dual_feasibility(&p, 1e-9);
        assert!(r.passed, "{:#?}", failing(&r));
        assert!((r.beta - 2.0 / 3.0).abs() < 1e-9);
        assert!((r.alpha - 0.75).abs() < 1e-9);
        for w in r.chain.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{:?}", r.chain);
        }
    }

    #[test]
    fn two_move_certificate() {
        let p = emit_protocol(&two_move_game()).unwrap();
        let r = verify_dual_feasibility(&p, 1e-9);
        assert!(r.passed, "{:#?}", failing(&r));
        assert!((r.beta - 1.0).abs() < 1e-12 && (r.alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corrupted_unitary_flags_lmi() {
        let mut p = emit_protocol(&a5_game()).unwrap();
        let lay = p.layout();
        // Alice's first active round, block of the line y = 3/4, row of the
        // largest coordinate: the LMI is tight along that row.
        let (ri, _) = p
            .rounds
            .iter()
            .enumerate()
            .find(|(_, r)| r.actor == Actor::Alice && r.source_transition.is_some())
            .unwrap();
        let u = &mut p.rounds[ri].blocks[1];
        let row = lay.alice_local(0, 3, 3);
        let col = (0..u.ncols()).max_by(|&a, &b| u[(row, a)].abs().total_cmp(&u[(row, b)].abs())).unwrap();
        let sign = u[(row, col)].signum();
        u[(row, col)] += 1e-3 * sign;
        let r = verify_dual_feasibility(&p, 1e-9);
        assert!(!r.passed);
        assert!(
            r.checks.iter().any(|c| c.constraint == "lmi" && !c.passed && c.round == Some(ri + 1)),
            "{:#?}",
            failing(&r)
        );
    }

    #[test]
    fn trivial_protocol_passes() {
        // S_A = S_B = {0, 1}, no rounds, Z = Π.
        let lay = Layout { na: 2, nb: 2 };
        let mut pi_a1 = DMatrix::zeros(4, 4);
        pi_a1[(lay.a_index(0, 1), lay.a_index(0, 1))] = 1.0;
        let mut pi_b0 = DMatrix::zeros(4, 4);
        pi_b0[(lay.b_index(1, 0), lay.b_index(1, 0))] = 1.0;
        let unit = |d: usize, k: usize| {
            let mut v = DVector::zeros(d);
            v[k] = 1.0;
            v
        };
        let mut e_a = DMatrix::zeros(8, 8);
        let mut e_b = DMatrix::zeros(8, 8);
        for z in 0..2 {
            e_a[(lay.alice_local(0, z, z), lay.alice_local(0, z, z))] = 1.0;
            e_b[(lay.bob_local(z, z, 0), lay.bob_local(z, z, 0))] = 1.0;
        }
        let a = unit(4, lay.a_index(0, 1));
        let m = unit(4, 3);
        let b = unit(4, lay.b_index(1, 0));
        let psi = a.kronecker(&m).kronecker(&b);
        let p = ProtocolDescription {
            s_a: vec![int(0), int(1)],
            s_b: vec![int(0), int(1)],
            lambda: 2.0,
            tolerances: Tolerances::default(),
            rounds: Vec::<Round>::new(),
            initial_a: a,
            initial_m: m,
            initial_b: b,
            honest_states: vec![psi],
            e_a,
            e_b,
            z_a: pi_a1.clone(),
            z_b: pi_b0.clone(),
            z_a_rounds: vec![pi_a1.clone()],
            z_b_rounds: vec![pi_b0.clone()],
            pi_a: [DMatrix::identity(4, 4) - &pi_a1, pi_a1],
            pi_b: [pi_b0.clone(), DMatrix::identity(4, 4) - &pi_b0],
        };
        let r = verify_dual_feasibility(&p, 1e-9);
        assert!(r.passed, "{:#?}", failing(&r));
        assert_eq!((r.beta, r.alpha), (1.0, 1.0));
    }

    #[test]
    fn malformed_structure_fails() {
        let mut p = emit_protocol(&two_move_game()).unwrap();
        p.honest_states.pop();
        let r = verify_dual_feasibility(&p, 1e-9);
        assert!(!r.passed);
        assert_eq!(r.checks[0].constraint, "structure");
    }
}
