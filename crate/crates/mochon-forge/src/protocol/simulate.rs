//! Honest execution of a protocol.

use serde::Serialize;

use super::ProtocolDescription;

/// Outcome probabilities of the honest run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HonestRun {
    /// `‖Π_A^(0) ⊗ I ⊗ Π_B^(0) ψ_n‖²`.
    pub p_a: f64,
    /// `‖Π_A^(1) ⊗ I ⊗ Π_B^(1) ψ_n‖²`.
    pub p_b: f64,
    /// Larger of the two disagreement probabilities.
    pub correctness_residual: f64,
    /// Largest `‖E_i U_i ψ_{i−1} − ψ_i‖` against the stored honest states.
    pub max_honest_deviation: f64,
}

/// Runs `ψ ← E_i U_i ψ` from the product initial state through all rounds.
pub fn simulate_honest(p: &ProtocolDescription) -> HonestRun {
    let lay = p.layout();
    let mut psi = p.initial_product();
    let mut dev = (&psi - &p.honest_states[0]).norm();
    for i in 1..=p.num_rounds() {
        psi = p.apply_round(i, &psi);
        dev = dev.max((&psi - &p.honest_states[i]).norm());
    }
    let prob = |a: usize, b: usize| lay.apply_ab(&p.pi_a[a], &p.pi_b[b], &psi).norm_squared();
    HonestRun {
        p_a: prob(0, 0),
        p_b: prob(1, 1),
        correctness_residual: prob(0, 1).max(prob(1, 0)),
        max_honest_deviation: dev,
    }
}

#[cfg(test)]
mod tests {
    use super::super::emit::tests::{a5_game, two_move_game};
    use super::super::emit_protocol;
    use super::*;

    #[test]
    fn a5_is_balanced_and_correct() {
        let r = simulate_honest(&emit_protocol(&a5_game()).unwrap());
        assert!((r.p_a - 0.5).abs() < 1e-9, "{r:?}");
        assert!((r.p_b - 0.5).abs() < 1e-9, "{r:?}");
        assert!(r.correctness_residual < 1e-9);
        assert!(r.max_honest_deviation < 1e-12);
    }

    #[test]
    fn two_move_game_is_balanced() {
        let r = simulate_honest(&emit_protocol(&two_move_game()).unwrap());
        assert!((r.p_a - 0.5).abs() < 1e-12 && (r.p_b - 0.5).abs() < 1e-12, "{r:?}");
    }
}
