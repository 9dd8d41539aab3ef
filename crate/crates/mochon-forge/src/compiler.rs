//! Compilation of a time-independent point game into a sequential game with
//! valid transitions, the ε-shift to strict validity, and resource counts.
//!
//! The emitted sequence has four catalyst-creation transitions, a loop of
//! `N` vertical/horizontal pairs that each add `(1−δ)γ′v` then `(1−δ)γ′h`,
//! and six closing transitions that merge everything into
//! `1[β+ε, α+ε]`, for `10 + 2N` transitions in total.

use std::collections::BTreeSet;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::numeric::rational::{
    ceil_to_multiple, next_multiple_above, rat, rational_gcd, Rational,
};
use crate::pointgame::{
    rational_str, Orientation, Point2D, PointGame, SupportFunction2D, Tipg, FORMAT_VERSION,
};
use crate::validity::{check_point_game, ValidityStatus};

/// Errors from [`tipg_to_sequential`], [`count_rounds`] and
/// [`shift_to_strict`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("TIPG identity h + v = final - initial does not hold ({0} residual points)")]
    InvalidTipg(usize),
    #[error("TIPG final weight must be 1")]
    NonUnitFinalWeight,
    #[error("v has no negative part; the final point is reached without a catalyst")]
    CatalystDegenerate,
    #[error("catalyst threshold m is 0: v places negative weight on the origin")]
    CatalystAtOrigin,
    #[error("catalyst masses a = {a}, b = {b} leave one axis empty")]
    UnbalancedCatalyst { a: String, b: String },
    #[error("epsilon = {0} is infeasible: need epsilon > 0 and delta + delta' < 1")]
    InfeasibleEpsilon(String),
    #[error("shift needs at least one transition of each orientation")]
    MissingOrientation,
    #[error("transition {0} is not valid")]
    InvalidTransition(usize),
}

/// Every constant chosen by the compiler.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompilerPlan {
    pub format: u32,
    #[serde(with = "rational_str")]
    pub epsilon: Rational,
    /// Catalyst weight `δm̃/(2(1−δ)‖v⁻‖)`.
    #[serde(with = "rational_str")]
    pub gamma: Rational,
    /// `1/⌈1/γ⌉`, the weight actually moved per loop iteration.
    #[serde(with = "rational_str")]
    pub gamma_prime: Rational,
    pub loop_iterations: u64,
    /// `min over supp(v⁻) of max(x, y)`.
    #[serde(with = "rational_str")]
    pub m: Rational,
    /// `‖v⁻‖ = a + b`.
    #[serde(with = "rational_str")]
    pub norm_v_minus: Rational,
    #[serde(with = "rational_str")]
    pub a: Rational,
    #[serde(with = "rational_str")]
    pub b: Rational,
    /// Secondary split targets; absent when `m ≥ 1`.
    #[serde(with = "opt_rational_str")]
    pub m_x: Option<Rational>,
    #[serde(with = "opt_rational_str")]
    pub m_y: Option<Rational>,
    #[serde(with = "rational_str")]
    pub n_x: Rational,
    #[serde(with = "rational_str")]
    pub n_y: Rational,
    #[serde(with = "rational_str")]
    pub delta: Rational,
    #[serde(with = "rational_str")]
    pub delta_prime: Rational,
    /// Grid step: rational gcd of every TIPG coordinate and 1.
    #[serde(with = "rational_str")]
    pub grid: Rational,
    pub transitions: u64,
}

mod opt_rational_str {
    use super::*;
    use crate::numeric::rational::format_rational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => s.serialize_none(),
        }
    }
}

/// Which axis route a catalyst point is built along.
struct Routed {
    point: Point2D,
    /// Weight reached through `[0, m]` then a vertical raise.
    via_a: Rational,
    /// Weight reached through `[m, 0]` then a vertical split.
    via_b: Rational,
}

/// Constants shared by [`count_rounds`] and [`tipg_to_sequential`].
struct Design {
    plan: CompilerPlan,
    routes: Vec<Routed>,
    xi: SupportFunction2D,
    /// `m̃ = min(m, 1)`.
    m_tilde: Rational,
}

fn validate(t: &Tipg) -> Result<(), CompileError> {
    if !t.final_weight.is_one() {
        return Err(CompileError::NonUnitFinalWeight);
    }
    let r = t.identity_residual();
    if !r.is_empty() {
        return Err(CompileError::InvalidTipg(r.len()));
    }
    Ok(())
}

fn tipg_grid(t: &Tipg) -> Rational {
    let mut g = Rational::one();
    for p in t.h.points().chain(t.v.points()) {
        g = rational_gcd(&g, &p.x);
        g = rational_gcd(&g, &p.y);
    }
    g
}

fn design(t: &Tipg, epsilon: &Rational) -> Result<Design, CompileError> {
    validate(t)?;
    if !epsilon.is_positive() {
        return Err(CompileError::InfeasibleEpsilon(epsilon.to_string()));
    }
    let beta = t.final_point.x.clone();
    let alpha = t.final_point.y.clone();
    let (_, v_minus) = t.v.split_parts();
    if v_minus.is_empty() {
        return Err(CompileError::CatalystDegenerate);
    }
    let m = v_minus
        .points()
        .map(|p| if p.x > p.y { p.x.clone() } else { p.y.clone() })
        .min()
        .unwrap();
    if m.is_zero() {
        return Err(CompileError::CatalystAtOrigin);
    }
    let n = v_minus.norm1();

    // Points with x < m must take the a-route, points with y < m the b-route;
    // the rest are shared so that a is as close to n/2 as allowed.
    let mut a_need = Rational::zero();
    let mut b_need = Rational::zero();
    for (p, w) in v_minus.iter() {
        if p.x < m {
            a_need += w;
        } else if p.y < m {
            b_need += w;
        }
    }
    let half_n = &n * rat(1, 2);
    let b_cap = &n - &b_need;
    let a = if half_n < a_need {
        a_need.clone()
    } else if half_n > b_cap {
        b_cap
    } else {
        half_n
    };
    let b = &n - &a;
    let flex = &n - &a_need - &b_need;
    let share = if flex.is_zero() {
        Rational::zero()
    } else {
        (&a - &a_need) / &flex
    };
    let routes: Vec<Routed> = v_minus
        .iter()
        .map(|(p, w)| {
            let (via_a, via_b) = if p.x < m {
                (w.clone(), Rational::zero())
            } else if p.y < m {
                (Rational::zero(), w.clone())
            } else {
                (w * &share, w * (Rational::one() - &share))
            };
            Routed {
                point: p.clone(),
                via_a,
                via_b,
            }
        })
        .collect();

    let grid = tipg_grid(t);
    let one = Rational::one();
    let two_n = &n * Rational::from_integer(2.into());
    let (m_x, m_y, xi, m_tilde) = if m < one {
        if a.is_zero() || b.is_zero() {
            return Err(CompileError::UnbalancedCatalyst {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        let m_y = ceil_to_multiple(&(&one + &a * (&one - &m) / &b), &grid);
        let m_x = ceil_to_multiple(&(&one + &b * (&one - &m) / &a), &grid);
        let mut xi = v_minus.scale(&(&m / &two_n));
        xi.add_weight(
            Point2D::new(Rational::zero(), m_y.clone()),
            (&n - &a * &m) / &two_n,
        );
        xi.add_weight(
            Point2D::new(m_x.clone(), Rational::zero()),
            (&n - &b * &m) / &two_n,
        );
        (Some(m_x), Some(m_y), xi, m.clone())
    } else {
        let mut xi = v_minus.scale(&(&one / &two_n));
        xi.add_weight(Point2D::new(Rational::zero(), m.clone()), &b / &two_n);
        xi.add_weight(Point2D::new(m.clone(), Rational::zero()), &a / &two_n);
        (None, None, xi, one.clone())
    };

    let max_x = xi.max_x().unwrap();
    let max_y = xi.max_y().unwrap();
    let bx = &beta + epsilon;
    let ay = &alpha + epsilon;
    let n_x = next_multiple_above(if bx > max_x { &bx } else { &max_x }, &grid);
    let n_y = next_multiple_above(if ay > max_y { &ay } else { &max_y }, &grid);
    let delta = epsilon * epsilon / ((&n_x - &beta) * (&n_y - &alpha));
    let delta_prime = epsilon / (&n_x - &beta) * (&one - epsilon / (&n_y - &alpha));
    if !delta.is_positive() || delta_prime.is_negative() || &delta + &delta_prime >= one {
        return Err(CompileError::InfeasibleEpsilon(epsilon.to_string()));
    }
    let gamma = &delta * &m_tilde / (Rational::from_integer(2.into()) * (&one - &delta) * &n);
    let loops = (&one / &gamma).ceil();
    let loop_iterations = loops.to_integer().to_u64().expect("loop count overflows u64");
    let gamma_prime = &one / loops;
    let plan = CompilerPlan {
        format: FORMAT_VERSION,
        epsilon: epsilon.clone(),
        gamma,
        gamma_prime,
        loop_iterations,
        m,
        norm_v_minus: n,
        a,
        b,
        m_x,
        m_y,
        n_x,
        n_y,
        delta,
        delta_prime,
        grid,
        transitions: 10 + 2 * loop_iterations,
    };
    Ok(Design {
        plan,
        routes,
        xi,
        m_tilde,
    })
}

/// Emits the sequential game for `t` with final point `[β+ε, α+ε]`.
pub fn tipg_to_sequential(t: &Tipg, epsilon: &Rational) -> Result<(PointGame, CompilerPlan), CompileError> {
    let Design {
        plan,
        routes,
        xi,
        m_tilde,
    } = design(t, epsilon)?;
    let beta = &t.final_point.x;
    let alpha = &t.final_point.y;
    let one = Rational::one();
    let zero = Rational::zero();
    let (m, n, delta, dp) = (&plan.m, &plan.norm_v_minus, &plan.delta, &plan.delta_prime);
    let half_delta = delta * rat(1, 2);
    let c = delta * &m_tilde / (n * Rational::from_integer(2.into()));

    let mut frames = vec![SupportFunction2D::initial()];
    let mut orientations = Vec::new();
    let mut push = |f: SupportFunction2D, o: Orientation, frames: &mut Vec<SupportFunction2D>| {
        frames.push(f);
        orientations.push(o);
    };
    let pt = |x: &Rational, y: &Rational| Point2D::new(x.clone(), y.clone());

    // Initial axis moves: splits when m < 1, raises otherwise.
    let mut f = frames[0].clone();
    f.add_weight(pt(&zero, &one), -&half_delta);
    match &plan.m_y {
        Some(m_y) => {
            let to_m = &half_delta * &plan.a * m / n;
            f.add_weight(pt(&zero, m_y), &half_delta - &to_m);
            f.add_weight(pt(&zero, m), to_m);
        }
        None => f.add_weight(pt(&zero, m), half_delta.clone()),
    }
    push(f.clone(), Orientation::Vertical, &mut frames);
    f.add_weight(pt(&one, &zero), -&half_delta);
    match &plan.m_x {
        Some(m_x) => {
            let to_m = &half_delta * &plan.b * m / n;
            f.add_weight(pt(m_x, &zero), &half_delta - &to_m);
            f.add_weight(pt(m, &zero), to_m);
        }
        None => f.add_weight(pt(m, &zero), half_delta.clone()),
    }
    push(f.clone(), Orientation::Horizontal, &mut frames);

    // Catalyst creation: c·v⁻ assembled through [0, m] and [m, 0].
    for r in &routes {
        if !r.via_a.is_zero() {
            let w = &c * &r.via_a;
            f.add_weight(pt(&zero, m), -&w);
            f.add_weight(pt(&r.point.x, m), w);
        }
        if !r.via_b.is_zero() {
            let w = &c * &r.via_b;
            f.add_weight(pt(m, &zero), -&w);
            f.add_weight(pt(&r.point.x, &zero), w);
        }
    }
    push(f.clone(), Orientation::Horizontal, &mut frames);
    for r in &routes {
        if !r.via_a.is_zero() {
            let w = &c * &r.via_a;
            f.add_weight(pt(&r.point.x, m), -&w);
            f.add_weight(r.point.clone(), w);
        }
        if !r.via_b.is_zero() {
            let w = &c * &r.via_b;
            f.add_weight(pt(&r.point.x, &zero), -&w);
            f.add_weight(r.point.clone(), w);
        }
    }
    push(f.clone(), Orientation::Vertical, &mut frames);
    let start = SupportFunction2D::initial()
        .scale(&(&one - delta))
        .add(&xi.scale(delta));
    assert_eq!(f, start, "catalyst creation bookkeeping");

    // Catalyst loop.
    let step = (&one - delta) * &plan.gamma_prime;
    let v_step = t.v.scale(&step);
    let h_step = t.h.scale(&step);
    for _ in 0..plan.loop_iterations {
        f = f.add(&v_step);
        push(f.clone(), Orientation::Vertical, &mut frames);
        f = f.add(&h_step);
        push(f.clone(), Orientation::Horizontal, &mut frames);
    }
    let after_loop = SupportFunction2D::point(t.final_point.clone(), &one - delta).add(&xi.scale(delta));
    assert_eq!(f, after_loop, "catalyst loop bookkeeping");

    // Closing raises and merges.
    let (n_x, n_y) = (&plan.n_x, &plan.n_y);
    for (p, w) in xi.iter() {
        f.add_weight(p.clone(), -(delta * w));
        f.add_weight(pt(n_x, &p.y), delta * w);
    }
    push(f.clone(), Orientation::Horizontal, &mut frames);
    for (p, w) in xi.iter() {
        f.add_weight(pt(n_x, &p.y), -(delta * w));
        f.add_weight(pt(n_x, n_y), delta * w);
    }
    push(f.clone(), Orientation::Vertical, &mut frames);
    f.add_weight(pt(beta, alpha), -dp);
    f.add_weight(pt(n_x, alpha), dp.clone());
    push(f.clone(), Orientation::Horizontal, &mut frames);
    let ay = alpha + epsilon;
    let merged = delta + dp;
    f.add_weight(pt(n_x, n_y), -delta);
    f.add_weight(pt(n_x, alpha), -dp);
    f.add_weight(pt(n_x, &ay), merged.clone());
    push(f.clone(), Orientation::Vertical, &mut frames);
    let rest = &one - &merged;
    f.add_weight(pt(beta, alpha), -&rest);
    f.add_weight(pt(beta, &ay), rest.clone());
    push(f.clone(), Orientation::Vertical, &mut frames);
    f.add_weight(pt(beta, &ay), -rest);
    f.add_weight(pt(n_x, &ay), -merged);
    f.add_weight(pt(&(beta + epsilon), &ay), one);
    push(f, Orientation::Horizontal, &mut frames);

    let game = PointGame::new(frames, orientations).expect("orientation count");
    debug_assert_eq!(game.num_transitions() as u64, plan.transitions);
    Ok((game, plan))
}

/// Transition count and the `‖h‖Γ²/ε²` envelope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundCount {
    pub transitions: u64,
    /// `‖h‖·Γ²/ε²` with `Γ` the largest coordinate in grid steps.
    #[serde(with = "rational_str")]
    pub envelope: Rational,
}

/// Exact number of transitions [`tipg_to_sequential`] emits, without
/// building the frames.
pub fn count_rounds(t: &Tipg, epsilon: &Rational) -> Result<RoundCount, CompileError> {
    let d = design(t, epsilon)?;
    let top = t
        .h
        .points()
        .chain(t.v.points())
        .flat_map(|p| [p.x.clone(), p.y.clone()])
        .max()
        .unwrap_or_else(Rational::one);
    let g_steps = &top / &d.plan.grid;
    Ok(RoundCount {
        transitions: d.plan.transitions,
        envelope: t.h.norm1() * &g_steps * &g_steps / (epsilon * epsilon),
    })
}

/// Moves every frame so that each transition becomes strictly valid.
///
/// Frame `i` is shifted by `(ε·h_i/H, ε·v_i/V)` where `h_i`, `v_i` count the
/// horizontal and vertical transitions before it and `H`, `V` are the
/// totals. The initial frame is untouched and the final point moves by
/// `(ε, ε)`.
pub fn shift_to_strict(g: &PointGame, epsilon: &Rational) -> Result<PointGame, CompileError> {
    if !epsilon.is_positive() {
        return Err(CompileError::InfeasibleEpsilon(epsilon.to_string()));
    }
    let count = |o| g.orientations().iter().filter(|&&x| x == o).count() as i64;
    let (nh, nv) = (count(Orientation::Horizontal), count(Orientation::Vertical));
    if nh == 0 || nv == 0 {
        return Err(CompileError::MissingOrientation);
    }
    let report = check_point_game(g);
    if let Some(t) = report.transitions.iter().find(|t| t.status == ValidityStatus::Invalid) {
        return Err(CompileError::InvalidTransition(t.index));
    }
    let ex = epsilon / Rational::from_integer(nh.into());
    let ey = epsilon / Rational::from_integer(nv.into());
    let mut dx = Rational::zero();
    let mut dy = Rational::zero();
    let mut frames = vec![g.first().clone()];
    for (i, o) in g.orientations().iter().enumerate() {
        match o {
            Orientation::Horizontal => dx += &ex,
            Orientation::Vertical => dy += &ey,
        }
        frames.push(g.frames()[i + 1].shift(&dx, &dy));
    }
    Ok(PointGame::new(frames, g.orientations().to_vec()).expect("same shape"))
}

/// Qubit and round counts of a game viewed as a protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub format: u32,
    pub qubits: u64,
    pub rounds: u64,
    /// `(|S_A|, |S_B|)`.
    pub support_sizes: (usize, usize),
}

fn ceil_log2(n: u128) -> u64 {
    if n <= 1 {
        0
    } else {
        (128 - (n - 1).leading_zeros()) as u64
    }
}

/// `S_A`, `S_B` are all x and y coordinates in any frame;
/// `qubits = ⌈log₂ 2|S_A|⌉ + ⌈log₂ |S_A||S_B|⌉ + ⌈log₂ 2|S_B|⌉`.
pub fn resource_report(game: &PointGame) -> ResourceReport {
    let (xs, ys): (BTreeSet<Rational>, BTreeSet<Rational>) = game.coordinate_sets();
    let (sa, sb) = (xs.len() as u128, ys.len() as u128);
    ResourceReport {
        format: FORMAT_VERSION,
        qubits: ceil_log2(2 * sa) + ceil_log2(sa * sb) + ceil_log2(2 * sb),
        rounds: game.num_transitions() as u64,
        support_sizes: (xs.len(), ys.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::int;
    use crate::pointgame::functions_to_frames;
    use crate::validity::{check_transition, transition_status, ReportStatus};

    fn p(x: Rational, y: Rational) -> Point2D {
        Point2D::new(x, y)
    }

    /// Split `½[1,0] → ¼[2/3,0] + ¼[2,0]`, raise `¼[2,0] → ¼[2,1]`, merge
    /// `½[0,1] + ¼[2,1] → ¾[2/3,1]`, merge `¼[2/3,0] + ¾[2/3,1] → 1[2/3,3/4]`.
    pub(crate) fn rational_game() -> PointGame {
        let f0 = SupportFunction2D::initial();
        let f1 = SupportFunction2D::from_entries([
            (p(int(0), int(1)), rat(1, 2)),
            (p(rat(2, 3), int(0)), rat(1, 4)),
            (p(int(2), int(0)), rat(1, 4)),
        ]);
        let f2 = SupportFunction2D::from_entries([
            (p(int(0), int(1)), rat(1, 2)),
            (p(rat(2, 3), int(0)), rat(1, 4)),
            (p(int(2), int(1)), rat(1, 4)),
        ]);
        let f3 = SupportFunction2D::from_entries([
            (p(rat(2, 3), int(0)), rat(1, 4)),
            (p(rat(2, 3), int(1)), rat(3, 4)),
        ]);
        let f4 = SupportFunction2D::point(p(rat(2, 3), rat(3, 4)), int(1));
        use Orientation::*;
        PointGame::new(vec![f0, f1, f2, f3, f4], vec![Horizontal, Vertical, Horizontal, Vertical]).unwrap()
    }

    fn tiny_tipg() -> Tipg {
        let l = crate::ladder::LadderParams::new(1, rat(1, 8), 24, 7).unwrap();
        crate::ladder::build_tipg_from(&l).unwrap()
    }

    #[test]
    fn resource_example() {
        let r = resource_report(&rational_game());
        assert_eq!(r.support_sizes, (4, 3));
        assert_eq!(r.qubits, 10);
        assert_eq!(r.rounds, 4);
    }

    #[test]
    fn ceil_log_arithmetic() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(8), 3);
    }

    #[test]
    fn shift_makes_rational_game_strict() {
        let g = rational_game();
        assert_eq!(check_point_game(&g).status, ReportStatus::AllValid);
        let eps = rat(1, 100);
        let s = shift_to_strict(&g, &eps).unwrap();
        let report = check_point_game(&s);
        assert_eq!(report.status, ReportStatus::AllStrictlyValid, "{:?}", report.failures);
        assert_eq!(report.final_point, Some(p(rat(2, 3) + &eps, rat(3, 4) + &eps)));
    }

    #[test]
    fn identity_raise_becomes_strict() {
        let f = SupportFunction2D::point(p(int(1), int(1)), int(1));
        let g = PointGame::new(
            vec![f.clone(), f.clone(), f],
            vec![Orientation::Horizontal, Orientation::Vertical],
        )
        .unwrap();
        let s = shift_to_strict(&g, &rat(1, 10)).unwrap();
        for t in s.transitions() {
            assert_eq!(transition_status(&check_transition(&t).unwrap()), ValidityStatus::StrictlyValid);
        }
    }

    #[test]
    fn compile_small_ladder() {
        let t = tiny_tipg();
        let eps = rat(1, 4);
        let (g, plan) = tipg_to_sequential(&t, &eps).unwrap();
        assert_eq!(g.num_transitions() as u64, plan.transitions);
        assert_eq!(count_rounds(&t, &eps).unwrap().transitions, plan.transitions);
        assert_eq!(g.first(), &SupportFunction2D::initial());
        let fin = &t.final_point;
        assert_eq!(
            g.last(),
            &SupportFunction2D::point(p(&fin.x + &eps, &fin.y + &eps), int(1))
        );
        let report = check_point_game(&g);
        assert!(report.passed(), "{:?}", &report.failures[..report.failures.len().min(3)]);
        // Final-merge algebra.
        let (d, dp) = (&plan.delta, &plan.delta_prime);
        assert_eq!(dp * &fin.y + d * &plan.n_y, (d + dp) * (&fin.y + &eps));
        assert_eq!((Rational::one() - d - dp) * &fin.x + (d + dp) * &plan.n_x, &fin.x + &eps);
        // Catalyst conservation: each loop iteration moves (1−δ)γ′ of v, then of h.
        let c = (Rational::one() - d) * &plan.gamma_prime;
        let (dv, dh) = (t.v.scale(&c), t.h.scale(&c));
        for j in 0..plan.loop_iterations as usize {
            let k = 4 + 2 * j;
            assert_eq!(g.frames()[k + 1].sub(&g.frames()[k]), dv, "iteration {j}");
            assert_eq!(g.frames()[k + 2].sub(&g.frames()[k + 1]), dh, "iteration {j}");
        }
        assert!(g.frames().iter().all(|f| f.total() == Rational::one()));
        // Round trip through difference functions.
        let back = functions_to_frames(&crate::pointgame::frames_to_functions(&g), g.first()).unwrap();
        assert_eq!(back.frames(), g.frames());
    }

    #[test]
    fn count_is_nonincreasing_in_epsilon() {
        let t = tiny_tipg();
        let counts: Vec<u64> = [rat(1, 10), rat(1, 20), rat(1, 40)]
            .iter()
            .map(|e| count_rounds(&t, e).unwrap().transitions)
            .collect();
        assert!(counts[0] <= counts[1] && counts[1] <= counts[2], "{counts:?}");
    }

    #[test]
    fn degenerate_catalyst() {
        // Satisfies the identity with v = 0; only the identity is checked here.
        let h = SupportFunction2D::from_entries([
            (p(int(0), int(1)), rat(-1, 2)),
            (p(int(1), int(0)), rat(-1, 2)),
            (p(int(1), int(1)), int(1)),
        ]);
        let t = Tipg {
            h,
            v: SupportFunction2D::new(),
            final_point: p(int(1), int(1)),
            final_weight: int(1),
        };
        assert_eq!(count_rounds(&t, &rat(1, 10)), Err(CompileError::CatalystDegenerate));
        let bad = Tipg {
            final_weight: rat(1, 2),
            ..t.clone()
        };
        assert_eq!(count_rounds(&bad, &rat(1, 10)), Err(CompileError::NonUnitFinalWeight));
        let broken = Tipg {
            v: SupportFunction2D::point(p(int(2), int(2)), int(1)),
            ..t
        };
        assert_eq!(count_rounds(&broken, &rat(1, 10)), Err(CompileError::InvalidTipg(1)));
    }

    #[test]
    fn infeasible_epsilon() {
        assert!(matches!(
            tipg_to_sequential(&tiny_tipg(), &Rational::zero()),
            Err(CompileError::InfeasibleEpsilon(_))
        ));
    }
}
