//! Validity and strict validity of line functions, transitions, point games
//! and time-independent point games.
//!
//! A line function `h` is valid when `Σ h(x) = 0` and
//! `Σ −h(x)/(λ + x) ≥ 0` for every `λ > 0`. Multiplying through by
//! `Π(λ + x_j)` turns the second condition into nonnegativity of
//! `P(λ) = −Σ_i w_i Π_{j≠i}(λ + x_j)` on `(0, ∞)`, which is decided exactly.
//! Strict validity additionally needs `P > 0` on `(0, ∞)` and `Σ x·h(x) > 0`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::numeric::rational::{int, rat, Fraction, Rational};
use crate::numeric::{poly_from_linear_factors, sign_on_positive_axis, Polynomial, PositivitySign};
use crate::pointgame::{
    rational_str, Orientation, Point2D, PointGame, SupportFunction1D, SupportFunction2D, Tipg,
    Transition,
};

/// Strength of a validity verdict, ordered `Invalid < Valid < StrictlyValid`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ValidityStatus {
    Invalid,
    Valid,
    StrictlyValid,
}

/// Reason a line or transition is invalid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    /// Weight is not conserved on the line.
    NonzeroSum {
        #[serde(with = "rational_str")]
        total: Rational,
    },
    /// `Σ −h(x)/(λ + x) = value < 0` at this `λ > 0`.
    LambdaWitness {
        #[serde(with = "rational_str")]
        lambda: Rational,
        #[serde(with = "rational_str")]
        value: Rational,
    },
    /// A frame places weight on `[0, 0]`.
    OriginWeight,
}

/// Verdict for one line function. `violation` is present exactly when the
/// status is `Invalid`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidityVerdict {
    pub status: ValidityStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

impl ValidityVerdict {
    pub fn strictly_valid() -> Self {
        ValidityVerdict {
            status: ValidityStatus::StrictlyValid,
            violation: None,
        }
    }

    pub fn valid() -> Self {
        ValidityVerdict {
            status: ValidityStatus::Valid,
            violation: None,
        }
    }

    pub fn invalid(v: Violation) -> Self {
        ValidityVerdict {
            status: ValidityStatus::Invalid,
            violation: Some(v),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.status >= ValidityStatus::Valid
    }

    pub fn is_strict(&self) -> bool {
        self.status == ValidityStatus::StrictlyValid
    }
}

/// Errors raised by the checkers themselves (as opposed to verdicts).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidityError {
    #[error("transition places weight on the origin [0, 0]")]
    OriginWeight,
    #[error("split target at coordinate 0")]
    ZeroCoordinateInSplit,
    #[error("elementary move has a nonpositive weight")]
    NonpositiveWeight,
}

/// `Σ −h(x)/(λ + x)`, exactly.
pub fn dual_value(h: &SupportFunction1D, lambda: &Rational) -> Rational {
    let terms: Vec<Fraction> = h
        .iter()
        .map(|(x, w)| Fraction::from_rational(&(-w / (lambda + x))))
        .collect();
    Fraction::sum(terms).into_rational()
}

/// `P(λ) = −Σ_i w_i Π_{j≠i}(λ + x_j)`.
pub fn line_polynomial(h: &SupportFunction1D) -> Polynomial {
    let xs: Vec<Rational> = h.iter().map(|(x, _)| x.clone()).collect();
    let mut p = Polynomial::zero();
    for (i, (_, w)) in h.iter().enumerate() {
        let others: Vec<Rational> = xs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, x)| x.clone())
            .collect();
        p = &p - &poly_from_linear_factors(&others, w);
    }
    p
}

/// Supports larger than this use the closed forms for single-source and
/// single-target shapes instead of building `P(λ)`.
pub const FAST_PATH_MIN_SUPPORT: usize = 24;

/// Decides validity of a line function.
///
/// Small supports always go through the exact polynomial test. Large
/// supports with a single negative point (a split shape) or a single
/// positive point (a merge shape) use the equivalent closed forms; any
/// other large shape still uses the polynomial test.
pub fn check_line(h: &SupportFunction1D) -> ValidityVerdict {
    if h.is_empty() {
        return ValidityVerdict::valid();
    }
    let total = h.total();
    if !total.is_zero() {
        return ValidityVerdict::invalid(Violation::NonzeroSum { total });
    }
    if h.len() > FAST_PATH_MIN_SUPPORT {
        let negatives = h.iter().filter(|(_, w)| w.is_negative()).count();
        if negatives == 1 {
            return split_shape(h);
        }
        if negatives + 1 == h.len() {
            return merge_shape(h);
        }
    }
    polynomial_test(h)
}

/// [`check_line`] without the closed-form shortcuts.
pub fn check_line_generic(h: &SupportFunction1D) -> ValidityVerdict {
    if h.is_empty() {
        return ValidityVerdict::valid();
    }
    let total = h.total();
    if !total.is_zero() {
        return ValidityVerdict::invalid(Violation::NonzeroSum { total });
    }
    polynomial_test(h)
}

fn polynomial_test(h: &SupportFunction1D) -> ValidityVerdict {
    match sign_on_positive_axis(&line_polynomial(h)) {
        PositivitySign::Violated(lambda) => {
            let value = dual_value(h, &lambda);
            ValidityVerdict::invalid(Violation::LambdaWitness { lambda, value })
        }
        PositivitySign::StrictlyPositive if h.first_moment().is_positive() => {
            ValidityVerdict::strictly_valid()
        }
        _ => ValidityVerdict::valid(),
    }
}

/// First `λ` in the sequence with a negative dual value. The caller
/// guarantees one exists.
fn find_witness(h: &SupportFunction1D, mut lambda: Rational, step: &Rational) -> ValidityVerdict {
    loop {
        let value = dual_value(h, &lambda);
        if value.is_negative() {
            return ValidityVerdict::invalid(Violation::LambdaWitness { lambda, value });
        }
        lambda *= step;
    }
}

/// One negative point `−W[x₀]` and positive points `wᵢ[xᵢ]`: valid iff
/// `W/x₀ ≥ Σ wᵢ/xᵢ` (always when `x₀ = 0`); strict whenever valid, by strict
/// concavity of `u ↦ u/(1 + λu)`.
fn split_shape(h: &SupportFunction1D) -> ValidityVerdict {
    let (x0, w0) = h.iter().find(|(_, w)| w.is_negative()).unwrap();
    if x0.is_zero() {
        return ValidityVerdict::strictly_valid();
    }
    if h.iter().any(|(x, w)| x.is_zero() && w.is_positive()) {
        return find_witness(h, int(1), &rat(1, 2));
    }
    let rhs = Fraction::sum(
        h.iter()
            .filter(|(_, w)| w.is_positive())
            .map(|(x, w)| Fraction::from_rational(&(w / x)))
            .collect(),
    );
    let lhs = -w0 / x0;
    if rhs.cmp_rational(&lhs) == Ordering::Greater {
        return find_witness(h, int(1), &rat(1, 2));
    }
    ValidityVerdict::strictly_valid()
}

/// One positive point `W[x₃]` and negative points `−wᵢ[xᵢ]`: valid iff `x₃`
/// is at least the weighted mean of the `xᵢ`, strict iff strictly above.
fn merge_shape(h: &SupportFunction1D) -> ValidityVerdict {
    match h.first_moment().cmp(&Rational::zero()) {
        Ordering::Greater => ValidityVerdict::strictly_valid(),
        Ordering::Equal => ValidityVerdict::valid(),
        Ordering::Less => find_witness(h, int(2), &int(2)),
    }
}

/// Verdict for one line of a transition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineVerdict {
    /// Fixed coordinate of the line (`y` for horizontal, `x` for vertical).
    #[serde(with = "rational_str")]
    pub coordinate: Rational,
    pub verdict: ValidityVerdict,
}

/// Checks every line touched by either side of `t`, in ascending order of
/// the fixed coordinate. Lines where nothing moves are `Valid`.
pub fn check_transition(t: &Transition) -> Result<Vec<LineVerdict>, ValidityError> {
    check_transition_cached(t, None)
}

/// Verdicts keyed by exact line content, shared across the transitions of
/// one game. Catalyst loops repeat identical line functions many times.
#[derive(Default)]
struct LineCache(Mutex<HashMap<SupportFunction1D, ValidityVerdict>>);

impl LineCache {
    fn check(&self, l: &SupportFunction1D) -> ValidityVerdict {
        if let Some(v) = self.0.lock().unwrap().get(l) {
            return v.clone();
        }
        let v = check_line(l);
        self.0.lock().unwrap().insert(l.clone(), v.clone());
        v
    }
}

fn check_transition_cached(
    t: &Transition,
    cache: Option<&LineCache>,
) -> Result<Vec<LineVerdict>, ValidityError> {
    if t.before.touches_origin() || t.after.touches_origin() {
        return Err(ValidityError::OriginWeight);
    }
    let o = t.orientation;
    let mut diff_lines = t.difference().lines(o);
    let mut coords: Vec<Rational> = t
        .before
        .points()
        .chain(t.after.points())
        .map(|p| p.fixed(o).clone())
        .collect();
    coords.sort();
    coords.dedup();
    let jobs: Vec<(Rational, SupportFunction1D)> = coords
        .into_iter()
        .map(|c| {
            let l = diff_lines.remove(&c).unwrap_or_default();
            (c, l)
        })
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(coordinate, l)| LineVerdict {
            coordinate,
            verdict: match cache {
                Some(c) => c.check(&l),
                None => check_line(&l),
            },
        })
        .collect())
}

/// Weakest status among a transition's lines.
pub fn transition_status(lines: &[LineVerdict]) -> ValidityStatus {
    lines
        .iter()
        .map(|l| l.verdict.status)
        .min()
        .unwrap_or(ValidityStatus::Valid)
}

/// The three elementary moves on a single line, with their data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementaryMove {
    /// `w[x] → w[x_new]`.
    Raise { x: Rational, x_new: Rational, w: Rational },
    /// `Σ wᵢ[xᵢ] → (Σ wᵢ)[target]`.
    Merge {
        sources: Vec<(Rational, Rational)>,
        target: Rational,
    },
    /// `w[x] → Σ wᵢ[xᵢ]`.
    Split {
        source: (Rational, Rational),
        targets: Vec<(Rational, Rational)>,
    },
}

/// Tag of an [`ElementaryMove`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ElementaryKind {
    Raise,
    Merge,
    Split,
}

impl ElementaryMove {
    pub fn kind(&self) -> ElementaryKind {
        match self {
            ElementaryMove::Raise { .. } => ElementaryKind::Raise,
            ElementaryMove::Merge { .. } => ElementaryKind::Merge,
            ElementaryMove::Split { .. } => ElementaryKind::Split,
        }
    }

    /// `after − before` as a line function.
    pub fn to_line(&self) -> SupportFunction1D {
        let mut f = SupportFunction1D::new();
        match self {
            ElementaryMove::Raise { x, x_new, w } => {
                f.add_weight(x.clone(), -w);
                f.add_weight(x_new.clone(), w.clone());
            }
            ElementaryMove::Merge { sources, target } => {
                for (x, w) in sources {
                    f.add_weight(x.clone(), -w);
                    f.add_weight(target.clone(), w.clone());
                }
            }
            ElementaryMove::Split { source, targets } => {
                f.add_weight(source.0.clone(), -&source.1);
                for (x, w) in targets {
                    f.add_weight(x.clone(), w.clone());
                }
            }
        }
        f
    }
}

/// Closed-form test for an elementary move.
///
/// Raise: `x_new ≥ x`. Merge: `target ≥ Σwᵢxᵢ / Σwᵢ`. Split: weight is
/// conserved and `w/x ≥ Σ wᵢ/xᵢ` (a source at 0 always passes).
pub fn check_elementary(m: &ElementaryMove) -> Result<bool, ValidityError> {
    match m {
        ElementaryMove::Raise { x, x_new, w } => {
            if !w.is_positive() {
                return Err(ValidityError::NonpositiveWeight);
            }
            Ok(x_new >= x)
        }
        ElementaryMove::Merge { sources, target } => {
            if sources.iter().any(|(_, w)| !w.is_positive()) || sources.is_empty() {
                return Err(ValidityError::NonpositiveWeight);
            }
            let total: Rational = sources.iter().map(|(_, w)| w).sum();
            let moment: Rational = sources.iter().map(|(x, w)| x * w).sum();
            Ok(target * total >= moment)
        }
        ElementaryMove::Split { source, targets } => {
            if !source.1.is_positive() || targets.iter().any(|(_, w)| !w.is_positive()) {
                return Err(ValidityError::NonpositiveWeight);
            }
            if targets.iter().any(|(x, _)| x.is_zero()) {
                return Err(ValidityError::ZeroCoordinateInSplit);
            }
            let total: Rational = targets.iter().map(|(_, w)| w).sum();
            if total != source.1 {
                return Ok(false);
            }
            if source.0.is_zero() {
                return Ok(true);
            }
            let rhs: Rational = targets.iter().map(|(x, w)| w / x).sum();
            Ok(&source.1 / &source.0 >= rhs)
        }
    }
}

/// Problem found by [`check_point_game`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum GameFailure {
    /// The first frame is not `½[0,1] + ½[1,0]`.
    InitialFrame,
    /// The last frame is not a single point of weight one.
    FinalFrame { points: usize },
    NegativeFrame {
        frame: usize,
        point: Point2D,
        #[serde(with = "rational_str")]
        weight: Rational,
    },
    OriginWeight { frame: usize },
    InvalidLine {
        transition: usize,
        orientation: Orientation,
        #[serde(with = "rational_str")]
        coordinate: Rational,
        violation: Violation,
    },
}

/// Aggregate outcome of a game or TIPG check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ReportStatus {
    AllStrictlyValid,
    AllValid,
    Failures,
}

/// Per-transition summary inside a [`GameReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionSummary {
    pub index: usize,
    pub orientation: Orientation,
    pub status: ValidityStatus,
    pub lines: usize,
}

/// Result of [`check_point_game`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameReport {
    pub status: ReportStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_point: Option<Point2D>,
    pub transitions: Vec<TransitionSummary>,
    pub failures: Vec<GameFailure>,
}

impl GameReport {
    pub fn passed(&self) -> bool {
        self.status != ReportStatus::Failures
    }
}

/// Verifies frames and every transition of a sequential point game.
pub fn check_point_game(g: &PointGame) -> GameReport {
    let mut failures = Vec::new();
    if g.first() != &SupportFunction2D::initial() {
        failures.push(GameFailure::InitialFrame);
    }
    let final_point = match g.last().as_single_point() {
        Some((p, w)) if w.is_one() => Some(p.clone()),
        _ => {
            failures.push(GameFailure::FinalFrame {
                points: g.last().len(),
            });
            None
        }
    };
    for (i, f) in g.frames().iter().enumerate() {
        if let Some((p, w)) = f.first_negative() {
            failures.push(GameFailure::NegativeFrame {
                frame: i,
                point: p.clone(),
                weight: w.clone(),
            });
        }
        if f.touches_origin() {
            failures.push(GameFailure::OriginWeight { frame: i });
        }
    }
    let cache = LineCache::default();
    let per_transition: Vec<(TransitionSummary, Vec<GameFailure>)> = (0..g.num_transitions())
        .into_par_iter()
        .map(|i| {
            let t = g.transition(i);
            let o = t.orientation;
            match check_transition_cached(&t, Some(&cache)) {
                // Reported once per frame above.
                Err(_) => (
                    TransitionSummary {
                        index: i,
                        orientation: o,
                        status: ValidityStatus::Invalid,
                        lines: 0,
                    },
                    Vec::new(),
                ),
                Ok(lines) => {
                    let bad = lines
                        .iter()
                        .filter_map(|l| {
                            l.verdict.violation.as_ref().map(|v| GameFailure::InvalidLine {
                                transition: i,
                                orientation: o,
                                coordinate: l.coordinate.clone(),
                                violation: v.clone(),
                            })
                        })
                        .collect();
                    (
                        TransitionSummary {
                            index: i,
                            orientation: o,
                            status: transition_status(&lines),
                            lines: lines.len(),
                        },
                        bad,
                    )
                }
            }
        })
        .collect();
    let mut transitions = Vec::with_capacity(per_transition.len());
    for (s, bad) in per_transition {
        transitions.push(s);
        failures.extend(bad);
    }
    let status = if !failures.is_empty() {
        ReportStatus::Failures
    } else if transitions
        .iter()
        .all(|t| t.status == ValidityStatus::StrictlyValid)
    {
        ReportStatus::AllStrictlyValid
    } else {
        ReportStatus::AllValid
    };
    GameReport {
        status,
        final_point,
        transitions,
        failures,
    }
}

/// A failing line of `h` or `v` inside a [`TipgReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TipgLineFailure {
    pub function: Orientation,
    #[serde(with = "rational_str")]
    pub coordinate: Rational,
    pub violation: Violation,
}

/// Result of [`check_tipg`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TipgReport {
    pub status: ReportStatus,
    /// `h + v − (final − initial)`; empty when the identity holds.
    pub identity_residual: SupportFunction2D,
    pub h_status: ValidityStatus,
    pub v_status: ValidityStatus,
    pub h_lines: usize,
    pub v_lines: usize,
    pub failures: Vec<TipgLineFailure>,
}

impl TipgReport {
    pub fn passed(&self) -> bool {
        self.status != ReportStatus::Failures
    }

    pub fn identity_holds(&self) -> bool {
        self.identity_residual.is_empty()
    }
}

/// Validity of every line of `f` in orientation `o`, in ascending order.
pub fn check_function_lines(f: &SupportFunction2D, o: Orientation) -> Vec<LineVerdict> {
    let lines: Vec<(Rational, SupportFunction1D)> = f.lines(o).into_iter().collect();
    lines
        .into_par_iter()
        .map(|(coordinate, l)| LineVerdict {
            coordinate,
            verdict: check_line(&l),
        })
        .collect()
}

/// Verifies the TIPG identity exactly and validity of `h` (every y-line)
/// and `v` (every x-line).
pub fn check_tipg(t: &Tipg) -> TipgReport {
    let identity_residual = t.identity_residual();
    let h_lines = check_function_lines(&t.h, Orientation::Horizontal);
    let v_lines = check_function_lines(&t.v, Orientation::Vertical);
    let mut failures = Vec::new();
    for (o, lines) in [(Orientation::Horizontal, &h_lines), (Orientation::Vertical, &v_lines)] {
        for l in lines.iter() {
            if let Some(v) = &l.verdict.violation {
                failures.push(TipgLineFailure {
                    function: o,
                    coordinate: l.coordinate.clone(),
                    violation: v.clone(),
                });
            }
        }
    }
    let h_status = transition_status(&h_lines);
    let v_status = transition_status(&v_lines);
    let status = if !failures.is_empty() || !identity_residual.is_empty() {
        ReportStatus::Failures
    } else if h_status == ValidityStatus::StrictlyValid && v_status == ValidityStatus::StrictlyValid {
        ReportStatus::AllStrictlyValid
    } else {
        ReportStatus::AllValid
    };
    TipgReport {
        status,
        identity_residual,
        h_status,
        v_status,
        h_lines: h_lines.len(),
        v_lines: v_lines.len(),
        failures,
    }
}

/// Redundant debug oracle: evaluates the dual value on a fixed geometric
/// grid of `λ` and reports the first negative sample.
pub fn lambda_sampling_oracle(h: &SupportFunction1D, samples: usize) -> Option<Rational> {
    let mut lambda = rat(1, 1 << 20);
    for _ in 0..samples {
        if dual_value(h, &lambda).is_negative() {
            return Some(lambda);
        }
        lambda *= rat(5, 4);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(entries: &[((i64, i64), (i64, i64))]) -> SupportFunction1D {
        SupportFunction1D::from_entries(entries.iter().map(|&((a, b), (c, d))| (rat(a, b), rat(c, d))))
    }

    fn h_pt(x: Rational, y: Rational) -> Point2D {
        Point2D::new(x, y)
    }

    #[test]
    fn split_into_two_thirds_and_two_is_strict() {
        let h = line(&[((2, 3), (1, 2)), ((2, 1), (1, 2)), ((1, 1), (-1, 1))]);
        assert_eq!(check_line(&h), ValidityVerdict::strictly_valid());
        assert!(lambda_sampling_oracle(&h, 200).is_none());
    }

    #[test]
    fn split_into_half_and_two_is_invalid_at_small_lambda() {
        let h = line(&[((1, 2), (1, 2)), ((2, 1), (1, 2)), ((1, 1), (-1, 1))]);
        let v = check_line(&h);
        assert_eq!(v.status, ValidityStatus::Invalid);
        match v.violation {
            Some(Violation::LambdaWitness { lambda, value }) => {
                assert!(lambda.is_positive());
                assert!(value.is_negative());
                assert_eq!(value, dual_value(&h, &lambda));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(dual_value(&h, &rat(1, 100)).is_negative());
    }

    #[test]
    fn empty_line_is_valid_not_strict() {
        assert_eq!(check_line(&SupportFunction1D::new()), ValidityVerdict::valid());
    }

    #[test]
    fn nonzero_sum_is_reported() {
        let h = line(&[((1, 1), (1, 2))]);
        assert_eq!(
            check_line(&h),
            ValidityVerdict::invalid(Violation::NonzeroSum { total: rat(1, 2) })
        );
    }

    #[test]
    fn equality_merge_is_valid_but_not_strict() {
        // P(λ) is the positive constant 1, but Σ x·h = 0.
        let h = line(&[((1, 1), (-1, 2)), ((3, 1), (-1, 2)), ((2, 1), (1, 1))]);
        assert_eq!(line_polynomial(&h), Polynomial::from_i64(&[1]));
        assert_eq!(check_line(&h), ValidityVerdict::valid());
    }

    #[test]
    fn transition_examples() {
        let o = Rational::zero();
        let before = SupportFunction2D::point(h_pt(int(1), o.clone()), rat(1, 2));
        let after = SupportFunction2D::from_entries([
            (h_pt(rat(2, 3), o.clone()), rat(1, 4)),
            (h_pt(int(2), o.clone()), rat(1, 4)),
        ]);
        let lines = check_transition(&Transition::new(before, after, Orientation::Horizontal)).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].verdict, ValidityVerdict::strictly_valid());

        let raise = Transition::new(
            SupportFunction2D::point(h_pt(int(1), int(1)), int(1)),
            SupportFunction2D::point(h_pt(int(1), int(2)), int(1)),
            Orientation::Vertical,
        );
        assert!(transition_status(&check_transition(&raise).unwrap()) >= ValidityStatus::Valid);

        let mislabeled = Transition::new(raise.before.clone(), raise.after.clone(), Orientation::Horizontal);
        let lines = check_transition(&mislabeled).unwrap();
        assert_eq!(lines.len(), 2);
        for l in &lines {
            assert!(matches!(l.verdict.violation, Some(Violation::NonzeroSum { .. })));
        }

        let origin = Transition::new(
            SupportFunction2D::point(h_pt(int(0), int(0)), int(1)),
            SupportFunction2D::point(h_pt(int(1), int(0)), int(1)),
            Orientation::Horizontal,
        );
        assert_eq!(check_transition(&origin), Err(ValidityError::OriginWeight));
    }

    #[test]
    fn elementary_examples() {
        let merge = ElementaryMove::Merge {
            sources: vec![(int(1), rat(1, 2)), (int(3), rat(1, 2))],
            target: int(2),
        };
        assert_eq!(check_elementary(&merge), Ok(true));
        let raise = ElementaryMove::Raise {
            x: int(1),
            x_new: int(1),
            w: int(1),
        };
        assert_eq!(check_elementary(&raise), Ok(true));
        let split = ElementaryMove::Split {
            source: (int(1), int(1)),
            targets: vec![(rat(1, 2), rat(1, 2)), (int(2), rat(1, 2))],
        };
        assert_eq!(check_elementary(&split), Ok(false));
        let zero = ElementaryMove::Split {
            source: (int(1), int(1)),
            targets: vec![(int(0), rat(1, 2)), (int(2), rat(1, 2))],
        };
        assert_eq!(check_elementary(&zero), Err(ValidityError::ZeroCoordinateInSplit));
    }

    fn wide_split(tweak: i64) -> SupportFunction1D {
        // 1[1] → Σ_j c_j [x_j] with the inequality tight (tweak = 0).
        let n = 40;
        let mut h = SupportFunction1D::new();
        h.add_weight(int(1), int(-1));
        let mut rhs = Rational::zero();
        for j in 0..n - 1 {
            let x = rat(3 + j, 2);
            let w = rat(1, n);
            rhs += &w / &x;
            h.add_weight(x, w);
        }
        // Last target chosen to make Σ w/x = 1 + tweak/1000.
        let w = rat(1, n);
        let target = Rational::one() + rat(tweak, 1000) - rhs;
        h.add_weight(&w / target, w);
        h
    }

    #[test]
    fn wide_split_fast_path_matches_generic() {
        for tweak in [-1, 0, 1] {
            let h = wide_split(tweak);
            assert!(h.len() > FAST_PATH_MIN_SUPPORT);
            let fast = check_line(&h);
            let generic = check_line_generic(&h);
            assert_eq!(fast.status, generic.status, "tweak {tweak}");
            if let Some(Violation::LambdaWitness { value, .. }) = fast.violation {
                assert!(value.is_negative());
            }
        }
    }

    #[test]
    fn wide_merge_fast_path_matches_generic() {
        let n = 30;
        for (target, expected) in [
            (rat(n + 1, 2), ValidityStatus::Valid),
            (rat(n + 2, 2), ValidityStatus::StrictlyValid),
            (rat(n, 2), ValidityStatus::Invalid),
        ] {
            let mut h = SupportFunction1D::new();
            for j in 1..=n {
                h.add_weight(int(j), rat(-1, n));
            }
            h.add_weight(target, int(1));
            assert_eq!(check_line(&h).status, expected);
            assert_eq!(check_line_generic(&h).status, expected);
        }
    }
}
