//! Property tests over randomly generated exact inputs.

use mochon_forge::ladder::lagrange_sum;
use mochon_forge::numeric::rational::{int, rat, to_f64};
use mochon_forge::numeric::{count_roots, sign_on_positive_axis, Polynomial, PositivitySign, Rational};
use mochon_forge::pointgame::{frames_to_functions, functions_to_frames};
use mochon_forge::protocol::{synthesize_witness, WITNESS_TOL};
use mochon_forge::validity::{check_elementary, check_line, check_point_game, GameFailure, ValidityStatus};
use mochon_forge::{Orientation, Point2D, PointGame, SupportFunction2D};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

mod common;
use common::*;

fn poly(coeffs: &[Rational]) -> Polynomial {
    Polynomial::new(coeffs.to_vec())
}

// ----- numeric kernel -----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn products_of_nonnegative_factors_are_positive(
        roots in prop::collection::vec(small_rat(20, 7), 0..7),
        scale in pos_rat(),
    ) {
        let p = Polynomial::from_linear_factors(&roots, &scale);
        prop_assert_eq!(sign_on_positive_axis(&p), PositivitySign::StrictlyPositive);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn squares_are_never_violated(coeffs in prop::collection::vec((-9i64..=9, 1i64..=5), 1..6)) {
        let c: Vec<Rational> = coeffs.iter().map(|&(n, d)| rat(n, d)).collect();
        let p = poly(&c);
        let sq = &p * &p;
        prop_assert!(!matches!(sign_on_positive_axis(&sq), PositivitySign::Violated(_)));
    }

    /// Distinct rational roots times `λ² + c` against sign changes on a grid
    /// refined until it agrees, capped at 2¹⁴ cells.
    #[test]
    fn sturm_count_matches_grid(
        roots in prop::collection::btree_set((-16i64..=16, 1i64..=4).prop_map(|(n, d)| rat(n, d)), 0..7),
        c in 1i64..=5,
        lo in -35i64..=30,
        width in 1i64..=40,
    ) {
        let roots: Vec<Rational> = roots.into_iter().collect();
        let neg: Vec<Rational> = roots.iter().map(|r| -r).collect();
        let mut p = Polynomial::from_linear_factors(&neg, &int(1));
        if roots.len() < 7 {
            p = &p * &poly(&[int(c), int(0), int(1)]);
        }
        // Endpoints with denominator 7 are never roots.
        let a = rat(7 * lo + 1, 7);
        let b = &a + int(width);
        let sturm = count_roots(&p, &a, &b);
        let exact = roots.iter().filter(|r| **r > a && **r <= b).count();
        prop_assert_eq!(sturm, exact);
        let mut n = 16i64;
        let grid = loop {
            let mut changes = 0;
            let mut last = 0i8;
            for i in 0..=n {
                let x = &a + (&b - &a) * rat(i, n);
                let v = p.eval(&x);
                let s = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
                if s != 0 {
                    if last != 0 && s != last {
                        changes += 1;
                    }
                    last = s;
                }
            }
            if changes == sturm || n >= 1 << 14 {
                break changes;
            }
            n *= 2;
        };
        prop_assert_eq!(grid, sturm);
    }

    #[test]
    fn lagrange_identity(
        xs in prop::collection::btree_set((-30i64..=30, 1i64..=5).prop_map(|(n, d)| rat(n, d)), 2..8),
        coeffs in prop::collection::vec((-9i64..=9, 1i64..=4), 0..7),
    ) {
        let xs: Vec<Rational> = xs.into_iter().collect();
        let deg_cap = xs.len() - 1;
        let c: Vec<Rational> = coeffs.iter().take(deg_cap).map(|&(n, d)| rat(n, d)).collect();
        prop_assert!(lagrange_sum(&xs, &poly(&c)).is_zero());
    }
}

// ----- elementary moves -----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn valid_cone_is_closed_under_addition(f in valid_move(), g in valid_move()) {
        let h = f.to_line().add(&g.to_line());
        prop_assert!(check_line(&h).is_valid());
    }

    #[test]
    fn closed_forms_agree_with_polynomial_test(m in any_move()) {
        let closed = check_elementary(&m).unwrap();
        prop_assert_eq!(closed, check_line(&m.to_line()).is_valid(), "{:?}", m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn positive_scaling_keeps_verdict(m in any_move(), c in pos_rat()) {
        let h = m.to_line();
        prop_assert_eq!(check_line(&h).status, check_line(&h.scale(&c)).status);
    }

    #[test]
    fn right_shift_makes_strict(m in valid_move(), d in pos_rat()) {
        let (before, after) = sides(&m);
        let h = after.shift(&d).sub(&before);
        prop_assert_eq!(check_line(&h).status, ValidityStatus::StrictlyValid);
    }

    #[test]
    fn origin_weight_is_rejected(num in 1i64..=8) {
        // Move w of the ½[1,0] point to the origin.
        let w = rat(num, 16);
        let f1 = SupportFunction2D::from_entries([
            (Point2D::new(int(0), int(1)), rat(1, 2)),
            (Point2D::new(int(0), int(0)), w.clone()),
            (Point2D::new(int(1), int(0)), rat(1, 2) - w),
        ]);
        let g = PointGame::new(vec![SupportFunction2D::initial(), f1], vec![Orientation::Horizontal]).unwrap();
        let r = check_point_game(&g);
        prop_assert!(!r.passed());
        let flagged = r.failures.iter().any(|f| matches!(f, GameFailure::OriginWeight { frame: 1 }));
        prop_assert!(flagged);
    }

    #[test]
    fn witnesses_meet_tolerances(m in valid_move()) {
        let w = synthesize_witness(&m, 0.0, WITNESS_TOL).unwrap();
        let (before, after) = sides(&m);
        let r = w.check(&before, &after);
        prop_assert!(r.min_gap >= -1e-9 * r.y_norm.max(1.0), "{:?}", r);
        prop_assert!(r.prob_error <= 1e-9, "{:?}", r);
        let support_max = before.iter().chain(after.iter()).map(|p| to_f64(p.0)).fold(0.0, f64::max);
        prop_assert!(w.lambda > support_max);
    }
}

// ----- point games and JSON -----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn functions_frames_round_trip(g in random_game()) {
        let t = frames_to_functions(&g);
        let back = functions_to_frames(&t, g.first()).unwrap();
        prop_assert_eq!(back.frames(), g.frames());
        prop_assert_eq!(frames_to_functions(&back), t);
    }

    #[test]
    fn point_game_json_round_trip(g in random_game()) {
        let s = serde_json::to_string(&g).unwrap();
        let back: PointGame = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn raise_games_are_valid(g in random_game()) {
        let r = check_point_game(&g);
        let only_final = r.failures.iter().all(|f| matches!(f, GameFailure::FinalFrame { .. }));
        prop_assert!(only_final, "{:?}", r.failures);
    }
}
