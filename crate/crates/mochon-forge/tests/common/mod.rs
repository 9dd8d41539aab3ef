//! Strategies shared by the property and acceptance suites.

#![allow(dead_code)]

use mochon_forge::numeric::rational::{int, rat};
use mochon_forge::validity::ElementaryMove;
use mochon_forge::{Orientation, Point2D, PointGame, Rational, SupportFunction1D, SupportFunction2D};
use proptest::prelude::*;

pub fn small_rat(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (0..=max_num, 1..=max_den).prop_map(|(n, d)| rat(n, d))
}

pub fn pos_rat() -> impl Strategy<Value = Rational> {
    (1..=12i64, 1..=6i64).prop_map(|(n, d)| rat(n, d))
}

/// Valid raise, merge or split with small rational data.
pub fn valid_move() -> impl Strategy<Value = ElementaryMove> {
    let raise = (small_rat(12, 4), small_rat(12, 4), pos_rat()).prop_map(|(x, d, w)| ElementaryMove::Raise {
        x_new: &x + d,
        x,
        w,
    });
    let merge = (prop::collection::vec((small_rat(12, 4), pos_rat()), 2..5), small_rat(6, 4)).prop_map(|(src, extra)| {
        let total: Rational = src.iter().map(|s| &s.1).sum();
        let mean: Rational = src.iter().map(|(x, w)| x * w).sum::<Rational>() / total;
        ElementaryMove::Merge {
            sources: src,
            target: mean + extra,
        }
    });
    let split = (prop::collection::vec((pos_rat(), pos_rat()), 2..5), (1i64..=4)).prop_map(|(tg, shrink)| {
        let w: Rational = tg.iter().map(|t| &t.1).sum();
        let harmonic: Rational = tg.iter().map(|(x, wi)| wi / x).sum();
        // w/x ≥ Σwᵢ/xᵢ ⟺ x ≤ w/Σ(wᵢ/xᵢ); shrink toward 0 by 1/shrink.
        let x = &w / harmonic / int(shrink);
        ElementaryMove::Split {
            source: (x, w),
            targets: tg,
        }
    });
    prop_oneof![raise, merge, split]
}

/// Raise, merge or split with arbitrary (possibly invalid) geometry.
pub fn any_move() -> impl Strategy<Value = ElementaryMove> {
    let raise = (small_rat(12, 4), small_rat(12, 4), pos_rat()).prop_map(|(x, x_new, w)| ElementaryMove::Raise { x, x_new, w });
    let merge = (prop::collection::vec((small_rat(12, 4), pos_rat()), 2..5), small_rat(12, 4))
        .prop_map(|(sources, target)| ElementaryMove::Merge { sources, target });
    let split = (prop::collection::vec((pos_rat(), pos_rat()), 2..5), small_rat(12, 4)).prop_map(|(targets, x)| {
        let w: Rational = targets.iter().map(|t| &t.1).sum();
        ElementaryMove::Split { source: (x, w), targets }
    });
    prop_oneof![raise, merge, split]
}

/// `(before, after)` line functions of a move.
pub fn sides(m: &ElementaryMove) -> (SupportFunction1D, SupportFunction1D) {
    match m {
        ElementaryMove::Raise { x, x_new, w } => (
            SupportFunction1D::from_entries([(x.clone(), w.clone())]),
            SupportFunction1D::from_entries([(x_new.clone(), w.clone())]),
        ),
        ElementaryMove::Merge { sources, target } => (
            SupportFunction1D::from_entries(sources.iter().cloned()),
            SupportFunction1D::from_entries([(target.clone(), sources.iter().map(|s| &s.1).sum())]),
        ),
        ElementaryMove::Split { source, targets } => (
            SupportFunction1D::from_entries([source.clone()]),
            SupportFunction1D::from_entries(targets.iter().cloned()),
        ),
    }
}

/// Sequences of vertical and horizontal raises of single points.
pub fn random_game() -> impl Strategy<Value = PointGame> {
    prop::collection::vec((any::<bool>(), 0usize..4, pos_rat()), 0..6).prop_map(|steps| {
        let mut frames = vec![SupportFunction2D::initial()];
        let mut orient = Vec::new();
        for (vertical, pick, d) in steps {
            let f = frames.last().unwrap().clone();
            let pts: Vec<(Point2D, Rational)> = f.iter().map(|(p, w)| (p.clone(), w.clone())).collect();
            let (p, w) = pts[pick % pts.len()].clone();
            let o = if vertical { Orientation::Vertical } else { Orientation::Horizontal };
            let q = Point2D::from_line(o, p.fixed(o).clone(), p.moving(o) + d);
            let mut next = f.clone();
            next.add_weight(p, -&w);
            next.add_weight(q, w);
            frames.push(next);
            orient.push(o);
        }
        PointGame::new(frames, orient).unwrap()
    })
}
