//! SVG rendering of point-game frames. Output only; nothing here feeds back
//! into verification.

use std::collections::BTreeSet;
use std::fmt::Write;

use mochon_forge::numeric::rational::{int, to_f64};
use mochon_forge::{Point2D, PointGame, Rational, SupportFunction2D};

/// Frames with more points than this are downsampled.
pub const MAX_POINTS: usize = 10_000;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 32.0;

pub struct RenderedFrame {
    pub svg: String,
    pub shown: usize,
}

/// Largest coordinate in any frame, at least 1.
pub fn default_extent(g: &PointGame) -> Rational {
    let mut e = int(1);
    for f in g.frames() {
        for p in f.points() {
            e = e.max(p.x.clone()).max(p.y.clone());
        }
    }
    e
}

/// Points to draw: every axis point, every point on the lowest and highest
/// off-axis rows, then an even stride through the rest up to [`MAX_POINTS`].
pub fn select_points(f: &SupportFunction2D) -> Vec<(&Point2D, &Rational)> {
    let all: Vec<(&Point2D, &Rational)> = f.iter().collect();
    if all.len() <= MAX_POINTS {
        return all;
    }
    let zero = int(0);
    let on_axis = |p: &Point2D| p.x == zero || p.y == zero;
    let rows: BTreeSet<&Rational> = all.iter().filter(|(p, _)| !on_axis(p)).map(|(p, _)| &p.y).collect();
    let (low, high) = (rows.first().copied(), rows.last().copied());
    let keep = |p: &Point2D| on_axis(p) || Some(&p.y) == low || Some(&p.y) == high;
    let (mut kept, rest): (Vec<_>, Vec<_>) = all.into_iter().partition(|(p, _)| keep(p));
    let budget = MAX_POINTS.saturating_sub(kept.len());
    if budget > 0 && !rest.is_empty() {
        let stride = rest.len().div_ceil(budget);
        kept.extend(rest.into_iter().step_by(stride));
    }
    kept.sort_by(|a, b| a.0.cmp(b.0));
    kept
}

/// One frame as an SVG: `[0, extent]²` mapped to the plot square, disc
/// area proportional to weight.
pub fn render_frame(f: &SupportFunction2D, extent: &Rational, index: usize) -> RenderedFrame {
    let pts = select_points(f);
    let scale = (SIZE - 2.0 * MARGIN) / to_f64(extent);
    let total = to_f64(&f.total()).max(f64::MIN_POSITIVE);
    let mut s = String::new();
    let size = SIZE as u32;
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (o, e) = (MARGIN, SIZE - MARGIN);
    writeln!(s, r#"<path d="M{o:.1} {o:.1} V{e:.1} H{e:.1}" stroke="black" fill="none"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{o:.1}" y="{:.1}" font-size="12">frame {index}, {} points, extent {extent}</text>"#,
        MARGIN - 10.0,
        f.len()
    )
    .unwrap();
    for (p, w) in &pts {
        let cx = MARGIN + to_f64(&p.x) * scale;
        let cy = SIZE - MARGIN - to_f64(&p.y) * scale;
        let wf = to_f64(w);
        let r = 1.0 + 12.0 * (wf.abs() / total).sqrt();
        let fill = if wf < 0.0 { "crimson" } else { "steelblue" };
        writeln!(s, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="{fill}" fill-opacity="0.7"><title>[{}, {}] {w}</title></circle>"#, p.x, p.y).unwrap();
    }
    s.push_str("</svg>\n");
    RenderedFrame { svg: s, shown: pts.len() }
}
