//! Finite-support functions on the quarter-plane, transitions, sequential
//! point games and time-independent point games.

use std::collections::btree_map::{self, BTreeMap};
use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numeric::rational::{format_rational, parse_rational, rat, Rational};

/// A point `[x, y]` with `x` the Alice coordinate and `y` the Bob coordinate.
/// Ordered lexicographically by `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point2D {
    pub x: Rational,
    pub y: Rational,
}

impl Point2D {
    /// Panics if a coordinate is negative.
    pub fn new(x: Rational, y: Rational) -> Self {
        assert!(!x.is_negative() && !y.is_negative(), "negative coordinate");
        Point2D { x, y }
    }

    pub fn from_i64(x: (i64, i64), y: (i64, i64)) -> Self {
        Point2D::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    pub fn is_origin(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Reflection across the diagonal.
    pub fn transpose(&self) -> Self {
        Point2D {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    /// Coordinate held fixed along a line of the given orientation.
    pub fn fixed(&self, o: Orientation) -> &Rational {
        match o {
            Orientation::Horizontal => &self.y,
            Orientation::Vertical => &self.x,
        }
    }

    /// Coordinate that varies along a line of the given orientation.
    pub fn moving(&self, o: Orientation) -> &Rational {
        match o {
            Orientation::Horizontal => &self.x,
            Orientation::Vertical => &self.y,
        }
    }

    /// Rebuilds a point from its fixed and moving coordinates.
    pub fn from_line(o: Orientation, fixed: Rational, moving: Rational) -> Self {
        match o {
            Orientation::Horizontal => Point2D::new(moving, fixed),
            Orientation::Vertical => Point2D::new(fixed, moving),
        }
    }
}

impl fmt::Display for Point2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.x, self.y)
    }
}

/// Which coordinate a transition moves. Horizontal transitions move `x`
/// along lines of constant `y`; they are Alice's moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Orientation::Horizontal => "H",
            Orientation::Vertical => "V",
        }
    }
}

/// Finite-support function on `[0, ∞)`. Zero weights are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SupportFunction1D {
    entries: BTreeMap<Rational, Rational>,
}

impl SupportFunction1D {
    pub fn new() -> Self {
        Self::default()
    }

    /// Duplicate coordinates are merged by adding their weights.
    pub fn from_entries(entries: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let mut f = Self::new();
        for (x, w) in entries {
            f.add_weight(x, w);
        }
        f
    }

    /// Panics if `x < 0`.
    pub fn add_weight(&mut self, x: Rational, w: Rational) {
        assert!(!x.is_negative(), "negative coordinate");
        if w.is_zero() {
            return;
        }
        match self.entries.entry(x) {
            btree_map::Entry::Vacant(e) => {
                e.insert(w);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += w;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn weight(&self, x: &Rational) -> Rational {
        self.entries.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |a, w| a + w)
    }

    /// `Σ x·h(x)`.
    pub fn first_moment(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |a, (x, w)| a + x * w)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.values().all(|w| w.is_positive())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_entries(self.entries.iter().map(|(x, w)| (x.clone(), w * c)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut f = self.clone();
        for (x, w) in &o.entries {
            f.add_weight(x.clone(), w.clone());
        }
        f
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut f = self.clone();
        for (x, w) in &o.entries {
            f.add_weight(x.clone(), -w);
        }
        f
    }

    /// Every coordinate moved right by `d ≥ 0`.
    pub fn shift(&self, d: &Rational) -> Self {
        Self::from_entries(self.entries.iter().map(|(x, w)| (x + d, w.clone())))
    }

    /// `(positive part, negative part)`.
    pub fn split_parts(&self) -> (Self, Self) {
        let mut pos = Self::new();
        let mut neg = Self::new();
        for (x, w) in &self.entries {
            if w.is_positive() {
                pos.add_weight(x.clone(), w.clone());
            } else {
                neg.add_weight(x.clone(), -w);
            }
        }
        (pos, neg)
    }
}

/// Finite-support function on the quarter-plane. Zero weights are never
/// stored; iteration order is lexicographic in `(x, y)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportFunction2D {
    entries: BTreeMap<Point2D, Rational>,
}

impl SupportFunction2D {
    pub fn new() -> Self {
        Self::default()
    }

    /// `w[p]`.
    pub fn point(p: Point2D, w: Rational) -> Self {
        let mut f = Self::new();
        f.add_weight(p, w);
        f
    }

    /// Duplicate points are merged by adding their weights.
    pub fn from_entries(entries: impl IntoIterator<Item = (Point2D, Rational)>) -> Self {
        let mut f = Self::new();
        for (p, w) in entries {
            f.add_weight(p, w);
        }
        f
    }

    /// `½[0,1] + ½[1,0]`.
    pub fn initial() -> Self {
        Self::from_entries([
            (Point2D::from_i64((0, 1), (1, 1)), rat(1, 2)),
            (Point2D::from_i64((1, 1), (0, 1)), rat(1, 2)),
        ])
    }

    pub fn add_weight(&mut self, p: Point2D, w: Rational) {
        if w.is_zero() {
            return;
        }
        match self.entries.entry(p) {
            btree_map::Entry::Vacant(e) => {
                e.insert(w);
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += w;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn weight(&self, p: &Point2D) -> Rational {
        self.entries.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point2D, &Rational)> {
        self.entries.iter()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point2D> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |a, w| a + w)
    }

    /// Sum of absolute weights.
    pub fn norm1(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |a, w| a + w.abs())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.values().all(|w| w.is_positive())
    }

    /// First entry with a negative weight.
    pub fn first_negative(&self) -> Option<(&Point2D, &Rational)> {
        self.entries.iter().find(|(_, w)| w.is_negative())
    }

    pub fn touches_origin(&self) -> bool {
        self.entries.keys().any(Point2D::is_origin)
    }

    /// The single point with weight one, if the function is exactly that.
    pub fn as_single_point(&self) -> Option<(&Point2D, &Rational)> {
        if self.entries.len() == 1 {
            self.entries.iter().next()
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut f = self.clone();
        for (p, w) in &o.entries {
            f.add_weight(p.clone(), w.clone());
        }
        f
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut f = self.clone();
        for (p, w) in &o.entries {
            f.add_weight(p.clone(), -w);
        }
        f
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        SupportFunction2D {
            entries: self.entries.iter().map(|(p, w)| (p.clone(), w * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// `f(x, y) ↦ f(y, x)`.
    pub fn transpose(&self) -> Self {
        Self::from_entries(self.entries.iter().map(|(p, w)| (p.transpose(), w.clone())))
    }

    /// Every point moved by `(dx, dy)`, both `≥ 0`.
    pub fn shift(&self, dx: &Rational, dy: &Rational) -> Self {
        SupportFunction2D {
            entries: self
                .entries
                .iter()
                .map(|(p, w)| (Point2D::new(&p.x + dx, &p.y + dy), w.clone()))
                .collect(),
        }
    }

    /// `(positive part, negative part)` with disjoint supports.
    pub fn split_parts(&self) -> (Self, Self) {
        let mut pos = Self::new();
        let mut neg = Self::new();
        for (p, w) in &self.entries {
            if w.is_positive() {
                pos.entries.insert(p.clone(), w.clone());
            } else {
                neg.entries.insert(p.clone(), -w);
            }
        }
        (pos, neg)
    }

    /// The restriction to lines of orientation `o`, keyed by the fixed
    /// coordinate in ascending order.
    pub fn lines(&self, o: Orientation) -> BTreeMap<Rational, SupportFunction1D> {
        let mut out: BTreeMap<Rational, SupportFunction1D> = BTreeMap::new();
        for (p, w) in &self.entries {
            out.entry(p.fixed(o).clone())
                .or_default()
                .add_weight(p.moving(o).clone(), w.clone());
        }
        out
    }

    /// Restriction to the single line with fixed coordinate `c`.
    pub fn line(&self, o: Orientation, c: &Rational) -> SupportFunction1D {
        SupportFunction1D::from_entries(
            self.entries
                .iter()
                .filter(|(p, _)| p.fixed(o) == c)
                .map(|(p, w)| (p.moving(o).clone(), w.clone())),
        )
    }

    /// Sum of line functions placed on lines of orientation `o`.
    pub fn from_lines<'a>(
        o: Orientation,
        lines: impl IntoIterator<Item = (&'a Rational, &'a SupportFunction1D)>,
    ) -> Self {
        let mut f = Self::new();
        for (c, l) in lines {
            for (m, w) in l.iter() {
                f.add_weight(Point2D::from_line(o, c.clone(), m.clone()), w.clone());
            }
        }
        f
    }

    pub fn x_coordinates(&self) -> BTreeSet<Rational> {
        self.entries.keys().map(|p| p.x.clone()).collect()
    }

    pub fn y_coordinates(&self) -> BTreeSet<Rational> {
        self.entries.keys().map(|p| p.y.clone()).collect()
    }

    pub fn max_x(&self) -> Option<Rational> {
        self.entries.keys().map(|p| &p.x).max().cloned()
    }

    pub fn max_y(&self) -> Option<Rational> {
        self.entries.keys().map(|p| &p.y).max().cloned()
    }
}

impl fmt::Display for SupportFunction2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({w}){p}")?;
        }
        Ok(())
    }
}

/// Pointwise operation selector for [`fn_algebra`].
#[derive(Clone, Debug)]
pub enum FnOp {
    Add,
    Subtract,
    /// Scales the first operand; the second is ignored.
    Scale(Rational),
}

/// Pointwise arithmetic on 2-D functions with zero weights dropped.
pub fn fn_algebra(a: &SupportFunction2D, b: &SupportFunction2D, op: FnOp) -> SupportFunction2D {
    match op {
        FnOp::Add => a.add(b),
        FnOp::Subtract => a.sub(b),
        FnOp::Scale(c) => a.scale(&c),
    }
}

/// `(positive part, negative part)` of `f`.
pub fn split_parts(f: &SupportFunction2D) -> (SupportFunction2D, SupportFunction2D) {
    f.split_parts()
}

/// A single move from one nonnegative frame to the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub before: SupportFunction2D,
    pub after: SupportFunction2D,
    pub orientation: Orientation,
}

impl Transition {
    pub fn new(before: SupportFunction2D, after: SupportFunction2D, orientation: Orientation) -> Self {
        Transition {
            before,
            after,
            orientation,
        }
    }

    pub fn difference(&self) -> SupportFunction2D {
        self.after.sub(&self.before)
    }
}

/// Structural errors in point-game data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PointGameError {
    #[error("{frames} frames need {} orientations, got {orientations}", frames.saturating_sub(1))]
    OrientationCount { frames: usize, orientations: usize },
    #[error("a point game needs at least one frame")]
    NoFrames,
    #[error("frame {index} has weight {} at {point}", format_rational(weight))]
    NegativeFrame {
        index: usize,
        point: Point2D,
        weight: Rational,
    },
}

/// Sequence of frames with one orientation per transition.
///
/// Orientations need not alternate: consecutive moves by the same party are
/// allowed and are merged into one message when lifting to a protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointGame {
    frames: Vec<SupportFunction2D>,
    orientations: Vec<Orientation>,
}

impl PointGame {
    pub fn new(
        frames: Vec<SupportFunction2D>,
        orientations: Vec<Orientation>,
    ) -> Result<Self, PointGameError> {
        if frames.is_empty() {
            return Err(PointGameError::NoFrames);
        }
        if orientations.len() + 1 != frames.len() {
            return Err(PointGameError::OrientationCount {
                frames: frames.len(),
                orientations: orientations.len(),
            });
        }
        Ok(PointGame {
            frames,
            orientations,
        })
    }

    pub fn frames(&self) -> &[SupportFunction2D] {
        &self.frames
    }

    pub fn orientations(&self) -> &[Orientation] {
        &self.orientations
    }

    pub fn num_transitions(&self) -> usize {
        self.orientations.len()
    }

    /// Transition `i` maps frame `i` to frame `i + 1`.
    pub fn transition(&self, i: usize) -> Transition {
        Transition::new(
            self.frames[i].clone(),
            self.frames[i + 1].clone(),
            self.orientations[i],
        )
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        (0..self.num_transitions()).map(|i| self.transition(i))
    }

    pub fn first(&self) -> &SupportFunction2D {
        &self.frames[0]
    }

    pub fn last(&self) -> &SupportFunction2D {
        self.frames.last().unwrap()
    }

    /// Every x coordinate (Alice) and y coordinate (Bob) in any frame.
    pub fn coordinate_sets(&self) -> (BTreeSet<Rational>, BTreeSet<Rational>) {
        let mut xs = BTreeSet::new();
        let mut ys = BTreeSet::new();
        for f in &self.frames {
            for p in f.points() {
                xs.insert(p.x.clone());
                ys.insert(p.y.clone());
            }
        }
        (xs, ys)
    }
}

/// `t_i = p_i − p_{i−1}` for `i = 1..n`.
pub fn frames_to_functions(g: &PointGame) -> Vec<SupportFunction2D> {
    g.frames.windows(2).map(|w| w[1].sub(&w[0])).collect()
}

/// Orientation under which every line of `t` conserves weight, preferring
/// the opposite of `prev` when both or neither qualify.
fn infer_orientation(t: &SupportFunction2D, prev: Option<Orientation>) -> Orientation {
    let conserves = |o| t.lines(o).values().all(|l| l.total().is_zero());
    let default = prev.map_or(Orientation::Horizontal, Orientation::flip);
    match (conserves(Orientation::Horizontal), conserves(Orientation::Vertical)) {
        (true, false) => Orientation::Horizontal,
        (false, true) => Orientation::Vertical,
        _ => default,
    }
}

/// Prefix sums of `t` starting from `initial`. Orientations are inferred
/// from which lines of each `t_i` conserve weight.
pub fn functions_to_frames(
    t: &[SupportFunction2D],
    initial: &SupportFunction2D,
) -> Result<PointGame, PointGameError> {
    let mut frames = vec![initial.clone()];
    let mut orientations = Vec::with_capacity(t.len());
    let mut prev = None;
    for (i, ti) in t.iter().enumerate() {
        let next = frames.last().unwrap().add(ti);
        if let Some((p, w)) = next.first_negative() {
            return Err(PointGameError::NegativeFrame {
                index: i + 1,
                point: p.clone(),
                weight: w.clone(),
            });
        }
        let o = infer_orientation(ti, prev);
        prev = Some(o);
        orientations.push(o);
        frames.push(next);
    }
    PointGame::new(frames, orientations)
}

/// Time-independent point game: valid horizontal `h` and valid vertical `v`
/// with `h + v = final_weight·[final_point] − ½[0,1] − ½[1,0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tipg {
    pub h: SupportFunction2D,
    pub v: SupportFunction2D,
    pub final_point: Point2D,
    pub final_weight: Rational,
}

impl Tipg {
    /// `h + v − (final − initial)`; empty exactly when the identity holds.
    pub fn identity_residual(&self) -> SupportFunction2D {
        let target = SupportFunction2D::point(self.final_point.clone(), self.final_weight.clone())
            .sub(&SupportFunction2D::initial());
        self.h.add(&self.v).sub(&target)
    }
}

// ----- JSON -----

/// Current artifact schema version.
pub const FORMAT_VERSION: u32 = 1;

/// Serde adapter writing a rational as the string `"p/q"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDto {
    #[serde(with = "rational_str")]
    x: Rational,
    #[serde(with = "rational_str")]
    y: Rational,
    #[serde(with = "rational_str")]
    w: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDto {
    #[serde(with = "rational_str")]
    x: Rational,
    #[serde(with = "rational_str")]
    y: Rational,
}

fn checked_point<E: serde::de::Error>(x: Rational, y: Rational) -> Result<Point2D, E> {
    if x.is_negative() || y.is_negative() {
        return Err(E::custom(format!(
            "negative coordinate [{}, {}]",
            format_rational(&x),
            format_rational(&y)
        )));
    }
    Ok(Point2D { x, y })
}

impl Serialize for Point2D {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PointDto {
            x: self.x.clone(),
            y: self.y.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point2D {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = PointDto::deserialize(d)?;
        checked_point(p.x, p.y)
    }
}

impl Serialize for SupportFunction2D {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|(p, w)| EntryDto {
            x: p.x.clone(),
            y: p.y.clone(),
            w: w.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for SupportFunction2D {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dtos = Vec::<EntryDto>::deserialize(d)?;
        let mut f = SupportFunction2D::new();
        for e in dtos {
            let p = checked_point(e.x, e.y)?;
            f.add_weight(p, e.w);
        }
        Ok(f)
    }
}

impl Serialize for Orientation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Orientation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "H" => Ok(Orientation::Horizontal),
            "V" => Ok(Orientation::Vertical),
            other => Err(serde::de::Error::custom(format!("orientation must be \"H\" or \"V\", got {other:?}"))),
        }
    }
}

fn check_format<E: serde::de::Error>(format: u32) -> Result<(), E> {
    if format != FORMAT_VERSION {
        return Err(E::custom(format!("unsupported format version {format}")));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointGameDto {
    format: u32,
    frames: Vec<SupportFunction2D>,
    orientations: Vec<Orientation>,
}

impl Serialize for PointGame {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PointGameDto {
            format: FORMAT_VERSION,
            frames: self.frames.clone(),
            orientations: self.orientations.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointGame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = PointGameDto::deserialize(d)?;
        check_format(dto.format)?;
        PointGame::new(dto.frames, dto.orientations).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TipgDto {
    format: u32,
    h: SupportFunction2D,
    v: SupportFunction2D,
    final_point: Point2D,
    #[serde(with = "rational_str")]
    final_weight: Rational,
}

impl Serialize for Tipg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TipgDto {
            format: FORMAT_VERSION,
            h: self.h.clone(),
            v: self.v.clone(),
            final_point: self.final_point.clone(),
            final_weight: self.final_weight.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tipg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = TipgDto::deserialize(d)?;
        check_format(dto.format)?;
        Ok(Tipg {
            h: dto.h,
            v: dto.v,
            final_point: dto.final_point,
            final_weight: dto.final_weight,
        })
    }
}
