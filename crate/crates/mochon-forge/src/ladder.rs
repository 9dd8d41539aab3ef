//! Mochon's width-`k` ladder: rung functions, the assembled ladder, the axis
//! split distribution, and the resulting time-independent point game.
//!
//! Coordinates live on the grid `ω·ℕ` with `ω = 1/d`. All heavy sums are done
//! in grid units, where `f(aω, bω) = ω^{4k−2}·F(a, b)` with the integer
//! polynomial
//! `F(a, b) = (−1)^{k+1} Π_{i=1}^{k−1}(ζ−i−a)(ζ−i−b) · Π_{i=1}^{k}(Γ+i−a)(Γ+i−b)`.
//! The split weights and rung weights then only involve
//! `C' = C·ω^{2k−3}` and integers.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::numeric::rational::{int, rat, to_f64, Rational};
use crate::pointgame::{
    rational_str, Orientation, Point2D, SupportFunction1D, SupportFunction2D, Tipg, Transition,
};
use crate::validity::{check_transition, transition_status, ValidityStatus};

/// Errors from ladder construction and search.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LadderError {
    #[error("invalid ladder parameters: {0}")]
    InvalidParams(String),
    #[error("split weight at j = {0} is not positive")]
    NonpositiveSplitWeight(u64),
    #[error("the axis split is not valid at zeta = {0}")]
    SplitNotValid(u64),
    #[error("no admissible alpha on the grid up to gamma")]
    NoAdmissibleAlpha,
    #[error("ladder identity fails; residual has {0} points")]
    IdentityMismatch(usize),
}

/// Ladder parameters. `α = ζω` is the final point `[α, α]`; `C` normalizes
/// the split distribution to total weight `½`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderParams {
    pub k: u32,
    pub omega: Rational,
    pub gamma: u64,
    pub zeta: u64,
    pub c: Rational,
    /// `1/ω`.
    d: u64,
    /// `C·ω^{2k−3}`.
    c_grid: Rational,
}

fn grid_size(omega: &Rational) -> Result<u64, LadderError> {
    if !omega.is_positive() || !omega.numer().is_one() {
        return Err(LadderError::InvalidParams(format!(
            "omega must be 1/d for a positive integer d, got {omega}"
        )));
    }
    omega
        .denom()
        .to_u64()
        .ok_or_else(|| LadderError::InvalidParams("1/omega does not fit in 64 bits".into()))
}

impl LadderParams {
    /// Validates `Γ > ζ > k`, `ζω > ½`, `ω = 1/d`, and computes `C`.
    pub fn new(k: u32, omega: Rational, gamma: u64, zeta: u64) -> Result<Self, LadderError> {
        if k == 0 {
            return Err(LadderError::InvalidParams("k must be positive".into()));
        }
        let d = grid_size(&omega)?;
        if !(gamma > zeta && zeta > k as u64) {
            return Err(LadderError::InvalidParams(format!(
                "need gamma > zeta > k, got gamma = {gamma}, zeta = {zeta}, k = {k}"
            )));
        }
        if 2 * zeta <= d {
            return Err(LadderError::InvalidParams(format!(
                "need zeta*omega > 1/2, got zeta = {zeta} with omega = 1/{d}"
            )));
        }
        let mut p = LadderParams {
            k,
            omega,
            gamma,
            zeta,
            c: Rational::zero(),
            d,
            c_grid: Rational::zero(),
        };
        // Partial sums telescope, so reducing at every step stays cheap.
        let mut s = Rational::zero();
        for j in zeta..=gamma {
            s += Rational::new(p.f_grid(0, j as i64), q_grid(k, j));
        }
        if !s.is_positive() {
            return Err(LadderError::NonpositiveSplitWeight(zeta));
        }
        p.c_grid = rat(1, 2) / s;
        p.c = &p.c_grid / p.omega_pow(2 * k as i64 - 3);
        Ok(p)
    }

    pub fn alpha(&self) -> Rational {
        &self.omega * int(self.zeta as i64)
    }

    /// `1/ω`.
    pub fn grid_denominator(&self) -> u64 {
        self.d
    }

    fn omega_pow(&self, e: i64) -> Rational {
        let base = if e >= 0 {
            self.omega.clone()
        } else {
            Rational::one() / &self.omega
        };
        (0..e.unsigned_abs()).fold(Rational::one(), |acc, _| acc * &base)
    }

    fn at(&self, j: i64) -> Rational {
        &self.omega * int(j)
    }

    /// `F(a, b)` in grid units.
    fn f_grid(&self, a: i64, b: i64) -> BigInt {
        let (z, g, k) = (self.zeta as i64, self.gamma as i64, self.k as i64);
        let mut acc = BigInt::one();
        for i in 1..k {
            acc *= (z - i - a) * (z - i - b);
        }
        for i in 1..=k {
            acc *= BigInt::from(g + i - a) * (g + i - b);
        }
        if k % 2 == 0 {
            -acc
        } else {
            acc
        }
    }
}

/// `Q(j) = Π_{l=−k}^{k} (j + l)`.
fn q_grid(k: u32, j: u64) -> BigInt {
    let k = k as i64;
    let j = j as i64;
    (-k..=k).fold(BigInt::one(), |acc, l| acc * (j + l))
}

/// `D_i = Π_{l ∈ [−k, k], l ≠ i, l ≠ 0} (l − i)`.
fn d_grid(k: u32, i: i64) -> BigInt {
    let k = k as i64;
    (-k..=k)
        .filter(|&l| l != i && l != 0)
        .fold(BigInt::one(), |acc, l| acc * (l - i))
}

/// `f(x, y)` evaluated exactly at arbitrary rationals.
pub fn f_eval(p: &LadderParams, x: &Rational, y: &Rational) -> Rational {
    let alpha = p.alpha();
    let top = p.at(p.gamma as i64);
    let mut acc = Rational::one();
    for i in 1..p.k as i64 {
        let c = &alpha - p.at(i);
        acc *= (&c - x) * (&c - y);
    }
    for i in 1..=p.k as i64 {
        let c = &top + p.at(i);
        acc *= (&c - x) * (&c - y);
    }
    if p.k % 2 == 0 {
        -acc
    } else {
        acc
    }
}

/// `split(j) = C·f(0, jω) / Π_{l=−k}^{k}((j+l)ω)`.
pub fn split_weight(p: &LadderParams, j: u64) -> Rational {
    &p.c_grid * Rational::new(p.f_grid(0, j as i64), q_grid(p.k, j))
}

/// The rung at height `jω` as a function of `x`: weight `−split(j)` at 0 and
/// `C·f((j+i)ω, jω) / [((j+i)ω)(jω) Π_{l≠i,0}((l−i)ω)]` at `(j+i)ω`,
/// `i ∈ {−k..k} \ {0}`. Designed roots of `f` give zero weights, which are
/// dropped.
pub fn rung_function(p: &LadderParams, j: u64) -> SupportFunction1D {
    assert!(p.zeta <= j && j <= p.gamma, "rung index out of range");
    let k = p.k as i64;
    let ji = j as i64;
    let mut f = SupportFunction1D::new();
    f.add_weight(Rational::zero(), -split_weight(p, j));
    for i in (-k..=k).filter(|&i| i != 0) {
        let a = ji + i;
        let num = p.f_grid(a, ji);
        if num.is_zero() {
            continue;
        }
        let den = BigInt::from(a) * ji * d_grid(p.k, i);
        f.add_weight(p.at(a), &p.c_grid * Rational::new(num, den));
    }
    f
}

/// `(h_lad, v_lad)` with `h_lad` the sum of all rungs on their horizontal
/// lines and `v_lad(x, y) = h_lad(y, x)`.
pub fn build_ladder(p: &LadderParams) -> Result<(SupportFunction2D, SupportFunction2D), LadderError> {
    let rungs: Vec<(u64, SupportFunction1D)> = (p.zeta..=p.gamma)
        .into_par_iter()
        .map(|j| (j, rung_function(p, j)))
        .collect();
    let mut h = SupportFunction2D::new();
    for (j, r) in &rungs {
        let y = p.at(*j as i64);
        for (x, w) in r.iter() {
            h.add_weight(Point2D::new(x.clone(), y.clone()), w.clone());
        }
    }
    let v = h.transpose();
    let residual = h.add(&v).sub(&ladder_target(p));
    if !residual.is_empty() {
        return Err(LadderError::IdentityMismatch(residual.len()));
    }
    Ok((h, v))
}

/// `½[α−kω, α] + ½[α, α−kω] − Σ_j split(j)([0, jω] + [jω, 0])`.
pub fn ladder_target(p: &LadderParams) -> SupportFunction2D {
    let alpha = p.alpha();
    let low = &alpha - p.at(p.k as i64);
    let mut t = SupportFunction2D::new();
    t.add_weight(Point2D::new(low.clone(), alpha.clone()), rat(1, 2));
    t.add_weight(Point2D::new(alpha, low), rat(1, 2));
    for (j, s) in split_distribution_unchecked(p) {
        let y = p.at(j as i64);
        t.add_weight(Point2D::new(Rational::zero(), y.clone()), -&s);
        t.add_weight(Point2D::new(y, Rational::zero()), -s);
    }
    t
}

fn split_distribution_unchecked(p: &LadderParams) -> Vec<(u64, Rational)> {
    (p.zeta..=p.gamma)
        .into_par_iter()
        .map(|j| (j, split_weight(p, j)))
        .collect()
}

/// `(j, split(j))` for `j = ζ..Γ`; the weights sum to exactly `½`.
pub fn split_distribution(p: &LadderParams) -> Result<Vec<(u64, Rational)>, LadderError> {
    let s = split_distribution_unchecked(p);
    if let Some((j, _)) = s.iter().find(|(_, w)| !w.is_positive()) {
        return Err(LadderError::NonpositiveSplitWeight(*j));
    }
    Ok(s)
}

/// The horizontal axis split `½[1,0] → Σ split(j)[jω, 0]` as a transition.
pub fn axis_split_transition(p: &LadderParams, dist: &[(u64, Rational)], o: Orientation) -> Transition {
    let place = |m: Rational| Point2D::from_line(o, Rational::zero(), m);
    let before = SupportFunction2D::point(place(Rational::one()), rat(1, 2));
    let after = SupportFunction2D::from_entries(dist.iter().map(|(j, w)| (place(p.at(*j as i64)), w.clone())));
    Transition::new(before, after, o)
}

/// Smallest-prime-factor table for `0..=n`.
fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut m = i;
            while m <= n {
                if spf[m] == 0 {
                    spf[m] = i as u32;
                }
                m += i;
            }
        }
    }
    spf
}

fn add_factorization(spf: &[u32], mut n: usize, exps: &mut BTreeMap<u32, u32>) {
    while n > 1 {
        let p = spf[n];
        *exps.entry(p).or_insert(0) += 1;
        n /= p as usize;
    }
}

/// Sign of `Σ_{j=ζ}^{Γ} split(j)·(1 − 1/(jω))`, the margin of the axis split.
pub fn split_margin_sign(k: u32, omega: &Rational, gamma: u64, zeta: u64) -> Result<Ordering, LadderError> {
    Ok(split_margin_signs(k, omega, gamma, zeta, zeta)?[0].1)
}

/// [`split_margin_sign`] for every `ζ` in `zeta_lo..=zeta_hi`, in one pass.
///
/// Evaluated as an integer sum over a common denominator `L` of every
/// `j·Q(j)`: the sign equals that of `Σ_{j≥ζ} A_ζ(j)(j − d)·L/(j·Q(j))` with
/// `A_ζ(j) = Π_{i=1}^{k−1}(j+i−ζ) · Π_{i=1}^{k}(Γ+i−j) > 0` proportional to
/// `F(0, j)`. Expanding `A_ζ(j)` in powers of `ζ` turns the sums over
/// `j ≥ ζ` into `k` suffix sums, accumulated from `j = Γ` downward.
pub fn split_margin_signs(
    k: u32,
    omega: &Rational,
    gamma: u64,
    zeta_lo: u64,
    zeta_hi: u64,
) -> Result<Vec<(u64, Ordering)>, LadderError> {
    let d = grid_size(omega)? as i64;
    let (k, g) = (k as i64, gamma as i64);
    let (z_lo, z_hi) = (zeta_lo as i64, zeta_hi as i64);
    if z_lo - k < 1 || z_hi > g || z_lo > z_hi {
        return Err(LadderError::InvalidParams("need k < zeta <= gamma".into()));
    }
    let spf = spf_sieve((g + k) as usize);
    let mut exps: BTreeMap<u32, u32> = BTreeMap::new();
    for j in z_lo..=g {
        let mut e = BTreeMap::new();
        add_factorization(&spf, j as usize, &mut e);
        for l in -k..=k {
            add_factorization(&spf, (j + l) as usize, &mut e);
        }
        for (p, c) in e {
            let slot = exps.entry(p).or_insert(0);
            *slot = (*slot).max(c);
        }
    }
    let l_common = exps
        .iter()
        .fold(BigInt::one(), |acc, (&p, &e)| acc * BigInt::from(p).pow(e));
    // terms[j][m]: coefficient of ζ^m in A_ζ(j)(j − d)·L/(j·Q(j)).
    let terms: Vec<Vec<BigInt>> = (z_lo..=g)
        .into_par_iter()
        .map(|j| {
            let mut t = &l_common / (j as u64);
            for l in -k..=k {
                t = t / ((j + l) as u64);
            }
            let mut b = BigInt::from(j - d);
            for i in 1..=k {
                b *= g + i - j;
            }
            let base = t * b;
            // Π_{i=1}^{k−1} ((j+i) − ζ) as a polynomial in ζ.
            let mut poly = vec![BigInt::one()];
            for i in 1..k {
                let u = BigInt::from(j + i);
                let mut next = vec![BigInt::zero(); poly.len() + 1];
                for (m, c) in poly.iter().enumerate() {
                    next[m] += c * &u;
                    next[m + 1] -= c;
                }
                poly = next;
            }
            poly.into_iter().map(|c| c * &base).collect()
        })
        .collect();
    let mut suffix = vec![BigInt::zero(); k as usize];
    let mut out = Vec::with_capacity((z_hi - z_lo + 1) as usize);
    for j in (z_lo..=g).rev() {
        for (s, t) in suffix.iter_mut().zip(&terms[(j - z_lo) as usize]) {
            *s += t;
        }
        if j <= z_hi {
            let mut total = BigInt::zero();
            let mut zp = BigInt::one();
            for s in &suffix {
                total += s * &zp;
                zp *= j;
            }
            let sign = match total.sign() {
                num_bigint::Sign::Minus => Ordering::Less,
                num_bigint::Sign::NoSign => Ordering::Equal,
                num_bigint::Sign::Plus => Ordering::Greater,
            };
            out.push((j as u64, sign));
        }
    }
    out.reverse();
    Ok(out)
}

/// Strict form of the split inequality `Σ split(j) > Σ split(j)/(jω)`.
pub fn check_split_inequality(p: &LadderParams) -> bool {
    split_margin_sign(p.k, &p.omega, p.gamma, p.zeta) == Ok(Ordering::Greater)
}

/// Outcome of [`find_min_alpha`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaSearch {
    pub zeta: u64,
    pub alpha: Rational,
    pub params: LadderParams,
    /// Verdict of the certified axis split.
    pub split_status: ValidityStatus,
}

/// Least `ζ` with `ζω > ½` whose axis splits are accepted by the generic
/// transition checker.
///
/// Candidates are screened upward with [`split_margin_signs`]; the first
/// candidate with a nonnegative margin is certified by building the split
/// distribution and running [`check_transition`] on both axis splits.
pub fn find_min_alpha(k: u32, omega: &Rational, gamma: u64) -> Result<AlphaSearch, LadderError> {
    let d = grid_size(omega)?;
    let start = (d / 2 + 1).max(k as u64 + 1);
    if start >= gamma {
        return Err(LadderError::NoAdmissibleAlpha);
    }
    let signs = split_margin_signs(k, omega, gamma, start, gamma - 1)?;
    for (zeta, sign) in signs {
        if sign == Ordering::Less {
            continue;
        }
        let params = LadderParams::new(k, omega.clone(), gamma, zeta)?;
        let dist = match split_distribution(&params) {
            Ok(d) => d,
            Err(LadderError::NonpositiveSplitWeight(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut status = ValidityStatus::StrictlyValid;
        for o in [Orientation::Horizontal, Orientation::Vertical] {
            let t = axis_split_transition(&params, &dist, o);
            let lines = check_transition(&t).map_err(|e| LadderError::InvalidParams(e.to_string()))?;
            status = status.min(transition_status(&lines));
        }
        if status >= ValidityStatus::Valid {
            return Ok(AlphaSearch {
                zeta,
                alpha: params.alpha(),
                params,
                split_status: status,
            });
        }
    }
    Err(LadderError::NoAdmissibleAlpha)
}

/// The ladder TIPG with final point `[α, α]`:
/// `h = h_lad + (Σ split(j)[jω,0] − ½[1,0]) + (½[α,α] − ½[α−kω,α])` and
/// `v(x, y) = h(y, x)`.
pub fn build_tipg(k: u32, omega: &Rational, gamma: u64, zeta: u64) -> Result<Tipg, LadderError> {
    let p = LadderParams::new(k, omega.clone(), gamma, zeta)?;
    build_tipg_from(&p)
}

/// [`build_tipg`] for already validated parameters.
pub fn build_tipg_from(p: &LadderParams) -> Result<Tipg, LadderError> {
    if split_margin_sign(p.k, &p.omega, p.gamma, p.zeta)? == Ordering::Less {
        return Err(LadderError::SplitNotValid(p.zeta));
    }
    let dist = split_distribution(p)?;
    let (mut h, _) = build_ladder(p)?;
    h.add_weight(Point2D::new(Rational::one(), Rational::zero()), rat(-1, 2));
    for (j, w) in &dist {
        h.add_weight(Point2D::new(p.at(*j as i64), Rational::zero()), w.clone());
    }
    let alpha = p.alpha();
    h.add_weight(Point2D::new(alpha.clone(), alpha.clone()), rat(1, 2));
    h.add_weight(Point2D::new(&alpha - p.at(p.k as i64), alpha.clone()), rat(-1, 2));
    let v = h.transpose();
    Ok(Tipg {
        h,
        v,
        final_point: Point2D::new(alpha.clone(), alpha),
        final_weight: Rational::one(),
    })
}

/// Parameter summary for the `ladder` command.
#[derive(Clone, Debug, Serialize)]
pub struct LadderReport {
    pub format: u32,
    pub k: u32,
    #[serde(with = "rational_str")]
    pub omega: Rational,
    pub gamma: u64,
    pub zeta: u64,
    #[serde(with = "rational_str")]
    pub alpha_min: Rational,
    pub alpha_min_f64: f64,
    #[serde(with = "rational_str")]
    pub c: Rational,
    pub rung_count: u64,
    /// Points in the support of `h` plus points in the support of `v`.
    pub support_size: usize,
}

impl LadderReport {
    pub fn new(p: &LadderParams, t: &Tipg) -> Self {
        LadderReport {
            format: crate::pointgame::FORMAT_VERSION,
            k: p.k,
            omega: p.omega.clone(),
            gamma: p.gamma,
            zeta: p.zeta,
            alpha_min: p.alpha(),
            alpha_min_f64: to_f64(&p.alpha()),
            c: p.c.clone(),
            rung_count: p.gamma - p.zeta + 1,
            support_size: t.h.len() + t.v.len(),
        }
    }
}

/// `Σ_i g(x_i) / Π_{j≠i}(x_j − x_i)` for distinct `xs`; zero whenever
/// `deg g ≤ |xs| − 2`.
pub fn lagrange_sum(xs: &[Rational], g: &crate::numeric::Polynomial) -> Rational {
    let mut acc = Rational::zero();
    for (i, xi) in xs.iter().enumerate() {
        let mut den = Rational::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                den *= xj - xi;
            }
        }
        acc += g.eval(xi) / den;
    }
    acc
}
