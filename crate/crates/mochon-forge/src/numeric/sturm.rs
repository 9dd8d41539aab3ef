//! Exact sign analysis of a polynomial on the open half-line `(0, ∞)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::Polynomial;
use super::rational::Rational;

/// Outcome of [`sign_on_positive_axis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositivitySign {
    /// `p(λ) > 0` for every `λ > 0`.
    StrictlyPositive,
    /// `p(λ) ≥ 0` for every `λ > 0`, with a zero somewhere on `(0, ∞)`, or
    /// `p` identically zero.
    NonnegativeEverywhere,
    /// A rational `λ > 0` with `p(λ) < 0`.
    Violated(Rational),
}

/// Isolated root of a square-free polynomial.
#[derive(Clone, Debug)]
enum RootInterval {
    Exact(Rational),
    /// Exactly one root in `(lo, hi)`. `hi` is not a root; `lo` may be the
    /// previous isolated root.
    Open(Rational, Rational),
}

impl RootInterval {
    fn lower(&self) -> &Rational {
        match self {
            RootInterval::Exact(x) => x,
            RootInterval::Open(lo, _) => lo,
        }
    }
    fn upper(&self) -> &Rational {
        match self {
            RootInterval::Exact(x) => x,
            RootInterval::Open(_, hi) => hi,
        }
    }
}

/// Integer polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
struct IntPoly(Vec<BigInt>);

impl IntPoly {
    /// Positive rescaling of `p` to a primitive integer polynomial.
    fn from_rational(p: &Polynomial) -> Self {
        let prim = p.primitive();
        IntPoly(prim.coeffs().iter().map(|c| c.numer().clone()).collect())
    }

    fn to_polynomial(&self) -> Polynomial {
        Polynomial::new(self.0.iter().map(|c| Rational::from_integer(c.clone())).collect())
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len() - 1
    }

    fn lead(&self) -> &BigInt {
        self.0.last().unwrap()
    }

    /// Divides out the content, keeping the sign.
    fn primitive(mut self) -> Self {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
            if g.is_one() {
                return self;
            }
        }
        if !g.is_zero() {
            for c in &mut self.0 {
                *c = &*c / &g;
            }
        }
        self
    }

    fn derivative(&self) -> Self {
        IntPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
        .trim()
    }

    fn neg(mut self) -> Self {
        for c in &mut self.0 {
            *c = -&*c;
        }
        self
    }

    /// A positive multiple of the Euclidean remainder of `self` by `b`,
    /// made primitive.
    fn positive_remainder(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree();
        let lb = b.lead().abs();
        let sb = b.lead().signum();
        let mut r = self.0.clone();
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let lr = r.last().unwrap().clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            let f = &lr * &sb;
            for (j, bc) in b.0.iter().enumerate() {
                r[k + j] -= &f * bc;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
            r = IntPoly(r).primitive().0;
        }
        IntPoly(r).trim().primitive()
    }

    /// Exact quotient by a divisor of `self`.
    fn exact_div(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree();
        let mut r = self.0.clone();
        let n = r.len();
        let mut q = vec![BigInt::zero(); n - db];
        for i in (db..n).rev() {
            if r[i].is_zero() {
                continue;
            }
            let f = &r[i] / b.lead();
            for (j, bc) in b.0.iter().enumerate() {
                r[i - db + j] -= &f * bc;
            }
            q[i - db] = f;
        }
        debug_assert!(r.iter().all(Zero::is_zero), "inexact division");
        IntPoly(q).trim()
    }

    fn gcd(&self, other: &IntPoly) -> IntPoly {
        let (mut a, mut b) = (self.clone().primitive(), other.clone().primitive());
        while !b.is_zero() {
            let r = a.positive_remainder(&b);
            a = b;
            b = r;
        }
        if a.lead().is_negative() {
            a = a.neg();
        }
        a
    }

    fn square_free(&self) -> IntPoly {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        let q = self.exact_div(&g);
        if q.lead().is_negative() == self.lead().is_negative() {
            q
        } else {
            q.neg()
        }
    }

    /// Sign of the polynomial at `x = p/q` via homogeneous integer Horner.
    fn sign_at(&self, x: &Rational) -> i8 {
        let (p, q) = (x.numer(), x.denom());
        let mut it = self.0.iter().rev();
        let Some(lead) = it.next() else { return 0 };
        let mut acc = lead.clone();
        let mut qk = BigInt::one();
        for c in it {
            qk *= q;
            acc = acc * p + c * &qk;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }
}

/// Sturm chain of `p`, each element rescaled by a positive constant to a
/// primitive integer polynomial.
pub fn sturm_sequence(p: &Polynomial) -> Vec<Polynomial> {
    if p.is_zero() {
        return Vec::new();
    }
    int_sturm(&IntPoly::from_rational(p))
        .iter()
        .map(IntPoly::to_polynomial)
        .collect()
}

fn int_sturm(p: &IntPoly) -> Vec<IntPoly> {
    let mut seq = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d.primitive());
    loop {
        let n = seq.len();
        let r = seq[n - 2].positive_remainder(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.neg());
    }
    seq
}

fn sign_changes_at(seq: &[IntPoly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for q in seq {
        let s = q.sign_at(x);
        if s == 0 {
            continue;
        }
        if last != 0 && last != s {
            count += 1;
        }
        last = s;
    }
    count
}

fn count_in(seq: &[IntPoly], a: &Rational, b: &Rational) -> usize {
    sign_changes_at(seq, a).saturating_sub(sign_changes_at(seq, b))
}

/// Number of distinct real roots of `p` in the half-open interval `(a, b]`.
/// Requires `a < b`; the zero polynomial has no countable roots and gives 0.
pub fn count_roots(p: &Polynomial, a: &Rational, b: &Rational) -> usize {
    assert!(a < b, "empty interval");
    if p.is_zero() {
        return 0;
    }
    let seq = int_sturm(&IntPoly::from_rational(p).square_free());
    count_in(&seq, a, b)
}

/// Power of two exceeding `1 + max |a_i / a_n|`, a bound on every root.
fn root_bound(p: &IntPoly) -> Rational {
    let lead = p.lead().abs();
    let mut m = Rational::zero();
    for c in &p.0[..p.0.len() - 1] {
        let r = Rational::new(c.abs(), lead.clone());
        if r > m {
            m = r;
        }
    }
    m += Rational::one();
    let mut b = Rational::one();
    while b <= m {
        b *= Rational::from_integer(BigInt::from(2));
    }
    b
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// Isolates every root of the square-free `p` inside `(lo, hi]`, returning
/// them in ascending order. `seq` is the Sturm chain of `p`.
fn isolate(p: &IntPoly, seq: &[IntPoly], lo: Rational, hi: Rational, out: &mut Vec<RootInterval>) {
    let n = count_in(seq, &lo, &hi);
    if n == 0 {
        return;
    }
    if n == 1 {
        if p.sign_at(&hi) == 0 {
            out.push(RootInterval::Exact(hi));
        } else {
            out.push(RootInterval::Open(lo, hi));
        }
        return;
    }
    let mid = (&lo + &hi) * half();
    isolate(p, seq, lo, mid.clone(), out);
    isolate(p, seq, mid, hi, out);
}

/// Decides the sign of `p` on `(0, ∞)` exactly.
///
/// The zero polynomial is reported as `NonnegativeEverywhere`. A zero at
/// `λ = 0` itself does not count.
pub fn sign_on_positive_axis(p: &Polynomial) -> PositivitySign {
    if p.is_zero() {
        return PositivitySign::NonnegativeEverywhere;
    }
    let full = IntPoly::from_rational(p);
    let mut q = full.square_free();
    while q.0[0].is_zero() {
        q.0.remove(0);
    }
    let seq = int_sturm(&q);
    let zero = Rational::zero();
    let bound = root_bound(&q);
    let mut roots = Vec::new();
    isolate(&q, &seq, zero.clone(), bound, &mut roots);

    let mut samples = Vec::with_capacity(roots.len() + 1);
    match roots.first() {
        None => samples.push(Rational::one()),
        Some(first) => {
            samples.push(gap_point(&q, &seq, &zero, first));
            for w in roots.windows(2) {
                samples.push(gap_point(&q, &seq, w[0].upper(), &w[1]));
            }
            samples.push(roots.last().unwrap().upper() + Rational::one());
        }
    }
    for s in &samples {
        if full.sign_at(s) < 0 {
            return PositivitySign::Violated(s.clone());
        }
    }
    if roots.is_empty() {
        PositivitySign::StrictlyPositive
    } else {
        PositivitySign::NonnegativeEverywhere
    }
}

/// A non-root point strictly between `left` and the root isolated by `right`.
/// `left` is either 0 or the upper end of the previous isolating interval.
fn gap_point(q: &IntPoly, seq: &[IntPoly], left: &Rational, right: &RootInterval) -> Rational {
    let r = right.lower();
    if left < r {
        return (left + r) * half();
    }
    if !left.is_zero() && q.sign_at(left) != 0 {
        return left.clone();
    }
    let mut h = right.upper().clone();
    loop {
        let mid = (left + &h) * half();
        if q.sign_at(&mid) != 0 && count_in(seq, left, &mid) == 0 {
            return mid;
        }
        h = mid;
    }
}
