//! Exact rationals and the helpers the rest of the crate relies on.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always held in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Error returned when a string is not of the form `p/q` or `p`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// Builds `n/d` from machine integers. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, `-p/q` or a bare integer. Whitespace is not accepted.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: s.to_string(),
        reason,
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid = |t: &str, signed: bool| {
        let digits = if signed { t.strip_prefix('-').unwrap_or(t) } else { t };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) {
        return Err(err("numerator is not an integer"));
    }
    if !valid(den, false) {
        return Err(err("denominator is not a positive integer"));
    }
    let n: BigInt = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let d: BigInt = den.parse().map_err(|_| err("denominator is not an integer"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Canonical `p/q` text form (lowest terms, `q > 0`, `q` always written).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Wrapper that displays a rational in canonical `p/q` form.
pub struct Canonical<'a>(pub &'a Rational);

impl fmt::Display for Canonical<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Nearest double. Used only at the boundary to the floating-point protocol
/// module.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Greatest common divisor of two rationals: the largest `g > 0` such that
/// both are integer multiples of `g`. `gcd(0, 0) = 0`.
pub fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rational::new(num, den)
}

/// Smallest integer multiple of `step` that is `>= x`. `step > 0`.
pub fn ceil_to_multiple(x: &Rational, step: &Rational) -> Rational {
    (x / step).ceil() * step
}

/// Smallest integer multiple of `step` that is strictly greater than `x`.
pub fn next_multiple_above(x: &Rational, step: &Rational) -> Rational {
    ((x / step).floor() + Rational::one()) * step
}

/// A fraction that is deliberately *not* reduced.
///
/// Summing tens of thousands of rationals with unrelated denominators and
/// reducing after every step costs a gcd on ever-growing integers. Summing by
/// a balanced product tree and never reducing keeps the cost near a handful of
/// large multiplications; comparisons are done by cross-multiplication.
#[derive(Clone, Debug)]
pub struct Fraction {
    pub num: BigInt,
    /// Always positive.
    pub den: BigInt,
}

impl Fraction {
    pub fn zero() -> Self {
        Fraction {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        Fraction {
            num: r.numer().clone(),
            den: r.denom().clone(),
        }
    }

    fn add(self, other: Fraction) -> Fraction {
        if self.den == other.den {
            return Fraction {
                num: self.num + other.num,
                den: self.den,
            };
        }
        Fraction {
            num: &self.num * &other.den + &other.num * &self.den,
            den: self.den * other.den,
        }
    }

    /// Exact sum through a balanced binary tree.
    pub fn sum(mut terms: Vec<Fraction>) -> Fraction {
        if terms.is_empty() {
            return Fraction::zero();
        }
        while terms.len() > 1 {
            let mut next = Vec::with_capacity(terms.len().div_ceil(2));
            let mut it = terms.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(a.add(b)),
                    None => next.push(a),
                }
            }
            terms = next;
        }
        terms.pop().unwrap()
    }

    pub fn signum(&self) -> Ordering {
        match self.num.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    /// Compares `self` with a reduced rational without reducing `self`.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        (&self.num * r.denom()).cmp(&(r.numer() * &self.den))
    }

    pub fn into_rational(self) -> Rational {
        Rational::new(self.num, self.den)
    }
}

/// Exact sum of many rationals. Reduces once at the end, so use
/// [`Fraction::sum`] directly when only a comparison is needed.
pub fn sum_rationals<'a>(terms: impl IntoIterator<Item = &'a Rational>) -> Rational {
    let fr: Vec<Fraction> = terms.into_iter().map(Fraction::from_rational).collect();
    Fraction::sum(fr).into_rational()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "-3/4", "0/1", "7/1", "10/4"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(format_rational(&parse_rational("10/4").unwrap()), "5/2");
        assert_eq!(format_rational(&parse_rational("3").unwrap()), "3/1");
        assert_eq!(format_rational(&parse_rational("-0/5").unwrap()), "0/1");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "1/", "/2", "1/0", "1.5", "1/-2", " 1/2", "a/b", "--1/2"] {
            assert!(parse_rational(s).is_err(), "{s:?} should be rejected");
        }
    }

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(rational_gcd(&rat(1, 2), &rat(1, 3)), rat(1, 6));
        assert_eq!(rational_gcd(&rat(3, 4), &int(1)), rat(1, 4));
        assert_eq!(rational_gcd(&int(0), &rat(2, 5)), rat(2, 5));
    }

    #[test]
    fn grid_rounding() {
        let w = rat(1, 8);
        assert_eq!(ceil_to_multiple(&rat(3, 10), &w), rat(3, 8));
        assert_eq!(ceil_to_multiple(&rat(1, 4), &w), rat(1, 4));
        assert_eq!(next_multiple_above(&rat(1, 4), &w), rat(3, 8));
    }

    #[test]
    fn tree_sum_matches_naive_sum() {
        let terms: Vec<Rational> = (1..200).map(|j| rat(j % 7 - 3, j * (j + 1))).collect();
        let naive = terms.iter().fold(Rational::zero(), |acc, t| acc + t);
        assert_eq!(sum_rationals(&terms), naive);
        let fr = Fraction::sum(terms.iter().map(Fraction::from_rational).collect());
        assert_eq!(fr.cmp_rational(&naive), Ordering::Equal);
        assert_eq!(fr.cmp_rational(&(naive.clone() + rat(1, 1000))), Ordering::Less);
    }

    #[test]
    fn float_conversion_of_huge_values() {
        let big = Rational::from_integer(BigInt::one() << 2000usize) / int(3);
        let f = to_f64(&(big.clone() / big));
        assert!((f - 1.0).abs() < 1e-15);
        assert!((to_f64(&rat(2, 3)) - 2.0 / 3.0).abs() < 1e-16);
    }
}
