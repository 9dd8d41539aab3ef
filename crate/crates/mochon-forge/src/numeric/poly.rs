//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// Coefficients are stored lowest degree first. The leading coefficient is
/// nonzero unless the polynomial is zero, which has no coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial `λ`.
    pub fn x() -> Self {
        Polynomial::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `scale · Π_j (λ + roots[j])`.
    pub fn from_linear_factors(roots: &[Rational], scale: &Rational) -> Self {
        let mut c = vec![scale.clone()];
        for r in roots {
            let mut next = vec![Rational::zero(); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i] += a * r;
                next[i + 1] += a;
            }
            c = next;
        }
        Polynomial::new(c)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division: returns `(q, r)` with `self = q·d + r`,
    /// `deg r < deg d`. Panics if `d` is zero.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); n - dd];
        for i in (dd..n).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let f = &rem[i] / &lead;
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &f * dc;
            }
            q[i - dd] = f;
        }
        rem.truncate(dd);
        (Polynomial::new(q), Polynomial::new(rem))
    }

    /// Positive rescaling to integer coefficients with content one. Signs,
    /// and therefore every sign evaluation, are preserved.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            let v = c.numer() * (&l / c.denom());
            g = g.gcd(&v);
        }
        let factor = Rational::new(l, g.abs());
        self.scale(&factor)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&(Rational::one() / l)),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same distinct roots, each simple.
    pub fn square_free(&self) -> Polynomial {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 if a.is_one() => write!(f, "λ")?,
                1 => write!(f, "{a}λ")?,
                _ if a.is_one() => write!(f, "λ^{i}")?,
                _ => write!(f, "{a}λ^{i}")?,
            }
        }
        Ok(())
    }
}

/// `scale·Π(λ + roots[j])`, free-function form.
pub fn poly_from_linear_factors(roots: &[Rational], scale: &Rational) -> Polynomial {
    Polynomial::from_linear_factors(roots, scale)
}

/// Exact Horner evaluation, free-function form.
pub fn poly_eval(p: &Polynomial, x: &Rational) -> Rational {
    p.eval(x)
}
