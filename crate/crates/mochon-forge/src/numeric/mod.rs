//! Exact rational and univariate polynomial arithmetic.

pub mod poly;
pub mod rational;
pub mod sturm;

pub use poly::{poly_eval, poly_from_linear_factors, Polynomial};
pub use rational::{
    format_rational, int, parse_rational, rat, rational_gcd, sum_rationals, Fraction,
    ParseRationalError, Rational,
};
pub use sturm::{count_roots, sign_on_positive_axis, sturm_sequence, PositivitySign};
