//! Exact rational scalars and labeled dense matrices.

mod log;
mod matrix;
mod rational;

pub use log::ln_bounds;
pub use matrix::{index_labels, mat_mul, mat_mul_eq, MatMulCheck, RatMatrix};
pub use rational::{rat_op, RatOp, RatOpResult, Rational};

/// Shorthand for `Rational::new(n, d)` with a nonzero literal denominator.
///
/// Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}
