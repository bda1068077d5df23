use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rational;
use crate::error::{out_of_range, Result};

const GRID: u64 = 1_000_000_000;

/// Rational bounds `lo ≤ ln n ≤ hi` with `hi − lo ≤ 10⁻⁶`.
///
/// Uses `ln n = 2·atanh(z)` with `z = (n−1)/(n+1)` and the tail bound
/// `Σ_{m>N} z^{2m+1}/(2m+1) ≤ z^{2N+3} / ((2N+3)(1−z²))`, then widens both
/// ends outward onto a 10⁻⁹ grid to keep the numbers small.
pub fn ln_bounds(n: u64) -> Result<(Rational, Rational)> {
    if n == 0 {
        return Err(out_of_range("n", 0, "1.."));
    }
    if n == 1 {
        return Ok((Rational::zero(), Rational::zero()));
    }
    let z = Rational::new(n as i64 - 1, n as i64 + 1)?;
    let z2 = &z * &z;
    let one_minus = Rational::one() - &z2;
    let target = Rational::new(1, 10_000_000)?;
    let mut power = z.clone();
    let mut sum = Rational::zero();
    let mut m: i64 = 0;
    loop {
        sum += &power * Rational::new(1, 2 * m + 1)?;
        power = &power * &z2;
        let tail = power.checked_div(&(Rational::from(2 * m + 3) * &one_minus))?;
        if tail < target {
            let lo = Rational::from(2) * &sum;
            let hi = &lo + Rational::from(2) * &tail;
            return Ok((round_to_grid(&lo, false), round_to_grid(&hi, true)));
        }
        m += 1;
    }
}

fn round_to_grid(x: &Rational, up: bool) -> Rational {
    let scaled = x.numer() * BigInt::from(GRID);
    let (q, r) = scaled.div_mod_floor(&x.denom());
    let q = if up && !r.is_zero() { q + BigInt::one() } else { q };
    Rational::from_bigints(q, BigInt::from(GRID)).expect("nonzero grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_the_float_value() {
        for n in 1..=40u64 {
            let (lo, hi) = ln_bounds(n).unwrap();
            let f = (n as f64).ln();
            assert!(lo.to_f64() <= f + 1e-12 && f - 1e-12 <= hi.to_f64(), "n={n}");
            assert!(&hi - &lo <= Rational::new(1, 1_000_000).unwrap());
        }
    }

    #[test]
    fn additive_consistency() {
        // ln 6 = ln 2 + ln 3 must lie in both intervals
        let (l2, h2) = ln_bounds(2).unwrap();
        let (l3, h3) = ln_bounds(3).unwrap();
        let (l6, h6) = ln_bounds(6).unwrap();
        assert!(&l2 + &l3 <= h6);
        assert!(l6 <= &h2 + &h3);
    }
}
