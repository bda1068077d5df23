use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator both fit in an `i64` are stored
/// inline; anything larger is promoted to a heap-allocated big rational.
/// The representation is canonical, so structural equality and hashing
/// agree with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// `num / den`, reduced. Fails on a zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_big(BigRational::new(num, den)))
    }

    // den != 0
    fn from_i128(num: i128, den: i128) -> Self {
        if num == 0 {
            return Self::zero();
        }
        let negative = (num < 0) != (den < 0);
        let (un, ud) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd_u128(un, ud);
        let (un, ud) = (un / g, ud / g);
        if ud <= i64::MAX as u128 {
            if negative && un <= 1u128 << 63 {
                return Rational(Repr::Small((un as i128).wrapping_neg() as i64, ud as i64));
            }
            if !negative && un <= i64::MAX as u128 {
                return Rational(Repr::Small(un as i64, ud as i64));
            }
        }
        let n = if negative { -BigInt::from(un) } else { BigInt::from(un) };
        Rational(Repr::Big(Box::new(BigRational::new_raw(n, BigInt::from(ud)))))
    }

    // `r` must already be reduced (BigRational keeps itself reduced).
    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(r))),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// `max(0, self)`.
    pub fn positive_part(&self) -> Self {
        if self.is_positive() {
            self.clone()
        } else {
            Self::zero()
        }
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Self::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Self::from_big(self.to_big() / rhs.to_big()),
        })
    }

    /// Lossy conversion for display and statistics only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Integer value if this is an integer fitting in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    /// Both parts as `i64` when the value is stored inline.
    pub fn to_small_parts(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(n, d) => Some((*n, *d)),
            Repr::Big(_) => None,
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Re-normalizes from scratch and compares; used to assert the
    /// canonical-form invariant from tests.
    pub fn is_canonical(&self) -> bool {
        match &self.0 {
            Repr::Small(n, d) => {
                *d > 0 && (*n != 0 || *d == 1) && n.unsigned_abs().gcd(&d.unsigned_abs()) == 1
            }
            Repr::Big(b) => {
                let fresh = BigRational::new(b.numer().clone(), b.denom().clone());
                fresh == **b
                    && b.denom().is_positive()
                    && (b.numer().to_i64().is_none() || b.denom().to_i64().is_none())
            }
        }
    }

    fn add_ref(&self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(s) = a.checked_add(*c) {
                        return Rational(Repr::Small(s, 1));
                    }
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Self::from_i128(a * d + c * b, b * d)
            }
            _ => Self::from_big(self.to_big() + rhs.to_big()),
        }
    }

    fn mul_ref(&self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    if let Some(p) = a.checked_mul(*c) {
                        return Rational(Repr::Small(p, 1));
                    }
                }
                Self::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Self::from_big(self.to_big() * rhs.to_big()),
        }
    }

    fn neg_ref(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational(Repr::Small(m, *d)),
                None => Self::from_i128(-(*n as i128), *d as i128),
            },
            Repr::Big(b) => Self::from_big(-(**b).clone()),
        }
    }
}

/// Binary operation selector for [`rat_op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
    Cmp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatOpResult {
    Value(Rational),
    Ordering(Ordering),
}

pub fn rat_op(a: &Rational, b: &Rational, op: RatOp) -> Result<RatOpResult> {
    Ok(match op {
        RatOp::Add => RatOpResult::Value(a + b),
        RatOp::Sub => RatOpResult::Value(a - b),
        RatOp::Mul => RatOpResult::Value(a * b),
        RatOp::Div => RatOpResult::Value(a.checked_div(b)?),
        RatOp::Cmp => RatOpResult::Ordering(a.cmp(b)),
    })
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Self::from_integer(n as i64)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Self::from_i128(n as i128, 1)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &Rational, b: &Rational| a.add_ref(b));
forward_binop!(Sub, sub, |a: &Rational, b: &Rational| a.add_ref(&b.neg_ref()));
forward_binop!(Mul, mul, |a: &Rational, b: &Rational| a.mul_ref(b));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = self.add_ref(rhs);
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = self.add_ref(&rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = self.mul_ref(rhs);
    }
}

impl MulAssign for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        *self = self.mul_ref(&rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, full: &str) -> Result<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a fraction: {full:?}")));
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return Err(Error::Parse(format!("leading zero in {full:?}")));
    }
    s.parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("{full:?}: {e}")))
}

/// Accepts only canonical strings: `"p/q"` in lowest terms with `q > 1`,
/// or a bare integer `"p"`. `"p/1"` is accepted as a synonym of `"p"`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => {
                if d.starts_with('-') {
                    return Err(Error::Parse(format!("negative denominator in {s:?}")));
                }
                (parse_int(n, s)?, parse_int(d, s)?)
            }
            None => (parse_int(s, s)?, BigInt::one()),
        };
        if s == "-0" || s.starts_with("-0/") {
            return Err(Error::Parse(format!("negative zero in {s:?}")));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !num.gcd(&den).is_one() {
            return Err(Error::Parse(format!("{s:?} is not in lowest terms")));
        }
        Rational::from_bigints(num, den)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn elementary_arithmetic() {
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert_eq!(r(2, 4).to_string(), "1/2");
        assert_eq!(r(3, 7) * r(7, 3), Rational::one());
        assert_eq!(r(1, -2).to_string(), "-1/2");
        assert_eq!(r(0, -5), Rational::zero());
        assert_eq!(r(0, -5).to_string(), "0");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(Rational::new(1, 0), Err(Error::DivisionByZero));
        assert_eq!(r(1, 2).checked_div(&Rational::zero()), Err(Error::DivisionByZero));
        assert_eq!(
            rat_op(&r(1, 2), &Rational::zero(), RatOp::Div),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn rat_op_dispatch() {
        assert_eq!(
            rat_op(&r(1, 2), &r(1, 3), RatOp::Cmp).unwrap(),
            RatOpResult::Ordering(Ordering::Greater)
        );
        assert_eq!(
            rat_op(&r(1, 2), &r(1, 3), RatOp::Sub).unwrap(),
            RatOpResult::Value(r(1, 6))
        );
        assert_eq!(
            rat_op(&r(1, 2), &r(1, 3), RatOp::Div).unwrap(),
            RatOpResult::Value(r(3, 2))
        );
    }

    #[test]
    fn promotes_instead_of_wrapping() {
        let big = Rational::from_integer(i64::MAX);
        let sq = &big * &big;
        assert!(sq.is_canonical());
        assert_eq!(sq.numer(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        // and demotes again once it fits
        let back = sq.checked_div(&big).unwrap();
        assert_eq!(back, big);
        assert!(back.to_small_parts().is_some());

        let min = Rational::from_integer(i64::MIN);
        let neg = -&min;
        assert_eq!(neg.numer(), -BigInt::from(i64::MIN));
        assert_eq!(-neg, min);

        let tiny = r(1, i64::MAX);
        let t2 = &tiny * &tiny;
        assert_eq!(t2.denom(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        assert_eq!((&t2 - &t2), Rational::zero());
    }

    #[test]
    fn parse_accepts_only_canonical_strings() {
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::from_integer(3));
        assert_eq!("3/1".parse::<Rational>().unwrap(), Rational::from_integer(3));
        assert_eq!("-5/6".parse::<Rational>().unwrap(), r(-5, 6));
        for bad in ["2/4", "1/-2", "", "1/", "/2", "a", "1/0", "-0", "+1", "01", "1.5"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} accepted");
        }
        let huge = "123456789012345678901234567890/11";
        assert_eq!(huge.parse::<Rational>().unwrap().to_string(), huge);
    }

    #[test]
    fn positive_part_and_ordering() {
        assert_eq!(r(-3, 2).positive_part(), Rational::zero());
        assert_eq!(r(3, 2).positive_part(), r(3, 2));
        assert!(r(1, 3) < r(1, 2));
        assert!(Rational::from_integer(i64::MAX) * Rational::from_integer(2) > r(1, 1));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-50i64..50, 1i64..50).prop_map(|(n, d)| r(n, d)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| r(n, d)),
        ]
    }

    proptest! {
        #[test]
        fn results_are_canonical(a in arb_rational(), b in arb_rational()) {
            prop_assert!((&a + &b).is_canonical());
            prop_assert!((&a - &b).is_canonical());
            prop_assert!((&a * &b).is_canonical());
            if !b.is_zero() {
                prop_assert!(a.checked_div(&b).unwrap().is_canonical());
            }
        }

        #[test]
        fn field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
        }

        #[test]
        fn display_parse_roundtrip(a in arb_rational()) {
            let s = a.to_string();
            prop_assert_eq!(s.parse::<Rational>().unwrap(), a);
        }

        #[test]
        fn ordering_matches_subtraction(a in arb_rational(), b in arb_rational()) {
            let d = &a - &b;
            let expected = if d.is_zero() { Ordering::Equal } else if d.is_positive() { Ordering::Greater } else { Ordering::Less };
            prop_assert_eq!(a.cmp(&b), expected);
        }
    }
}
