//! Exact rationals with an inline fast path.
//!
//! Almost every coefficient the engine touches fits in a machine word, so
//! values are kept as `Ratio<i64>` and promoted to `BigRational` only when a
//! checked operation overflows. Results are demoted again whenever they fit,
//! which keeps the representation canonical: equal values always share a
//! variant.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i128
}

#[derive(Clone)]
pub enum Rat {
    Small(Ratio<i64>),
    Big(Box<BigRational>),
}

fn to_big(r: &Ratio<i64>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Rat {
    pub fn int(n: i64) -> Self {
        Rat::Small(Ratio::from_integer(n))
    }

    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rat::Small(Ratio::new(n, d))
    }

    fn from_big(b: BigRational) -> Self {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) => Rat::Small(Ratio::new_raw(n, d)),
            _ => Rat::Big(Box::new(b)),
        }
    }

    fn big(&self) -> BigRational {
        match self {
            Rat::Small(r) => to_big(r),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_zero(),
            Rat::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_one(),
            Rat::Big(b) => b.is_one(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_negative(),
            Rat::Big(b) => b.is_negative(),
        }
    }

    pub fn zero() -> Self {
        Rat::int(0)
    }

    pub fn one() -> Self {
        Rat::int(1)
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Rat::Small(r) => match r.numer().checked_neg() {
                Some(_) => Rat::Small(r.recip()),
                None => Rat::from_big(to_big(r).recip()),
            },
            Rat::Big(b) => Rat::from_big(b.recip()),
        }
    }

    pub fn pow(&self, e: i32) -> Rat {
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Rat::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn numer_string(&self) -> String {
        match self {
            Rat::Small(r) => r.numer().to_string(),
            Rat::Big(b) => b.numer().to_string(),
        }
    }

    pub fn denom_string(&self) -> String {
        match self {
            Rat::Small(r) => r.denom().to_string(),
            Rat::Big(b) => b.denom().to_string(),
        }
    }

    /// Numerator and denominator when both fit in a machine word.
    pub fn small_parts(&self) -> Option<(i64, i64)> {
        match self {
            Rat::Small(r) => Some((*r.numer(), *r.denom())),
            Rat::Big(_) => None,
        }
    }

    /// `n / d`, reduced.
    pub fn from_i128(n: i128, d: i128) -> Rat {
        assert!(d != 0, "zero denominator");
        if n == 0 {
            return Rat::zero();
        }
        if d == 1 {
            if let Ok(a) = i64::try_from(n) {
                return Rat::int(a);
            }
        }
        let g = gcd_i128(n, d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Rat::Small(Ratio::new_raw(a, b)),
            _ => Rat::from_big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
        }
    }

    /// Canonical `"n/d"` form used by every serializer.
    pub fn to_canonical(&self) -> String {
        format!("{}/{}", self.numer_string(), self.denom_string())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                if let (Rat::Small(a), Rat::Small(b)) = (self, rhs) {
                    if let Some(r) = a.$checked(b) {
                        return Rat::Small(r);
                    }
                }
                Rat::from_big(self.big().$m(rhs.big()))
            }
        }
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(r) => match r.numer().checked_neg() {
                Some(n) => Rat::Small(Ratio::new_raw(n, *r.denom())),
                None => Rat::from_big(-to_big(r)),
            },
            Rat::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rat::Small(a), Rat::Small(b)) => a == b,
            _ => self.big() == other.big(),
        }
    }
}

impl Eq for Rat {}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rat::Small(a), Rat::Small(b)) => a.cmp(b),
            _ => self.big().cmp(&other.big()),
        }
    }
}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.to_canonical().hash(state);
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(r) => write!(f, "{r}"),
            Rat::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad rational numerator in {s:?}"))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad rational denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Rat::from_big(BigRational::new(n, d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::int(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq, Rat::Big(_)));
        let back = &sq / &big;
        assert!(matches!(back, Rat::Small(_)));
        assert_eq!(back, big);
    }

    #[test]
    fn canonical_string_round_trip() {
        let r = Rat::new(-6, 4);
        assert_eq!(r.to_canonical(), "-3/2");
        assert_eq!("-3/2".parse::<Rat>().unwrap(), r);
        assert_eq!("5".parse::<Rat>().unwrap(), Rat::int(5));
    }

    #[test]
    fn pow_negative() {
        assert_eq!(Rat::new(2, 3).pow(-2), Rat::new(9, 4));
        assert_eq!(Rat::int(7).pow(0), Rat::one());
    }
}
