//! Exact rational numbers with a machine-word fast path.
//!
//! Values that fit in a reduced `i64/i64` fraction are stored inline and
//! combined through `i128` intermediates; anything larger spills into a
//! heap-allocated big-integer fraction. The representation is canonical (a value
//! is `Small` whenever it fits), so structural equality is numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Q {
    Small { num: i64, den: i64 },
    Big(Box<BigFrac>),
}

/// Reduced big fraction with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BigFrac {
    num: BigInt,
    den: BigInt,
}

#[inline]
fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl BigFrac {
    fn new(num: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num / &g, den / &g)
        };
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        BigFrac { num: n, den: d }
    }
}

impl Q {
    pub const ZERO: Q = Q::Small { num: 0, den: 1 };
    pub const ONE: Q = Q::Small { num: 1, den: 1 };

    pub fn int(v: i64) -> Q {
        Q::from_i128(v as i128, 1)
    }

    /// `num/den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Q {
        assert!(den != 0, "zero denominator");
        Q::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Q {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = if g > 1 {
            (num / g, den / g)
        } else {
            (num, den)
        };
        if d < 0 {
            n = -n;
            d = -d;
        }
        if fits(n) && fits(d) {
            Q::Small {
                num: n as i64,
                den: d as i64,
            }
        } else {
            Q::Big(Box::new(BigFrac {
                num: BigInt::from(n),
                den: BigInt::from(d),
            }))
        }
    }

    fn from_big(f: BigFrac) -> Q {
        match (f.num.to_i64(), f.den.to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Q::Small { num: n, den: d },
            _ => Q::Big(Box::new(f)),
        }
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Q {
        assert!(!den.is_zero(), "zero denominator");
        Q::from_big(BigFrac::new(num, den))
    }

    fn to_big(&self) -> BigFrac {
        match self {
            Q::Small { num, den } => BigFrac {
                num: BigInt::from(*num),
                den: BigInt::from(*den),
            },
            Q::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Q::Small { num, .. } => BigInt::from(*num),
            Q::Big(b) => b.num.clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Q::Small { den, .. } => BigInt::from(*den),
            Q::Big(b) => b.den.clone(),
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        matches!(self, Q::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small { num: 1, den: 1 })
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small { den, .. } => *den == 1,
            Q::Big(b) => b.den.is_one(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Q::Small { num, .. } => num.signum() as i32,
            Q::Big(b) => {
                if b.num.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Q {
        match self {
            Q::Small { num, den } => {
                assert!(*num != 0, "division by zero");
                Q::from_i128(*den as i128, *num as i128)
            }
            Q::Big(b) => Q::from_big(BigFrac::new(b.den.clone(), b.num.clone())),
        }
    }

    pub fn pow(&self, e: u32) -> Q {
        let mut acc = Q::ONE;
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Lossy conversion, for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Q::Small { num, den } => *num as f64 / *den as f64,
            Q::Big(b) => b.num.to_f64().unwrap_or(f64::NAN) / b.den.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Canonical `"p/q"` form used by the algebra file format.
    pub fn to_canonical(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    /// Parses `"p/q"` or `"p"`, rejecting zero or negative denominators and
    /// non-reduced fractions.
    pub fn parse_canonical(s: &str) -> Result<Q, String> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let num: BigInt = parse_int(n).ok_or_else(|| format!("malformed rational {s:?}"))?;
        let den: BigInt = match d {
            Some(d) => {
                if d.starts_with('-') || d.starts_with('+') {
                    return Err(format!("denominator must be a positive integer in {s:?}"));
                }
                parse_int(d).ok_or_else(|| format!("malformed rational {s:?}"))?
            }
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        if !num.gcd(&den).is_one() && !(num.is_zero() && den.is_one()) {
            return Err(format!("non-reduced rational {s:?}"));
        }
        Ok(Q::from_big(BigFrac { num, den }))
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl Default for Q {
    fn default() -> Self {
        Q::ZERO
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Self {
        Q::int(v)
    }
}

impl From<i32> for Q {
    fn from(v: i32) -> Self {
        Q::int(v as i64)
    }
}

impl From<usize> for Q {
    fn from(v: usize) -> Self {
        Q::from_bigints(BigInt::from(v), BigInt::one())
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small { num, den: 1 } => write!(f, "{num}"),
            Q::Small { num, den } => write!(f, "{num}/{den}"),
            Q::Big(b) if b.den.is_one() => write!(f, "{}", b.num),
            Q::Big(b) => write!(f, "{}/{}", b.num, b.den),
        }
    }
}

/// Reports carry rationals as strings (`"p"` or `"p/q"`).
impl serde::Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = parse_int(n).ok_or_else(|| format!("malformed rational {s:?}"))?;
        let den = parse_int(d).ok_or_else(|| format!("malformed rational {s:?}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Q::from_bigints(num, den))
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Q::Small { num: a, den: b }, Q::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => {
                let (x, y) = (self.to_big(), other.to_big());
                (x.num * &y.den).cmp(&(y.num * &x.den))
            }
        }
    }
}

impl<'a> Add<&'a Q> for &'a Q {
    type Output = Q;
    #[inline]
    fn add(self, rhs: &'a Q) -> Q {
        match (self, rhs) {
            (Q::Small { num: 0, .. }, _) => rhs.clone(),
            (_, Q::Small { num: 0, .. }) => self.clone(),
            (Q::Small { num: a, den: b }, Q::Small { num: c, den: d }) => {
                if b == d {
                    Q::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    Q::from_i128(
                        *a as i128 * *d as i128 + *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => {
                let (x, y) = (self.to_big(), rhs.to_big());
                Q::from_big(BigFrac::new(x.num * &y.den + y.num * &x.den, x.den * y.den))
            }
        }
    }
}

impl<'a> Sub<&'a Q> for &'a Q {
    type Output = Q;
    #[inline]
    fn sub(self, rhs: &'a Q) -> Q {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Q> for &'a Q {
    type Output = Q;
    #[inline]
    fn mul(self, rhs: &'a Q) -> Q {
        match (self, rhs) {
            (Q::Small { num: 0, .. }, _) | (_, Q::Small { num: 0, .. }) => Q::ZERO,
            (Q::Small { num: 1, den: 1 }, _) => rhs.clone(),
            (_, Q::Small { num: 1, den: 1 }) => self.clone(),
            (Q::Small { num: a, den: b }, Q::Small { num: c, den: d }) => {
                let g1 = (*a as i128).gcd(&(*d as i128));
                let g2 = (*c as i128).gcd(&(*b as i128));
                let n = (*a as i128 / g1) * (*c as i128 / g2);
                let m = (*b as i128 / g2) * (*d as i128 / g1);
                if fits(n) && fits(m) {
                    Q::Small {
                        num: n as i64,
                        den: m as i64,
                    }
                } else {
                    Q::Big(Box::new(BigFrac {
                        num: BigInt::from(n),
                        den: BigInt::from(m),
                    }))
                }
            }
            _ => {
                let (x, y) = (self.to_big(), rhs.to_big());
                Q::from_big(BigFrac::new(x.num * y.num, x.den * y.den))
            }
        }
    }
}

impl<'a> Div<&'a Q> for &'a Q {
    type Output = Q;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a Q) -> Q {
        self * &rhs.recip()
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small { num, den } => Q::Small {
                num: -num,
                den: *den,
            },
            Q::Big(b) => Q::Big(Box::new(BigFrac {
                num: -b.num.clone(),
                den: b.den.clone(),
            })),
        }
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Q> for Q {
            type Output = Q;
            fn $m(self, rhs: Q) -> Q {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Q> for Q {
            type Output = Q;
            fn $m(self, rhs: &'a Q) -> Q {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Q> for &'a Q {
            type Output = Q;
            fn $m(self, rhs: Q) -> Q {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        if rhs.is_zero() {
            return;
        }
        *self = &*self + rhs;
    }
}

impl AddAssign<Q> for Q {
    fn add_assign(&mut self, rhs: Q) {
        *self += &rhs;
    }
}

impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, rhs: &Q) {
        if rhs.is_zero() {
            return;
        }
        *self = &*self - rhs;
    }
}

impl MulAssign<&Q> for Q {
    fn mul_assign(&mut self, rhs: &Q) {
        *self = &*self * rhs;
    }
}

impl Sum for Q {
    fn sum<I: Iterator<Item = Q>>(iter: I) -> Q {
        iter.fold(Q::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Q> for Q {
    fn sum<I: Iterator<Item = &'a Q>>(iter: I) -> Q {
        iter.fold(Q::ZERO, |acc, x| acc + x)
    }
}

impl Product for Q {
    fn product<I: Iterator<Item = Q>>(iter: I) -> Q {
        iter.fold(Q::ONE, |acc, x| acc * x)
    }
}

impl Zero for Q {
    fn zero() -> Self {
        Q::ZERO
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
}

impl One for Q {
    fn one() -> Self {
        Q::ONE
    }
}
