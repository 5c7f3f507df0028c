//! Exact scalars over ℚ or a prime field 𝔽_p.
//!
//! A [`Field`] is identified by its characteristic. [`Scalar`] values carry
//! their characteristic with them; mixing characteristics in arithmetic is a
//! programming error and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is neither 0 nor a prime")]
    NotPrime(u64),
    #[error("characteristic {0} is too large (must be below 2^31)")]
    TooLarge(u64),
    #[error("division by zero while mapping {num}/{den} into characteristic {characteristic}")]
    ZeroDenominator {
        num: String,
        den: String,
        characteristic: u64,
    },
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// ℚ or 𝔽_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn from_characteristic(c: u64) -> Result<Self, FieldError> {
        match c {
            0 => Ok(Field::Rational),
            c if c >= 1 << 31 => Err(FieldError::TooLarge(c)),
            c if is_prime(c) => Ok(Field::Prime(c)),
            c => Err(FieldError::NotPrime(c)),
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    /// Whether `n` maps to an invertible element (the field is "n-ordinary").
    pub fn is_ordinary_for(self, n: u64) -> bool {
        match self {
            Field::Rational => n != 0,
            Field::Prime(p) => !n.is_multiple_of(p),
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Residue {
                value: n.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    pub fn from_bigint(self, n: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Residue {
                    value: r.to_u64().expect("residue fits"),
                    modulus: p,
                }
            }
        }
    }

    /// Image of an exact rational under ℤ_(den) → F.
    pub fn from_rational(self, q: &BigRational) -> Result<Scalar, FieldError> {
        match self {
            Field::Rational => Ok(Scalar::Rational(q.clone())),
            Field::Prime(_) => {
                let num = self.from_bigint(q.numer());
                let den = self.from_bigint(q.denom());
                den.inverse()
                    .map(|inv| num * inv)
                    .ok_or_else(|| FieldError::ZeroDenominator {
                        num: q.numer().to_string(),
                        den: q.denom().to_string(),
                        characteristic: self.characteristic(),
                    })
            }
        }
    }

    pub fn from_ratio(self, num: i64, den: i64) -> Result<Scalar, FieldError> {
        if den == 0 {
            return Err(FieldError::ZeroDenominator {
                num: num.to_string(),
                den: "0".into(),
                characteristic: self.characteristic(),
            });
        }
        self.from_rational(&BigRational::new(num.into(), den.into()))
    }

    /// Parses `"3"`, `"-1/2"` or a JSON number.
    pub fn parse(self, text: &str) -> Result<Scalar, FieldError> {
        let text = text.trim();
        let parse_int = |s: &str| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| FieldError::Parse(text.to_string()))
        };
        let q = match text.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(FieldError::ZeroDenominator {
                        num: n.to_string(),
                        den: "0".into(),
                        characteristic: self.characteristic(),
                    });
                }
                BigRational::new(parse_int(n)?, d)
            }
            None => BigRational::from_integer(parse_int(text)?),
        };
        self.from_rational(&q)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.characteristic())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = u64::deserialize(d)?;
        Field::from_characteristic(c).map_err(serde::de::Error::custom)
    }
}

/// An element of ℚ or 𝔽_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Residue { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: mod_pow(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        other.inverse().map(|inv| self * &inv)
    }

    pub fn pow(&self, exp: i64) -> Option<Scalar> {
        let base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut acc = self.field().one();
        for _ in 0..exp.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    /// The rational value when the characteristic is zero.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Residue { .. } => None,
        }
    }

    /// Canonical `(numerator, denominator)` in characteristic 0, `(residue, 1)` otherwise.
    pub fn to_fraction(&self) -> (BigInt, BigInt) {
        match self {
            Scalar::Rational(q) => (q.numer().clone(), q.denom().clone()),
            Scalar::Residue { value, .. } => (BigInt::from(*value), BigInt::one()),
        }
    }

    pub fn is_negative_rational(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_negative())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

fn same_char(a: &Scalar, b: &Scalar) -> u64 {
    match (a, b) {
        (Scalar::Residue { modulus: p, .. }, Scalar::Residue { modulus: q, .. }) if p == q => *p,
        (Scalar::Rational(_), Scalar::Rational(_)) => 0,
        _ => panic!("characteristic mismatch: {} vs {}", a.field(), b.field()),
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match same_char(self, rhs) {
            0 => Scalar::Rational(self.as_rational().unwrap() + rhs.as_rational().unwrap()),
            p => {
                let (Scalar::Residue { value: a, .. }, Scalar::Residue { value: b, .. }) = (self, rhs)
                else {
                    unreachable!()
                };
                Scalar::Residue {
                    value: (a + b) % p,
                    modulus: p,
                }
            }
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match same_char(self, rhs) {
            0 => Scalar::Rational(self.as_rational().unwrap() * rhs.as_rational().unwrap()),
            p => {
                let (Scalar::Residue { value: a, .. }, Scalar::Residue { value: b, .. }) = (self, rhs)
                else {
                    unreachable!()
                };
                Scalar::Residue {
                    value: ((*a as u128 * *b as u128) % p as u128) as u64,
                    modulus: p,
                }
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characteristic_validation() {
        assert_eq!(Field::from_characteristic(0).unwrap(), Field::Rational);
        assert_eq!(Field::from_characteristic(5).unwrap(), Field::Prime(5));
        assert_eq!(Field::from_characteristic(6), Err(FieldError::NotPrime(6)));
        assert_eq!(Field::from_characteristic(1), Err(FieldError::NotPrime(1)));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::Prime(5);
        let three = f.from_i64(3);
        assert_eq!(&three * &three, f.from_i64(4));
        assert_eq!(three.inverse().unwrap(), f.from_i64(2));
        assert_eq!(-&three, f.from_i64(2));
        assert_eq!(f.from_i64(-1), f.from_i64(4));
        assert!(f.zero().inverse().is_none());
    }

    #[test]
    fn rational_mapping_into_prime_field() {
        let f = Field::Prime(3);
        assert_eq!(f.from_ratio(1, 2).unwrap(), f.from_i64(2));
        assert!(matches!(
            f.from_ratio(1, 3),
            Err(FieldError::ZeroDenominator { .. })
        ));
        assert_eq!(
            Field::Rational.parse("-3/6").unwrap(),
            Field::Rational.from_ratio(-1, 2).unwrap()
        );
    }

    #[test]
    #[should_panic(expected = "characteristic mismatch")]
    fn mixing_characteristics_panics() {
        let _ = Field::Rational.one() + Field::Prime(2).one();
    }
}
