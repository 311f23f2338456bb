//! Exact coefficient fields: the rationals and prime fields `F_p` with `p < 2^31`.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use alloc::string::ToString;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Largest admissible prime modulus (exclusive).
pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Prime(u32),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, Error> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::InvalidField(p));
        }
        Ok(Field::Prime(p as u32))
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::zero()),
            Field::Prime(p) => Scalar::Modular { value: 0, modulus: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => {
                let v = n.rem_euclid(*p as i64) as u32;
                Scalar::Modular { value: v, modulus: *p }
            }
        }
    }

    /// Embeds `num / den`; fails when `den` vanishes in the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<Scalar> {
        match self {
            Field::Rationals => {
                if den.is_zero() {
                    None
                } else {
                    Some(Scalar::Rational(BigRational::new(num.clone(), den.clone())))
                }
            }
            Field::Prime(p) => {
                let m = BigInt::from(*p);
                let n = num.mod_floor(&m).to_u32().unwrap_or(0);
                let d = den.mod_floor(&m).to_u32().unwrap_or(0);
                if d == 0 {
                    return None;
                }
                let n = Scalar::Modular { value: n, modulus: *p };
                let d = Scalar::Modular { value: d, modulus: *p };
                Some(&n * &d.inverse()?)
            }
        }
    }

    /// Maps an element of another field into this one (reduction mod p for rationals).
    pub fn coerce(&self, s: &Scalar) -> Option<Scalar> {
        match (self, s) {
            (Field::Rationals, Scalar::Rational(_)) => Some(s.clone()),
            (Field::Prime(_), Scalar::Rational(q)) => self.from_ratio(q.numer(), q.denom()),
            (Field::Prime(p), Scalar::Modular { modulus, .. }) if p == modulus => Some(s.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{}", p),
        }
    }
}

/// A field element. Mixing elements of different fields is a logic error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u32, modulus: u32 },
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Modular { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: mod_pow(*value as u64, *modulus as u64 - 2, *modulus as u64) as u32,
                modulus: *modulus,
            },
        })
    }

    /// Whether the element prints with a leading minus sign. Prime field elements use the
    /// symmetric representative in `(-p/2, p/2]`.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_negative(),
            Scalar::Modular { value, modulus } => *value > modulus / 2,
        }
    }

    /// Signed integer representative when the element is (the image of) a small integer.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(q) if q.is_integer() => q.to_integer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Modular { value, modulus } => {
                if *value > modulus / 2 {
                    Some(*value as i64 - *modulus as i64)
                } else {
                    Some(*value as i64)
                }
            }
        }
    }

    fn zip(&self, other: &Scalar, fq: impl Fn(&BigRational, &BigRational) -> BigRational, fp: impl Fn(u64, u64, u64) -> u64) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(fq(a, b)),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, modulus: q }) if p == q => Scalar::Modular {
                value: fp(*a as u64, *b as u64, *p as u64) as u32,
                modulus: *p,
            },
            _ => panic!("scalar field mismatch: {} vs {}", self.field(), other.field()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Modular { .. } => write!(f, "{}", self.to_i64().map(|v| v.to_string()).unwrap_or_default()),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.zip(rhs, |a, b| a + b, |a, b, p| (a + b) % p)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.zip(rhs, |a, b| a - b, |a, b, p| (a + p - b) % p)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.zip(rhs, |a, b| a * b, |a, b, p| a * b % p)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = Field::prime(101).unwrap();
        for n in 1..101 {
            let a = f.from_i64(n);
            assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn rejects_composite_and_large_moduli() {
        assert!(Field::prime(100).is_err());
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(2147483659).is_err());
        assert!(Field::prime(2147483647).is_ok());
    }

    #[test]
    fn ratio_in_prime_field() {
        let f = Field::prime(7).unwrap();
        let half = f.from_ratio(&BigInt::from(1), &BigInt::from(2)).unwrap();
        assert_eq!(&half * &f.from_i64(2), f.one());
        assert!(f.from_ratio(&BigInt::from(1), &BigInt::from(14)).is_none());
    }

    #[test]
    fn symmetric_representative() {
        let f = Field::prime(101).unwrap();
        assert_eq!(f.from_i64(-1).to_i64(), Some(-1));
        assert!(f.from_i64(-3).is_negative());
        assert_eq!(alloc::format!("{}", f.from_i64(-4)), "-4");
    }
}
