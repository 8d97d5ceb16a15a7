//! Truncated 2-adic integers.
//!
//! A [`PadicInt`] is an element of ℤ₂ known modulo `2^precision`. Every
//! binary operation truncates to the smaller of its operands' precisions, so
//! precision lost by exact halving is tracked per value.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("precision must be at least one bit")]
    InvalidPrecision,
    #[error("valuation is indeterminate: all {precision} known digits are zero")]
    ValuationIndeterminate { precision: u32 },
    #[error("residue {residue} is even and has no inverse in Z_2")]
    NotAUnit { residue: BigUint },
    #[error("value is not divisible by 2^{shift}")]
    NotDivisible { shift: u32 },
    #[error("requested {requested} bits but only {available} are known")]
    InsufficientPrecision { requested: u32, available: u32 },
}

/// An element of ℤ₂ truncated to `precision` bits.
///
/// The residue is always kept reduced into `[0, 2^precision)`, so derived
/// equality is structural: same residue and same precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicInt {
    residue: BigUint,
    precision: u32,
}

/// `2^bits - 1` as a mask.
fn low_mask(bits: u32) -> BigUint {
    (BigUint::one() << bits) - 1u32
}

fn reduce(value: &BigUint, bits: u32) -> BigUint {
    if value.bits() <= u64::from(bits) {
        value.clone()
    } else {
        value & low_mask(bits)
    }
}

impl PadicInt {
    /// Canonical image of an integer in ℤ/2^precision. Negative values wrap
    /// the way two's complement does: `-1` becomes all ones.
    pub fn new(value: impl Into<BigInt>, precision: u32) -> Result<Self, PadicError> {
        if precision == 0 {
            return Err(PadicError::InvalidPrecision);
        }
        let value: BigInt = value.into();
        let modulus = BigInt::one() << precision;
        let residue = value
            .mod_floor(&modulus)
            .to_biguint()
            .expect("mod_floor by a positive modulus is non-negative");
        Ok(Self { residue, precision })
    }

    pub fn from_biguint(value: &BigUint, precision: u32) -> Result<Self, PadicError> {
        if precision == 0 {
            return Err(PadicError::InvalidPrecision);
        }
        Ok(Self {
            residue: reduce(value, precision),
            precision,
        })
    }

    pub fn one(precision: u32) -> Result<Self, PadicError> {
        Self::from_biguint(&BigUint::one(), precision)
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Units of ℤ₂ are exactly the odd elements.
    pub fn is_unit(&self) -> bool {
        self.residue.bit(0)
    }

    /// Truncates to a lower precision. Asking for more bits than are known
    /// is an error, never a silent zero-extension.
    pub fn truncate(&self, precision: u32) -> Result<Self, PadicError> {
        if precision == 0 {
            return Err(PadicError::InvalidPrecision);
        }
        if precision > self.precision {
            return Err(PadicError::InsufficientPrecision {
                requested: precision,
                available: self.precision,
            });
        }
        Ok(Self {
            residue: reduce(&self.residue, precision),
            precision,
        })
    }

    /// Whether the two values agree modulo `2^min(precisions)`.
    pub fn congruent(&self, other: &Self) -> bool {
        let bits = self.precision.min(other.precision);
        reduce(&self.residue, bits) == reduce(&other.residue, bits)
    }

    /// The 2-adic valuation, exact whenever the residue is nonzero.
    pub fn v2(&self) -> Result<u32, PadicError> {
        match self.residue.trailing_zeros() {
            Some(tz) => Ok(tz as u32),
            None => Err(PadicError::ValuationIndeterminate {
                precision: self.precision,
            }),
        }
    }

    /// Inverse of a unit, lifted by Newton iteration `r <- r(2 - u r)`, which
    /// doubles the number of correct bits each round starting from `r = 1`.
    pub fn invert_unit(&self) -> Result<Self, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NotAUnit {
                residue: self.residue.clone(),
            });
        }
        let two = BigUint::from(2u32);
        let mut inverse = BigUint::one();
        let mut known = 1u32;
        while known < self.precision {
            known = (known * 2).min(self.precision);
            let modulus = BigUint::one() << known;
            let product = reduce(&(&self.residue * &inverse), known);
            // (2 - u r) mod 2^known, kept non-negative
            let correction = reduce(&(&modulus + &two - product), known);
            inverse = reduce(&(&inverse * correction), known);
        }
        Ok(Self {
            residue: inverse,
            precision: self.precision,
        })
    }

    /// The low `count` binary digits, least significant first.
    pub fn digits(&self, count: u32) -> Result<Vec<u8>, PadicError> {
        if count > self.precision {
            return Err(PadicError::InsufficientPrecision {
                requested: count,
                available: self.precision,
            });
        }
        Ok((0..u64::from(count))
            .map(|i| u8::from(self.residue.bit(i)))
            .collect())
    }

    /// Exact division by `2^shift`. The low `shift` digits must be zero; the
    /// result is known to `precision - shift` bits.
    pub fn shr_exact(&self, shift: u32) -> Result<Self, PadicError> {
        if shift >= self.precision {
            return Err(PadicError::InsufficientPrecision {
                requested: shift + 1,
                available: self.precision,
            });
        }
        if matches!(self.v2(), Ok(v) if v < shift) {
            return Err(PadicError::NotDivisible { shift });
        }
        Ok(Self {
            residue: &self.residue >> shift,
            precision: self.precision - shift,
        })
    }

    /// Multiplication by `2^shift`; gains `shift` bits of precision because
    /// the new low digits are known zeros.
    pub fn shl(&self, shift: u32) -> Self {
        Self {
            residue: &self.residue << shift,
            precision: self.precision + shift,
        }
    }

    /// The least non-negative integer representative.
    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.residue.clone())
    }

    /// Representative in `(-2^(precision-1), 2^(precision-1)]`, handy for
    /// spotting negative integers such as `-1 = ...1111`.
    pub fn to_signed_bigint(&self) -> BigInt {
        let value = self.to_bigint();
        let half = BigInt::one() << (self.precision - 1);
        if value > half {
            value - (BigInt::one() << self.precision)
        } else {
            value
        }
    }

    fn binary(&self, other: &Self, op: impl FnOnce(BigInt, BigInt) -> BigInt) -> Self {
        let precision = self.precision.min(other.precision);
        Self::new(op(self.to_bigint(), other.to_bigint()), precision)
            .expect("precision of an existing value is nonzero")
    }
}

impl Add for &PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: &PadicInt) -> PadicInt {
        let precision = self.precision.min(rhs.precision);
        PadicInt {
            residue: reduce(&(&self.residue + &rhs.residue), precision),
            precision,
        }
    }
}

impl Sub for &PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: &PadicInt) -> PadicInt {
        self.binary(rhs, |a, b| a - b)
    }
}

impl Mul for &PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: &PadicInt) -> PadicInt {
        let precision = self.precision.min(rhs.precision);
        PadicInt {
            residue: reduce(&(&self.residue * &rhs.residue), precision),
            precision,
        }
    }
}

impl Neg for &PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        PadicInt::new(-self.to_bigint(), self.precision).expect("nonzero precision")
    }
}

macro_rules! forward_owned {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for PadicInt {
            type Output = PadicInt;
            fn $method(self, rhs: PadicInt) -> PadicInt {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        -&self
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^{})", self.residue, self.precision)
    }
}

#[derive(Serialize, Deserialize)]
struct PadicRecord {
    residue: String,
    precision: u32,
}

impl Serialize for PadicInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PadicRecord {
            residue: self.residue.to_string(),
            precision: self.precision,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PadicInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let record = PadicRecord::deserialize(deserializer)?;
        let residue: BigUint = record
            .residue
            .parse()
            .map_err(|_| D::Error::custom("residue must be a decimal string"))?;
        if record.precision == 0 {
            return Err(D::Error::custom("precision must be at least one bit"));
        }
        if residue.bits() > u64::from(record.precision) {
            return Err(D::Error::custom("residue exceeds 2^precision"));
        }
        Ok(Self {
            residue,
            precision: record.precision,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(value: i64, precision: u32) -> PadicInt {
        PadicInt::new(value, precision).unwrap()
    }

    fn res(a: &PadicInt) -> u64 {
        u64::try_from(a.residue()).unwrap()
    }

    #[test]
    fn make_reduces_into_range() {
        assert_eq!(res(&p(5, 4)), 5);
        assert_eq!(p(5, 4).precision(), 4);
        assert_eq!(res(&p(-1, 4)), 15);
        assert_eq!(res(&p(19, 3)), 3);
        assert_eq!(PadicInt::new(1, 0), Err(PadicError::InvalidPrecision));
    }

    #[test]
    fn ring_examples() {
        assert_eq!(res(&(&p(3, 4) + &p(13, 4))), 0);
        assert_eq!(res(&(&p(3, 8) * &p(171, 8))), 1);
        assert_eq!(res(&-&p(1, 4)), 15);
        assert_eq!(res(&(&p(2, 4) - &p(5, 4))), 13);
    }

    #[test]
    fn mixed_precision_truncates_to_minimum() {
        let sum = &p(255, 8) + &p(1, 3);
        assert_eq!(sum.precision(), 3);
        assert_eq!(res(&sum), 0);
    }

    #[test]
    fn valuation() {
        assert_eq!(p(12, 8).v2(), Ok(2));
        assert_eq!(p(1, 8).v2(), Ok(0));
        assert_eq!(
            p(0, 8).v2(),
            Err(PadicError::ValuationIndeterminate { precision: 8 })
        );
        // 256 is invisible at 8 bits
        assert!(p(256, 8).v2().is_err());
    }

    #[test]
    fn inversion() {
        assert_eq!(res(&p(1, 8).invert_unit().unwrap()), 1);
        assert_eq!(res(&p(3, 8).invert_unit().unwrap()), 171);
        assert_eq!(res(&p(7, 4).invert_unit().unwrap()), 7);
        assert_eq!(res(&p(1, 1).invert_unit().unwrap()), 1);
        assert!(matches!(
            p(6, 8).invert_unit(),
            Err(PadicError::NotAUnit { .. })
        ));
    }

    #[test]
    fn digit_extraction() {
        assert_eq!(p(5, 4).digits(4).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(p(-1, 4).digits(4).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(p(0, 4).digits(4).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(
            p(0, 4).digits(5),
            Err(PadicError::InsufficientPrecision {
                requested: 5,
                available: 4
            })
        );
    }

    #[test]
    fn exact_halving_loses_precision() {
        let h = p(26, 5).shr_exact(1).unwrap();
        assert_eq!((res(&h), h.precision()), (13, 4));
        assert!(p(3, 5).shr_exact(1).is_err());
        assert!(p(0, 5).shr_exact(5).is_err());
        assert_eq!(p(3, 4).shl(2), p(12, 6));
    }

    #[test]
    fn signed_representative() {
        assert_eq!(p(-5, 16).to_signed_bigint(), BigInt::from(-5));
        assert_eq!(p(7, 16).to_signed_bigint(), BigInt::from(7));
    }

    #[test]
    fn congruence_uses_smaller_precision() {
        assert!(p(19, 5).congruent(&p(9363, 16)));
        assert!(!p(19, 5).congruent(&p(3, 16)));
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_string(&p(19, 5)).unwrap();
        assert_eq!(json, r#"{"residue":"19","precision":5}"#);
        let back: PadicInt = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p(19, 5));
        assert!(serde_json::from_str::<PadicInt>(r#"{"residue":"32","precision":5}"#).is_err());
    }
}
