//! The cycle equation `n₀ (2^x − 3^y) = C(y, σ)` and its 2-adic solution.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::generalized::GeneralizedMap;
use crate::padic::{PadicError, PadicInt};
use crate::patterns::ParityPattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("pattern {pattern} is not admissible; the certificate bound needs a positive modulus")]
    Inadmissible { pattern: String },
}

/// `2^x − q^y`. Always odd, hence always a unit of ℤ₂; positive exactly
/// when the pattern is admissible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleModulus(BigInt);

impl CycleModulus {
    pub(crate) fn from_value(value: BigInt) -> Self {
        assert!(value.is_odd(), "cycle modulus {value} must be odd");
        Self(value)
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl fmt::Display for CycleModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Whether the ghost cycle is a rational integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Verdict {
    IntegerCycle(BigInt),
    Ghost,
}

impl Verdict {
    pub fn is_integer(&self) -> bool {
        matches!(self, Verdict::IntegerCycle(_))
    }

    pub fn integer_value(&self) -> Option<&BigInt> {
        match self {
            Verdict::IntegerCycle(m) => Some(m),
            Verdict::Ghost => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::IntegerCycle(m) => write!(f, "IntegerCycle({m})"),
            Verdict::Ghost => f.write_str("Ghost"),
        }
    }
}

/// Outcome of [`prefix_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    CertifiedGhost,
    CertifiedInteger(BigInt),
    Inconclusive,
}

/// A pattern together with its unique 2-adic solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhostCycle {
    pub pattern: ParityPattern,
    pub map: GeneralizedMap,
    pub constant: BigInt,
    pub modulus: CycleModulus,
    pub n0: PadicInt,
    pub verdict: Verdict,
}

impl GhostCycle {
    /// Solves `n₀ · modulus = constant` in ℤ/2^precision and decides
    /// integrality by exact division.
    pub(crate) fn solve(
        pattern: ParityPattern,
        map: GeneralizedMap,
        constant: BigInt,
        modulus: CycleModulus,
        precision: u32,
    ) -> Result<Self, CycleError> {
        let inverse = PadicInt::new(modulus.value().clone(), precision)?.invert_unit()?;
        let n0 = &inverse * &PadicInt::new(constant.clone(), precision)?;
        let verdict = divide_exact(&constant, &modulus);
        Ok(Self {
            pattern,
            map,
            constant,
            modulus,
            n0,
            verdict,
        })
    }

    /// `n₀ · modulus − C ≡ 0 (mod 2^precision)`.
    pub fn residual_vanishes(&self) -> bool {
        let p = self.n0.precision();
        let lhs = &self.n0 * &PadicInt::new(self.modulus.value().clone(), p).expect("p >= 1");
        lhs.congruent(&PadicInt::new(self.constant.clone(), p).expect("p >= 1"))
    }
}

fn divide_exact(constant: &BigInt, modulus: &CycleModulus) -> Verdict {
    let (quotient, remainder) = constant.div_rem(modulus.value());
    if remainder.is_zero() {
        Verdict::IntegerCycle(quotient)
    } else {
        Verdict::Ghost
    }
}

/// `C(y, σ) = Σ 3^{y−1−k} 2^{σ_k}`, evaluated by Horner's rule
/// `A_{k+1} = 3 A_k + 2^{σ_k}`.
pub fn cycle_constant(pattern: &ParityPattern) -> BigUint {
    let c = pattern
        .sigma()
        .iter()
        .fold(BigUint::zero(), |acc, &s| acc * 3u32 + (BigUint::one() << s));
    debug_assert!(c.bit(0), "cycle constant must be odd");
    c
}

pub fn modulus(pattern: &ParityPattern) -> CycleModulus {
    let value = (BigInt::one() << pattern.x()) - BigInt::from(3u32).pow(pattern.y());
    CycleModulus::from_value(value)
}

pub fn ghost_cycle(pattern: &ParityPattern, precision: u32) -> Result<GhostCycle, CycleError> {
    GhostCycle::solve(
        pattern.clone(),
        GeneralizedMap::STANDARD,
        cycle_constant(pattern).into(),
        modulus(pattern),
        precision,
    )
}

/// Exact test of `(2^x − 3^y) | C(y, σ)`.
pub fn integrality_test(pattern: &ParityPattern) -> Verdict {
    divide_exact(&cycle_constant(pattern).into(), &modulus(pattern))
}

/// Decides integrality from the low `bits` digits of `n₀` where possible.
///
/// Any positive integer solution equals `C / modulus` and is therefore at
/// most `B = ceil(C / modulus)`. With `2^bits > B` the truncated residue is
/// the only candidate; otherwise a residue above `B` still rules out every
/// non-negative representative.
pub fn prefix_certificate(pattern: &ParityPattern, bits: u32) -> Result<Certificate, CycleError> {
    if !pattern.is_admissible() {
        return Err(CycleError::Inadmissible {
            pattern: pattern.to_string(),
        });
    }
    let ghost = ghost_cycle(pattern, bits)?;
    let bound = ghost.constant.div_ceil(ghost.modulus.value());
    let candidate = ghost.n0.to_bigint();
    let window = BigInt::one() << bits;
    Ok(if window > bound {
        if &candidate * ghost.modulus.value() == ghost.constant {
            Certificate::CertifiedInteger(candidate)
        } else {
            Certificate::CertifiedGhost
        }
    } else if candidate > bound {
        Certificate::CertifiedGhost
    } else {
        Certificate::Inconclusive
    })
}

impl Serialize for GhostCycle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let standard = self.map == GeneralizedMap::STANDARD;
        let integer = self.verdict.integer_value();
        let fields = 5 + usize::from(integer.is_some()) + if standard { 0 } else { 2 };
        let mut s = serializer.serialize_struct("GhostCycle", fields)?;
        s.serialize_field("pattern", &self.pattern)?;
        s.serialize_field("C", &self.constant.to_string())?;
        s.serialize_field("modulus", &self.modulus.to_string())?;
        s.serialize_field("n0", &self.n0)?;
        let verdict = match self.verdict {
            Verdict::IntegerCycle(_) => "IntegerCycle",
            Verdict::Ghost => "Ghost",
        };
        s.serialize_field("verdict", verdict)?;
        if let Some(m) = integer {
            s.serialize_field("integer_value", &m.to_string())?;
        }
        if !standard {
            s.serialize_field("q", &self.map.q())?;
            s.serialize_field("d", &self.map.d())?;
        }
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(x: u32, y: u32, sigma: &[u32]) -> ParityPattern {
        ParityPattern::new(x, y, sigma.to_vec()).unwrap()
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn constants() {
        assert_eq!(cycle_constant(&pat(2, 1, &[0])), BigUint::from(1u32));
        assert_eq!(cycle_constant(&pat(4, 2, &[0, 1])), BigUint::from(5u32));
        assert_eq!(cycle_constant(&pat(6, 3, &[0, 2, 4])), BigUint::from(37u32));
    }

    #[test]
    fn moduli() {
        assert_eq!(modulus(&pat(2, 1, &[0])).value(), &int(1));
        assert_eq!(modulus(&pat(4, 2, &[0, 1])).value(), &int(7));
        assert_eq!(modulus(&pat(1, 1, &[0])).value(), &int(-1));
        assert!(!modulus(&pat(3, 2, &[0, 1])).is_positive());
    }

    #[test]
    fn ghost_examples() {
        let trivial = ghost_cycle(&pat(2, 1, &[0]), 16).unwrap();
        assert_eq!(trivial.n0, PadicInt::new(1, 16).unwrap());
        assert_eq!(trivial.verdict, Verdict::IntegerCycle(int(1)));

        let ghost = ghost_cycle(&pat(4, 2, &[0, 1]), 5).unwrap();
        assert_eq!(ghost.n0, PadicInt::new(19, 5).unwrap());
        assert_eq!(ghost.verdict, Verdict::Ghost);
        assert!(ghost.residual_vanishes());

        // 7^-1 · 5 mod 2^16, computed independently with pow(7, -1, 2**16)
        let wide = ghost_cycle(&pat(4, 2, &[0, 1]), 16).unwrap();
        assert_eq!(wide.n0, PadicInt::new(9363, 16).unwrap());

        let twice = ghost_cycle(&pat(4, 2, &[0, 2]), 16).unwrap();
        assert_eq!(twice.n0, PadicInt::new(1, 16).unwrap());
        assert_eq!(twice.verdict, Verdict::IntegerCycle(int(1)));
    }

    #[test]
    fn integrality_examples() {
        assert_eq!(integrality_test(&pat(2, 1, &[0])), Verdict::IntegerCycle(int(1)));
        assert_eq!(integrality_test(&pat(4, 2, &[0, 1])), Verdict::Ghost);
        assert_eq!(integrality_test(&pat(1, 1, &[0])), Verdict::IntegerCycle(int(-1)));
        // the -5 -> -7 -> -5 cycle
        assert_eq!(integrality_test(&pat(3, 2, &[0, 1])), Verdict::IntegerCycle(int(-5)));
    }

    #[test]
    fn negative_cycle_visible_in_signed_residue() {
        let g = ghost_cycle(&pat(3, 2, &[0, 1]), 32).unwrap();
        assert_eq!(g.n0.to_signed_bigint(), int(-5));
    }

    #[test]
    fn certificates() {
        assert_eq!(
            prefix_certificate(&pat(4, 2, &[0, 1]), 4).unwrap(),
            Certificate::CertifiedGhost
        );
        assert_eq!(
            prefix_certificate(&pat(2, 1, &[0]), 2).unwrap(),
            Certificate::CertifiedInteger(int(1))
        );
        assert_eq!(
            prefix_certificate(&pat(4, 2, &[0, 2]), 1).unwrap(),
            Certificate::CertifiedInteger(int(1))
        );
        assert!(matches!(
            prefix_certificate(&pat(1, 1, &[0]), 8),
            Err(CycleError::Inadmissible { .. })
        ));
    }

    #[test]
    fn certificate_inconclusive_below_bound() {
        // (5,3,(0,1,2)): C = 19, modulus 5, B = 4; n0 = 19·5^-1 ≡ 3 (mod 4)
        let p = pat(5, 3, &[0, 1, 2]);
        assert_eq!(prefix_certificate(&p, 2).unwrap(), Certificate::Inconclusive);
        assert_eq!(prefix_certificate(&p, 3).unwrap(), Certificate::CertifiedGhost);
    }

    #[test]
    fn json_record() {
        let g = ghost_cycle(&pat(2, 1, &[0]), 8).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(
            json,
            r#"{"pattern":{"x":2,"y":1,"sigma":[0],"ell":3,"admissible":true},"C":"1","modulus":"1","n0":{"residue":"1","precision":8},"verdict":"IntegerCycle","integer_value":"1"}"#
        );
    }
}
