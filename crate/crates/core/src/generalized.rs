//! Ghost cycles of `qn + d` maps.
//!
//! The cycle equation becomes `n₀ (2^x − q^y) = d · Σ q^{y−1−k} 2^{σ_k}`.
//! With `q` and `d` odd the modulus is odd, so the 2-adic solution exists
//! and is unique exactly as for `3n + 1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cycle::{CycleError, CycleModulus, GhostCycle};
use crate::dynamics::{self, CycleTrace, DynamicsError};
use crate::patterns::ParityPattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("multiplier q = {0} must be odd and at least 3")]
    BadMultiplier(u32),
    #[error("offset d = {0} must be odd")]
    BadOffset(i64),
    #[error("expected q,d but got {0:?}")]
    Parse(String),
}

/// The map `n ↦ qn + d` on odd `n`, `n ↦ n/2` on even `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneralizedMap {
    q: u32,
    d: i64,
}

impl GeneralizedMap {
    /// The Collatz map `3n + 1`.
    pub const STANDARD: GeneralizedMap = GeneralizedMap { q: 3, d: 1 };

    pub fn new(q: u32, d: i64) -> Result<Self, MapError> {
        if q < 3 || q.is_multiple_of(2) {
            return Err(MapError::BadMultiplier(q));
        }
        if d % 2 == 0 {
            return Err(MapError::BadOffset(d));
        }
        Ok(Self { q, d })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn modulus(&self, pattern: &ParityPattern) -> CycleModulus {
        let value = (BigInt::one() << pattern.x()) - BigInt::from(self.q).pow(pattern.y());
        CycleModulus::from_value(value)
    }

    /// A positive integer solution needs the modulus to share the sign of
    /// `d`; for `d > 0` this is `2^x > q^y`.
    pub fn is_admissible(&self, pattern: &ParityPattern) -> bool {
        let modulus = self.modulus(pattern);
        modulus.value().is_positive() == (self.d > 0)
    }
}

impl fmt::Display for GeneralizedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}n{:+}", self.q, self.d)
    }
}

impl FromStr for GeneralizedMap {
    type Err = MapError;

    /// Parses `"q,d"`, e.g. `"5,1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (q, d) = s
            .split_once(',')
            .ok_or_else(|| MapError::Parse(s.to_owned()))?;
        let q = q.trim().parse().map_err(|_| MapError::Parse(s.to_owned()))?;
        let d = d.trim().parse().map_err(|_| MapError::Parse(s.to_owned()))?;
        Self::new(q, d)
    }
}

/// `d · Σ q^{y−1−k} 2^{σ_k}`, summed term by term.
pub fn general_cycle_constant(map: GeneralizedMap, pattern: &ParityPattern) -> BigInt {
    let y = pattern.y();
    let q = BigUint::from(map.q);
    let sum: BigUint = pattern
        .sigma()
        .iter()
        .enumerate()
        .map(|(k, &s)| q.pow(y - 1 - k as u32) << s)
        .sum();
    let c = BigInt::from(sum) * map.d;
    debug_assert!(c.is_odd());
    c
}

pub fn general_ghost_cycle(
    map: GeneralizedMap,
    pattern: &ParityPattern,
    precision: u32,
) -> Result<GhostCycle, CycleError> {
    GhostCycle::solve(
        pattern.clone(),
        map,
        general_cycle_constant(map, pattern),
        map.modulus(pattern),
        precision,
    )
}

pub fn general_iterate_cycle(
    map: GeneralizedMap,
    pattern: &ParityPattern,
    precision: u32,
) -> Result<CycleTrace, DynamicsError> {
    if precision <= pattern.x() + 1 {
        return Err(DynamicsError::InsufficientPrecision {
            needed: pattern.x() + 1,
            available: precision,
        });
    }
    dynamics::trace_ghost(&general_ghost_cycle(map, pattern, precision)?)
}

/// Classical `qn + d` trajectory from `n`, stopping after `max_steps` or on
/// the first return to `n`.
pub fn general_integer_oracle(map: GeneralizedMap, n: &BigInt, max_steps: usize) -> Vec<BigInt> {
    assert!(!n.is_zero() && n.is_positive(), "oracle needs n >= 1");
    dynamics::classical_orbit(map, n, max_steps)
}

/// Per-length counts of admissible and integral patterns, an exploratory
/// statistic for comparing maps.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct IntegralFraction {
    pub ell: u32,
    pub admissible: u64,
    pub integral: u64,
}

/// Counts, for each length up to `ell_max`, the admissible patterns under
/// `map` and how many of them have an integer solution.
pub fn integral_fractions(map: GeneralizedMap, ell_max: u32) -> Vec<IntegralFraction> {
    let mut rows: Vec<IntegralFraction> = (2..=ell_max)
        .map(|ell| IntegralFraction { ell, admissible: 0, integral: 0 })
        .collect();
    for (pattern, _) in crate::patterns::enumerate_by_length(ell_max) {
        if !map.is_admissible(&pattern) {
            continue;
        }
        let row = &mut rows[(pattern.ell() - 2) as usize];
        row.admissible += 1;
        let constant = general_cycle_constant(map, &pattern);
        if constant.is_multiple_of(map.modulus(&pattern).value()) {
            row.integral += 1;
        }
    }
    rows
}
