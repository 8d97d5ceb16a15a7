//! The 2-adic Collatz map and verification that ghost cycles are periodic
//! orbits following their own parity pattern.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cycle::{self, CycleError, GhostCycle};
use crate::generalized::GeneralizedMap;
use crate::padic::{PadicError, PadicInt};
use crate::patterns::{Parity, ParityPattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("need more than {needed} bits of precision, have {available}")]
    InsufficientPrecision { needed: u32, available: u32 },
    #[error("dynamics violation at odd step {k}: expected {expected} halvings, observed {observed}")]
    ValuationMismatch { k: usize, expected: u32, observed: u32 },
    #[error("dynamics violation: m_{k} is not a unit")]
    NotAUnit { k: usize },
    #[error("dynamics violation: orbit does not close at {precision} bits")]
    NotClosed { precision: u32 },
}

impl DynamicsError {
    /// True for the errors that contradict the forced-valuation property,
    /// as opposed to running out of precision.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            DynamicsError::ValuationMismatch { .. }
                | DynamicsError::NotAUnit { .. }
                | DynamicsError::NotClosed { .. }
        )
    }
}

/// Result of one application of the map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub value: PadicInt,
    pub branch: Parity,
    pub halvings: u32,
}

/// `n ↦ n/2` on even `n`, `n ↦ (qn + d) / 2^{v₂(qn + d)}` on units.
pub(crate) fn accelerated_step(
    map: GeneralizedMap,
    n: &PadicInt,
) -> Result<Step, DynamicsError> {
    let precision = n.precision();
    if n.v2()? > 0 {
        return Ok(Step {
            value: n.shr_exact(1)?,
            branch: Parity::Even,
            halvings: 1,
        });
    }
    let image = &(n * &PadicInt::new(map.q(), precision)?) + &PadicInt::new(map.d(), precision)?;
    let halvings = image.v2().map_err(|_| DynamicsError::InsufficientPrecision {
        needed: precision,
        available: precision,
    })?;
    Ok(Step {
        value: image.shr_exact(halvings)?,
        branch: Parity::Odd,
        halvings,
    })
}

/// One step of the 2-adic Collatz map with the accelerated odd branch.
pub fn t2_step(n: &PadicInt) -> Result<Step, DynamicsError> {
    accelerated_step(GeneralizedMap::STANDARD, n)
}

/// The odd-step values `m₀ … m_y` of a ghost cycle with their halving counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTrace {
    pub pattern: ParityPattern,
    pub map: GeneralizedMap,
    pub m: Vec<PadicInt>,
    pub step_valuations: Vec<u32>,
    pub final_precision: u32,
    pub closed: bool,
}

impl CycleTrace {
    pub fn total_halvings(&self) -> u32 {
        self.step_valuations.iter().sum()
    }

    pub fn odd_steps(&self) -> u32 {
        self.step_valuations.len() as u32
    }

    pub fn total_steps(&self) -> u32 {
        self.total_halvings() + self.odd_steps()
    }

    /// `A_k = m_k · 2^{σ_k}`.
    pub fn scaled(&self, k: usize) -> PadicInt {
        self.m[k].shl(self.pattern.sigma_at(k))
    }
}

/// Walks the accelerated map from `ghost.n0` through `y` odd phases and
/// checks each halving count against the pattern.
pub(crate) fn trace_ghost(ghost: &GhostCycle) -> Result<CycleTrace, DynamicsError> {
    let pattern = &ghost.pattern;
    let start = ghost.n0.precision();
    if start <= pattern.x() + 1 {
        return Err(DynamicsError::InsufficientPrecision {
            needed: pattern.x() + 1,
            available: start,
        });
    }
    let expected = pattern.halvings();
    let mut m = Vec::with_capacity(expected.len() + 1);
    let mut valuations = Vec::with_capacity(expected.len());
    m.push(ghost.n0.clone());
    for (k, &s) in expected.iter().enumerate() {
        let current = &m[k];
        if !current.is_unit() {
            return Err(DynamicsError::NotAUnit { k });
        }
        let step = accelerated_step(ghost.map, current)?;
        if step.halvings != s {
            return Err(DynamicsError::ValuationMismatch {
                k,
                expected: s,
                observed: step.halvings,
            });
        }
        valuations.push(step.halvings);
        m.push(step.value);
    }
    let last = m.last().expect("y >= 1");
    if !last.is_unit() {
        return Err(DynamicsError::NotAUnit { k: m.len() - 1 });
    }
    let final_precision = last.precision();
    debug_assert_eq!(final_precision, start - pattern.x());
    if !last.congruent(&m[0]) {
        return Err(DynamicsError::NotClosed {
            precision: final_precision,
        });
    }
    Ok(CycleTrace {
        pattern: pattern.clone(),
        map: ghost.map,
        m,
        step_valuations: valuations,
        final_precision,
        closed: true,
    })
}

/// Iterates the ghost cycle of `pattern` once around. Needs
/// `precision > x + 1` so the closing comparison keeps at least two bits.
pub fn iterate_cycle(pattern: &ParityPattern, precision: u32) -> Result<CycleTrace, DynamicsError> {
    if precision <= pattern.x() + 1 {
        return Err(DynamicsError::InsufficientPrecision {
            needed: pattern.x() + 1,
            available: precision,
        });
    }
    trace_ghost(&cycle::ghost_cycle(pattern, precision)?)
}

/// `Ok(true)` when the orbit closes with the forced valuations, `Ok(false)`
/// on a dynamics violation; precision problems stay errors.
pub fn verify_periodicity(pattern: &ParityPattern, precision: u32) -> Result<bool, DynamicsError> {
    match iterate_cycle(pattern, precision) {
        Ok(trace) => Ok(trace.closed),
        Err(e) if e.is_violation() => Ok(false),
        Err(e) => Err(e),
    }
}

/// Smallest block length `t` (in classical steps) such that the pattern's
/// parity word is a repetition of its first `t` letters. The ghost cycle's
/// minimal period under the map divides `ell` and equals this value.
pub fn minimal_period(pattern: &ParityPattern) -> u32 {
    let word = pattern.parity_word();
    let n = word.len();
    (1..=n)
        .filter(|t| n.is_multiple_of(*t))
        .find(|&t| (t..n).all(|i| word[i] == word[i - t]))
        .expect("t = n always qualifies") as u32
}

/// The pattern whose repetition gives `pattern`, i.e. its primitive root.
pub fn primitive_pattern(pattern: &ParityPattern) -> ParityPattern {
    let period = minimal_period(pattern);
    let reps = pattern.ell() / period;
    let y = pattern.y() / reps;
    ParityPattern::new(
        pattern.x() / reps,
        y,
        pattern.sigma()[..y as usize].to_vec(),
    )
    .expect("a block of a valid pattern is valid")
}

/// Classical `qn + d` / halving step on integers.
pub(crate) fn classical_step(map: GeneralizedMap, n: &BigInt) -> BigInt {
    if n.is_even() {
        n / 2
    } else {
        n * map.q() + map.d()
    }
}

pub(crate) fn classical_orbit(map: GeneralizedMap, n: &BigInt, max_steps: usize) -> Vec<BigInt> {
    let mut values = vec![n.clone()];
    let mut current = n.clone();
    for _ in 0..max_steps {
        current = classical_step(map, &current);
        values.push(current.clone());
        if &current == n {
            break;
        }
    }
    values
}

/// The classical trajectory of `n` under `n/2`, `3n+1`, stopping after
/// `max_steps` steps or on the first return to `n`.
pub fn iterate_integer(n: &BigUint, max_steps: usize) -> Vec<BigUint> {
    assert!(*n >= BigUint::from(1u32), "iterate_integer needs n >= 1");
    classical_orbit(GeneralizedMap::STANDARD, &BigInt::from(n.clone()), max_steps)
        .into_iter()
        .map(|v| v.to_biguint().expect("3n+1 keeps positive integers positive"))
        .collect()
}

/// Whether the integer `n` returns to itself after exactly `ell` classical
/// steps with the pattern's parity word.
pub fn follows_pattern(map: GeneralizedMap, n: &BigInt, pattern: &ParityPattern) -> bool {
    let mut current = n.clone();
    for parity in pattern.parity_word() {
        let observed = if current.is_odd() { Parity::Odd } else { Parity::Even };
        if observed != parity {
            return false;
        }
        current = classical_step(map, &current);
    }
    &current == n
}

impl Serialize for CycleTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let standard = self.map == GeneralizedMap::STANDARD;
        let mut s = serializer.serialize_struct("CycleTrace", if standard { 5 } else { 7 })?;
        s.serialize_field("pattern", &self.pattern)?;
        s.serialize_field("m", &self.m)?;
        s.serialize_field("valuations", &self.step_valuations)?;
        s.serialize_field("closed", &self.closed)?;
        s.serialize_field("final_precision", &self.final_precision)?;
        if !standard {
            s.serialize_field("q", &self.map.q())?;
            s.serialize_field("d", &self.map.d())?;
        }
        s.end()
    }
}
