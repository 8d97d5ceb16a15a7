//! Semilinear subsets of ℕᵈ and fiber-period analysis.
//!
//! A linear set is `{ b + Σ λᵢ vᵢ : λᵢ ∈ ℕ }`; a semilinear set is a finite
//! union of them. For `S ⊆ ℕ²` the fiber at `x` is `{ c : (x, c) ∈ S }`.
//! Fibers of a semilinear set are eventually periodic with periods dividing
//! one common bound, while the fibers of the divisibility predicate
//! `D_y = { (x, C) : 2^x > 3^y, C ≥ 1, (2^x − 3^y) | C }` have period
//! `2^x − 3^y`, which is unbounded in `x`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::patterns::is_admissible;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemilinearError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a linear set needs dimension at least 1")]
    ZeroDimension,
    #[error("a semilinear set needs at least one component")]
    Empty,
    #[error("no eventual period detected within the scanned window of {scanned}")]
    Inconclusive { scanned: u64 },
    #[error("fiber undefined: 2^{x} ≤ 3^{y}")]
    FiberUndefined { y: u32, x: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearSet {
    base: Vec<u64>,
    periods: Vec<Vec<u64>>,
}

impl LinearSet {
    pub fn new(base: Vec<u64>, periods: Vec<Vec<u64>>) -> Result<Self, SemilinearError> {
        if base.is_empty() {
            return Err(SemilinearError::ZeroDimension);
        }
        if let Some(bad) = periods.iter().find(|p| p.len() != base.len()) {
            return Err(SemilinearError::DimensionMismatch {
                expected: base.len(),
                found: bad.len(),
            });
        }
        Ok(Self { base, periods })
    }

    pub fn dimension(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn periods(&self) -> &[Vec<u64>] {
        &self.periods
    }

    fn nonzero_periods(&self) -> Vec<&[u64]> {
        self.periods
            .iter()
            .filter(|p| p.iter().any(|&c| c != 0))
            .map(Vec::as_slice)
            .collect()
    }

    /// Bounded search over coefficient vectors. Every nonzero period raises
    /// some coordinate by at least one, so no coefficient can exceed the
    /// largest coordinate of the target.
    pub fn contains(&self, point: &[u64]) -> Result<bool, SemilinearError> {
        if point.len() != self.dimension() {
            return Err(SemilinearError::DimensionMismatch {
                expected: self.dimension(),
                found: point.len(),
            });
        }
        let Some(rest) = point
            .iter()
            .zip(&self.base)
            .map(|(p, b)| p.checked_sub(*b))
            .collect::<Option<Vec<u64>>>()
        else {
            return Ok(false);
        };
        Ok(reachable(&rest, &self.nonzero_periods()))
    }
}

fn reachable(target: &[u64], periods: &[&[u64]]) -> bool {
    if target.iter().all(|&c| c == 0) {
        return true;
    }
    let Some((first, others)) = periods.split_first() else {
        return false;
    };
    let mut remaining = target.to_vec();
    loop {
        if reachable(&remaining, others) {
            return true;
        }
        for (r, p) in remaining.iter_mut().zip(first.iter()) {
            match r.checked_sub(*p) {
                Some(next) => *r = next,
                None => return false,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemilinearSet {
    components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(components: Vec<LinearSet>) -> Result<Self, SemilinearError> {
        let first = components.first().ok_or(SemilinearError::Empty)?;
        let d = first.dimension();
        if let Some(bad) = components.iter().find(|c| c.dimension() != d) {
            return Err(SemilinearError::DimensionMismatch {
                expected: d,
                found: bad.dimension(),
            });
        }
        Ok(Self { components })
    }

    pub fn dimension(&self) -> usize {
        self.components[0].dimension()
    }

    pub fn components(&self) -> &[LinearSet] {
        &self.components
    }

    pub fn contains(&self, point: &[u64]) -> Result<bool, SemilinearError> {
        for component in &self.components {
            if component.contains(point)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Indicator of the fiber `{ c < window : (x, c) ∈ S }` for a planar set,
    /// computed by an unbounded-knapsack sweep over the reachable grid
    /// `[0, x] × [0, window)` rather than by per-point membership.
    pub fn fiber_indicator(&self, x: u64, window: usize) -> Result<Vec<bool>, SemilinearError> {
        if self.dimension() != 2 {
            return Err(SemilinearError::DimensionMismatch {
                expected: 2,
                found: self.dimension(),
            });
        }
        let rows = x as usize + 1;
        let mut fiber = vec![false; window];
        for component in &self.components {
            let (bx, bc) = (component.base[0], component.base[1] as usize);
            if bx > x || bc >= window {
                continue;
            }
            let mut grid = vec![false; rows * window];
            grid[bx as usize * window + bc] = true;
            for period in component.nonzero_periods() {
                let (px, pc) = (period[0] as usize, period[1] as usize);
                for a in 0..rows {
                    for c in 0..window {
                        if grid[a * window + c] && a + px < rows && c + pc < window {
                            grid[(a + px) * window + c + pc] = true;
                        }
                    }
                }
            }
            for (c, hit) in fiber.iter_mut().enumerate() {
                *hit |= grid[x as usize * window + c];
            }
        }
        Ok(fiber)
    }

    /// Product bound on fiber periods: the lcm of the nonzero second
    /// coordinates of all period vectors (1 when there are none).
    pub fn fiber_period_bound(&self) -> u64 {
        self.components
            .iter()
            .flat_map(|c| c.periods.iter())
            .map(|p| p[1])
            .filter(|&c| c != 0)
            .fold(1, |acc, c| acc.lcm(&c))
    }
}

/// Smallest `p` for which the second half of `seq` is `p`-periodic, with at
/// least `p` comparisons backing the answer.
pub fn tail_period(seq: &[bool]) -> Option<usize> {
    let start = seq.len() / 2;
    let tail = &seq[start..];
    (1..=tail.len() / 2).find(|&p| (p..tail.len()).all(|i| tail[i] == tail[i - p]))
}

/// Minimal eventual period of the fiber of `set` at `x`, estimated from the
/// window `[0, scan_bound)`. Sound when the window exceeds the fiber's
/// transient plus twice its true period.
pub fn fiber_eventual_period(
    set: &SemilinearSet,
    x: u64,
    scan_bound: u64,
) -> Result<u64, SemilinearError> {
    let fiber = set.fiber_indicator(x, scan_bound as usize)?;
    tail_period(&fiber)
        .map(|p| p as u64)
        .ok_or(SemilinearError::Inconclusive { scanned: scan_bound })
}

fn pow2_minus_pow3(y: u32, x: u32) -> BigInt {
    (BigInt::one() << x) - BigInt::from(3u32).pow(y)
}

/// Membership in `D_y`: `2^x > 3^y`, `C ≥ 1` and `(2^x − 3^y) | C`.
pub fn dy_membership(y: u32, x: u32, c: &BigUint) -> bool {
    assert!(y >= 1, "D_y is defined for y >= 1");
    is_admissible(x, y)
        && !c.is_zero()
        && BigInt::from(c.clone()).is_multiple_of(&pow2_minus_pow3(y, x))
}

/// The fiber of `D_y` at `x` and its minimal period `2^x − 3^y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberPeriodRecord {
    pub y: u32,
    pub x: u32,
    #[serde(serialize_with = "as_decimal")]
    pub period: BigUint,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn fiber_period_exact(y: u32, x: u32) -> Result<FiberPeriodRecord, SemilinearError> {
    if !is_admissible(x, y) {
        return Err(SemilinearError::FiberUndefined { y, x });
    }
    let period = pow2_minus_pow3(y, x)
        .to_biguint()
        .expect("admissible difference is positive");
    Ok(FiberPeriodRecord { y, x, period })
}

/// Minimal period of `C ↦ [ (x, C) ∈ D_y ]` over `C = 1..=scan_bound`, found
/// by trying every candidate period against the membership predicate. The
/// window must cover three full periods.
pub fn fiber_period_bruteforce(y: u32, x: u32, scan_bound: u64) -> Result<u64, SemilinearError> {
    let exact = fiber_period_exact(y, x)?;
    let needed = exact.period * 3u32;
    if BigUint::from(scan_bound) < needed {
        return Err(SemilinearError::Inconclusive { scanned: scan_bound });
    }
    let indicator: Vec<bool> = (1..=scan_bound)
        .map(|c| dy_membership(y, x, &BigUint::from(c)))
        .collect();
    let n = indicator.len();
    (1..=n / 2)
        .find(|&p| (p..n).all(|i| indicator[i] == indicator[i - p]))
        .map(|p| p as u64)
        .ok_or(SemilinearError::Inconclusive { scanned: scan_bound })
}

/// The least admissible `x` whose fiber period `2^x − 3^y` exceeds `bound`,
/// refuting `bound` as a uniform period bound for `D_y`.
pub fn nonsemilinearity_witness(y: u32, bound: &BigUint) -> FiberPeriodRecord {
    assert!(y >= 1);
    let mut x = 1;
    loop {
        if let Ok(record) = fiber_period_exact(y, x) {
            if &record.period > bound {
                return record;
            }
        }
        x += 1;
    }
}
