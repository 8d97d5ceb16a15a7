//! Parity patterns `(x, y, σ)` describing the shape of a hypothetical cycle.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The clause of the pattern constraints that an input violates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("y must be at least 1")]
    NoOddSteps,
    #[error("x must be at least 1")]
    NoEvenSteps,
    #[error("sigma has {found} entries but y = {expected}")]
    LengthMismatch { expected: u32, found: usize },
    #[error("σ₀ must be 0")]
    FirstNotZero,
    #[error("sigma must be strictly increasing (σ{index} ≥ σ{next})", next = index + 1)]
    NotIncreasing { index: usize },
    #[error("σ_(y-1) = {last} must be less than x = {x}")]
    OutOfRange { last: u32, x: u32 },
}

/// One step of the classical (non-accelerated) map: `3n+1` or a halving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

/// A structurally valid parity pattern.
///
/// `sigma[k]` counts the halvings performed before the `k`-th odd step, so
/// `0 = sigma[0] < sigma[1] < ... < sigma[y-1] < x`. Whether `2^x > 3^y`
/// holds is a separate question, see [`ParityPattern::is_admissible`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParityPattern {
    x: u32,
    y: u32,
    sigma: Vec<u32>,
}

impl ParityPattern {
    pub fn new(x: u32, y: u32, sigma: Vec<u32>) -> Result<Self, PatternError> {
        if y < 1 {
            return Err(PatternError::NoOddSteps);
        }
        if x < 1 {
            return Err(PatternError::NoEvenSteps);
        }
        if sigma.len() != y as usize {
            return Err(PatternError::LengthMismatch {
                expected: y,
                found: sigma.len(),
            });
        }
        if sigma[0] != 0 {
            return Err(PatternError::FirstNotZero);
        }
        if let Some(index) = sigma.windows(2).position(|w| w[0] >= w[1]) {
            return Err(PatternError::NotIncreasing { index });
        }
        let last = *sigma.last().expect("y >= 1");
        if last >= x {
            return Err(PatternError::OutOfRange { last, x });
        }
        Ok(Self { x, y, sigma })
    }

    /// Even steps (total halvings).
    pub fn x(&self) -> u32 {
        self.x
    }

    /// Odd steps.
    pub fn y(&self) -> u32 {
        self.y
    }

    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }

    /// Cycle length in classical steps.
    pub fn ell(&self) -> u32 {
        self.x + self.y
    }

    /// `σ_k` with the convention `σ_y = x`.
    pub fn sigma_at(&self, k: usize) -> u32 {
        if k == self.y as usize {
            self.x
        } else {
            self.sigma[k]
        }
    }

    /// The halving run lengths `s_1, …, s_y`, where `s_k = σ_k − σ_{k−1}`.
    pub fn halvings(&self) -> Vec<u32> {
        (1..=self.y as usize)
            .map(|k| self.sigma_at(k) - self.sigma_at(k - 1))
            .collect()
    }

    /// `2^x > 3^y`, decided on exact integers.
    pub fn is_admissible(&self) -> bool {
        is_admissible(self.x, self.y)
    }

    /// The classical step sequence of length `ell`: each odd step followed by
    /// its run of halvings.
    pub fn parity_word(&self) -> Vec<Parity> {
        self.halvings()
            .into_iter()
            .flat_map(|s| {
                std::iter::once(Parity::Odd).chain(std::iter::repeat_n(Parity::Even, s as usize))
            })
            .collect()
    }

    /// Repeats the pattern `times` times end to end.
    pub fn repeat(&self, times: u32) -> Self {
        assert!(times >= 1);
        let sigma = (0..times)
            .flat_map(|r| self.sigma.iter().map(move |s| s + r * self.x))
            .collect();
        Self {
            x: self.x * times,
            y: self.y * times,
            sigma,
        }
    }
}

impl fmt::Display for ParityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, ({}))", self.x, self.y, self.sigma.iter().join(","))
    }
}

/// `2^x > 3^y` on exact integers.
pub fn is_admissible(x: u32, y: u32) -> bool {
    BigUint::from(1u32) << x > BigUint::from(3u32).pow(y)
}

/// Every valid `σ` for the given `(y, x)` in lexicographic order. There are
/// `binomial(x − 1, y − 1)` of them.
pub fn enumerate(y: u32, x: u32) -> impl Iterator<Item = ParityPattern> {
    let choices: Box<dyn Iterator<Item = Vec<u32>>> = if y == 0 || x == 0 || y > x {
        Box::new(std::iter::empty())
    } else {
        Box::new((1..x).combinations(y as usize - 1))
    };
    choices.map(move |rest| {
        let mut sigma = Vec::with_capacity(y as usize);
        sigma.push(0);
        sigma.extend(rest);
        ParityPattern { x, y, sigma }
    })
}

/// All patterns with `x + y ≤ ell_max`, ordered by length, then `y`, then
/// `σ` lexicographically, each tagged with its admissibility.
pub fn enumerate_by_length(ell_max: u32) -> impl Iterator<Item = (ParityPattern, bool)> {
    (2..=ell_max)
        .flat_map(|ell| (1..ell).map(move |y| (y, ell - y)))
        .flat_map(|(y, x)| {
            let admissible = is_admissible(x, y);
            enumerate(y, x).map(move |p| (p, admissible))
        })
}

/// Draws an admissible pattern with `3 ≤ ell ≤ ell_max`: the length and
/// the odd-step count are uniform over admissible choices, then `σ` is a
/// uniform subset.
pub fn sample_admissible<R: Rng + ?Sized>(rng: &mut R, ell_max: u32) -> ParityPattern {
    assert!(ell_max >= 3, "the shortest admissible pattern has length 3");
    let ell = rng.gen_range(3..=ell_max);
    let ys: Vec<u32> = (1..ell).filter(|&y| is_admissible(ell - y, y)).collect();
    let y = ys[rng.gen_range(0..ys.len())];
    let x = ell - y;
    let mut rest: Vec<u32> = index::sample(rng, x as usize - 1, y as usize - 1)
        .into_iter()
        .map(|i| i as u32 + 1)
        .collect();
    rest.sort_unstable();
    let mut sigma = Vec::with_capacity(y as usize);
    sigma.push(0);
    sigma.extend(rest);
    ParityPattern { x, y, sigma }
}

#[derive(Serialize, Deserialize)]
struct PatternRecord {
    x: u32,
    y: u32,
    sigma: Vec<u32>,
    ell: u32,
    admissible: bool,
}

impl Serialize for ParityPattern {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PatternRecord {
            x: self.x,
            y: self.y,
            sigma: self.sigma.clone(),
            ell: self.ell(),
            admissible: self.is_admissible(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParityPattern {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let record = PatternRecord::deserialize(deserializer)?;
        ParityPattern::new(record.x, record.y, record.sigma).map_err(serde::de::Error::custom)
    }
}
