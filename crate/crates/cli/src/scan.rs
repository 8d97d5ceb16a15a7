//! Exhaustive scans over all patterns up to a given length.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use ghostcycle_core::cycle::{GhostCycle, Verdict};
use ghostcycle_core::dynamics::{follows_pattern, DynamicsError};
use ghostcycle_core::generalized::{general_ghost_cycle, general_iterate_cycle, GeneralizedMap};
use ghostcycle_core::patterns::{enumerate_by_length, ParityPattern};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("dynamics violation for pattern {pattern}: {source}")]
    Dynamics {
        pattern: String,
        #[source]
        source: DynamicsError,
    },
    #[error("{0}")]
    Setup(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which patterns get their orbit replayed under the 2-adic map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VerifyPolicy {
    All,
    None,
    /// `count` enumeration indices drawn without replacement from `seed`.
    Sample { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub ell_max: u32,
    pub precision: u32,
    #[serde(serialize_with = "map_as_pair")]
    pub map: GeneralizedMap,
    pub jobs: usize,
    pub verify: VerifyPolicy,
}

fn map_as_pair<S: serde::Serializer>(map: &GeneralizedMap, s: S) -> Result<S::Ok, S::Error> {
    (map.q(), map.d()).serialize(s)
}

impl ScanConfig {
    pub fn new(ell_max: u32) -> Self {
        Self {
            ell_max,
            precision: 64,
            map: GeneralizedMap::STANDARD,
            jobs: 1,
            verify: VerifyPolicy::All,
        }
    }
}

/// One JSONL line: the ghost-cycle record plus scan-specific flags.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    #[serde(flatten)]
    pub ghost: GhostCycle,
    /// `Some(true)` when the orbit was replayed and closed; absent when the
    /// pattern was not sampled for verification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periodic: Option<bool>,
    /// For integer cycles: whether classical iteration of the integer
    /// follows the pattern and returns after `ell` steps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical_confirmed: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralEntry {
    pub pattern: ParityPattern,
    pub integer_value: String,
    pub classical_confirmed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthTally {
    pub ell: u32,
    pub admissible: u64,
    pub admissible_integral: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub patterns: u64,
    pub admissible: u64,
    pub integer_cycles: u64,
    pub ghosts: u64,
    pub verified: u64,
    pub integral_patterns: Vec<IntegralEntry>,
    /// Fraction of admissible patterns per length that are integral. An
    /// exploratory statistic for comparing maps.
    pub exploratory_integral_by_length: Vec<LengthTally>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub config: ScanConfig,
    #[serde(skip)]
    pub records: Vec<ScanRecord>,
    pub summary: ScanSummary,
    pub wall_time_ms: u128,
}

impl ScanReport {
    pub fn wall_time(&self) -> Duration {
        Duration::from_millis(self.wall_time_ms as u64)
    }

    /// Writes one JSON object per record, in enumeration order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), ScanError> {
        for record in &self.records {
            serde_json::to_writer(&mut out, record).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

fn verify_mask(policy: VerifyPolicy, total: usize) -> Vec<bool> {
    match policy {
        VerifyPolicy::All => vec![true; total],
        VerifyPolicy::None => vec![false; total],
        VerifyPolicy::Sample { count, seed } => {
            let mut mask = vec![false; total];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in index::sample(&mut rng, total, count.min(total)) {
                mask[i] = true;
            }
            mask
        }
    }
}

fn process(
    map: GeneralizedMap,
    pattern: &ParityPattern,
    precision: u32,
    verify: bool,
) -> Result<ScanRecord, ScanError> {
    let ghost = general_ghost_cycle(map, pattern, precision).map_err(|e| {
        ScanError::Dynamics {
            pattern: pattern.to_string(),
            source: e.into(),
        }
    })?;
    let periodic = if verify {
        // The replay loses x bits; give it enough headroom to compare.
        let replay = precision.max(pattern.x() + 16);
        general_iterate_cycle(map, pattern, replay).map_err(|source| ScanError::Dynamics {
            pattern: pattern.to_string(),
            source,
        })?;
        Some(true)
    } else {
        None
    };
    let classical_confirmed = ghost
        .verdict
        .integer_value()
        .map(|m| follows_pattern(map, m, pattern));
    Ok(ScanRecord {
        ghost,
        periodic,
        classical_confirmed,
    })
}

fn summarize(config: &ScanConfig, records: &[ScanRecord]) -> ScanSummary {
    let mut tallies: Vec<LengthTally> = (2..=config.ell_max.max(2))
        .map(|ell| LengthTally {
            ell,
            admissible: 0,
            admissible_integral: 0,
        })
        .collect();
    let mut summary = ScanSummary {
        patterns: records.len() as u64,
        admissible: 0,
        integer_cycles: 0,
        ghosts: 0,
        verified: 0,
        integral_patterns: Vec::new(),
        exploratory_integral_by_length: Vec::new(),
    };
    for record in records {
        let ghost = &record.ghost;
        let admissible = config.map.is_admissible(&ghost.pattern);
        let tally = &mut tallies[(ghost.pattern.ell() - 2) as usize];
        if admissible {
            summary.admissible += 1;
            tally.admissible += 1;
        }
        if record.periodic == Some(true) {
            summary.verified += 1;
        }
        match &ghost.verdict {
            Verdict::IntegerCycle(m) => {
                summary.integer_cycles += 1;
                if admissible {
                    tally.admissible_integral += 1;
                }
                summary.integral_patterns.push(IntegralEntry {
                    pattern: ghost.pattern.clone(),
                    integer_value: m.to_string(),
                    classical_confirmed: record.classical_confirmed == Some(true),
                });
            }
            Verdict::Ghost => summary.ghosts += 1,
        }
    }
    summary.exploratory_integral_by_length = tallies;
    summary
}

/// Runs the scan on `config.jobs` workers. Records come back in canonical
/// enumeration order whatever the worker count.
pub fn run_scan(config: &ScanConfig) -> Result<ScanReport, ScanError> {
    let started = Instant::now();
    let patterns: Vec<ParityPattern> = enumerate_by_length(config.ell_max).map(|(p, _)| p).collect();
    let mask = verify_mask(config.verify, patterns.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| ScanError::Setup(e.to_string()))?;
    let records = pool.install(|| {
        patterns
            .par_iter()
            .zip(mask.par_iter())
            .map(|(p, &verify)| process(config.map, p, config.precision, verify))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let summary = summarize(config, &records);
    Ok(ScanReport {
        config: config.clone(),
        records,
        summary,
        wall_time_ms: started.elapsed().as_millis(),
    })
}

/// Distinct integral patterns among admissible ones, in canonical order.
pub fn admissible_integral_patterns(report: &ScanReport) -> BTreeSet<(ParityPattern, String)> {
    report
        .summary
        .integral_patterns
        .iter()
        .filter(|e| report.config.map.is_admissible(&e.pattern))
        .map(|e| (e.pattern.clone(), e.integer_value.clone()))
        .collect()
}
