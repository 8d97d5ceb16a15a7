//! Exploratory density probe: how closely do ghost cycles approximate a
//! given 2-adic target? This measures agreement depth only and proves
//! nothing about density.

use ghostcycle_core::cycle::ghost_cycle;
use ghostcycle_core::patterns::{enumerate_by_length, ParityPattern};
use num_bigint::BigUint;
use serde::Serialize;

pub const MAX_TARGET_PRECISION: u32 = 32;

#[derive(Debug, Clone, Serialize)]
pub struct ProbeMatch {
    pub pattern: ParityPattern,
    pub n0_residue: String,
    pub depth: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub exploratory: bool,
    pub target_residue: u64,
    pub target_precision: u32,
    pub ell_max: u32,
    pub patterns_scanned: u64,
    /// First pattern in enumeration order attaining the maximal depth.
    pub best: Option<ProbeMatch>,
    /// `histogram[d]` = number of patterns agreeing on exactly `d` low bits.
    pub histogram: Vec<u64>,
}

/// Number of low bits on which `a` and `b` agree, capped at `bits`.
fn agreement_depth(a: u64, b: u64, bits: u32) -> u32 {
    (a ^ b).trailing_zeros().min(bits)
}

pub fn density_probe(
    target_residue: u64,
    target_precision: u32,
    ell_max: u32,
) -> Result<ProbeReport, String> {
    if target_precision == 0 || target_precision > MAX_TARGET_PRECISION {
        return Err(format!(
            "target precision must be between 1 and {MAX_TARGET_PRECISION} bits"
        ));
    }
    let target = target_residue & ((1u64 << target_precision) - 1);
    let mut histogram = vec![0u64; target_precision as usize + 1];
    let mut best: Option<ProbeMatch> = None;
    let mut scanned = 0;
    for (pattern, admissible) in enumerate_by_length(ell_max) {
        if !admissible {
            continue;
        }
        let ghost = ghost_cycle(&pattern, target_precision).map_err(|e| e.to_string())?;
        let residue = u64::try_from(ghost.n0.residue()).expect("at most 32 bits");
        let depth = agreement_depth(residue, target, target_precision);
        histogram[depth as usize] += 1;
        scanned += 1;
        if best.as_ref().is_none_or(|b| depth > b.depth) {
            best = Some(ProbeMatch {
                pattern,
                n0_residue: BigUint::from(residue).to_string(),
                depth,
            });
        }
    }
    Ok(ProbeReport {
        exploratory: true,
        target_residue: target,
        target_precision,
        ell_max,
        patterns_scanned: scanned,
        best,
        histogram,
    })
}
