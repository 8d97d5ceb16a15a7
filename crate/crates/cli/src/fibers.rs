//! Fiber-period tables for the divisibility predicate.

use std::io::Write;

use ghostcycle_core::semilinear::{fiber_period_bruteforce, fiber_period_exact};
use num_bigint::BigUint;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberRow {
    pub y: u32,
    pub x: u32,
    pub period_exact: String,
    pub period_bruteforce: Option<u64>,
    pub agree: Option<bool>,
}

/// Rows for every admissible `x` in `x_min..=x_max`. The brute-force column
/// is filled only when `scan_bound` covers three periods.
pub fn fiber_table(y: u32, x_min: u32, x_max: u32, scan_bound: Option<u64>) -> Vec<FiberRow> {
    (x_min..=x_max)
        .filter_map(|x| fiber_period_exact(y, x).ok())
        .map(|record| {
            let brute = scan_bound.and_then(|bound| fiber_period_bruteforce(y, record.x, bound).ok());
            let agree = brute.map(|b| BigUint::from(b) == record.period);
            FiberRow {
                y,
                x: record.x,
                period_exact: record.period.to_string(),
                period_bruteforce: brute,
                agree,
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[FiberRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "y,x,period_exact,period_bruteforce,agree")?;
    for row in rows {
        let brute = row.period_bruteforce.map(|b| b.to_string()).unwrap_or_default();
        let agree = row.agree.map(|a| a.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", row.y, row.x, row.period_exact, brute, agree)?;
    }
    out.flush()
}
