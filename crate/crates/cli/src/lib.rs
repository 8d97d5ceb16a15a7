//! Drivers behind the `ghostcycle` command-line tool: exhaustive scans,
//! fiber-period tables and the density probe.

pub mod fibers;
pub mod probe;
pub mod scan;

pub use scan::{run_scan, ScanConfig, ScanError, ScanReport, VerifyPolicy};
