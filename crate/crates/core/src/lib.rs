//! Exact arithmetic for 2-adic ghost cycles of the Collatz map.
//!
//! For a parity pattern `(x, y, σ)` the cycle equation
//! `n₀ (2^x − 3^y) = C(y, σ)` always has a unique solution in ℤ₂ because
//! `2^x − 3^y` is odd. This crate computes that solution to any precision,
//! decides exactly whether it is a rational integer, replays it under the
//! 2-adic Collatz map, and provides the semilinear-set tooling used to
//! exhibit the unbounded fiber periods of the divisibility predicate.

pub mod cycle;
pub mod dynamics;
pub mod generalized;
pub mod padic;
pub mod patterns;
pub mod semilinear;

pub use cycle::{
    cycle_constant, ghost_cycle, integrality_test, modulus, prefix_certificate, Certificate,
    CycleError, CycleModulus, GhostCycle, Verdict,
};
pub use dynamics::{
    iterate_cycle, iterate_integer, t2_step, verify_periodicity, CycleTrace, DynamicsError,
};
pub use generalized::{GeneralizedMap, MapError};
pub use padic::{PadicError, PadicInt};
pub use patterns::{enumerate, enumerate_by_length, sample_admissible, Parity, ParityPattern, PatternError};
pub use semilinear::{LinearSet, SemilinearError, SemilinearSet};
