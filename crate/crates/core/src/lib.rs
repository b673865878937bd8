//! Sums of k-th powers of consecutive primes: enumeration, counting,
//! explicit bounds, duplicate hunting, and density heuristics.
//!
//! The objects of study are integers of the form
//! p_{b+1}^k + p_{b+2}^k + ... + p_t^k, a sum of k-th powers of
//! consecutive primes. Everything in this crate is built on one shared
//! table: the prefix sums r[j] = p_1^k + ... + p_j^k, kept exactly in
//! u128, so a chain sum is the difference r[t] - r[b] and a whole range
//! scan is a two-pointer walk ([`enumeration`]).
//!
//! The modules:
//!
//! - [`primes`]: segmented sieve, prefix power sums, disk cache.
//! - [`enumeration`]: interval enumeration, exact counting, maximum
//!   chain length.
//! - [`bounds`]: explicit upper and lower bounds for the counting
//!   function, with every constant spelled out.
//! - [`duplicates`]: integers with two or more representations.
//! - [`heuristics`]: density models for how often duplicates appear,
//!   and whether to expect finitely or infinitely many.
//! - [`driver`]: parallel interval sweep with checkpoint and resume.
//!
//! All arithmetic on chain sums is exact: u128 with checked power and
//! add, so any overflow is an [`Error::Overflow`] rather than a wrong
//! answer. Floating point appears only in the bounds and heuristics,
//! which approximate real-valued formulas anyway.

pub mod bounds;
pub mod driver;
pub mod duplicates;
pub mod enumeration;
pub mod error;
pub mod heuristics;
pub mod primes;

pub use bounds::{BoundParams, BoundReport, LogExponent};
pub use driver::{run_sweep, JobResult, SweepConfig, SweepMode, SweepSummary};
pub use duplicates::{DuplicateKind, DuplicateLine, DuplicateRecord};
pub use enumeration::{Interval, RepRecord, Representation};
pub use error::{Error, Result};
pub use heuristics::{Classification, HeuristicEstimate};
pub use primes::{PrefixPowerSums, PrimeTable};
