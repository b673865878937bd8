//! Shared fixtures for the benchmark targets.

use std::sync::Arc;

use gleeful_core::{PrefixPowerSums, PrimeTable};

/// Sieve once per fixture; the benches reuse the table across samples.
pub fn table(limit: u64) -> Arc<PrimeTable> {
    Arc::new(PrimeTable::sieve(limit).expect("benchmark sieve limits are valid"))
}

pub fn prefix(k: u32, limit: u64) -> PrefixPowerSums {
    PrefixPowerSums::build(k, table(limit)).expect("benchmark prefix tables fit in u128")
}
