//! Shared fixtures for the benchmarks.

use nmchan_core::ReservoirSpec;

/// Coupling, temperature and squeezing used throughout the benchmarks.
pub const ALPHA2: f64 = 0.01;
pub const THETA: f64 = 100.0;
pub const SQUEEZING: f64 = 0.1;

pub fn reservoir(x: f64) -> ReservoirSpec {
    ReservoirSpec::new(ALPHA2, x, THETA).expect("benchmark reservoir parameters are valid")
}
