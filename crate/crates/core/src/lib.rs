//! Two-mode Gaussian states in a thermal reservoir beyond the Markov
//! approximation: reservoir coefficients, channel evolution and
//! separability diagnostics.

pub mod channel;
pub mod error;
pub mod gaussian;
pub mod numerics;
pub mod reservoir;
pub mod separability;

pub use channel::{ChannelMode, ChannelState, CoefficientTable, TableSample};
pub use error::{Error, Result};
pub use gaussian::{CanonicalCovariance, TwoModeGaussianState};
pub use reservoir::{CoefficientSample, MarkovLimits, NoiseMode, ReservoirSpec};
pub use separability::{SeparabilityTime, SeparabilityTrace, SeparabilityVerdict};
