//! Filtering of MYE series, compatibility diagnostics, cross-region
//! comparisons and the comparison-bias simulator.

mod compare;
mod compat;
mod filtering;
mod simulate;

pub use compare::{
    compare, expected_bias, ComparisonMode, ComparisonResult, ComparisonSpec, TrendPolynomial,
};
pub use compat::{
    compatibility, nsr, CompatOptions, CompatibilityReport, LogBase, PeriodCompatibility,
};
pub use filtering::{apply_filter, apply_to_trend, trend_estimates, FilterWeights, TrendEstimates};
pub use simulate::{
    simulate_bias, simulate_bias_with, GaussianNoise, NoiseLevels, NoiseSampler, SimulationSpec,
    SimulationSummary,
};
