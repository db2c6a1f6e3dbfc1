//! Trend-preserving concurrent filters for rolling-sample multi-year
//! estimates, and the diagnostics used to compare trends across period
//! lengths and regions.
//!
//! - [`ratpoly`]: exact rational polynomials in the backshift variable.
//! - [`filterdesign`]: minimal-length compatible filter families.
//! - [`myeseries`]: series model, CSV ingestion, random-walk imputation.
//! - [`analysis`]: filtering, noise-signal ratios, comparisons, simulation.

pub mod analysis;
pub mod error;
pub mod filterdesign;
pub mod fixtures;
pub mod myeseries;
pub mod ratpoly;
pub mod report;
pub mod reproduction;

pub use analysis::{
    apply_filter, compare, compatibility, expected_bias, nsr, simulate_bias, trend_estimates,
    ComparisonMode, ComparisonResult, ComparisonSpec, CompatOptions, CompatibilityReport, LogBase,
    NoiseLevels, SimulationSpec, SimulationSummary, TrendEstimates, TrendPolynomial,
};
pub use error::{Error, Result};
pub use filterdesign::{
    constraint_matrix, design_filters, solve_phi, variance_inflation, verify_filter_set,
    DesignSpec, FilterSet, FilterSetDoc, RationalMatrix, VerificationReport,
};
pub use myeseries::{MyeSeries, ObservedValue, Provenance, RegionPair};
pub use ratpoly::{Rational, RationalPoly};
