use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filterdesign::{DesignSpec, FilterSet};
use crate::myeseries::MyeSeries;
use crate::ratpoly::RationalPoly;

use super::compare::TrendPolynomial;

/// Real-valued weights of an exact filter, kept as integer numerators over a
/// common denominator when those fit in an `f64` mantissa.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterWeights {
    numerators: Vec<f64>,
    denominator: f64,
}

const MAX_EXACT: f64 = 9_007_199_254_740_992.0;

impl FilterWeights {
    pub fn new(filter: &RationalPoly) -> Self {
        let (nums, den) = filter.scaled_numerators();
        let exact: Option<Vec<f64>> = nums
            .iter()
            .map(|n| n.to_f64().filter(|v| v.abs() <= MAX_EXACT))
            .collect();
        match (exact, den.to_f64().filter(|d| *d <= MAX_EXACT)) {
            (Some(numerators), Some(denominator)) => FilterWeights {
                numerators,
                denominator,
            },
            _ => FilterWeights {
                numerators: filter.to_f64_coefficients(),
                denominator: 1.0,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// `Σ ψ_j x_j` where `window[j]` is the value `j` steps back.
    pub fn apply(&self, window: &[f64]) -> f64 {
        debug_assert!(window.len() >= self.numerators.len());
        let acc: f64 = self.numerators.iter().zip(window).map(|(w, x)| w * x).sum();
        acc / self.denominator
    }
}

/// `Σ_j ψ_j Y^(k)_{t-j}` over the filter's full window.
pub fn apply_filter(filter: &RationalPoly, series: &MyeSeries, k: u32, t: i32) -> Result<f64> {
    let weights = FilterWeights::new(filter);
    let window = series.window(k, t, weights.len())?;
    Ok(weights.apply(&window))
}

/// The filter applied to a deterministic trend: `Σ_j ψ_j μ(t0 - j)`.
pub fn apply_to_trend(filter: &RationalPoly, trend: &TrendPolynomial, t0: i32) -> f64 {
    let weights = FilterWeights::new(filter);
    let window: Vec<f64> = (0..weights.len() as i32)
        .map(|j| trend.eval(f64::from(t0 - j)))
        .collect();
    weights.apply(&window)
}

/// Filtered trend values at one end year, one per period present in the series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendEstimates {
    pub at: i32,
    pub values: BTreeMap<u32, f64>,
    /// Earliest end year each estimate consumed; older values are unused.
    pub first_year_used: BTreeMap<u32, i32>,
    #[serde(skip)]
    pub filter_spec: DesignSpec,
}

/// Applies each period's filter at `t0`. Periods of the design that the
/// series does not carry at all are skipped (a small area without 1y data);
/// a period that is present but has gaps in its window is an error.
pub fn trend_estimates(series: &MyeSeries, fs: &FilterSet, t0: i32) -> Result<TrendEstimates> {
    let mut values = BTreeMap::new();
    let mut first_year_used = BTreeMap::new();
    for (&k, psi) in fs.filters() {
        if !series.has_period(k) {
            continue;
        }
        values.insert(k, apply_filter(psi, series, k, t0)?);
        first_year_used.insert(k, t0 - psi.len() as i32 + 1);
    }
    if values.is_empty() {
        return Err(Error::SeriesMismatch(format!(
            "series {:?} has none of the design periods {:?}",
            series.name(),
            fs.spec().periods()
        )));
    }
    Ok(TrendEstimates {
        at: t0,
        values,
        first_year_used,
        filter_spec: fs.spec().clone(),
    })
}
