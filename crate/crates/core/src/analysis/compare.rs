use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::filterdesign::FilterSet;
use crate::myeseries::{MyeSeries, RegionPair};
use crate::ratpoly::RationalPoly;

use super::filtering::{apply_filter, apply_to_trend};

/// Deterministic trend `μ_t = Σ a_j t^j`, coefficients ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendPolynomial(pub Vec<f64>);

impl TrendPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        TrendPolynomial(coefficients)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    /// Degree ignoring trailing zeros; 0 for an all-zero trend.
    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComparisonMode {
    /// 1y value of region A against a multi-year value of region B.
    Inapt,
    /// Same multi-year period on both sides.
    Untimely,
    /// Filtered trend estimates on both sides.
    Proper,
}

impl fmt::Display for ComparisonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComparisonMode::Inapt => "inapt",
            ComparisonMode::Untimely => "untimely",
            ComparisonMode::Proper => "proper",
        })
    }
}

impl FromStr for ComparisonMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inapt" => Ok(ComparisonMode::Inapt),
            "untimely" => Ok(ComparisonMode::Untimely),
            "proper" => Ok(ComparisonMode::Proper),
            other => Err(Error::Parse(format!(
                "comparison mode must be inapt, untimely or proper, got {other:?}"
            ))),
        }
    }
}

impl Serialize for ComparisonMode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonSpec {
    pub mode: ComparisonMode,
    pub t0: i32,
    /// Period used for region A.
    pub reference_period: u32,
    /// Period used for region B.
    pub other_period: u32,
}

impl ComparisonSpec {
    pub fn new(
        mode: ComparisonMode,
        t0: i32,
        reference_period: u32,
        other_period: u32,
    ) -> Result<Self> {
        let spec = ComparisonSpec {
            mode,
            t0,
            reference_period,
            other_period,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn inapt(t0: i32, other_period: u32) -> Result<Self> {
        ComparisonSpec::new(ComparisonMode::Inapt, t0, 1, other_period)
    }

    pub fn untimely(t0: i32, period: u32) -> Result<Self> {
        ComparisonSpec::new(ComparisonMode::Untimely, t0, period, period)
    }

    pub fn proper(t0: i32, reference_period: u32, other_period: u32) -> Result<Self> {
        ComparisonSpec::new(ComparisonMode::Proper, t0, reference_period, other_period)
    }

    /// Proper comparison anchored on A's 1y series, or on A's shortest period
    /// when A has no 1y data.
    pub fn proper_for(pair: &RegionPair, t0: i32, other_period: u32) -> Result<Self> {
        let reference = pair.a.periods().into_iter().next().ok_or(Error::Empty)?;
        ComparisonSpec::proper(t0, reference, other_period)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidComparison(m));
        if self.reference_period == 0 || self.other_period == 0 {
            return bad("periods must be at least 1".into());
        }
        match self.mode {
            ComparisonMode::Inapt if self.reference_period != 1 || self.other_period <= 1 => {
                bad(format!(
                    "inapt compares a 1y value with a multi-year value, got {}y vs {}y",
                    self.reference_period, self.other_period
                ))
            }
            ComparisonMode::Untimely
                if self.reference_period != self.other_period || self.other_period <= 1 =>
            {
                bad(format!(
                    "untimely compares equal multi-year periods, got {}y vs {}y",
                    self.reference_period, self.other_period
                ))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonResult {
    pub spec: ComparisonSpec,
    pub value_a: f64,
    pub value_b: f64,
    /// `value_b / value_a - 1`.
    pub discrepancy: f64,
}

impl ComparisonResult {
    pub fn from_values(spec: ComparisonSpec, value_a: f64, value_b: f64) -> Result<Self> {
        if value_a == 0.0 {
            return Err(Error::ZeroReference);
        }
        Ok(ComparisonResult {
            spec,
            value_a,
            value_b,
            discrepancy: value_b / value_a - 1.0,
        })
    }

    pub fn difference(&self) -> f64 {
        self.value_a - self.value_b
    }

    pub fn discrepancy_percent(&self) -> f64 {
        self.discrepancy * 100.0
    }

    /// Same comparison recomputed from both values rounded half away from
    /// zero at `decimals` places, i.e. from the numbers a printed table shows.
    pub fn at_display_precision(&self, decimals: usize) -> Result<Self> {
        let scale = 10f64.powi(decimals as i32);
        let round = |v: f64| (v * scale).round() / scale;
        ComparisonResult::from_values(self.spec, round(self.value_a), round(self.value_b))
    }

    /// With regions swapped the discrepancy `x` becomes `1/(1+x) - 1`.
    pub fn swapped(&self) -> Result<Self> {
        let spec = ComparisonSpec {
            reference_period: self.spec.other_period,
            other_period: self.spec.reference_period,
            ..self.spec
        };
        ComparisonResult::from_values(spec, self.value_b, self.value_a)
    }
}

fn raw_value(series: &MyeSeries, k: u32, t: i32) -> Result<f64> {
    series
        .value(k, t)
        .ok_or_else(|| Error::MissingObservations(vec![(k, t)]))
}

fn filter_for(fs: Option<&FilterSet>, k: u32) -> Result<&RationalPoly> {
    let fs =
        fs.ok_or_else(|| Error::InvalidComparison("proper comparison needs a filter set".into()))?;
    fs.psi(k)
        .ok_or_else(|| Error::InvalidComparison(format!("filter set has no filter for period {k}")))
}

pub fn compare(
    pair: &RegionPair,
    spec: &ComparisonSpec,
    fs: Option<&FilterSet>,
) -> Result<ComparisonResult> {
    spec.validate()?;
    let (ka, kb, t0) = (spec.reference_period, spec.other_period, spec.t0);
    let (a, b) = match spec.mode {
        ComparisonMode::Inapt | ComparisonMode::Untimely => {
            (raw_value(&pair.a, ka, t0)?, raw_value(&pair.b, kb, t0)?)
        }
        ComparisonMode::Proper => (
            apply_filter(filter_for(fs, ka)?, &pair.a, ka, t0)?,
            apply_filter(filter_for(fs, kb)?, &pair.b, kb, t0)?,
        ),
    };
    ComparisonResult::from_values(*spec, a, b)
}

/// Operator mapping the trend to the expected value on one side: `Θ^(k)`
/// for raw values, `Ψ^(k) Θ^(k)` for filtered ones.
pub(crate) fn side_operator(
    mode: ComparisonMode,
    k: u32,
    fs: Option<&FilterSet>,
) -> Result<RationalPoly> {
    let theta = RationalPoly::sma(k)?;
    match mode {
        ComparisonMode::Inapt | ComparisonMode::Untimely => Ok(theta),
        ComparisonMode::Proper => Ok(filter_for(fs, k)?.mul(&theta)),
    }
}

/// `E[value_a - value_b]` when both regions share `trend` and the errors
/// have mean zero.
pub fn expected_bias(
    trend: &TrendPolynomial,
    spec: &ComparisonSpec,
    fs: Option<&FilterSet>,
) -> Result<f64> {
    spec.validate()?;
    let a = side_operator(spec.mode, spec.reference_period, fs)?;
    let b = side_operator(spec.mode, spec.other_period, fs)?;
    if a == b {
        return Ok(0.0);
    }
    Ok(apply_to_trend(&a, trend, spec.t0) - apply_to_trend(&b, trend, spec.t0))
}
