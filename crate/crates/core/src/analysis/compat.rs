use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::myeseries::{MyeSeries, Provenance};

/// Logarithm used in the noise-signal ratio. Base 10 is the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Ten,
    Natural,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Ten => x.log10(),
            LogBase::Natural => x.ln(),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Ten => "10",
            LogBase::Natural => "e",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "10" => Ok(LogBase::Ten),
            "e" | "ln" | "natural" => Ok(LogBase::Natural),
            other => Err(Error::Parse(format!(
                "log base must be 10 or e, got {other:?}"
            ))),
        }
    }
}

impl Serialize for LogBase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `log Y^(k)_t - log Θ^(k)(B) Y^(1)_t`.
pub fn nsr(series: &MyeSeries, k: u32, t: i32, base: LogBase) -> Result<f64> {
    let y = series
        .value(k, t)
        .ok_or_else(|| Error::MissingObservations(vec![(k, t)]))?;
    let mean = series.sma_of_base(k, t)?;
    if y <= 0.0 {
        return Err(Error::Domain(format!(
            "{k}y value at {t} is {y}, not positive"
        )));
    }
    if mean <= 0.0 {
        return Err(Error::Domain(format!(
            "{k}-year mean of 1y values ending {t} is {mean}, not positive"
        )));
    }
    Ok(base.log(y) - base.log(mean))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CompatOptions {
    pub base: LogBase,
    /// Imputed multi-year values count as time points when set (the default).
    pub include_imputed: bool,
}

impl CompatOptions {
    pub fn new(base: LogBase, include_imputed: bool) -> Self {
        CompatOptions {
            base,
            include_imputed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodCompatibility {
    pub nsr: BTreeMap<i32, f64>,
    /// `max_t |nsr_t|`.
    pub c: f64,
    /// End year attaining the maximum.
    pub argmax: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub variable: String,
    pub options: CompatOptions,
    pub periods: BTreeMap<u32, PeriodCompatibility>,
}

impl CompatibilityReport {
    pub fn c(&self, k: u32) -> Option<f64> {
        self.periods.get(&k).map(|p| p.c)
    }
}

/// NSR at every end year where the `k`y value and the full 1y window exist.
pub fn compatibility(
    series: &MyeSeries,
    periods: &[u32],
    options: CompatOptions,
) -> Result<CompatibilityReport> {
    let mut out = BTreeMap::new();
    for &k in periods {
        let mut values = BTreeMap::new();
        for t in series.years(k) {
            let obs = series.get(k, t).expect("year listed");
            if !options.include_imputed && obs.provenance == Provenance::Imputed {
                continue;
            }
            if series.window(1, t, k as usize).is_err() {
                continue;
            }
            values.insert(t, nsr(series, k, t, options.base)?);
        }
        let (argmax, c) = values
            .iter()
            .map(|(&t, v)| (t, v.abs()))
            .fold(None, |best: Option<(i32, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
            .ok_or(Error::NoTimePoints(k))?;
        out.insert(
            k,
            PeriodCompatibility {
                nsr: values,
                c,
                argmax,
            },
        );
    }
    Ok(CompatibilityReport {
        variable: series.name().to_string(),
        options,
        periods: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn opts() -> CompatOptions {
        CompatOptions::new(LogBase::Ten, true)
    }

    #[test]
    fn hand_computed_nsr_values() {
        let inc = fixtures::imputed(&fixtures::income());
        let v = nsr(&inc, 3, 2007, LogBase::Ten).unwrap();
        assert!((v - (44386.0f64 / 42_683.666_666_666_67).log10()).abs() < 1e-12);
        assert!((v - 0.01698).abs() < 5e-6);

        let div = fixtures::imputed(&fixtures::divorce());
        let v = nsr(&div, 3, 2006, LogBase::Ten).unwrap();
        assert!((v - 0.00797).abs() < 1e-5, "{v}");
    }

    #[test]
    fn time_ranges() {
        let inc = fixtures::imputed(&fixtures::income());
        let rep = compatibility(&inc, &[3, 5], opts()).unwrap();
        assert_eq!(
            rep.periods[&3].nsr.keys().copied().collect::<Vec<_>>(),
            (2002..=2007).collect::<Vec<_>>()
        );
        assert_eq!(
            rep.periods[&5].nsr.keys().copied().collect::<Vec<_>>(),
            (2004..=2007).collect::<Vec<_>>()
        );

        let published_only =
            compatibility(&inc, &[5], CompatOptions::new(LogBase::Ten, false)).unwrap();
        assert_eq!(published_only.periods[&5].nsr.len(), 2);
    }

    #[test]
    fn no_points_and_domain_errors() {
        let inc = fixtures::income();
        assert!(matches!(
            compatibility(&inc, &[7], opts()),
            Err(Error::NoTimePoints(7))
        ));
        let neg = MyeSeries::new("x", "dollars")
            .with_published(1, 2000, &[1.0, 2.0, 3.0])
            .unwrap()
            .with_published(3, 2002, &[-1.0])
            .unwrap();
        assert!(matches!(
            nsr(&neg, 3, 2002, LogBase::Ten),
            Err(Error::Domain(_))
        ));
    }

    proptest! {
        #[test]
        fn zero_iff_equal_to_mean_and_scale_free(v in prop::collection::vec(1.0f64..1e5, 5..9), scale in 0.01f64..100.0, bump in 0.5f64..2.0) {
            let n = v.len() as i32;
            let mean3 = (v[v.len()-1] + v[v.len()-2] + v[v.len()-3]) / 3.0;
            let t = 2000 + n - 1;
            let s = MyeSeries::new("x", "dollars").with_published(1, 2000, &v).unwrap()
                .with_published(3, t, &[mean3]).unwrap();
            prop_assert!(nsr(&s, 3, t, LogBase::Ten).unwrap().abs() < 1e-12);

            let bumped = MyeSeries::new("x", "dollars").with_published(1, 2000, &v).unwrap()
                .with_published(3, t, &[mean3 * bump]).unwrap();
            let base = nsr(&bumped, 3, t, LogBase::Ten).unwrap();
            let scaled_v: Vec<f64> = v.iter().map(|x| x * scale).collect();
            let scaled = MyeSeries::new("x", "dollars").with_published(1, 2000, &scaled_v).unwrap()
                .with_published(3, t, &[mean3 * bump * scale]).unwrap();
            prop_assert!((nsr(&scaled, 3, t, LogBase::Ten).unwrap() - base).abs() < 1e-9);
        }
    }
}
