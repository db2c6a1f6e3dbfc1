//! Multi-year estimate series: one variable for one region, indexed by
//! period length and end year (the last year that entered the sample).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 6] = [
    "variable",
    "unit",
    "period",
    "end_year",
    "value",
    "provenance",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Published,
    Imputed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Published => "published",
            Provenance::Imputed => "imputed",
        })
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "published" => Ok(Provenance::Published),
            "imputed" => Ok(Provenance::Imputed),
            other => Err(Error::Parse(format!("unknown provenance {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservedValue {
    pub value: f64,
    pub provenance: Provenance,
}

impl ObservedValue {
    pub fn published(value: f64) -> Self {
        ObservedValue {
            value,
            provenance: Provenance::Published,
        }
    }

    pub fn imputed(value: f64) -> Self {
        ObservedValue {
            value,
            provenance: Provenance::Imputed,
        }
    }
}

/// Two-digit years are read as 20yy; everything else is taken as given.
pub fn normalize_year(year: i32) -> i32 {
    if (0..100).contains(&year) {
        2000 + year
    } else {
        year
    }
}

/// Annual series of `k`-year estimates for one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct MyeSeries {
    name: String,
    unit: String,
    observations: BTreeMap<(u32, i32), ObservedValue>,
}

impl MyeSeries {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        MyeSeries {
            name: name.into(),
            unit: unit.into(),
            observations: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn insert(&mut self, period: u32, year: i32, obs: ObservedValue) -> Result<()> {
        if period == 0 {
            return Err(Error::UnknownPeriod {
                line: 0,
                value: "0".into(),
            });
        }
        let year = normalize_year(year);
        if self.observations.contains_key(&(period, year)) {
            return Err(Error::DuplicateKey { period, year });
        }
        self.observations.insert((period, year), obs);
        Ok(())
    }

    /// Inserts a whole run of published values with consecutive end years.
    pub fn with_published(mut self, period: u32, first_year: i32, values: &[f64]) -> Result<Self> {
        let first_year = normalize_year(first_year);
        for (i, &v) in values.iter().enumerate() {
            self.insert(period, first_year + i as i32, ObservedValue::published(v))?;
        }
        Ok(self)
    }

    pub fn get(&self, period: u32, year: i32) -> Option<&ObservedValue> {
        self.observations.get(&(period, year))
    }

    pub fn value(&self, period: u32, year: i32) -> Option<f64> {
        self.get(period, year).map(|o| o.value)
    }

    pub fn observations(&self) -> &BTreeMap<(u32, i32), ObservedValue> {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn periods(&self) -> BTreeSet<u32> {
        self.observations.keys().map(|&(k, _)| k).collect()
    }

    pub fn has_period(&self, period: u32) -> bool {
        self.observations.keys().any(|&(k, _)| k == period)
    }

    /// End years available for `period`, ascending.
    pub fn years(&self, period: u32) -> impl Iterator<Item = i32> + '_ {
        self.observations
            .range((period, i32::MIN)..=(period, i32::MAX))
            .map(|(&(_, t), _)| t)
    }

    pub fn count(&self, period: u32, provenance: Provenance) -> usize {
        self.observations
            .iter()
            .filter(|(&(k, _), o)| k == period && o.provenance == provenance)
            .count()
    }

    /// Values at `t, t-1, ..., t-len+1` (most recent first).
    pub fn window(&self, period: u32, t: i32, len: usize) -> Result<Vec<f64>> {
        let mut values = Vec::with_capacity(len);
        let mut missing = Vec::new();
        for lag in 0..len as i32 {
            match self.value(period, t - lag) {
                Some(v) => values.push(v),
                None => missing.push((period, t - lag)),
            }
        }
        if missing.is_empty() {
            Ok(values)
        } else {
            Err(Error::MissingObservations(missing))
        }
    }

    /// Mean of the `k` most recent 1y values ending at `t`.
    pub fn sma_of_base(&self, k: u32, t: i32) -> Result<f64> {
        if k == 0 {
            return Err(Error::ZeroOrder);
        }
        let w = self.window(1, t, k as usize)?;
        Ok(w.iter().sum::<f64>() / f64::from(k))
    }

    /// Fills `targets` from published values under a random walk with drift:
    /// an interior gap is interpolated along the line through its published
    /// neighbours (the midpoint for a one-year gap); a trailing gap `h` years
    /// past the last published value is extrapolated with the drift of the
    /// contiguous published run ending there. Published values never move.
    pub fn impute_random_walk(&self, targets: &[(u32, i32)]) -> Result<MyeSeries> {
        let mut out = self.clone();
        let mut seen = BTreeSet::new();
        for &(k, t) in targets {
            let t = normalize_year(t);
            if self.get(k, t).is_some() || !seen.insert((k, t)) {
                return Err(Error::AlreadyPresent { period: k, year: t });
            }
            let value = self.random_walk_value(k, t)?;
            out.observations
                .insert((k, t), ObservedValue::imputed(value));
        }
        Ok(out)
    }

    fn published(&self, k: u32, t: i32) -> Option<f64> {
        self.get(k, t)
            .filter(|o| o.provenance == Provenance::Published)
            .map(|o| o.value)
    }

    fn random_walk_value(&self, k: u32, t: i32) -> Result<f64> {
        let published: Vec<(i32, f64)> = self
            .years(k)
            .filter_map(|y| self.published(k, y).map(|v| (y, v)))
            .collect();
        let before = published.iter().rev().find(|(y, _)| *y < t).copied();
        let after = published.iter().find(|(y, _)| *y > t).copied();
        let fail = |reason: &str| Error::InsufficientAnchors {
            period: k,
            year: t,
            reason: reason.to_string(),
        };
        match (before, after) {
            (Some((y0, v0)), Some((y1, v1))) => {
                let frac = f64::from(t - y0) / f64::from(y1 - y0);
                if frac == 0.5 {
                    Ok(0.5 * (v0 + v1))
                } else {
                    Ok(v0 + frac * (v1 - v0))
                }
            }
            (Some((last, v_last)), None) => {
                let mut anchor = last;
                while self.published(k, anchor - 1).is_some() {
                    anchor -= 1;
                }
                if anchor == last {
                    return Err(fail("trailing gap needs two consecutive published values"));
                }
                let v_anchor = self.published(k, anchor).expect("anchor is published");
                let h = f64::from(t - last);
                let span = f64::from(last - anchor);
                Ok(v_last + (h / span) * (v_last - v_anchor))
            }
            (None, Some(_)) => Err(fail("leading gap has no earlier published value")),
            (None, None) => Err(fail("no published values for this period")),
        }
    }

    /// Decimals used for display: counts and money to integers, everything else to 2.
    pub fn display_decimals(&self) -> usize {
        display_decimals_for_unit(&self.unit)
    }

    pub fn format_value(&self, v: f64) -> String {
        format_rounded(v, self.display_decimals())
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<MyeSeries> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.is_empty() {
            return Err(Error::Empty);
        }
        let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
        let mut idx = [0usize; 5];
        for (slot, name) in idx.iter_mut().zip(&CSV_HEADER[..5]) {
            *slot = col(name).ok_or_else(|| Error::MalformedRow {
                line: 1,
                message: format!("header is missing column {name:?}"),
            })?;
        }
        let prov_idx = col("provenance");
        let [vi, ui, pi, yi, vali] = idx;

        let mut series: Option<MyeSeries> = None;
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let field = |i: usize| -> Result<&str> {
                rec.get(i).ok_or_else(|| Error::MalformedRow {
                    line,
                    message: format!("expected {} fields, found {}", headers.len(), rec.len()),
                })
            };
            let malformed = |message: String| Error::MalformedRow { line, message };

            let (name, unit) = (field(vi)?, field(ui)?);
            let period_raw = field(pi)?;
            let period: u32 = match period_raw.parse() {
                Ok(k) if k >= 1 => k,
                _ => {
                    return Err(Error::UnknownPeriod {
                        line,
                        value: period_raw.to_string(),
                    })
                }
            };
            let year: i32 = field(yi)?
                .parse()
                .map_err(|_| malformed(format!("invalid end_year {:?}", rec.get(yi))))?;
            let value: f64 = field(vali)?
                .parse()
                .map_err(|_| malformed(format!("invalid value {:?}", rec.get(vali))))?;
            if !value.is_finite() {
                return Err(malformed("value must be finite".into()));
            }
            let provenance = match prov_idx.and_then(|i| rec.get(i)) {
                Some(s) => s.parse().map_err(|e: Error| malformed(e.to_string()))?,
                None => Provenance::Published,
            };

            let s = series.get_or_insert_with(|| MyeSeries::new(name, unit));
            if s.name != name || s.unit != unit {
                return Err(Error::SeriesMismatch(format!(
                    "line {line}: expected variable {:?} in {:?}, found {name:?} in {unit:?}",
                    s.name, s.unit
                )));
            }
            s.insert(period, year, ObservedValue { value, provenance })?;
        }
        series.ok_or(Error::Empty)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<MyeSeries> {
        MyeSeries::from_csv_reader(File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for (&(k, t), obs) in &self.observations {
            w.write_record([
                self.name.as_str(),
                self.unit.as_str(),
                &k.to_string(),
                &t.to_string(),
                &format_full(obs.value),
                &obs.provenance.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_full(v: f64) -> String {
    format!("{v}")
}

pub fn display_decimals_for_unit(unit: &str) -> usize {
    const INTEGER_UNITS: [&str; 8] = [
        "dollars",
        "dollar",
        "usd",
        "persons",
        "people",
        "count",
        "households",
        "housing units",
    ];
    if INTEGER_UNITS.contains(&unit.trim().to_ascii_lowercase().as_str()) {
        0
    } else {
        2
    }
}

/// Rounds half away from zero at `decimals` places, then formats.
pub fn format_rounded(v: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let rounded = (v * scale).round() / scale;
    // avoid "-0"
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded:.decimals$}")
}

/// Region `a` has every period length; region `b` may lack the 1y series.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionPair {
    pub a: MyeSeries,
    pub b: MyeSeries,
}

impl RegionPair {
    pub fn new(a: MyeSeries, b: MyeSeries) -> Result<Self> {
        if a.name != b.name || a.unit != b.unit {
            return Err(Error::SeriesMismatch(format!(
                "regions differ: {:?} in {:?} vs {:?} in {:?}",
                a.name, a.unit, b.name, b.unit
            )));
        }
        Ok(RegionPair { a, b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn income() -> MyeSeries {
        crate::fixtures::income()
    }

    #[test]
    fn sma_of_base_examples() {
        let s = income();
        let v = s.sma_of_base(3, 2002).unwrap();
        assert!((v - (35223.0 + 35615.0 + 37638.0) / 3.0).abs() < 1e-9);
        assert_eq!(s.sma_of_base(1, 2005).unwrap(), 41521.0);
        let age = crate::fixtures::age();
        assert!((age.sma_of_base(5, 2004).unwrap() - 37.0).abs() < 1e-12);
        match s.sma_of_base(3, 2001) {
            Err(Error::MissingObservations(m)) => assert_eq!(m, vec![(1, 1999)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn imputation_table_values() {
        let s = income()
            .impute_random_walk(&[(3, 2006), (5, 2006), (5, 2007)])
            .unwrap();
        assert_eq!(s.value(3, 2006), Some(42395.0));
        assert_eq!(s.value(5, 2006), Some(41327.5));
        assert_eq!(s.format_value(41327.5), "41328");
        assert_eq!(s.value(5, 2007), Some(42600.0));
        assert_eq!(s.get(5, 2007).unwrap().provenance, Provenance::Imputed);
        assert_eq!(s.count(5, Provenance::Published), 3);

        let d = crate::fixtures::divorce()
            .impute_random_walk(&[(5, 7)])
            .unwrap();
        assert_eq!(d.value(5, 2007), Some(16417.0));
        let a = crate::fixtures::age()
            .impute_random_walk(&[(3, 2006)])
            .unwrap();
        assert_eq!(a.format_value(a.value(3, 2006).unwrap()), "37.35");
    }

    #[test]
    fn imputation_errors() {
        let s = income();
        assert!(matches!(
            s.impute_random_walk(&[(3, 2005)]),
            Err(Error::AlreadyPresent {
                period: 3,
                year: 2005
            })
        ));
        let filled = s.impute_random_walk(&[(3, 2006)]).unwrap();
        assert!(matches!(
            filled.impute_random_walk(&[(3, 2006)]),
            Err(Error::AlreadyPresent { .. })
        ));
        assert!(matches!(
            s.impute_random_walk(&[(3, 2000)]),
            Err(Error::InsufficientAnchors { .. })
        ));
        assert!(matches!(
            s.impute_random_walk(&[(7, 2007)]),
            Err(Error::InsufficientAnchors { .. })
        ));
        let single = MyeSeries::new("x", "years")
            .with_published(3, 2005, &[1.0])
            .unwrap();
        assert!(matches!(
            single.impute_random_walk(&[(3, 2006)]),
            Err(Error::InsufficientAnchors { .. })
        ));
    }

    #[test]
    fn csv_parsing_and_errors() {
        let s = MyeSeries::from_csv_reader(crate::fixtures::INCOME_CSV.as_bytes()).unwrap();
        assert_eq!(s.count(1, Provenance::Published), 8);
        assert_eq!(s.count(3, Provenance::Published), 6);
        assert_eq!(s.count(5, Provenance::Published), 3);
        assert_eq!(s.value(1, 2000), Some(35223.0));
        assert_eq!(s.value(1, 2007), Some(43546.0));

        let header = "variable,unit,period,end_year,value,provenance\n";
        assert!(matches!(
            MyeSeries::from_csv_reader(header.as_bytes()),
            Err(Error::Empty)
        ));
        assert!(matches!(
            MyeSeries::from_csv_reader("".as_bytes()),
            Err(Error::Empty)
        ));
        let dup =
            format!("{header}inc,dollars,3,2004,38739,published\ninc,dollars,3,2004,38739,\n");
        assert!(matches!(
            MyeSeries::from_csv_reader(dup.as_bytes()),
            Err(Error::DuplicateKey {
                period: 3,
                year: 2004
            })
        ));
        let bad = format!("{header}inc,dollars,3,2004,38739\ninc,dollars,3,2005,abc\n");
        match MyeSeries::from_csv_reader(bad.as_bytes()) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let unknown = format!("{header}inc,dollars,0,2004,1,published\n");
        assert!(matches!(
            MyeSeries::from_csv_reader(unknown.as_bytes()),
            Err(Error::UnknownPeriod { line: 2, .. })
        ));
        let short_year = "variable,unit,period,end_year,value\ninc,dollars,1,07,5\n";
        let s = MyeSeries::from_csv_reader(short_year.as_bytes()).unwrap();
        assert_eq!(s.get(1, 2007), Some(&ObservedValue::published(5.0)));
        let mixed = format!("{header}inc,dollars,1,2004,1,\nage,years,1,2005,1,\n");
        assert!(matches!(
            MyeSeries::from_csv_reader(mixed.as_bytes()),
            Err(Error::SeriesMismatch(_))
        ));
    }

    #[test]
    fn rounding_rule() {
        assert_eq!(format_rounded(17370.5, 0), "17371");
        assert_eq!(format_rounded(-2.5, 0), "-3");
        assert_eq!(format_rounded(-0.0001, 2), "0.00");
        assert_eq!(format_rounded(37.593333, 2), "37.59");
        assert_eq!(display_decimals_for_unit("Dollars"), 0);
        assert_eq!(display_decimals_for_unit("years"), 2);
    }

    #[test]
    fn region_pair_requires_matching_variable() {
        let a = income();
        let b = crate::fixtures::age();
        assert!(RegionPair::new(a.clone(), b).is_err());
        assert!(RegionPair::new(a.clone(), a).is_ok());
    }

    proptest! {
        #[test]
        fn csv_roundtrip(values in prop::collection::vec((1u32..6, 1990i32..2030, -1e9f64..1e9, any::<bool>()), 1..30)) {
            let mut s = MyeSeries::new("var", "dollars");
            for (k, t, v, imputed) in values {
                let obs = if imputed { ObservedValue::imputed(v) } else { ObservedValue::published(v) };
                let _ = s.insert(k, t, obs);
            }
            let text = s.to_csv_string().unwrap();
            let back = MyeSeries::from_csv_reader(text.as_bytes()).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn constant_series_imputes_constant(c in -1e6f64..1e6, gap in 2003i32..2007) {
            let s = MyeSeries::new("c", "years").with_published(3, 2000, &[c; 8]).unwrap();
            let mut holed = MyeSeries::new("c", "years");
            for t in (2000..2008).filter(|&t| t != gap) {
                holed.insert(3, t, ObservedValue::published(c)).unwrap();
            }
            let filled = holed.impute_random_walk(&[(3, gap)]).unwrap();
            prop_assert_eq!(filled.value(3, gap), Some(c));
            let ext = s.impute_random_walk(&[(3, 2008), (3, 2010)]).unwrap();
            prop_assert_eq!(ext.value(3, 2008), Some(c));
            prop_assert_eq!(ext.value(3, 2010), Some(c));
        }
    }
}
