//! Recomputes the bundled-county table (imputed cells, compatibility
//! measures, 2007 trend row, discrepancies) and checks each number against
//! its published value at the published precision. Discrepancies are
//! formed from the estimates as displayed (rounded to the series' display
//! precision), the way a reader of the printed table would form them.

use serde::Serialize;

use crate::analysis::{
    compare, compatibility, trend_estimates, ComparisonSpec, CompatOptions, LogBase,
};
use crate::error::Result;
use crate::filterdesign::{design_filters, DesignSpec};
use crate::fixtures;
use crate::myeseries::{format_rounded, MyeSeries, RegionPair};

pub const TREND_YEAR: i32 = 2007;

/// Relative slack for double rounding on top of the half-unit bound.
pub const DATA_RTOL: f64 = 1e-9;

/// True when `computed` rounds to `reference` at `decimals` places, allowing
/// the exact half-unit boundary.
pub fn within_printed(computed: f64, reference: f64, decimals: usize) -> bool {
    let half = 0.5 * 10f64.powi(-(decimals as i32));
    (computed - reference).abs() <= half + DATA_RTOL * reference.abs().max(1.0)
}

struct Published {
    label: &'static str,
    series: fn() -> MyeSeries,
    imputed: [f64; 3],
    compat: [f64; 2],
    trend: [f64; 3],
    /// inapt 3y, inapt 5y, proper 3y, proper 5y (percent, decimals)
    discrepancy: [(f64, usize); 4],
}

const PUBLISHED: [Published; 3] = [
    Published {
        label: "Income",
        series: fixtures::income,
        imputed: [42395.0, 41328.0, 42600.0],
        compat: [0.017, 0.020],
        trend: [43570.0, 45223.0, 45320.0],
        discrepancy: [(1.9, 1), (-2.2, 1), (3.8, 1), (4.0, 1)],
    },
    Published {
        label: "Divorce",
        series: fixtures::divorce,
        imputed: [17371.0, 16181.0, 16417.0],
        compat: [0.008, 0.042],
        trend: [19331.0, 19217.0, 16695.0],
        discrepancy: [(-13.7, 1), (-24.8, 1), (-0.59, 2), (-13.6, 1)],
    },
    Published {
        label: "Age",
        series: fixtures::age,
        imputed: [37.35, 37.45, 37.70],
        compat: [0.002, 0.004],
        trend: [37.59, 37.59, 38.25],
        discrepancy: [(-0.53, 2), (0.27, 2), (0.0, 0), (1.8, 1)],
    },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproductionRow {
    pub group: &'static str,
    pub variable: &'static str,
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    pub decimals: usize,
    pub passed: bool,
    /// For discrepancies: the value from unrounded estimates (the row itself
    /// is computed from estimates at display precision).
    pub full_precision: Option<f64>,
}

impl ReproductionRow {
    pub fn computed_display(&self) -> String {
        format_rounded(self.computed, self.decimals)
    }

    pub fn reference_display(&self) -> String {
        format!("{:.*}", self.decimals, self.reference)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Reproduction {
    pub rows: Vec<ReproductionRow>,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn group(&self, group: &str) -> impl Iterator<Item = &ReproductionRow> + '_ {
        let group = group.to_string();
        self.rows.iter().filter(move |r| r.group == group)
    }

    fn push(
        &mut self,
        group: &'static str,
        variable: &'static str,
        quantity: String,
        computed: f64,
        reference: f64,
        decimals: usize,
    ) {
        self.rows.push(ReproductionRow {
            group,
            variable,
            quantity,
            computed,
            reference,
            decimals,
            passed: within_printed(computed, reference, decimals),
            full_precision: None,
        });
    }
}

/// Runs the full pipeline on the bundled fixtures with the linear filter set.
pub fn reproduce() -> Result<Reproduction> {
    let fs = design_filters(&DesignSpec::new([1, 3, 5], 1)?)?;
    let mut out = Reproduction::default();
    for p in &PUBLISHED {
        let raw = (p.series)();
        let series = raw.impute_random_walk(&fixtures::IMPUTATION_TARGETS)?;
        let dp = series.display_decimals();

        for (&(k, t), &reference) in fixtures::IMPUTATION_TARGETS.iter().zip(&p.imputed) {
            let v = series.value(k, t).expect("imputed");
            out.push("imputation", p.label, format!("{k}y {t}"), v, reference, dp);
        }

        let compat = compatibility(&series, &[3, 5], CompatOptions::new(LogBase::Ten, true))?;
        for (k, &reference) in [3u32, 5].iter().zip(&p.compat) {
            let c = compat.c(*k).expect("period requested");
            out.push("compatibility", p.label, format!("C({k})"), c, reference, 3);
        }

        let trends = trend_estimates(&series, &fs, TREND_YEAR)?;
        for (k, &reference) in [1u32, 3, 5].iter().zip(&p.trend) {
            out.push(
                "trend",
                p.label,
                format!("{k}y trend"),
                trends.values[k],
                reference,
                dp,
            );
        }

        let pair = RegionPair::new(series.clone(), series)?;
        let specs = [
            ("inapt 1y vs 3y", ComparisonSpec::inapt(TREND_YEAR, 3)?),
            ("inapt 1y vs 5y", ComparisonSpec::inapt(TREND_YEAR, 5)?),
            (
                "proper 1y vs 3y",
                ComparisonSpec::proper_for(&pair, TREND_YEAR, 3)?,
            ),
            (
                "proper 1y vs 5y",
                ComparisonSpec::proper_for(&pair, TREND_YEAR, 5)?,
            ),
        ];
        for ((name, spec), &(reference, decimals)) in specs.iter().zip(&p.discrepancy) {
            let r = compare(&pair, spec, Some(&fs))?;
            let shown = r.at_display_precision(dp)?;
            out.push(
                "discrepancy",
                p.label,
                format!("{name} (%)"),
                shown.discrepancy_percent(),
                reference,
                decimals,
            );
            if let Some(row) = out.rows.last_mut() {
                row.full_precision = Some(r.discrepancy_percent());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_unit_boundary_is_inclusive() {
        assert!(within_printed(45319.5, 45320.0, 0));
        assert!(!within_printed(45319.4, 45320.0, 0));
        assert!(within_printed(0.00156, 0.002, 3));
        assert!(!within_printed(0.0026, 0.002, 3));
    }

    #[test]
    fn every_row_reproduces() {
        let rep = reproduce().unwrap();
        assert_eq!(rep.rows.len(), 36);
        for row in &rep.rows {
            assert!(row.passed, "{row:?}");
        }
    }
}
