//! Plain-text renderings. Percentages use one decimal place.

use std::fmt::Write;

use mye_core::analysis::{CompatibilityReport, TrendEstimates};
use mye_core::report::format_percent;
use mye_core::reproduction::Reproduction;
use mye_core::{ComparisonResult, FilterSet, MyeSeries, SimulationSummary, VerificationReport};

pub fn filter_set(fs: &FilterSet, report: &VerificationReport) -> String {
    let mut s = String::new();
    writeln!(s, "design: {}", fs.spec()).unwrap();
    writeln!(s, "phi(z) = {}", fs.phi()).unwrap();
    for (k, p) in fs.filters().iter().rev() {
        writeln!(s, "psi({k})(z) = {p}").unwrap();
    }
    writeln!(s, "common(z) = {}", fs.common()).unwrap();
    writeln!(s).unwrap();
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        writeln!(s, "[{status}] {} (residual {})", c.name, c.residual).unwrap();
    }
    s
}

pub fn trends(series: &MyeSeries, te: &TrendEstimates) -> String {
    let mut s = format!("{} trend estimates at {}\n", series.name(), te.at);
    for (k, v) in &te.values {
        writeln!(
            s,
            "  {k}y: {:>12}  (uses {}..={})",
            series.format_value(*v),
            te.first_year_used[k],
            te.at
        )
        .unwrap();
    }
    s
}

pub fn compat(report: &CompatibilityReport) -> String {
    let mut s = format!(
        "{} compatibility (log base {})\n",
        report.variable, report.options.base
    );
    for (k, p) in &report.periods {
        writeln!(s, "  C({k}) = {:.3}  (max at {})", p.c, p.argmax).unwrap();
        for (t, v) in &p.nsr {
            writeln!(s, "    {t}: {v:+.5}").unwrap();
        }
    }
    s
}

pub fn comparison(a: &MyeSeries, r: &ComparisonResult) -> String {
    format!(
        "{} {} comparison at {}: A {}y = {}, B {}y = {}, discrepancy {}\n",
        a.name(),
        r.spec.mode,
        r.spec.t0,
        r.spec.reference_period,
        a.format_value(r.value_a),
        r.spec.other_period,
        a.format_value(r.value_b),
        format_percent(r.discrepancy, 1)
    )
}

pub fn simulation(sm: &SimulationSummary) -> String {
    format!(
        "{} mode, {} replicates (seed {})\n  bias {:.6} (se {:.6}), expected {:.6}\n  noise variance A {:.6} (predicted {:.6}), B {:.6} (predicted {:.6})\n",
        sm.mode,
        sm.replicates,
        sm.seed,
        sm.bias,
        sm.standard_error,
        sm.expected_bias,
        sm.noise_variance_a,
        sm.predicted_noise_variance_a,
        sm.noise_variance_b,
        sm.predicted_noise_variance_b
    )
}

pub fn reproduction(rep: &Reproduction) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:<14} {:<8} {:<22} {:>12} {:>12}  status",
        "group", "variable", "quantity", "computed", "published"
    )
    .unwrap();
    for r in &rep.rows {
        writeln!(
            s,
            "{:<14} {:<8} {:<22} {:>12} {:>12}  {}",
            r.group,
            r.variable,
            r.quantity,
            r.computed_display(),
            r.reference_display(),
            if r.passed { "ok" } else { "MISMATCH" }
        )
        .unwrap();
    }
    let ok = rep.rows.iter().filter(|r| r.passed).count();
    writeln!(s, "\n{ok}/{} values reproduced", rep.rows.len()).unwrap();
    s
}
