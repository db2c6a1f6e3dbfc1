use std::fs;
use std::io::Write;

use serde_json::{json, Value};

use mye_core::analysis::{compatibility, trend_estimates, CompatOptions};
use mye_core::report::{comparison_json, filter_set_json, simulation_json, sort_keys};
use mye_core::{
    compare, design_filters, reproduction, simulate_bias, verify_filter_set, ComparisonMode,
    ComparisonSpec, DesignSpec, FilterSet, MyeSeries, NoiseLevels, RegionPair, SimulationSpec,
    TrendPolynomial,
};

use crate::args::{
    Cli, Command, CompareArgs, CompatArgs, DesignOpts, Format, ImputeArgs, SimulateArgs,
    TrendsArgs, FORMAT_ENV,
};
use crate::text;
use crate::CliError;

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Design(a) => design(cli, &a.design),
        Command::Impute(a) => impute(cli, a),
        Command::Trends(a) => trends(cli, a),
        Command::Compat(a) => compat(cli, a),
        Command::Compare(a) => compare_cmd(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Demo => demo(cli),
    }
}

/// Explicit `--format` must be supported; `$MYE_FORMAT` is used only when it is.
fn resolve_format(cli: &Cli, allowed: &[Format], default: Format) -> CliResult<Format> {
    if let Some(f) = cli.format {
        return if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(format!(
                "format {f:?} is not available for this command (use one of {allowed:?})"
            )))
        };
    }
    let from_env = std::env::var(FORMAT_ENV)
        .ok()
        .and_then(|v| v.parse::<Format>().ok())
        .filter(|f| allowed.contains(f));
    Ok(from_env.unwrap_or(default))
}

fn emit(cli: &Cli, body: &str) -> CliResult<()> {
    let mut body = body.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.out {
        Some(path) => fs::write(path, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn emit_json(cli: &Cli, value: Value) -> CliResult<()> {
    emit(cli, &serde_json::to_string_pretty(&sort_keys(value))?)
}

fn design_spec(opts: &DesignOpts) -> CliResult<DesignSpec> {
    DesignSpec::new(opts.periods.iter().copied(), opts.degree)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn load(path: &std::path::Path) -> CliResult<MyeSeries> {
    MyeSeries::load_csv(path)
        .map_err(|e| CliError::Data(anyhow::Error::new(e).context(path.display().to_string())))
}

fn design(cli: &Cli, opts: &DesignOpts) -> CliResult<()> {
    let spec = design_spec(opts)?;
    let format = resolve_format(cli, &[Format::Json, Format::Text], Format::Json)?;
    let fs = design_filters(&spec)?;
    let report = verify_filter_set(&fs);
    match format {
        Format::Text => emit(cli, &text::filter_set(&fs, &report))?,
        _ => emit_json(cli, filter_set_json(&fs, &report)?)?,
    }
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Check(names.join("; ")))
    }
}

fn impute(cli: &Cli, a: &ImputeArgs) -> CliResult<()> {
    let format = resolve_format(cli, &[Format::Csv, Format::Json], Format::Csv)?;
    let filled = load(&a.input)?.impute_random_walk(&a.targets)?;
    match format {
        Format::Json => {
            let rows: Vec<Value> = filled
                .observations()
                .iter()
                .map(|(&(k, t), o)| {
                    json!({"period": k, "end_year": t, "value": o.value, "provenance": o.provenance})
                })
                .collect();
            emit_json(
                cli,
                json!({"variable": filled.name(), "unit": filled.unit(), "observations": rows}),
            )
        }
        _ => emit(cli, &filled.to_csv_string()?),
    }
}

fn trends(cli: &Cli, a: &TrendsArgs) -> CliResult<()> {
    let spec = design_spec(&a.design)?;
    let format = resolve_format(
        cli,
        &[Format::Json, Format::Csv, Format::Text],
        Format::Json,
    )?;
    let mut series = load(&a.input)?;
    if !a.impute.is_empty() {
        series = series.impute_random_walk(&a.impute)?;
    }
    let fs = design_filters(&spec)?;
    let t0 = mye_core::myeseries::normalize_year(a.t0);
    let te = trend_estimates(&series, &fs, t0)?;
    match format {
        Format::Csv => {
            let mut out = String::from("variable,period,end_year,trend\n");
            for (k, v) in &te.values {
                out.push_str(&format!("{},{k},{t0},{v}\n", series.name()));
            }
            emit(cli, &out)
        }
        Format::Text => emit(cli, &text::trends(&series, &te)),
        Format::Json => {
            let display: serde_json::Map<String, Value> = te
                .values
                .iter()
                .map(|(k, v)| (k.to_string(), Value::String(series.format_value(*v))))
                .collect();
            emit_json(
                cli,
                json!({
                    "variable": series.name(),
                    "t0": t0,
                    "degree": spec.degree(),
                    "periods": spec.periods(),
                    "values": te.values,
                    "display": display,
                    "first_year_used": te.first_year_used,
                }),
            )
        }
    }
}

fn compat(cli: &Cli, a: &CompatArgs) -> CliResult<()> {
    let format = resolve_format(
        cli,
        &[Format::Json, Format::Csv, Format::Text],
        Format::Json,
    )?;
    let series = load(&a.input)?;
    let report = compatibility(
        &series,
        &a.periods,
        CompatOptions::new(a.log_base, !a.exclude_imputed),
    )?;
    match format {
        Format::Csv => {
            let mut out = String::from("period,end_year,nsr\n");
            for (k, p) in &report.periods {
                for (t, v) in &p.nsr {
                    out.push_str(&format!("{k},{t},{v}\n"));
                }
            }
            emit(cli, &out)
        }
        Format::Text => emit(cli, &text::compat(&report)),
        Format::Json => {
            let mut v = serde_json::to_value(&report)?;
            let display: serde_json::Map<String, Value> = report
                .periods
                .iter()
                .map(|(k, p)| (k.to_string(), Value::String(format!("{:.3}", p.c))))
                .collect();
            v["c_display"] = Value::Object(display);
            emit_json(cli, v)
        }
    }
}

fn comparison_spec(
    mode: ComparisonMode,
    t0: i32,
    reference: Option<u32>,
    other: u32,
    pair: Option<&RegionPair>,
) -> CliResult<ComparisonSpec> {
    let usage = |e: mye_core::Error| CliError::Usage(e.to_string());
    match (mode, reference) {
        (ComparisonMode::Proper, None) => match pair {
            Some(p) => ComparisonSpec::proper_for(p, t0, other).map_err(usage),
            None => ComparisonSpec::proper(t0, 1, other).map_err(usage),
        },
        (ComparisonMode::Untimely, None) => ComparisonSpec::untimely(t0, other).map_err(usage),
        (_, r) => ComparisonSpec::new(mode, t0, r.unwrap_or(1), other).map_err(usage),
    }
}

fn compare_cmd(cli: &Cli, a: &CompareArgs) -> CliResult<()> {
    let format = resolve_format(cli, &[Format::Json, Format::Text], Format::Json)?;
    let spec_fs = design_spec(&a.design)?;
    let region_a = load(&a.a)?;
    let region_b = match &a.b {
        Some(p) => load(p)?,
        None => region_a.clone(),
    };
    let pair = RegionPair::new(region_a, region_b)?;
    let t0 = mye_core::myeseries::normalize_year(a.t0);
    let spec = comparison_spec(a.mode, t0, a.reference_period, a.other_period, Some(&pair))?;
    let fs = match spec.mode {
        ComparisonMode::Proper => Some(design_filters(&spec_fs)?),
        _ => None,
    };
    let result = compare(&pair, &spec, fs.as_ref())?;
    match format {
        Format::Text => emit(cli, &text::comparison(&pair.a, &result)),
        _ => {
            let mut v = comparison_json(&result)?;
            v["variable"] = Value::String(pair.a.name().to_string());
            emit_json(cli, v)
        }
    }
}

/// `0.5,3:1` → default 0.5, period 3 at 1.
fn parse_noise(s: &str) -> CliResult<NoiseLevels> {
    let bad = || CliError::Usage(format!("invalid --noise value {s:?}"));
    let mut levels = NoiseLevels::uniform(0.0);
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tok.split_once(':') {
            Some((k, sd)) => {
                let k: u32 = k.trim().parse().map_err(|_| bad())?;
                let sd: f64 = sd.trim().parse().map_err(|_| bad())?;
                levels = levels.with(k, sd);
            }
            None => levels.default = tok.parse().map_err(|_| bad())?,
        }
    }
    Ok(levels)
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> CliResult<()> {
    let format = resolve_format(cli, &[Format::Json, Format::Text], Format::Json)?;
    let trend = TrendPolynomial::new(a.trend.clone());
    let comparison = comparison_spec(a.mode, a.t0, a.reference_period, a.other_period, None)?;
    let fs: Option<FilterSet> = match comparison.mode {
        ComparisonMode::Proper => {
            let degree = a.degree.unwrap_or_else(|| trend.degree());
            let spec = DesignSpec::new(a.periods.iter().copied(), degree)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Some(design_filters(&spec)?)
        }
        _ => None,
    };
    let spec = SimulationSpec {
        trend,
        noise_sd: parse_noise(&a.noise)?,
        comparison,
        replicates: a.replicates,
        seed: a.seed,
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let summary = simulate_bias(&spec, fs.as_ref())?;
    match format {
        Format::Text => emit(cli, &text::simulation(&summary)),
        _ => emit_json(cli, simulation_json(&summary)?),
    }
}

fn demo(cli: &Cli) -> CliResult<()> {
    let format = resolve_format(cli, &[Format::Text, Format::Json], Format::Text)?;
    let rep = reproduction::reproduce()?;
    match format {
        Format::Json => emit_json(
            cli,
            json!({"passed": rep.passed(), "rows": serde_json::to_value(&rep.rows)?}),
        )?,
        _ => emit(cli, &text::reproduction(&rep))?,
    }
    if rep.passed() {
        Ok(())
    } else {
        let n = rep.rows.iter().filter(|r| !r.passed).count();
        Err(CliError::Check(format!(
            "{n} table values did not reproduce"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_spec() {
        let n = parse_noise("0.5,3:1").unwrap();
        assert_eq!((n.sd(1), n.sd(3), n.sd(5)), (0.5, 1.0, 0.5));
        assert_eq!(parse_noise("0").unwrap().sd(3), 0.0);
        assert!(parse_noise("x").is_err());
        assert!(parse_noise("3:").is_err());
    }
}
