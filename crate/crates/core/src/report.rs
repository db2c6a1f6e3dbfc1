//! JSON report assembly. Keys are sorted at every level so output is
//! byte-stable.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::analysis::{ComparisonResult, SimulationSummary};
use crate::error::Result;
use crate::filterdesign::{FilterSet, VerificationReport};
use crate::myeseries::format_rounded;

pub fn sort_keys(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut sorted = Map::new();
            for (k, v) in entries {
                sorted.insert(k, sort_keys(v));
            }
            Value::Object(sorted)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = sort_keys(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&v)?)
}

pub fn filter_set_json(fs: &FilterSet, verification: &VerificationReport) -> Result<Value> {
    let rendered: Map<String, Value> = fs
        .filters()
        .iter()
        .map(|(k, p)| (k.to_string(), Value::String(p.render())))
        .collect();
    Ok(sort_keys(json!({
        "filter_set": serde_json::to_value(fs.to_doc())?,
        "rendered": rendered,
        "verification": {
            "passed": verification.passed(),
            "checks": serde_json::to_value(&verification.checks)?,
        },
    })))
}

/// Percent string at `decimals` places, e.g. `-13.7%`.
pub fn format_percent(fraction: f64, decimals: usize) -> String {
    format!("{}%", format_rounded(fraction * 100.0, decimals))
}

pub fn comparison_json(result: &ComparisonResult) -> Result<Value> {
    let mut v = serde_json::to_value(result)?;
    if let Value::Object(map) = &mut v {
        map.insert(
            "discrepancy_percent".into(),
            Value::String(format_percent(result.discrepancy, 1)),
        );
    }
    Ok(sort_keys(v))
}

pub fn simulation_json(summary: &SimulationSummary) -> Result<Value> {
    Ok(sort_keys(serde_json::to_value(summary)?))
}
