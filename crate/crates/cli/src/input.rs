use std::path::Path;

use serde_json::Value;
use testspaces::metric::{apsp, MetricSpace, WeightedGraph};
use testspaces::rational::{self, Rational};

use crate::{CliError, OrFail};

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

/// Parses a JSON file, unwrapping the `result.graph` or `result.space` of a
/// document written by this tool.
pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let doc: Value =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    let inner = doc
        .get("result")
        .and_then(|r| r.get("graph").or_else(|| r.get("space")))
        .cloned();
    Ok(inner.unwrap_or(doc))
}

pub fn load_graph(path: &Path) -> Result<WeightedGraph, CliError> {
    WeightedGraph::from_json(&read_json(path)?).or_fail()
}

/// A metric space file, or a graph file whose shortest-path metric is used.
pub fn load_space(path: &Path) -> Result<MetricSpace, CliError> {
    let doc = read_json(path)?;
    if doc.get("edges").is_some() {
        apsp(&WeightedGraph::from_json(&doc).or_fail()?).or_fail()
    } else {
        MetricSpace::from_json(&doc).or_fail()
    }
}

fn parse_entry(s: &str) -> Option<Rational> {
    rational::parse(s)
        .ok()
        .or_else(|| s.trim().parse::<f64>().ok().and_then(rational::from_f64))
}

/// One row per point; entries are integers, `p/q`, decimals or floats.
pub fn load_vectors(path: &Path) -> Result<Vec<Vec<Rational>>, CliError> {
    let text = read(path)?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                parse_entry(s)
                    .ok_or_else(|| CliError::validation(format!("{}:{}: bad entry {s:?}", path.display(), k + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if let Some(w) = rows.first().map(Vec::len) {
        if let Some(bad) = rows.iter().position(|r| r.len() != w) {
            return Err(CliError::validation(format!(
                "{}: row {} has {} entries, expected {w}",
                path.display(),
                bad + 1,
                rows[bad].len()
            )));
        }
    }
    Ok(rows)
}

pub fn rows_to_csv<T>(rows: &[Vec<T>], fmt: impl Fn(&T) -> String) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&row.iter().map(&fmt).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
