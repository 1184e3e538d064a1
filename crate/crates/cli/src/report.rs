//! Tabular results with a self-describing header, written as CSV or JSON.

use serde_json::{json, Map, Value};
use std::fmt::Write as _;

use orientdecoh::units::CONSTANTS_VERSION;

pub const SCHEMA_VERSION: u32 = 1;

/// Column layout shared by every rate curve.
pub const RATE_COLUMNS: [&str; 4] = ["theta_rad", "rate", "rate_over_gamma", "quad_error"];

/// One labelled block of rows; `None` cells are written empty (CSV) or null (JSON).
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub label: String,
    pub rows: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub columns: Vec<String>,
    pub inputs: Vec<(String, String)>,
    pub grid: Vec<(String, String)>,
    /// Derived quantities and error summaries.
    pub results: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub blocks: Vec<Block>,
    /// Rows whose quadrature error exceeded the convergence tolerance.
    pub unconverged: usize,
}

impl Report {
    pub fn new(scenario: &str, columns: &[&str]) -> Self {
        Self {
            scenario: scenario.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            inputs: Vec::new(),
            grid: Vec::new(),
            results: Vec::new(),
            warnings: Vec::new(),
            blocks: Vec::new(),
            unconverged: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.push((key.to_string(), value.to_string()));
    }

    pub fn grid(&mut self, key: &str, value: impl ToString) {
        self.grid.push((key.to_string(), value.to_string()));
    }

    pub fn result(&mut self, key: &str, value: impl ToString) {
        self.results.push((key.to_string(), value.to_string()));
    }

    /// Largest value of `column` over all blocks.
    pub fn column_max(&self, column: &str) -> Option<f64> {
        let idx = self.columns.iter().position(|c| c == column)?;
        self.blocks
            .iter()
            .flat_map(|b| b.rows.iter())
            .filter_map(|r| r[idx])
            .reduce(f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# orientdecoh {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# schema_version: {SCHEMA_VERSION}");
        let _ = writeln!(out, "# scenario: {}", self.scenario);
        let _ = writeln!(out, "# constants: {CONSTANTS_VERSION}");
        let _ = writeln!(out, "# columns: {}", self.columns.join(","));
        for (prefix, items) in [("input", &self.inputs), ("grid", &self.grid), ("result", &self.results)] {
            for (k, v) in items {
                let _ = writeln!(out, "# {prefix}.{k}: {v}");
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for block in &self.blocks {
            let _ = writeln!(out, "# block: {}", block.label);
            for row in &block.rows {
                let cells: Vec<String> = row.iter().map(|c| c.map(fmt_number).unwrap_or_default()).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let pairs = |items: &[(String, String)]| -> Value {
            Value::Object(items.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
        };
        let blocks: Vec<Value> = self
            .blocks
            .iter()
            .map(|b| {
                let rows: Vec<Value> = b
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| (c.clone(), v.and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                json!({ "label": b.label, "rows": rows })
            })
            .collect();
        let doc = json!({
            "tool": format!("orientdecoh {}", env!("CARGO_PKG_VERSION")),
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "constants": CONSTANTS_VERSION,
            "columns": self.columns,
            "input": pairs(&self.inputs),
            "grid": pairs(&self.grid),
            "result": pairs(&self.results),
            "warnings": self.warnings,
            "blocks": blocks,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Shortest round-trip representation in scientific notation.
pub fn fmt_number(x: f64) -> String {
    format!("{x:e}")
}
