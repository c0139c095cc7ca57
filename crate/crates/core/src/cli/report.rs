// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::metrics::{MetricReport, Stat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Markdown,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

/// One table cell. Numbers carry their display precision so that every
/// format shows the same digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number { value: f64, decimals: usize },
    Integer(i64),
    Na,
}

impl Cell {
    pub fn percent(v: Option<f64>) -> Cell {
        Cell::fixed(v, 2)
    }

    pub fn fixed(v: Option<f64>, decimals: usize) -> Cell {
        match v {
            Some(value) if value.is_finite() => Cell::Number { value, decimals },
            _ => Cell::Na,
        }
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn display(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number { value, decimals } => fixed(*value, *decimals),
            Cell::Integer(i) => i.to_string(),
            Cell::Na => "NA".to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Number { value, decimals } => {
                let rounded: f64 = fixed(*value, *decimals).parse().expect("formatted float");
                serde_json::Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
            }
            Cell::Integer(i) => Value::from(*i),
            Cell::Na => Value::String("NA".to_string()),
        }
    }
}

fn fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    // Avoid "-0.00".
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// A rendered result: a table plus the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Map<String, Value>,
}

impl ReportDocument {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> ReportDocument {
        let mut metadata = Map::new();
        metadata.insert("tool".into(), Value::from("molbench"));
        metadata.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        ReportDocument {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("metadata serializes");
        self.metadata.insert(key.to_string(), v);
    }

    /// Metric rows of one run: `metric, mean, std`, prefixed by `run` when
    /// `run` is given.
    pub fn push_metrics(&mut self, report: &MetricReport, run: Option<usize>) {
        for (m, stat) in report.rows() {
            let mut row = Vec::new();
            if let Some(r) = run {
                row.push(Cell::Integer(r as i64));
            }
            row.push(Cell::text(m.label()));
            row.extend(stat_cells(stat));
            self.push(row);
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
            Format::Markdown => self.markdown(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {}", compact(v));
        }
        let line = |cells: Vec<String>| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
        out.push_str(&line(self.columns.clone()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row.iter().map(Cell::display).collect()));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("title".into(), Value::from(self.title.clone()));
        doc.insert("columns".into(), Value::from(self.columns.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        doc.insert("metadata".into(), Value::Object(self.metadata.clone()));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
        s.push('\n');
        s
    }

    fn markdown(&self) -> String {
        let mut out = format!("## {}\n\n", self.title);
        let cells: Vec<Vec<String>> =
            self.rows.iter().map(|r| r.iter().map(|c| md_escape(&c.display())).collect()).collect();
        let _ = writeln!(out, "| {} |", self.columns.join(" | "));
        let align: Vec<&str> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let numeric =
                    self.rows.iter().all(|r| matches!(r[i], Cell::Number { .. } | Cell::Integer(_) | Cell::Na));
                if numeric && !self.rows.is_empty() {
                    "---:"
                } else {
                    "---"
                }
            })
            .collect();
        let _ = writeln!(out, "|{}|", align.join("|"));
        for row in cells {
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        out.push_str("\n### Metadata\n\n");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "- **{k}**: `{}`", compact(v));
        }
        out
    }
}

/// Mean and std cells; a missing std renders as `NA`.
pub fn stat_cells(stat: Option<Stat>) -> [Cell; 2] {
    [Cell::percent(stat.map(|s| s.mean)), Cell::percent(stat.and_then(|s| s.std))]
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> ReportDocument {
        let mut d = ReportDocument::new("t", &["metric", "mean", "std"]);
        d.push(vec![Cell::text("Validity"), Cell::percent(Some(99.995)), Cell::percent(Some(0.5))]);
        d.push(vec![Cell::text("Reconstruction"), Cell::Na, Cell::percent(None)]);
        d.meta("seed", 7);
        d
    }

    #[test]
    fn na_is_literal_in_every_format() {
        assert!(doc().render(Format::Csv).contains("Reconstruction,NA,NA"));
        assert!(doc().render(Format::Markdown).contains("| Reconstruction | NA | NA |"));
        let j: Value = serde_json::from_str(&doc().render(Format::Json)).unwrap();
        assert_eq!(j["rows"][1]["mean"], "NA");
        assert_eq!(j["rows"][1]["std"], "NA");
    }

    #[test]
    fn same_digits_in_every_format() {
        assert!(doc().render(Format::Csv).contains("Validity,100.00,0.50"));
        assert!(doc().render(Format::Markdown).contains("| Validity | 100.00 | 0.50 |"));
        let j: Value = serde_json::from_str(&doc().render(Format::Json)).unwrap();
        assert_eq!(j["rows"][0]["mean"], 100.0);
        assert_eq!(j["rows"][0]["std"], 0.5);
        assert_eq!(j["metadata"]["seed"], 7);
    }

    #[test]
    fn negative_zero_is_printed_plainly() {
        assert_eq!(fixed(-0.001, 2), "0.00");
        assert_eq!(fixed(-1.5, 1), "-1.5");
    }

    #[test]
    fn metadata_in_csv_comments() {
        assert!(doc().render(Format::Csv).starts_with("# seed: 7\n# tool: molbench\n"));
    }
}
