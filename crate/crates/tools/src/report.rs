//! Run reports: a metrics map, optional tables and mesh attachments, the
//! effective configuration, and a wall-clock timestamp kept in one key so
//! that reports of identical runs differ only there.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::io::{read_text, to_canonical_json, write_text, IoError};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: Value,
    pub metrics: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tables: BTreeMap<String, Table>,
    /// Named OFF meshes.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attachments: BTreeMap<String, String>,
    pub timestamp: u64,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        Self {
            command: command.into(),
            passed: true,
            error: None,
            config,
            metrics: BTreeMap::new(),
            tables: BTreeMap::new(),
            attachments: BTreeMap::new(),
            timestamp: 0,
        }
    }

    pub fn metric(&mut self, name: &str, value: impl Into<Value>) -> &mut Self {
        self.metrics.insert(name.to_string(), value.into());
        self
    }

    /// Records a threshold check as a boolean metric and folds it into
    /// `passed`.
    pub fn check(&mut self, name: &str, ok: bool) -> bool {
        self.metrics.insert(name.to_string(), Value::Bool(ok));
        self.passed &= ok;
        ok
    }

    pub fn fail(&mut self, error: impl ToString) {
        self.passed = false;
        self.error = Some(error.to_string());
    }

    pub fn stamp(&mut self) {
        self.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    /// Metrics as `metric,value` rows, then each table after a `# name`
    /// marker row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => match n.as_f64() {
                Some(x) if !n.is_i64() && !n.is_u64() => format!("{x:.16e}"),
                _ => n.to_string(),
            },
            Value::Null => String::new(),
            other => other.to_string(),
        };
        let mut rows: Vec<Vec<String>> = vec![vec!["metric".into(), "value".into()]];
        rows.push(vec!["command".into(), self.command.clone()]);
        rows.push(vec!["passed".into(), self.passed.to_string()]);
        if let Some(e) = &self.error {
            rows.push(vec!["error".into(), e.clone()]);
        }
        for (k, v) in &self.metrics {
            rows.push(vec![k.clone(), cell(v)]);
        }
        for (name, t) in &self.tables {
            rows.push(vec![format!("# {name}")]);
            rows.push(t.columns.clone());
            for r in &t.rows {
                rows.push(r.iter().map(cell).collect());
            }
        }
        for r in rows {
            w.write_record(&r).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv writes UTF-8")
    }
}

pub fn write_report(path: &Path, report: &Report) -> Result<(), IoError> {
    write_text(path, &report.to_json())
}

pub fn parse_report(path: &Path) -> Result<Report, IoError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| IoError::schema("report", e.to_string()))
}

/// Float metric, `null` if not finite.
pub fn real(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_round_trip_and_csv() {
        let mut r = Report::new("demo test", json!({"tol": 1e-9}));
        r.metric("residual", real(1.0 / 3.0)).metric("count", 3);
        r.check("converged", true);
        let mut t = Table::new(&["R", "deviation"]);
        t.push(vec![real(1.0), real(2.5e-4)]);
        r.tables.insert("rows".into(), t);
        r.stamp();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
        let csv = r.to_csv();
        assert!(csv.contains("residual,3.3333333333333331e-1"));
        assert!(csv.contains("\n# rows\nR,deviation\n"));
    }
}
