//! CSV tables with a provenance header line, plus a JSON mirror of each table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::BenchError;

pub const TOOL: &str = "pauliprop-bench";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// Non-finite values become empty cells.
    pub fn float(x: Option<f64>) -> Cell {
        match x {
            Some(v) if v.is_finite() => Cell::Float(v),
            _ => Cell::Empty,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e15)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Reproducibility header shared by every output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self, p: &Provenance) -> String {
        let mut out = format!("# {TOOL} {VERSION} config_hash={} seed={}\n", p.config_hash, p.seed);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self, p: &Provenance) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(map)
            })
            .collect();
        json!({
            "tool": TOOL,
            "version": VERSION,
            "config_hash": p.config_hash,
            "seed": p.seed,
            "columns": self.columns,
            "rows": rows,
        })
    }

    /// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str, p: &Provenance) -> Result<(PathBuf, PathBuf), BenchError> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&csv, self.to_csv(p))?;
        let text = serde_json::to_string_pretty(&self.to_json(p)).map_err(|e| BenchError::Io(e.to_string()))?;
        std::fs::write(&json, text + "\n")?;
        Ok((csv, json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.5e-7, 123456.0, 6.02e23, -1e-4, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(2.5e-7), "2.5e-7");
        assert_eq!(Cell::float(Some(f64::NAN)), Cell::Empty);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Int(1), Cell::Empty]);
        let p = Provenance {
            config_hash: "ab".into(),
            seed: 3,
        };
        let csv = t.to_csv(&p);
        assert_eq!(csv, format!("# {TOOL} {VERSION} config_hash=ab seed=3\na,b\n1,\n"));
        assert_eq!(t.to_json(&p)["rows"][0]["b"], Value::Null);
    }
}
