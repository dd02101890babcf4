//! Number formatting, tables and provenance headers.

use crate::designer::PhysicalConstants;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

/// Round to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Machine rendering: shortest form of the 15-digit value.
pub fn machine(x: f64) -> String {
    format!("{}", round15(x))
}

/// Human rendering with `digits` significant digits.
pub fn human(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn constants_hash(c: &PhysicalConstants) -> String {
    let json = serde_json::to_string(c).unwrap_or_default();
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub version: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub constants_sha256: String,
}

impl Provenance {
    pub fn new(args: &[String], seed: Option<u64>, consts: &PhysicalConstants) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            args: args.to_vec(),
            seed,
            constants_sha256: constants_hash(consts),
        }
    }

    pub fn comment(&self) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        format!(
            "# spinreg {} | args: {} | seed: {} | constants: {}\n",
            self.version,
            self.args.join(" "),
            seed,
            self.constants_sha256
        )
    }
}

/// Columns of machine values; rendered as CSV, JSON records or an aligned table.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Num(f64),
    Empty,
}

impl Cell {
    fn machine(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => machine(*x),
            Cell::Empty => String::new(),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Num(x) => human(*x, 5),
            Cell::Empty => "-".into(),
            other => other.machine(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Text(s) => s.clone().into(),
            Cell::Int(i) => (*i).into(),
            Cell::Num(x) => serde_json::Number::from_f64(round15(*x))
                .map_or(serde_json::Value::Null, Into::into),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn csv(&self, prov: &Provenance) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        let _ = w.write_record(&self.columns);
        for r in &self.rows {
            let _ = w.write_record(r.iter().map(Cell::machine));
        }
        let body = w
            .into_inner()
            .map(|b| String::from_utf8_lossy(&b).into_owned())
            .unwrap_or_default();
        format!("{}{}", prov.comment(), body)
    }

    pub fn records(&self) -> serde_json::Value {
        self.rows
            .iter()
            .map(|r| {
                self.columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.clone(), v.json()))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            })
            .collect::<Vec<serde_json::Value>>()
            .into()
    }

    pub fn json(&self, prov: &Provenance) -> String {
        let v = serde_json::json!({ "provenance": prov, "records": self.records() });
        serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
    }

    pub fn pretty(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::human).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([self.columns[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = line(&self.columns) + "\n";
        for r in &cells {
            out += &(line(r) + "\n");
        }
        out
    }
}
