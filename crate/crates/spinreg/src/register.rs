//! Register files and bundled datasets.
//!
//! A register file is CSV with header `label,A_kHz,B_kHz`, optionally preceded by
//! `# key=value` lines for `larmor_kHz`, `s0` and `s1`.

use crate::error::{invalid, Error, Result};
use crate::spin_model::{Electron, NuclearSpin};
use serde::Deserialize;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub struct RegisterRow {
    pub label: String,
    pub a_khz: f64,
    pub b_khz: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegisterFile {
    pub rows: Vec<RegisterRow>,
    pub larmor_khz: Option<f64>,
    pub s0: Option<f64>,
    pub s1: Option<f64>,
}

#[derive(Deserialize)]
struct Row {
    label: String,
    #[serde(rename = "A_kHz")]
    a: f64,
    #[serde(rename = "B_kHz")]
    b: f64,
}

const DATASETS: [(&str, &str); 7] = [
    ("nv27", include_str!("../data/nv27.csv")),
    ("rand-cpmg-k1", include_str!("../data/rand-cpmg-k1.csv")),
    ("rand-cpmg-k2", include_str!("../data/rand-cpmg-k2.csv")),
    ("rand-udd3-k1", include_str!("../data/rand-udd3-k1.csv")),
    ("rand-udd3-k3", include_str!("../data/rand-udd3-k3.csv")),
    ("rand-udd4-k1", include_str!("../data/rand-udd4-k1.csv")),
    ("rand-udd4-k2", include_str!("../data/rand-udd4-k2.csv")),
];

/// Names of the bundled datasets.
pub fn dataset_names() -> Vec<&'static str> {
    DATASETS.iter().map(|d| d.0).collect()
}

/// A bundled dataset by name.
pub fn dataset(name: &str) -> Result<RegisterFile> {
    let text = DATASETS
        .iter()
        .find(|d| d.0 == name)
        .map(|d| d.1)
        .ok_or_else(|| Error::InvalidInput(format!("unknown dataset '{name}'")))?;
    RegisterFile::parse(text)
}

impl RegisterFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = RegisterFile::default();
        let mut skipped = 0;
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            let Some(meta) = t.strip_prefix('#') else {
                if t.is_empty() {
                    skipped = i + 1;
                    continue;
                }
                break;
            };
            skipped = i + 1;
            let Some((k, v)) = meta.split_once('=') else {
                continue;
            };
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("metadata value '{}' is not a number", v.trim()),
            })?;
            match k.trim() {
                "larmor_kHz" => out.larmor_khz = Some(v),
                "s0" => out.s0 = Some(v),
                "s1" => out.s1 = Some(v),
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("unknown metadata key '{other}'"),
                    })
                }
            }
        }
        let body: String = text
            .lines()
            .skip(skipped)
            .map(|l| format!("{l}\n"))
            .collect();
        if body.trim().is_empty() {
            return Ok(out);
        }
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(body.as_bytes());
        let mut seen = HashSet::new();
        for rec in rdr.deserialize::<Row>() {
            let row = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize) + skipped;
                Error::Parse {
                    line,
                    message: e.to_string(),
                }
            })?;
            let line = skipped + seen.len() + 2;
            if !(row.a.is_finite() && row.b.is_finite()) {
                return Err(Error::Parse {
                    line,
                    message: "non-finite coupling".into(),
                });
            }
            if !seen.insert(row.label.clone()) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate label '{}'", row.label),
                });
            }
            out.rows.push(RegisterRow {
                label: row.label,
                a_khz: row.a,
                b_khz: row.b,
            });
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("larmor_kHz", self.larmor_khz),
            ("s0", self.s0),
            ("s1", self.s1),
        ] {
            if let Some(v) = v {
                let _ = writeln!(s, "# {k}={v}");
            }
        }
        s.push_str("label,A_kHz,B_kHz\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{}", r.label, r.a_khz, r.b_khz);
        }
        s
    }

    /// Spins at the given Larmor frequency, falling back to the file's.
    pub fn spins(&self, larmor_khz: Option<f64>) -> Result<Vec<NuclearSpin>> {
        let Some(wl) = larmor_khz.or(self.larmor_khz) else {
            return invalid("Larmor frequency missing from file and flags");
        };
        self.rows
            .iter()
            .map(|r| NuclearSpin::from_khz(r.label.clone(), r.a_khz, r.b_khz, wl))
            .collect()
    }

    pub fn electron(&self, s0: Option<f64>, s1: Option<f64>) -> Result<Electron> {
        match (s0.or(self.s0), s1.or(self.s1)) {
            (Some(a), Some(b)) => Electron::new(a, b),
            _ => invalid("electron projections missing from file and flags"),
        }
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.rows
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| Error::InvalidInput(format!("no spin labelled '{label}'")))
    }
}
