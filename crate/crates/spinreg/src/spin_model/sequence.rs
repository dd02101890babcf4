//! π-pulse sequences: normalized interpulse spacings and a unit duration.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Sequence family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SequenceKind {
    /// `t/4 − π − t/2 − π − t/4`
    Cpmg,
    /// Uhrig sequence with `n` pulses; odd `n` is symmetrized.
    Udd(usize),
    /// Arbitrary spacings summing to one, even number of pulses.
    Custom(Vec<f64>),
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceKind::Cpmg => write!(f, "cpmg"),
            SequenceKind::Udd(n) => write!(f, "udd{n}"),
            SequenceKind::Custom(q) => write!(f, "custom({})", q.len()),
        }
    }
}

impl FromStr for SequenceKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "cpmg" {
            return Ok(SequenceKind::Cpmg);
        }
        if let Some(n) = lower.strip_prefix("udd") {
            return match n.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(SequenceKind::Udd(n)),
                _ => invalid(format!("bad UDD order in '{s}'")),
            };
        }
        invalid(format!("unknown sequence '{s}' (expected cpmg or uddN)"))
    }
}

/// One repetition unit of a pulse sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    spacings: Vec<f64>,
    unit_time: f64,
}

/// Raw Uhrig spacings `q_s = sin²(πs/(2n+2)) − sin²(π(s−1)/(2n+2))`, `s = 1..n+1`.
pub fn udd_spacings(n: usize) -> Vec<f64> {
    let denom = (2 * n + 2) as f64;
    (1..=n + 1)
        .map(|s| {
            let a = (PI * s as f64 / denom).sin();
            let b = (PI * (s - 1) as f64 / denom).sin();
            a * a - b * b
        })
        .collect()
}

/// Double an odd-pulse base so the electron returns to its initial branch.
fn symmetrize(q: &[f64]) -> Vec<f64> {
    let m = q.len();
    let mut out = Vec::with_capacity(2 * m - 1);
    out.extend(q[..m - 1].iter().map(|x| x / 2.0));
    out.push((q[m - 1] + q[0]) / 2.0);
    out.extend(q[1..].iter().map(|x| x / 2.0));
    out
}

impl PulseSequence {
    pub fn cpmg(unit_time: f64) -> Result<Self> {
        Self::custom(vec![0.25, 0.5, 0.25], unit_time)
    }

    pub fn udd(n: usize, unit_time: f64) -> Result<Self> {
        if n < 1 {
            return invalid("UDD order must be at least 1");
        }
        let q = udd_spacings(n);
        let q = if n % 2 == 1 { symmetrize(&q) } else { q };
        Self::custom(q, unit_time)
    }

    pub fn custom(spacings: Vec<f64>, unit_time: f64) -> Result<Self> {
        if !(unit_time > 0.0 && unit_time.is_finite()) {
            return invalid(format!("unit time must be positive, got {unit_time}"));
        }
        if spacings.is_empty() || spacings.iter().any(|q| !(*q >= 0.0) || !q.is_finite()) {
            return invalid("spacings must be non-negative and finite");
        }
        let sum: f64 = spacings.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return invalid(format!("spacings sum to {sum}, expected 1"));
        }
        if !(spacings.len() - 1).is_multiple_of(2) {
            return invalid("pulse count must be even");
        }
        Ok(Self {
            spacings,
            unit_time,
        })
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    pub fn unit_time(&self) -> f64 {
        self.unit_time
    }

    pub fn pulse_count(&self) -> usize {
        self.spacings.len() - 1
    }

    /// Same spacings at a different unit time.
    pub fn with_unit_time(&self, unit_time: f64) -> Result<Self> {
        Self::custom(self.spacings.clone(), unit_time)
    }
}

/// Build a sequence of the given family.
pub fn build_sequence(kind: &SequenceKind, unit_time: f64) -> Result<PulseSequence> {
    match kind {
        SequenceKind::Cpmg => PulseSequence::cpmg(unit_time),
        SequenceKind::Udd(n) => PulseSequence::udd(*n, unit_time),
        SequenceKind::Custom(q) => PulseSequence::custom(q.clone(), unit_time),
    }
}
