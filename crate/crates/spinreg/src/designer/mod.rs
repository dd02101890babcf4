//! Multi-spin gate synthesis on a nuclear register.

mod bath;
mod ensemble;
mod position;
mod search;

pub use bath::{gate_error_vs_bath, BathErrorRow, TangleBin};
pub use ensemble::{generate_random_ensemble, EnsembleSpec};
pub use position::{estimate_position, hyperfine_from_position, PhysicalConstants, Position};
pub use search::{
    find_common_iterations, minimize_unwanted_tangle, CommonIterations, UnwantedMinimum,
};

use crate::entanglement::scaled_nuclear_one_tangle;
use crate::error::{invalid, Result};
use crate::fidelity::{target_subspace_fidelity, RegisterPartition};
use crate::spin_model::{
    build_sequence, resonance_time, unit_propagator, ConditionalRotation, Electron, NuclearSpin,
    ResonanceVariant, SequenceKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Order in which feasible `(t, N)` points compete.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ranking {
    /// Target count, then mean target tangle, then shorter gate, then lower unwanted mean.
    MostTargets,
    /// Mean target tangle, then shorter gate, then lower unwanted mean.
    MeanTangle,
}

/// Selection thresholds and scan grid. Tangles are scaled by `2/9`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignConstraints {
    pub max_gate_time: f64,
    pub target_tangle_min: f64,
    pub unwanted_tangle_max: f64,
    pub unwanted_tangle_mean_max: f64,
    /// Half-width of the unit-time scan around the resonance (s).
    pub time_window: f64,
    pub time_step: f64,
    pub k_range: (u32, u32),
    pub n_max: u64,
    pub min_targets: usize,
    pub ranking: Ranking,
    pub sequence: SequenceKind,
    /// Golden-section refinement of the unit time after the grid scan.
    pub refine: bool,
}

impl Default for DesignConstraints {
    fn default() -> Self {
        Self {
            max_gate_time: 1.5e-3,
            target_tangle_min: 0.8,
            unwanted_tangle_max: 0.14,
            unwanted_tangle_mean_max: 0.1,
            time_window: 0.25e-6,
            time_step: 1e-9,
            k_range: (1, 5),
            n_max: 100_000,
            min_targets: 2,
            ranking: Ranking::MostTargets,
            sequence: SequenceKind::Cpmg,
            refine: true,
        }
    }
}

impl DesignConstraints {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.max_gate_time, self.time_window, self.time_step];
        if positive.iter().any(|x| !(*x > 0.0)) {
            return invalid("gate time, window and step must be positive");
        }
        if !(self.target_tangle_min > 0.0 && self.target_tangle_min <= 1.0) {
            return invalid("target tangle threshold must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.unwanted_tangle_max)
            || !(0.0..1.0).contains(&self.unwanted_tangle_mean_max)
        {
            return invalid("unwanted thresholds must lie in [0, 1)");
        }
        if self.k_range.0 < 1 || self.k_range.0 > self.k_range.1 {
            return invalid("resonance range must start at 1 or above and be non-empty");
        }
        if self.n_max < 1 || self.min_targets < 1 {
            return invalid("n_max and min_targets must be positive");
        }
        Ok(())
    }
}

/// A feasible multi-spin gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDesign {
    pub anchor: String,
    pub k: u32,
    pub unit_time: f64,
    pub iterations: u64,
    pub gate_time: f64,
    pub targets: Vec<String>,
    pub target_indices: Vec<usize>,
    /// Scaled one-tangles of the targets, in target order.
    pub target_tangles: Vec<f64>,
    pub unwanted: Vec<String>,
    /// Scaled one-tangles of every other spin, in register order.
    pub unwanted_tangles: Vec<f64>,
    /// Mean scaled target tangle.
    pub mean_target_tangle: f64,
    pub gate_error: f64,
}

impl GateDesign {
    /// Recompute tangles and error from `(unit_time, iterations)` alone.
    pub fn reevaluate(
        &self,
        register: &[NuclearSpin],
        electron: &Electron,
        kind: &SequenceKind,
    ) -> Result<GateDesign> {
        let rots = unit_rotations(register, electron, kind, self.unit_time)?;
        let tangles: Vec<f64> = rots
            .iter()
            .map(|r| scaled_nuclear_one_tangle(r, self.iterations))
            .collect();
        assemble(
            register,
            &rots,
            &tangles,
            &self.target_indices,
            self,
            self.unit_time,
        )
    }
}

fn unit_rotations(
    register: &[NuclearSpin],
    electron: &Electron,
    kind: &SequenceKind,
    t: f64,
) -> Result<Vec<ConditionalRotation>> {
    let seq = build_sequence(kind, t)?;
    Ok(register
        .iter()
        .map(|s| unit_propagator(&seq, s, electron))
        .collect())
}

/// A feasible grid point before the Kraus error is evaluated.
#[derive(Clone, Debug)]
struct Candidate {
    t: f64,
    n: u64,
    targets: Vec<usize>,
    tangles: Vec<f64>,
    mean_target: f64,
    mean_unwanted: f64,
}

fn classify(tangles: &[f64], c: &DesignConstraints) -> Option<(Vec<usize>, f64, f64)> {
    let targets: Vec<usize> = (0..tangles.len())
        .filter(|&i| tangles[i] > c.target_tangle_min)
        .collect();
    if targets.len() < c.min_targets {
        return None;
    }
    let mut worst: f64 = 0.0;
    let mut sum = 0.0;
    let mut count = 0usize;
    for &v in tangles {
        if v > c.target_tangle_min {
            continue;
        }
        worst = worst.max(v);
        sum += v;
        count += 1;
    }
    let mean_unwanted = if count == 0 { 0.0 } else { sum / count as f64 };
    if count > 0 && (worst >= c.unwanted_tangle_max || mean_unwanted >= c.unwanted_tangle_mean_max)
    {
        return None;
    }
    let mean_target = targets.iter().map(|&i| tangles[i]).sum::<f64>() / targets.len() as f64;
    Some((targets, mean_target, mean_unwanted))
}

fn rank(a: &Candidate, b: &Candidate, ranking: Ranking) -> Ordering {
    let tail = |x: &Candidate, y: &Candidate| {
        x.mean_target
            .total_cmp(&y.mean_target)
            .then((y.t * y.n as f64).total_cmp(&(x.t * x.n as f64)))
            .then(y.mean_unwanted.total_cmp(&x.mean_unwanted))
    };
    match ranking {
        Ranking::MostTargets => a
            .targets
            .len()
            .cmp(&b.targets.len())
            .then_with(|| tail(a, b)),
        Ranking::MeanTangle => tail(a, b),
    }
}

/// Best point at a single unit time.
fn best_at(
    register: &[NuclearSpin],
    electron: &Electron,
    t: f64,
    c: &DesignConstraints,
) -> Result<Option<Candidate>> {
    let rots = unit_rotations(register, electron, &c.sequence, t)?;
    let n_cap = ((c.max_gate_time / t).floor() as u64).min(c.n_max);
    let mut best: Option<Candidate> = None;
    for n in 1..=n_cap {
        let tangles: Vec<f64> = rots
            .iter()
            .map(|r| scaled_nuclear_one_tangle(r, n))
            .collect();
        if let Some((targets, mean_target, mean_unwanted)) = classify(&tangles, c) {
            let cand = Candidate {
                t,
                n,
                targets,
                tangles,
                mean_target,
                mean_unwanted,
            };
            if best
                .as_ref()
                .is_none_or(|b| rank(&cand, b, c.ranking) == Ordering::Greater)
            {
                best = Some(cand);
            }
        }
    }
    Ok(best)
}

/// Golden-section search on `t` at fixed `N` and target set, maximizing the mean target tangle.
fn refine(
    register: &[NuclearSpin],
    electron: &Electron,
    c: &DesignConstraints,
    cand: Candidate,
) -> Result<Candidate> {
    let score = |t: f64| -> Result<Option<Candidate>> {
        let rots = unit_rotations(register, electron, &c.sequence, t)?;
        let tangles: Vec<f64> = rots
            .iter()
            .map(|r| scaled_nuclear_one_tangle(r, cand.n))
            .collect();
        Ok(
            classify(&tangles, c).and_then(|(targets, mean_target, mean_unwanted)| {
                (targets == cand.targets && t * cand.n as f64 <= c.max_gate_time).then_some({
                    Candidate {
                        t,
                        n: cand.n,
                        targets,
                        tangles,
                        mean_target,
                        mean_unwanted,
                    }
                })
            }),
        )
    };
    let value = |x: &Option<Candidate>| x.as_ref().map_or(f64::NEG_INFINITY, |v| v.mean_target);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (cand.t - c.time_step, cand.t + c.time_step);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = score(x1)?;
    let mut f2 = score(x2)?;
    for _ in 0..60 {
        if value(&f1) >= value(&f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = score(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = score(x2)?;
        }
    }
    let best = if value(&f1) >= value(&f2) { f1 } else { f2 };
    Ok(match best {
        Some(b) if b.mean_target > cand.mean_target => b,
        _ => cand,
    })
}

fn assemble(
    register: &[NuclearSpin],
    rots: &[ConditionalRotation],
    tangles: &[f64],
    targets: &[usize],
    meta: &GateDesign,
    t: f64,
) -> Result<GateDesign> {
    let is_target = |i: usize| targets.contains(&i);
    let target_rots: Vec<_> = targets.iter().map(|&i| rots[i]).collect();
    let unwanted_rots: Vec<_> = (0..rots.len())
        .filter(|&i| !is_target(i))
        .map(|i| rots[i])
        .collect();
    let partition = RegisterPartition::from_units(&target_rots, &unwanted_rots, meta.iterations)?;
    let fidelity = target_subspace_fidelity(&partition)?;
    let target_tangles: Vec<f64> = targets.iter().map(|&i| tangles[i]).collect();
    Ok(GateDesign {
        anchor: meta.anchor.clone(),
        k: meta.k,
        unit_time: t,
        iterations: meta.iterations,
        gate_time: t * meta.iterations as f64,
        targets: targets.iter().map(|&i| register[i].label.clone()).collect(),
        target_indices: targets.to_vec(),
        mean_target_tangle: target_tangles.iter().sum::<f64>() / target_tangles.len() as f64,
        target_tangles,
        unwanted: (0..rots.len())
            .filter(|&i| !is_target(i))
            .map(|i| register[i].label.clone())
            .collect(),
        unwanted_tangles: (0..rots.len())
            .filter(|&i| !is_target(i))
            .map(|i| tangles[i])
            .collect(),
        gate_error: 1.0 - fidelity,
    })
}

/// Scan `t` around the anchor's `k`-th resonance and `N` up to the gate-time cap,
/// keep points meeting every threshold, and return the best by `constraints.ranking`.
pub fn optimize_register_gate(
    register: &[NuclearSpin],
    electron: &Electron,
    constraints: &DesignConstraints,
    anchor: usize,
    k: u32,
) -> Result<Option<GateDesign>> {
    constraints.validate()?;
    if register.is_empty() || anchor >= register.len() {
        return invalid("anchor index outside the register");
    }
    let tk = resonance_time(&register[anchor], electron, k, ResonanceVariant::Primary)?;
    let steps = (constraints.time_window / constraints.time_step).round() as i64;
    let per_t: Vec<Result<Option<Candidate>>> = (-steps..=steps)
        .into_par_iter()
        .map(|d| {
            let t = tk + d as f64 * constraints.time_step;
            if t <= 0.0 {
                return Ok(None);
            }
            best_at(register, electron, t, constraints)
        })
        .collect();
    let mut best: Option<Candidate> = None;
    for r in per_t {
        if let Some(c) = r? {
            if best
                .as_ref()
                .is_none_or(|b| rank(&c, b, constraints.ranking) == Ordering::Greater)
            {
                best = Some(c);
            }
        }
    }
    let Some(mut best) = best else {
        return Ok(None);
    };
    if constraints.refine {
        best = refine(register, electron, constraints, best)?;
    }
    let rots = unit_rotations(register, electron, &constraints.sequence, best.t)?;
    let meta = GateDesign {
        anchor: register[anchor].label.clone(),
        k,
        unit_time: best.t,
        iterations: best.n,
        gate_time: 0.0,
        targets: vec![],
        target_indices: vec![],
        target_tangles: vec![],
        unwanted: vec![],
        unwanted_tangles: vec![],
        mean_target_tangle: 0.0,
        gate_error: 0.0,
    };
    assemble(register, &rots, &best.tangles, &best.targets, &meta, best.t).map(Some)
}

/// One design per anchor spin at resonance `k`.
pub fn optimize_all_anchors(
    register: &[NuclearSpin],
    electron: &Electron,
    constraints: &DesignConstraints,
    k: u32,
) -> Result<Vec<Option<GateDesign>>> {
    (0..register.len())
        .map(|a| optimize_register_gate(register, electron, constraints, a, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn register() -> Vec<NuclearSpin> {
        [
            (-11.346, 59.21),
            (-14.07, 13.0),
            (-13.971, 9.0),
            (20.569, 41.51),
            (-4.225, 0.0),
        ]
        .iter()
        .enumerate()
        .map(|(i, (a, b))| NuclearSpin::from_khz(format!("S{i}"), *a, *b, 432.0).unwrap())
        .collect()
    }

    fn fast() -> DesignConstraints {
        DesignConstraints {
            time_window: 0.05e-6,
            time_step: 5e-9,
            ..Default::default()
        }
    }

    #[test]
    fn designs_are_feasible_and_reproducible() {
        let reg = register();
        let e = Electron::nv();
        let c = fast();
        let d = optimize_register_gate(&reg, &e, &c, 0, 3)
            .unwrap()
            .expect("design");
        assert!(d.gate_time <= c.max_gate_time);
        assert!(d.targets.len() >= 2);
        assert!(d.target_tangles.iter().all(|&x| x > c.target_tangle_min));
        assert!(d
            .unwanted_tangles
            .iter()
            .all(|&x| x < c.unwanted_tangle_max));
        let again = d.reevaluate(&reg, &e, &c.sequence).unwrap();
        assert!((again.gate_error - d.gate_error).abs() < 1e-12);
        for (a, b) in again.target_tangles.iter().zip(&d.target_tangles) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(optimize_register_gate(&reg, &e, &c, 0, 3).unwrap(), Some(d));
    }

    #[test]
    fn single_spin_register_has_no_design() {
        let reg = vec![register().remove(0)];
        assert!(optimize_register_gate(&reg, &Electron::nv(), &fast(), 0, 3)
            .unwrap()
            .is_none());
    }

    #[test]
    fn zero_unwanted_threshold_is_infeasible() {
        let c = DesignConstraints {
            unwanted_tangle_max: 0.0,
            ..fast()
        };
        let reg = register();
        assert!(optimize_register_gate(&reg, &Electron::nv(), &c, 0, 3)
            .unwrap()
            .is_none());
    }

    #[test]
    fn rejects_bad_constraints() {
        let c = DesignConstraints {
            target_tangle_min: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert!(optimize_register_gate(&register(), &Electron::nv(), &fast(), 9, 1).is_err());
    }
}
