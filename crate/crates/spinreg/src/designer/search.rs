//! Common-iteration search and unwanted-tangle minimization.

use crate::entanglement::{nuclear_one_tangle, optimal_iterations};
use crate::error::{invalid, Error, Result};
use crate::spin_model::{
    build_sequence, resonance_time, unit_propagator, ConditionalRotation, Electron, NuclearSpin,
    ResonanceVariant, SequenceKind,
};
use std::collections::BTreeSet;

/// Shared iteration count and the spins (by index) that reach maximal tangle there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonIterations {
    pub n_star: u64,
    pub participants: Vec<usize>,
    /// Every count common to all participants.
    pub candidates: Vec<u64>,
}

/// Intersect the maximal-tangle iteration sets, starting from spin 0.
///
/// Spins whose set would empty the running intersection are dropped.
pub fn find_common_iterations(
    rots: &[ConditionalRotation],
    n_max: u64,
) -> Result<CommonIterations> {
    if rots.len() < 2 {
        return invalid("at least two spins are required");
    }
    let mut common: BTreeSet<u64> = optimal_iterations(&rots[0], n_max).into_iter().collect();
    if common.is_empty() {
        return Err(Error::NoSolution(format!(
            "anchor spin has no maximally entangling iteration up to {n_max}"
        )));
    }
    let mut participants = vec![0];
    for (j, rot) in rots.iter().enumerate().skip(1) {
        let set: BTreeSet<u64> = optimal_iterations(rot, n_max).into_iter().collect();
        let next: BTreeSet<u64> = common.intersection(&set).copied().collect();
        if !next.is_empty() {
            common = next;
            participants.push(j);
        }
    }
    let candidates: Vec<u64> = common.into_iter().collect();
    Ok(CommonIterations {
        n_star: candidates[0],
        participants,
        candidates,
    })
}

/// Smallest unwanted one-tangle found while keeping the target maximal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnwantedMinimum {
    pub k: u32,
    pub iterations: u64,
    pub unit_time: f64,
    /// Raw one-tangle of the unwanted spin.
    pub tangle: f64,
    /// The unwanted spin evolves exactly like the target and cannot be decoupled.
    pub inseparable: bool,
}

/// Scan the target's resonances `k_range` and its maximal-tangle iterations up to `pulse_budget`.
pub fn minimize_unwanted_tangle(
    target: &NuclearSpin,
    unwanted: &NuclearSpin,
    electron: &Electron,
    kind: &SequenceKind,
    k_range: std::ops::RangeInclusive<u32>,
    pulse_budget: u64,
) -> Result<UnwantedMinimum> {
    let mut best: Option<UnwantedMinimum> = None;
    for k in k_range {
        let t = resonance_time(target, electron, k, ResonanceVariant::Primary)?;
        let seq = build_sequence(kind, t)?;
        let rt = unit_propagator(&seq, target, electron);
        let ru = unit_propagator(&seq, unwanted, electron);
        let same = rt.branch.iter().zip(&ru.branch).all(|(a, b)| {
            (a.w - b.w).abs() < 1e-14 && a.v.iter().zip(&b.v).all(|(x, y)| (x - y).abs() < 1e-14)
        });
        for n in optimal_iterations(&rt, pulse_budget) {
            let tangle = nuclear_one_tangle(&ru, n);
            if best.is_none_or(|b| tangle < b.tangle) {
                best = Some(UnwantedMinimum {
                    k,
                    iterations: n,
                    unit_time: t,
                    tangle,
                    inseparable: same,
                });
            }
        }
    }
    best.ok_or_else(|| Error::NoSolution("target never reaches maximal tangle".into()))
}
