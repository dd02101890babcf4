//! Target-subspace gate fidelity from the Kraus decomposition of the partial
//! trace over unwanted nuclei.
//!
//! The environment starts in `|0…0⟩`. For basis state `|e_i⟩` (big-endian over
//! the unwanted list) the Kraus operator is `Σ_j c_j p_j σ_jj ⊗ U0_j`, where
//! `c_j p_j = Π_m ⟨i_m| R_j^{(m)} |0⟩`.

use crate::entanglement::{nuclear_one_tangle, NUCLEAR_TANGLE_MAX};
use crate::error::{invalid, Error, Result};
use crate::spin_model::{AxisAngle, ConditionalRotation};
use num_complex::Complex64;
use rayon::prelude::*;

/// Largest number of unwanted spins the explicit Kraus sum accepts.
pub const MAX_UNWANTED: usize = 40;

type Pair = [Complex64; 2];

const ONE: Pair = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];

/// Target and unwanted nuclei, with rotations already raised to the gate's `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegisterPartition {
    pub targets: Vec<ConditionalRotation>,
    pub unwanted: Vec<ConditionalRotation>,
}

impl RegisterPartition {
    pub fn new(
        targets: Vec<ConditionalRotation>,
        unwanted: Vec<ConditionalRotation>,
    ) -> Result<Self> {
        if targets.is_empty() {
            return invalid("at least one target spin is required");
        }
        Ok(Self { targets, unwanted })
    }

    /// Partition from per-unit rotations, iterated `n` times.
    pub fn from_units(
        targets: &[ConditionalRotation],
        unwanted: &[ConditionalRotation],
        n: u64,
    ) -> Result<Self> {
        Self::new(
            targets.iter().map(|r| r.iterate(n)).collect(),
            unwanted.iter().map(|r| r.iterate(n)).collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.targets.len()
    }

    pub fn l(&self) -> usize {
        self.targets.len() + self.unwanted.len()
    }
}

/// `(⟨0|R_j|0⟩, ⟨1|R_j|0⟩)` for both branches.
fn columns(rot: &ConditionalRotation) -> [Pair; 2] {
    let a = rot.branch[0].column0();
    let b = rot.branch[1].column0();
    [[a[0], b[0]], [a[1], b[1]]]
}

/// `(c_0 p_0, c_1 p_1)` for environment basis state `i`.
pub fn kraus_coefficients(unwanted: &[ConditionalRotation], i: u64) -> Result<Pair> {
    let m = unwanted.len();
    if m >= 64 || i >> m != 0 {
        return Err(Error::InvalidInput(format!(
            "Kraus index {i} out of range for {m} unwanted spins"
        )));
    }
    let mut out = ONE;
    for (pos, rot) in unwanted.iter().enumerate() {
        let bit = (i >> (m - 1 - pos)) & 1;
        let col = columns(rot)[bit as usize];
        out[0] *= col[0];
        out[1] *= col[1];
    }
    Ok(out)
}

/// All `2^m` coefficient pairs of a spin list, big-endian.
fn coefficient_table(spins: &[ConditionalRotation]) -> Vec<Pair> {
    let mut table = vec![ONE];
    for rot in spins {
        let cols = columns(rot);
        let mut next = Vec::with_capacity(table.len() * 2);
        for p in &table {
            for col in &cols {
                next.push([p[0] * col[0], p[1] * col[1]]);
            }
        }
        table = next;
    }
    table
}

fn check_capacity(m: usize) -> Result<()> {
    if m > MAX_UNWANTED {
        return Err(Error::Capacity(format!(
            "{m} unwanted spins exceeds the limit of {MAX_UNWANTED}"
        )));
    }
    Ok(())
}

/// `Σ_i |w0 K0_i + w1 K1_i|²` evaluated term by term.
///
/// The index is split into two halves with precomputed tables. Outer blocks run
/// in parallel and are reduced in index order, so the result does not depend on
/// the thread count.
pub fn kraus_sum_explicit(unwanted: &[ConditionalRotation], weights: [f64; 2]) -> Result<f64> {
    check_capacity(unwanted.len())?;
    let split = unwanted.len() / 2;
    let hi = coefficient_table(&unwanted[..split]);
    let lo = coefficient_table(&unwanted[split..]);
    let [w0, w1] = weights;
    let lo_w: Vec<Pair> = lo.iter().map(|p| [p[0] * w0, p[1] * w1]).collect();
    let partial: Vec<f64> = hi
        .par_iter()
        .map(|h| {
            lo_w.iter()
                .map(|l| (h[0] * l[0] + h[1] * l[1]).norm_sqr())
                .sum::<f64>()
        })
        .collect();
    Ok(partial.iter().sum())
}

/// Same sum via the product identity `Σ|K0|² = Σ|K1|² = 1`,
/// `Σ K0 K1* = Π_m (a0 a1* + b0 b1*)`; cost linear in the number of spins.
pub fn kraus_sum_factorized(unwanted: &[ConditionalRotation], weights: [f64; 2]) -> f64 {
    let cross = unwanted.iter().fold(Complex64::new(1.0, 0.0), |acc, rot| {
        let [a, b] = columns(rot);
        acc * (a[0] * a[1].conj() + b[0] * b[1].conj())
    });
    let [w0, w1] = weights;
    w0 * w0 + w1 * w1 + 2.0 * w0 * w1 * cross.re
}

fn fidelity_from_sum(k: usize, sum: f64) -> f64 {
    let d = 2f64.powi(k as i32 + 1);
    (1.0 + 2f64.powi(k as i32 - 1) * sum) / (d + 1.0)
}

/// Average gate fidelity of the target subspace against its isolated evolution.
pub fn target_subspace_fidelity(partition: &RegisterPartition) -> Result<f64> {
    let sum = kraus_sum_explicit(&partition.unwanted, [1.0, 1.0])?;
    Ok(fidelity_from_sum(partition.k(), sum))
}

/// [`target_subspace_fidelity`] via the linear-cost product identity.
pub fn target_subspace_fidelity_factorized(partition: &RegisterPartition) -> f64 {
    fidelity_from_sum(
        partition.k(),
        kraus_sum_factorized(&partition.unwanted, [1.0, 1.0]),
    )
}

/// Overlap factors `f_j = Π_k (cos cos′ + n·n′ sin sin′)`.
fn local_overlaps(targets: &[ConditionalRotation], primed: &[[AxisAngle; 2]]) -> [f64; 2] {
    let mut f = [1.0, 1.0];
    for (rot, p) in targets.iter().zip(primed) {
        for j in 0..2 {
            let a = rot.axis_angle(j);
            let b = p[j];
            let (sa, ca) = (a.angle / 2.0).sin_cos();
            let (sb, cb) = (b.angle / 2.0).sin_cos();
            f[j] *= ca * cb + a.axis_dot(b) * sa * sb;
        }
    }
    f
}

/// Fidelity against a target gate with replaced local rotations on each target.
///
/// `primed[k][j]` is the rotation of target `k` in electron branch `j`.
pub fn fidelity_with_local_target(
    partition: &RegisterPartition,
    primed: &[[AxisAngle; 2]],
) -> Result<f64> {
    if primed.len() != partition.k() {
        return invalid(format!(
            "expected {} primed rotations, got {}",
            partition.k(),
            primed.len()
        ));
    }
    let f = local_overlaps(&partition.targets, primed);
    let sum = kraus_sum_explicit(&partition.unwanted, f)?;
    Ok(fidelity_from_sum(partition.k(), sum))
}

/// Tangles, fidelity and timing of a candidate gate.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub iterations: u64,
    pub unit_time: f64,
    pub gate_time: f64,
    pub target_tangles: Vec<f64>,
    pub unwanted_tangles: Vec<f64>,
    pub fidelity: f64,
}

impl FidelityReport {
    /// Evaluate `n` repetitions of a unit of duration `unit_time`.
    pub fn evaluate(
        targets: &[ConditionalRotation],
        unwanted: &[ConditionalRotation],
        n: u64,
        unit_time: f64,
    ) -> Result<Self> {
        let partition = RegisterPartition::from_units(targets, unwanted, n)?;
        let fidelity = target_subspace_fidelity(&partition)?;
        Ok(Self {
            iterations: n,
            unit_time,
            gate_time: n as f64 * unit_time,
            target_tangles: targets.iter().map(|r| nuclear_one_tangle(r, n)).collect(),
            unwanted_tangles: unwanted.iter().map(|r| nuclear_one_tangle(r, n)).collect(),
            fidelity,
        })
    }

    pub fn gate_error(&self) -> f64 {
        1.0 - self.fidelity
    }

    pub fn scaled_target_tangles(&self) -> Vec<f64> {
        self.target_tangles
            .iter()
            .map(|x| x / NUCLEAR_TANGLE_MAX)
            .collect()
    }

    pub fn scaled_unwanted_tangles(&self) -> Vec<f64> {
        self.unwanted_tangles
            .iter()
            .map(|x| x / NUCLEAR_TANGLE_MAX)
            .collect()
    }
}
