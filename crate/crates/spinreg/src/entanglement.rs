//! Makhlin invariants, entangling power and one-tangles of π-pulse gates.

use crate::error::{invalid, Result};
use crate::spin_model::{dot, ConditionalRotation};
use std::f64::consts::PI;

/// Largest one-tangle of a single nucleus.
pub const NUCLEAR_TANGLE_MAX: f64 = 2.0 / 9.0;

/// Iterations with `G1` below this value count as maximally entangling.
pub const MAX_TANGLE_G1: f64 = 0.05;

/// `n01` magnitudes below this are treated as orthogonal axes.
const ORTHOGONAL_AXES: f64 = 1e-3;

/// `cos(φ0/2)cos(φ1/2) + n01 sin(φ0/2)sin(φ1/2)` of the N-fold gate.
fn overlap(rot: &ConditionalRotation, n: u64) -> f64 {
    let r = rot.iterate(n);
    let [a, b] = r.branch;
    a.w * b.w + dot(a.v, b.v)
}

/// First Makhlin invariant after `n` units; `n = 0` is the identity.
pub fn makhlin_g1(rot: &ConditionalRotation, n: u64) -> f64 {
    let m = overlap(rot, n);
    (m * m).min(1.0)
}

/// Second Makhlin invariant after `n` units.
pub fn makhlin_g2(rot: &ConditionalRotation, n: u64) -> f64 {
    let r = rot.iterate(n);
    let a0 = r.axis_angle(0);
    let a1 = r.axis_angle(1);
    let n01 = a0.axis_dot(a1);
    let (s0, c0) = (a0.angle / 2.0).sin_cos();
    let (s1, c1) = (a1.angle / 2.0).sin_cos();
    1.0 + n01 * a0.angle.sin() * a1.angle.sin()
        + 2.0 * (c0 * c0 * c1 * c1 + n01 * n01 * s0 * s0 * s1 * s1)
}

/// Two-qubit entangling power `(2/9)(1 − |G1|)`.
pub fn entangling_power(rot: &ConditionalRotation, n: u64) -> f64 {
    NUCLEAR_TANGLE_MAX * (1.0 - makhlin_g1(rot, n).abs())
}

/// One-tangle of a nucleus against the rest of the register.
pub fn nuclear_one_tangle(rot: &ConditionalRotation, n: u64) -> f64 {
    NUCLEAR_TANGLE_MAX * (1.0 - makhlin_g1(rot, n))
}

/// Nuclear one-tangle divided by its maximum `2/9`.
pub fn scaled_nuclear_one_tangle(rot: &ConditionalRotation, n: u64) -> f64 {
    1.0 - makhlin_g1(rot, n)
}

/// Electron one-tangle from precomputed `G1` values, one per nucleus.
pub fn electron_one_tangle_from_g1(g1: &[f64]) -> Result<f64> {
    if g1.is_empty() {
        return invalid("at least one nucleus is required");
    }
    let prod: f64 = g1.iter().map(|g| (1.0 + 2.0 * g) / 3.0).product();
    Ok((1.0 - prod) / 3.0)
}

/// One-tangle of the electron against all nuclei after `n` units.
pub fn electron_one_tangle(rots: &[ConditionalRotation], n: u64) -> Result<f64> {
    let g1: Vec<f64> = rots.iter().map(|r| makhlin_g1(r, n)).collect();
    electron_one_tangle_from_g1(&g1)
}

/// Largest electron one-tangle reachable by π-pulse gates in an `n`-qubit register.
pub fn max_electron_one_tangle(n: usize) -> f64 {
    1.0 / 3.0 - 3f64.powi(-(n as i32))
}

/// Upper bound on the one-tangle of a single qubit under an arbitrary `n`-qubit unitary.
pub fn one_tangle_bound(n: usize) -> Result<f64> {
    if !(1..=60).contains(&n) {
        return invalid(format!("qubit count {n} out of range"));
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    for m in 0..=n {
        let dp = 2f64.powi((n - 1 + m) as i32);
        let dq = 2f64.powi((1 + n - m) as i32);
        sum += binom / dp.min(dq);
        binom = binom * (n - m) as f64 / (m + 1) as f64;
    }
    Ok(1.0 - (2.0f64 / 3.0).powi(n as i32) * sum)
}

/// All `N ∈ [1, n_max]` with `G1(N) < threshold`.
pub fn iterations_below(rot: &ConditionalRotation, n_max: u64, threshold: f64) -> Vec<u64> {
    (1..=n_max)
        .filter(|&n| makhlin_g1(rot, n) < threshold)
        .collect()
}

/// Iterations that maximize the nuclear one-tangle: `G1(N) < 0.05` for `N ≤ n_max`.
pub fn optimal_iterations(rot: &ConditionalRotation, n_max: u64) -> Vec<u64> {
    iterations_below(rot, n_max, MAX_TANGLE_G1)
}

/// Closed-form estimates of the `G1` minima, for `κ ≤ kappa_max`.
///
/// Uses the mean per-unit angle, which is exact when `φ0 = φ1`.
/// Empty when the axes overlap positively.
pub fn analytic_minima(rot: &ConditionalRotation, kappa_max: u32) -> Vec<u64> {
    let phi = 0.5 * (rot.angle(0) + rot.angle(1));
    let n01 = rot.axis_dot();
    if phi <= 0.0 || n01 > ORTHOGONAL_AXES {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut push = |x: f64| {
        let n = x.round();
        if n >= 1.0 {
            out.push(n as u64);
        }
    };
    if n01.abs() <= ORTHOGONAL_AXES {
        for k in 0..=kappa_max {
            push((2 * k + 1) as f64 * PI / phi);
        }
    } else {
        let a = 2.0 * (-1.0 / n01).sqrt().atan();
        for k in 0..=kappa_max {
            let base = 2.0 * k as f64 * PI;
            push((base - a) / phi);
            push((base + a) / phi);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Predicted `N` where the folded axes of a UDD4 gate flip between antiparallel and parallel.
pub fn udd4_jump_locations(rot: &ConditionalRotation, n_max: u64) -> Vec<u64> {
    let (p0, p1) = (rot.angle(0), rot.angle(1));
    let sum = p0 + p1;
    if (p0 - p1).abs() < 1e-12 || sum <= 0.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for k in 1.. {
        let n = (2.0 * k as f64 * PI / sum).round() as u64;
        if n > n_max {
            break;
        }
        if n >= 1 {
            out.push(n);
        }
    }
    out
}

/// `N` at which `sign(n0(N)·n1(N))` differs from `N − 1`.
pub fn dot_sign_changes(rot: &ConditionalRotation, n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut prev = rot.iterate(1).axis_dot() >= 0.0;
    for n in 2..=n_max {
        let cur = rot.iterate(n).axis_dot() >= 0.0;
        if cur != prev {
            out.push(n);
        }
        prev = cur;
    }
    out
}

/// One-tangles of a whole register after `n` units.
#[derive(Clone, Debug, PartialEq)]
pub struct TangleProfile {
    pub iterations: u64,
    pub g1: Vec<f64>,
    pub nuclear: Vec<f64>,
    pub electron: f64,
}

impl TangleProfile {
    pub fn new(rots: &[ConditionalRotation], n: u64) -> Result<Self> {
        let g1: Vec<f64> = rots.iter().map(|r| makhlin_g1(r, n)).collect();
        let electron = electron_one_tangle_from_g1(&g1)?;
        let nuclear = g1.iter().map(|g| NUCLEAR_TANGLE_MAX * (1.0 - g)).collect();
        Ok(Self {
            iterations: n,
            g1,
            nuclear,
            electron,
        })
    }

    /// Nuclear tangles divided by `2/9`.
    pub fn scaled_nuclear(&self) -> Vec<f64> {
        self.nuclear
            .iter()
            .map(|x| x / NUCLEAR_TANGLE_MAX)
            .collect()
    }

    pub fn qubits(&self) -> usize {
        self.g1.len() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::{
        unit_propagator, AxisAngle, Electron, NuclearSpin, PulseSequence, Rotation,
    };

    fn antiparallel(phi: f64) -> ConditionalRotation {
        ConditionalRotation::new(Rotation::about_x(phi), Rotation::about_x(-phi))
    }

    #[test]
    fn identity_values() {
        let r = antiparallel(0.3);
        assert_eq!(makhlin_g1(&r, 0), 1.0);
        assert!((makhlin_g2(&r, 0) - 3.0).abs() < 1e-15);
        assert_eq!(entangling_power(&r, 0), 0.0);
    }

    #[test]
    fn cnot_class() {
        let r = ConditionalRotation::from_axis_angles(
            AxisAngle::new([1.0, 0.0, 0.0], PI / 2.0),
            AxisAngle::new([-1.0, 0.0, 0.0], PI / 2.0),
        );
        assert!(makhlin_g1(&r, 1) < 1e-30);
        assert!((makhlin_g2(&r, 1) - 1.0).abs() < 1e-14);
        assert!((entangling_power(&r, 1) - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn resonance_reduces_to_sum_angle() {
        let r = antiparallel(0.37);
        for n in [1, 3, 8] {
            let want = ((2.0 * 0.37 * n as f64) / 2.0).cos().powi(2);
            assert!((makhlin_g1(&r, n) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn fig5_target_is_maximal() {
        let s = NuclearSpin::from_khz("t", 60.0, 30.0, 314.0).unwrap();
        let rot = unit_propagator(
            &PulseSequence::cpmg(3.1811e-6).unwrap(),
            &s,
            &Electron::spin_half(),
        );
        let at = |n| scaled_nuclear_one_tangle(&rot, n);
        assert!((at(25) - 0.997_185_730_787).abs() < 1e-9);
        assert!(at(25) > at(24) && at(25) > at(26));
    }

    #[test]
    fn electron_tangle_limits() {
        assert_eq!(electron_one_tangle_from_g1(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        let v = electron_one_tangle_from_g1(&[0.0, 0.0]).unwrap();
        assert!((v - 8.0 / 27.0).abs() < 1e-15);
        assert!(electron_one_tangle_from_g1(&[]).is_err());
    }

    #[test]
    fn electron_tangle_single_nucleus_is_entangling_power() {
        let r = antiparallel(0.81);
        let e = electron_one_tangle(&[r], 3).unwrap();
        assert!((e - entangling_power(&r, 3)).abs() < 1e-12);
        let trivial = ConditionalRotation::new(Rotation::about_z(0.4), Rotation::about_z(0.4));
        let e2 = electron_one_tangle(&[r, trivial, trivial], 3).unwrap();
        assert!((e2 - e).abs() < 1e-12);
    }

    #[test]
    fn bound_values() {
        assert!((one_tangle_bound(2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // brute-force over the 8 primed subsets
        let mut sum = 0.0;
        for mask in 0u32..8 {
            let m = mask.count_ones() as i32;
            sum += 1.0 / 2f64.powi(2 + m).min(2f64.powi(4 - m));
        }
        let want = 1.0 - (8.0 / 27.0) * sum;
        assert!((one_tangle_bound(3).unwrap() - want).abs() < 1e-15);
        assert!((want - 4.0 / 9.0).abs() < 1e-15);
        for n in 2..12 {
            assert!(one_tangle_bound(n).unwrap() >= max_electron_one_tangle(n));
        }
    }

    #[test]
    fn iteration_sets() {
        let r = antiparallel(PI / 50.0);
        let set = optimal_iterations(&r, 200);
        for n in [25, 75, 125, 175] {
            assert!(set.contains(&n));
        }
        assert!(set.iter().all(|&n| makhlin_g1(&r, n) < MAX_TANGLE_G1));
        let est = analytic_minima(&r, 3);
        assert_eq!(&est[..4], &[25, 75, 125, 175]);
    }

    #[test]
    fn positive_overlap_never_entangles() {
        let r = ConditionalRotation::from_axis_angles(
            AxisAngle::new([1.0, 0.0, 3f64.sqrt()], 0.2),
            AxisAngle::new([1.0, 0.0, -3f64.sqrt()], 0.2),
        );
        assert!((r.axis_dot() + 0.5).abs() < 1e-12);
        let pos = ConditionalRotation::from_axis_angles(
            AxisAngle::new([3f64.sqrt(), 0.0, 1.0], 0.2),
            AxisAngle::new([3f64.sqrt(), 0.0, -1.0], 0.2),
        );
        assert!((pos.axis_dot() - 0.5).abs() < 1e-12);
        assert!(optimal_iterations(&pos, 1000).is_empty());
        assert!(analytic_minima(&pos, 5).is_empty());
        let hits = analytic_minima(&r, 5);
        assert!(!hits.is_empty());
        assert!(hits.iter().all(|&n| makhlin_g1(&r, n) < 0.01));
    }

    #[test]
    fn jump_formula() {
        let r = ConditionalRotation::from_axis_angles(
            AxisAngle::new([1.0, 0.0, 0.0], PI / 15.0),
            AxisAngle::new([-1.0, 0.0, 0.0], PI / 30.0),
        );
        assert_eq!(udd4_jump_locations(&r, 70), vec![20, 40, 60]);
        assert!(udd4_jump_locations(&antiparallel(0.2), 1000).is_empty());
    }

    #[test]
    fn udd4_jumps_match_scan() {
        let s = NuclearSpin::from_khz("j", 60.0, 30.0, 314.0).unwrap();
        let rot = unit_propagator(
            &PulseSequence::udd(4, 3.1861e-6).unwrap(),
            &s,
            &Electron::spin_half(),
        );
        let n_max = 1500;
        let predicted = udd4_jump_locations(&rot, n_max);
        let observed = dot_sign_changes(&rot, n_max);
        assert!(!predicted.is_empty());
        // sign changes come in pairs bracketing each parallel window
        let windows: Vec<(u64, u64)> = observed
            .chunks(2)
            .filter(|c| c.len() == 2)
            .map(|c| (c[0], c[1]))
            .collect();
        assert_eq!(windows.len(), predicted.len());
        for ((lo, hi), p) in windows.iter().zip(&predicted) {
            assert!(*lo <= p + 1 && *p < hi + 1, "{p} outside [{lo}, {hi})");
            assert!(rot.iterate(*p).axis_dot() > 0.0);
        }
        assert_eq!(&observed[..2], &[62, 65]);
    }

    #[test]
    fn profile_consistency() {
        let rots = [antiparallel(0.3), antiparallel(0.5), antiparallel(0.05)];
        let p = TangleProfile::new(&rots, 4).unwrap();
        assert_eq!(p.qubits(), 4);
        for (g, t) in p.g1.iter().zip(&p.nuclear) {
            assert!((t - NUCLEAR_TANGLE_MAX * (1.0 - g)).abs() < 1e-12);
        }
        assert!((p.electron - electron_one_tangle_from_g1(&p.g1).unwrap()).abs() < 1e-15);
    }
}
