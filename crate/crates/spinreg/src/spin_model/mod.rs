//! Conditional nuclear dynamics under π-pulse sequences.
//!
//! Each nucleus sees `H_j = ½[(ω_L + s_j A)σz + s_j B σx]` while the electron
//! sits in branch `j`. A sequence unit alternates the two Hamiltonians, giving
//! one rotation per branch: the [`ConditionalRotation`] `(R_{n0}(φ0), R_{n1}(φ1))`.
//!
//! All frequencies are angular (rad/s); use [`khz`] to convert plain kHz.

mod closed_form;
mod rotation;
mod sequence;

pub use closed_form::{closed_form_angles, ClosedFormKind};
pub use rotation::{
    bloch, compose_rotations, cross, dot, norm, AxisAngle, Mat2, Rotation, Vec3, NEAR_IDENTITY,
};
pub use sequence::{build_sequence, udd_spacings, PulseSequence, SequenceKind};

use crate::error::{invalid, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Angular frequency of `x` kHz.
pub fn khz(x: f64) -> f64 {
    2.0 * PI * 1e3 * x
}

/// Inverse of [`khz`].
pub fn to_khz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e3)
}

/// Hyperfine couplings and Larmor frequency of one nucleus (rad/s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuclearSpin {
    pub label: String,
    pub a: f64,
    pub b: f64,
    pub larmor: f64,
}

impl NuclearSpin {
    pub fn new(label: impl Into<String>, a: f64, b: f64, larmor: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && larmor.is_finite()) {
            return invalid("hyperfine parameters must be finite");
        }
        if b < 0.0 {
            return invalid(format!("B must be non-negative, got {b}"));
        }
        if larmor <= 0.0 {
            return invalid(format!("Larmor frequency must be positive, got {larmor}"));
        }
        Ok(Self {
            label: label.into(),
            a,
            b,
            larmor,
        })
    }

    /// Parameters given as plain kHz.
    pub fn from_khz(label: impl Into<String>, a: f64, b: f64, larmor: f64) -> Result<Self> {
        Self::new(label, khz(a), khz(b), khz(larmor))
    }
}

/// Spin projections of the two electron levels used as the qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Electron {
    pub s0: f64,
    pub s1: f64,
}

impl Electron {
    pub fn new(s0: f64, s1: f64) -> Result<Self> {
        if !(s0.is_finite() && s1.is_finite()) || s0 == s1 {
            return invalid(format!(
                "electron projections must differ, got ({s0}, {s1})"
            ));
        }
        Ok(Self { s0, s1 })
    }

    /// `s0 = ½, s1 = −½`.
    pub fn spin_half() -> Self {
        Self { s0: 0.5, s1: -0.5 }
    }

    /// `s0 = 0, s1 = −1` (the NV ground-state qubit).
    pub fn nv() -> Self {
        Self { s0: 0.0, s1: -1.0 }
    }

    pub fn projection(&self, branch: usize) -> f64 {
        if branch == 0 {
            self.s0
        } else {
            self.s1
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            s0: self.s1,
            s1: self.s0,
        }
    }
}

/// `(ω_L + s_j A, s_j B)`: the z and x field components for branch `j`.
pub fn branch_field(spin: &NuclearSpin, electron: &Electron, branch: usize) -> (f64, f64) {
    let s = electron.projection(branch);
    (spin.larmor + s * spin.a, s * spin.b)
}

/// Precession frequencies `ω_j` and tilt angles `θ_j` of both branches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchFrequencies {
    pub omega: [f64; 2],
    pub theta: [f64; 2],
}

pub fn branch_frequencies(spin: &NuclearSpin, electron: &Electron) -> BranchFrequencies {
    let mut omega = [0.0; 2];
    let mut theta = [0.0; 2];
    for j in 0..2 {
        let (hz, hx) = branch_field(spin, electron, j);
        omega[j] = hz.hypot(hx);
        theta[j] = hx.atan2(hz);
    }
    BranchFrequencies { omega, theta }
}

/// Per-branch rotations of one nucleus over a sequence unit (or N units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalRotation {
    pub branch: [Rotation; 2],
}

impl ConditionalRotation {
    pub fn new(r0: Rotation, r1: Rotation) -> Self {
        Self { branch: [r0, r1] }
    }

    pub fn from_axis_angles(a0: AxisAngle, a1: AxisAngle) -> Self {
        Self::new(a0.to_rotation(), a1.to_rotation())
    }

    pub fn identity() -> Self {
        Self::new(Rotation::identity(), Rotation::identity())
    }

    pub fn axis_angle(&self, branch: usize) -> AxisAngle {
        self.branch[branch].axis_angle()
    }

    pub fn axis(&self, branch: usize) -> Vec3 {
        self.axis_angle(branch).axis
    }

    pub fn angle(&self, branch: usize) -> f64 {
        self.axis_angle(branch).angle
    }

    /// `n0 · n1`, equal to 1 when either axis is undefined.
    pub fn axis_dot(&self) -> f64 {
        self.axis_angle(0).axis_dot(self.axis_angle(1))
    }

    /// Same rotation applied `n` times.
    pub fn iterate(&self, n: u64) -> Self {
        Self::new(self.branch[0].pow(n), self.branch[1].pow(n))
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.branch[1], self.branch[0])
    }

    /// 4×4 controlled gate `|0⟩⟨0|⊗R0 + |1⟩⟨1|⊗R1`, electron first.
    pub fn controlled_matrix(&self) -> [[Complex64; 4]; 4] {
        let zero = Complex64::new(0.0, 0.0);
        let mut m = [[zero; 4]; 4];
        for j in 0..2 {
            let r = self.branch[j].to_matrix();
            for a in 0..2 {
                for b in 0..2 {
                    m[2 * j + a][2 * j + b] = r[a][b];
                }
            }
        }
        m
    }
}

/// Iterate a conditional rotation `n` times.
pub fn iterate(rot: &ConditionalRotation, n: u64) -> ConditionalRotation {
    rot.iterate(n)
}

fn segment_rotations<'a>(
    seq: &'a PulseSequence,
    spin: &NuclearSpin,
    electron: &Electron,
    branch: usize,
) -> impl Iterator<Item = Rotation> + 'a {
    let fields = [
        branch_field(spin, electron, branch),
        branch_field(spin, electron, 1 - branch),
    ];
    let t = seq.unit_time();
    seq.spacings().iter().enumerate().map(move |(i, q)| {
        let (hz, hx) = fields[i % 2];
        Rotation::precession(hz, hx, q * t)
    })
}

/// One sequence unit, composed with the Rodrigues rule.
pub fn unit_propagator(
    seq: &PulseSequence,
    spin: &NuclearSpin,
    electron: &Electron,
) -> ConditionalRotation {
    let mut out = [Rotation::identity(); 2];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = segment_rotations(seq, spin, electron, j)
            .fold(Rotation::identity(), |acc, r| acc.then(r))
            .renormalized();
    }
    ConditionalRotation::new(out[0], out[1])
}

/// One sequence unit, composed as explicit 2×2 matrix products.
pub fn unit_propagator_matrix(
    seq: &PulseSequence,
    spin: &NuclearSpin,
    electron: &Electron,
) -> ConditionalRotation {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = [Rotation::identity(); 2];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc: Mat2 = [[one, zero], [zero, one]];
        for r in segment_rotations(seq, spin, electron, j) {
            let m = r.to_matrix();
            let mut next = [[zero; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    next[a][b] = m[a][0] * acc[0][b] + m[a][1] * acc[1][b];
                }
            }
            acc = next;
        }
        *slot = Rotation::from_matrix(&acc);
    }
    ConditionalRotation::new(out[0], out[1])
}

/// Which family of resonance times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResonanceVariant {
    /// `t_k = 4π(2k−1)/(ω0+ω1)`
    Primary,
    /// `t_k = 8π(2k−1)/(ω0+ω1)`, the additional UDD4 resonances.
    Udd4Extra,
}

/// Closed-form unit time of the `k`-th resonance.
pub fn resonance_time(
    spin: &NuclearSpin,
    electron: &Electron,
    k: u32,
    variant: ResonanceVariant,
) -> Result<f64> {
    if k < 1 {
        return invalid("resonance order must be at least 1");
    }
    let f = branch_frequencies(spin, electron);
    let sum = f.omega[0] + f.omega[1];
    let base = match variant {
        ResonanceVariant::Primary => 4.0,
        ResonanceVariant::Udd4Extra => 8.0,
    };
    Ok(base * PI * (2 * k - 1) as f64 / sum)
}

/// Coherence function `M` and the probability `P_x = (1+M)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coherence {
    pub m: f64,
    pub px: f64,
}

pub fn coherence(rot: &ConditionalRotation) -> Coherence {
    let a0 = rot.axis_angle(0);
    let a1 = rot.axis_angle(1);
    let m = (a0.angle / 2.0).cos() * (a1.angle / 2.0).cos()
        + a0.axis_dot(a1) * (a0.angle / 2.0).sin() * (a1.angle / 2.0).sin();
    let m = m.clamp(-1.0, 1.0);
    Coherence {
        m,
        px: (1.0 + m) / 2.0,
    }
}

/// Equal-angle form `M = 1 − sin²(φ/2)(1 − n0·n1)`, using `φ0`.
pub fn coherence_equal_angles(rot: &ConditionalRotation) -> f64 {
    let s = (rot.angle(0) / 2.0).sin();
    1.0 - s * s * (1.0 - rot.axis_dot())
}

/// Closed-form `n0·n1` for a CPMG unit of duration `t`.
pub fn cpmg_axis_dot(spin: &NuclearSpin, electron: &Electron, t: f64) -> f64 {
    let f = branch_frequencies(spin, electron);
    let rot = unit_propagator(&PulseSequence::cpmg(t).expect("positive t"), spin, electron);
    let half = (rot.angle(0) / 2.0).sin();
    let d = (f.theta[0] - f.theta[1]).sin();
    let s0 = (f.omega[0] * t / 8.0).sin();
    let s1 = (f.omega[1] * t / 8.0).sin();
    1.0 - 4.0 * d * d * s0 * s0 * s1 * s1 / (half * half)
}

/// Outcome of the trivial-evolution test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrivialEvolution {
    pub satisfied: bool,
    /// Larger of the two branch residuals (relative).
    pub residual: f64,
    /// Best circle index per branch.
    pub kappa: [u32; 2],
}

fn branch_circle_residual(
    spin: &NuclearSpin,
    electron: &Electron,
    t: f64,
    kappa_max: u32,
    branch: usize,
) -> (f64, u32) {
    let s = electron.projection(branch);
    let mut best = (f64::INFINITY, 0);
    for kappa in 1..=kappa_max {
        let ring = 8.0 * kappa as f64 * PI;
        let r = if s == 0.0 {
            let t_k = ring / spin.larmor;
            (t - t_k).abs() / t_k
        } else {
            let radius = ring / (s * t).abs();
            let cx = spin.a + spin.larmor / s;
            (cx.hypot(spin.b) - radius).abs() / radius
        };
        if r < best.0 {
            best = (r, kappa);
        }
    }
    best
}

/// Whether both branches complete whole turns on every segment at unit time `t`.
pub fn trivial_evolution_condition(
    spin: &NuclearSpin,
    electron: &Electron,
    t: f64,
    kappa_max: u32,
    tol: f64,
) -> TrivialEvolution {
    let (r0, k0) = branch_circle_residual(spin, electron, t, kappa_max, 0);
    let (r1, k1) = branch_circle_residual(spin, electron, t, kappa_max, 1);
    let residual = r0.max(r1);
    TrivialEvolution {
        satisfied: residual <= tol,
        residual,
        kappa: [k0, k1],
    }
}

/// Hyperfine pairs `(A, B)` lying on both branch circles at unit time `t`.
///
/// Both projections must be non-zero. Points with `|A|` or `B` above `cap` are dropped.
pub fn circle_intersections(
    larmor: f64,
    electron: &Electron,
    t: f64,
    kappa_max: u32,
    cap: f64,
) -> Vec<(f64, f64, [u32; 2])> {
    let (s0, s1) = (electron.s0, electron.s1);
    let mut out = Vec::new();
    if s0 == 0.0 || s1 == 0.0 {
        return out;
    }
    let (c0, c1) = (-larmor / s0, -larmor / s1);
    for k0 in 1..=kappa_max {
        for k1 in 1..=kappa_max {
            let r0 = 8.0 * PI * k0 as f64 / (s0 * t).abs();
            let r1 = 8.0 * PI * k1 as f64 / (s1 * t).abs();
            // (A−c0)² − (A−c1)² = r0² − r1²
            let a = (r0 * r0 - r1 * r1 - c0 * c0 + c1 * c1) / (2.0 * (c1 - c0));
            let b2 = r0 * r0 - (a - c0) * (a - c0);
            if b2 < 0.0 {
                continue;
            }
            let b = b2.sqrt();
            if a.abs() <= cap && b <= cap {
                out.push((a, b, [k0, k1]));
            }
        }
    }
    out
}

/// For an electron with a zero projection, the unit times `8κπ/ω_L` at which
/// that branch is trivial.
pub fn zero_projection_times(larmor: f64, kappa_max: u32) -> Vec<f64> {
    (1..=kappa_max)
        .map(|k| 8.0 * PI * k as f64 / larmor)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(a: f64, b: f64, l: f64) -> NuclearSpin {
        NuclearSpin::from_khz("x", a, b, l).unwrap()
    }

    #[test]
    fn resonance_fig2_values() {
        let s = spin(80.0, 25.0, 314.0);
        let e = Electron::spin_half();
        let want = [3.1822, 9.5465, 15.9108, 22.2751];
        for (k, w) in (1..=4).zip(want) {
            let t = resonance_time(&s, &e, k, ResonanceVariant::Primary).unwrap() * 1e6;
            assert!((t - w).abs() < 1e-3, "k={k}: {t}");
        }
    }

    #[test]
    fn resonance_nv_projection() {
        let s = spin(60.0, 30.0, 314.0);
        let t = resonance_time(&s, &Electron::nv(), 1, ResonanceVariant::Primary).unwrap();
        assert!((t * 1e6 - 3.5102).abs() < 1e-4);
        let s = spin(-11.346, 59.21, 432.0);
        let t = resonance_time(&s, &Electron::nv(), 3, ResonanceVariant::Primary).unwrap();
        assert!((t * 1e6 - 11.373).abs() < 1e-3);
    }

    #[test]
    fn resonance_rejects_zero_order() {
        let s = spin(60.0, 30.0, 314.0);
        assert!(resonance_time(&s, &Electron::nv(), 0, ResonanceVariant::Primary).is_err());
    }

    #[test]
    fn near_antiparallel_at_resonance() {
        let s = spin(80.0, 25.0, 314.0);
        let e = Electron::spin_half();
        let dot = |t: f64| unit_propagator(&PulseSequence::cpmg(t).unwrap(), &s, &e).axis_dot();
        assert!((dot(3.1822e-6) + 0.996_827_568_6).abs() < 1e-8);
        let best = (0..=2500)
            .map(|i| dot(3.17e-6 + i as f64 * 1e-11))
            .fold(f64::INFINITY, f64::min);
        assert!(best + 1.0 < 1e-8);
    }

    #[test]
    fn zero_b_gives_parallel_z_axes() {
        let s = spin(80.0, 0.0, 314.0);
        let rot = unit_propagator(
            &PulseSequence::cpmg(3e-6).unwrap(),
            &s,
            &Electron::spin_half(),
        );
        assert_eq!(rot.axis_dot(), 1.0);
        assert!((rot.axis(0)[2].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn both_composition_paths_agree() {
        let s = spin(60.0, 30.0, 314.0);
        let e = Electron::spin_half();
        for seq in [
            PulseSequence::cpmg(3.1811e-6).unwrap(),
            PulseSequence::udd(3, 4.2e-6).unwrap(),
            PulseSequence::udd(4, 5.1e-6).unwrap(),
        ] {
            let a = unit_propagator(&seq, &s, &e);
            let b = unit_propagator_matrix(&seq, &s, &e);
            for j in 0..2 {
                assert!((a.branch[j].w - b.branch[j].w).abs() < 1e-12);
                for k in 0..3 {
                    assert!((a.branch[j].v[k] - b.branch[j].v[k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coherence_limits() {
        let c = coherence(&ConditionalRotation::identity());
        assert_eq!((c.m, c.px), (1.0, 1.0));
        let flip = ConditionalRotation::new(Rotation::about_x(PI), Rotation::about_x(-PI));
        let c = coherence(&flip);
        assert!((c.m + 1.0).abs() < 1e-15 && c.px.abs() < 1e-15);
    }

    #[test]
    fn coherence_forms_agree_for_cpmg() {
        let s = spin(60.0, 30.0, 314.0);
        let rot = unit_propagator(
            &PulseSequence::cpmg(3.3e-6).unwrap(),
            &s,
            &Electron::spin_half(),
        );
        assert!((coherence(&rot).m - coherence_equal_angles(&rot)).abs() < 1e-12);
    }

    #[test]
    fn coherence_dips_at_resonance() {
        let s = spin(80.0, 25.0, 314.0);
        let e = Electron::spin_half();
        let t0 = resonance_time(&s, &e, 1, ResonanceVariant::Primary).unwrap();
        let px = |t: f64| {
            coherence(&unit_propagator(&PulseSequence::cpmg(t).unwrap(), &s, &e).iterate(20)).px
        };
        let centre = px(t0);
        assert!(px(t0 - 0.05e-6) > centre && px(t0 + 0.05e-6) > centre);
    }

    #[test]
    fn eq4_error_scales_with_b_squared() {
        let e = Electron::spin_half();
        let t = 3.0e-6;
        for b in [3.0, 1.0, 0.3] {
            let s = spin(60.0, b, 314.0);
            let rot = unit_propagator(&PulseSequence::cpmg(t).unwrap(), &s, &e);
            let ratio = b / 314.0;
            assert!((cpmg_axis_dot(&s, &e, t) - rot.axis_dot()).abs() < 30.0 * ratio * ratio);
        }
    }

    #[test]
    fn circle_point_is_trivial() {
        let e = Electron::spin_half();
        let larmor = khz(314.0);
        let t = 12e-6;
        let pts = circle_intersections(larmor, &e, t, 3, khz(300.0));
        assert!(!pts.is_empty());
        for (a, b, _) in pts {
            let s = NuclearSpin::new("c", a, b, larmor).unwrap();
            let tr = trivial_evolution_condition(&s, &e, t, 3, 1e-12);
            assert!(tr.satisfied, "residual {}", tr.residual);
            let rot = unit_propagator(&PulseSequence::cpmg(t).unwrap(), &s, &e);
            for j in 0..2 {
                assert!(rot.branch[j].v.iter().all(|x| x.abs() < 1e-9));
            }
        }
    }

    #[test]
    fn zero_b_on_both_circles() {
        // ω0 t = 24π, ω1 t = 16π
        let larmor = khz(314.0);
        let a = 0.4 * larmor;
        let t = 16.0 * PI / (larmor - a / 2.0);
        let s = NuclearSpin::new("z", a, 0.0, larmor).unwrap();
        let tr = trivial_evolution_condition(&s, &Electron::spin_half(), t, 4, 1e-12);
        assert!(tr.satisfied);
        assert!(tr.residual < 1e-14);
        assert_eq!(tr.kappa, [3, 2]);
    }

    #[test]
    fn off_circle_residual_is_geometric() {
        let e = Electron::spin_half();
        let s = spin(50.0, 40.0, 314.0);
        let t = 20e-6;
        let tr = trivial_evolution_condition(&s, &e, t, 1, 1e-9);
        assert!(!tr.satisfied);
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            let sj = e.projection(j);
            let radius = 8.0 * PI / (sj * t).abs();
            let d = (s.a + s.larmor / sj).hypot(s.b);
            worst = worst.max((d - radius).abs() / radius);
        }
        assert!((tr.residual - worst).abs() < 1e-12);
    }

    #[test]
    fn zero_projection_rule() {
        let larmor = khz(432.0);
        let t = zero_projection_times(larmor, 2)[1];
        let s = NuclearSpin::new("z", 0.0, 0.0, larmor).unwrap();
        let tr = trivial_evolution_condition(&s, &Electron::nv(), t, 3, 1e-12);
        assert_eq!(tr.kappa[0], 2);
    }
}
