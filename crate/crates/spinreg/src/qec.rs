//! Measurement-free three-qubit bit-flip code on an electron and two nuclei.
//!
//! Qubit order is (electron, nucleus 1, nucleus 2), big-endian, so basis index
//! `4e + 2n1 + n2`.

use crate::spin_model::{bloch, ConditionalRotation, Rotation, Vec3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub type State3 = [Complex64; 8];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QecScheme {
    /// `CR_{±x}(π/2)` encoding with a conditional electron rotation as correction.
    Sequential,
    /// Multi-spin `CR_xz` encoding with nuclear `R_y(−π)` and a Toffoli correction.
    Multispin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QecError {
    None,
    Electron,
    Nucleus1,
    Nucleus2,
}

impl QecError {
    pub const ALL: [QecError; 4] = [
        QecError::None,
        QecError::Electron,
        QecError::Nucleus1,
        QecError::Nucleus2,
    ];

    fn qubit(self) -> Option<usize> {
        match self {
            QecError::None => None,
            QecError::Electron => Some(0),
            QecError::Nucleus1 => Some(1),
            QecError::Nucleus2 => Some(2),
        }
    }
}

impl std::str::FromStr for QecError {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "none" => Ok(QecError::None),
            "electron" => Ok(QecError::Electron),
            "n1" | "nucleus1" => Ok(QecError::Nucleus1),
            "n2" | "nucleus2" => Ok(QecError::Nucleus2),
            _ => Err(crate::Error::InvalidInput(format!(
                "unknown error kind '{s}'"
            ))),
        }
    }
}

/// One run of the code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QecScenario {
    pub scheme: QecScheme,
    /// Full encoding gates of nucleus 1 and nucleus 2, already iterated.
    pub gates: [ConditionalRotation; 2],
    pub error: QecError,
    /// Electron input `cos(γ/2)|0⟩ + e^{iδ} sin(γ/2)|1⟩`.
    pub gamma: f64,
    pub delta: f64,
}

impl QecScenario {
    /// Sequential scheme with ideal `CR_{±x}(π/2)` gates.
    pub fn sequential_ideal(error: QecError, gamma: f64, delta: f64) -> Self {
        let g = ideal_crx();
        Self {
            scheme: QecScheme::Sequential,
            gates: [g, g],
            error,
            gamma,
            delta,
        }
    }

    pub fn multispin(
        gates: [ConditionalRotation; 2],
        error: QecError,
        gamma: f64,
        delta: f64,
    ) -> Self {
        Self {
            scheme: QecScheme::Multispin,
            gates,
            error,
            gamma,
            delta,
        }
    }

    pub fn with_input(&self, gamma: f64, delta: f64) -> Self {
        Self {
            gamma,
            delta,
            ..self.clone()
        }
    }

    pub fn electron_input(&self) -> [Complex64; 2] {
        let (s, c) = (self.gamma / 2.0).sin_cos();
        [Complex64::new(c, 0.0), Complex64::from_polar(s, self.delta)]
    }
}

/// Stage snapshots and figures of merit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QecOutcome {
    pub initial: State3,
    pub encoded: State3,
    pub after_error: State3,
    pub decoded: State3,
    pub corrected: State3,
    /// `|⟨ψ_el,0|ρ_el|ψ_el,0⟩|`.
    pub recovery: f64,
    /// `tr ρ_el²`.
    pub purity: f64,
}

impl QecOutcome {
    pub fn error_probability(&self) -> f64 {
        1.0 - self.recovery
    }

    pub fn stages(&self) -> [(&'static str, &State3); 5] {
        [
            ("initial", &self.initial),
            ("encoded", &self.encoded),
            ("error", &self.after_error),
            ("decoded", &self.decoded),
            ("corrected", &self.corrected),
        ]
    }
}

/// `CR_{±x}(π/2) = |0⟩⟨0| ⊗ R_x(π/2) + |1⟩⟨1| ⊗ R_x(−π/2)`.
pub fn ideal_crx() -> ConditionalRotation {
    ConditionalRotation::new(Rotation::about_x(FRAC_PI_2), Rotation::about_x(-FRAC_PI_2))
}

/// Electron angles `(θ1, θ2, θ3, θ4)` of the sequential correction.
pub fn sequential_theta_solution() -> [f64; 4] {
    [-FRAC_PI_4, FRAC_PI_4, FRAC_PI_4, -FRAC_PI_4]
}

/// Net electron angle for each nuclear configuration `(|00⟩, |01⟩, |10⟩, |11⟩)`.
///
/// The rotation is `R_x(θ1 + θ2 Z2 − θ3 Z1 Z2 − θ4 Z1)`.
pub fn correction_angles(theta: [f64; 4]) -> [f64; 4] {
    let [t1, t2, t3, t4] = theta;
    let mut out = [0.0; 4];
    for (i, o) in out.iter_mut().enumerate() {
        let z1 = if i & 2 == 0 { 1.0 } else { -1.0 };
        let z2 = if i & 1 == 0 { 1.0 } else { -1.0 };
        *o = t1 + t2 * z2 - t3 * z1 * z2 - t4 * z1;
    }
    out
}

fn basis_state(electron: [Complex64; 2]) -> State3 {
    let mut s = [Complex64::new(0.0, 0.0); 8];
    s[3] = electron[0];
    s[7] = electron[1];
    s
}

fn apply_conditional(state: &State3, gates: &[ConditionalRotation; 2]) -> State3 {
    let mut out = [Complex64::new(0.0, 0.0); 8];
    for e in 0..2 {
        let m1 = gates[0].branch[e].to_matrix();
        let m2 = gates[1].branch[e].to_matrix();
        for r in 0..4 {
            let (r1, r2) = (r >> 1, r & 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..4 {
                acc += m1[r1][c >> 1] * m2[r2][c & 1] * state[4 * e + c];
            }
            out[4 * e + r] = acc;
        }
    }
    out
}

fn apply_local(state: &State3, qubit: usize, m: &[[Complex64; 2]; 2]) -> State3 {
    let bit = 4 >> qubit;
    let mut out = *state;
    for i in (0..8).filter(|i| i & bit == 0) {
        let (a, b) = (state[i], state[i | bit]);
        out[i] = m[0][0] * a + m[0][1] * b;
        out[i | bit] = m[1][0] * a + m[1][1] * b;
    }
    out
}

fn flip(state: &State3, qubit: usize) -> State3 {
    let bit = 4 >> qubit;
    std::array::from_fn(|i| state[i ^ bit])
}

fn correct(state: &State3, scheme: QecScheme) -> State3 {
    match scheme {
        QecScheme::Multispin => {
            let mut out = *state;
            out.swap(3, 7);
            out
        }
        QecScheme::Sequential => {
            let angles = correction_angles(sequential_theta_solution());
            let mut out = *state;
            for (n, &phi) in angles.iter().enumerate() {
                let m = Rotation::about_x(phi).to_matrix();
                let (a, b) = (state[n], state[4 + n]);
                out[n] = m[0][0] * a + m[0][1] * b;
                out[4 + n] = m[1][0] * a + m[1][1] * b;
            }
            out
        }
    }
}

fn electron_density(state: &State3) -> [[Complex64; 2]; 2] {
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in rho.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = (0..4)
                .map(|n| state[4 * r + n] * state[4 * c + n].conj())
                .sum();
        }
    }
    rho
}

/// Run encode, error, decode and correction.
pub fn run_bitflip_code(scenario: &QecScenario) -> QecOutcome {
    let psi = scenario.electron_input();
    let initial = basis_state(psi);
    let mut encoded = apply_conditional(&initial, &scenario.gates);
    if scenario.scheme == QecScheme::Multispin {
        let ry = Rotation::about_y(-PI).to_matrix();
        encoded = apply_local(&apply_local(&encoded, 1, &ry), 2, &ry);
    }
    let after_error = match scenario.error.qubit() {
        Some(q) => flip(&encoded, q),
        None => encoded,
    };
    let decoded = apply_conditional(&after_error, &scenario.gates);
    let corrected = correct(&decoded, scenario.scheme);
    let rho = electron_density(&corrected);
    let mut recovery = Complex64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            recovery += psi[r].conj() * rho[r][c] * psi[c];
        }
    }
    let purity = (0..2)
        .flat_map(|r| (0..2).map(move |c| (r, c)))
        .map(|(r, c)| rho[r][c].norm_sqr())
        .sum();
    QecOutcome {
        initial,
        encoded,
        after_error,
        decoded,
        corrected,
        recovery: recovery.re,
        purity,
    }
}

/// Error probability `1 − recovery` over a `(γ, δ)` grid; rows follow `gammas`.
pub fn error_surface(template: &QecScenario, gammas: &[f64], deltas: &[f64]) -> Vec<Vec<f64>> {
    gammas
        .par_iter()
        .map(|&g| {
            deltas
                .iter()
                .map(|&d| run_bitflip_code(&template.with_input(g, d)).error_probability())
                .collect()
        })
        .collect()
}

/// Bloch vectors of one nucleus, started in `|1⟩`, through encoding, `R_y(−π)` and decoding
/// with the electron held in `branch`.
pub fn nuclear_trajectory(unit: &ConditionalRotation, iterations: u64, branch: usize) -> Vec<Vec3> {
    let r = unit.branch[branch];
    let one = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let mut psi = one;
    let mut out = vec![bloch(psi)];
    for _ in 0..iterations {
        psi = r.apply(psi);
        out.push(bloch(psi));
    }
    psi = Rotation::about_y(-PI).apply(psi);
    out.push(bloch(psi));
    for _ in 0..iterations {
        psi = r.apply(psi);
        out.push(bloch(psi));
    }
    out
}

/// `|sin(φ/2)(n_z,1 − n_z,0)|`, the axis mismatch that makes the multi-spin decoding imperfect.
pub fn disentanglement_residual(rot: &ConditionalRotation) -> f64 {
    (rot.branch[1].v[2] - rot.branch[0].v[2]).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::{
        branch_frequencies, unit_propagator, Electron, NuclearSpin, PulseSequence,
    };

    fn norm(s: &State3) -> f64 {
        s.iter().map(|x| x.norm_sqr()).sum()
    }

    #[test]
    fn theta_constraints() {
        let th = sequential_theta_solution();
        let [t1, t2, t3, t4] = th;
        assert!((t1 - t2 - t3 + t4 + PI).abs() < 1e-15);
        assert!((t1 + t2 - t3 - t4).abs() < 1e-15);
        assert!((t1 + t2 + t3 + t4).abs() < 1e-15);
        assert!((t1 - t2 + t3 - t4).abs() < 1e-15);
        assert_eq!(correction_angles(th), [0.0, 0.0, 0.0, -PI]);
    }

    #[test]
    fn sequential_ideal_recovers_every_single_flip() {
        for e in QecError::ALL {
            for (g, d) in [(0.0, 0.0), (1.1, 0.3), (PI, 2.0), (2.5, 5.9)] {
                let out = run_bitflip_code(&QecScenario::sequential_ideal(e, g, d));
                assert!((out.recovery - 1.0).abs() < 1e-12, "{e:?} {}", out.recovery);
                assert!((out.purity - 1.0).abs() < 1e-12);
                for (_, s) in out.stages() {
                    assert!((norm(s) - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn multispin_ideal_flip_sends_nuclei_to_zero() {
        let phi = 1.3;
        let n0 = [0.6, 0.0, 0.8];
        let n1 = [-0.6, 0.0, 0.8];
        let g = ConditionalRotation::new(
            Rotation::from_axis_angle(n0, phi),
            Rotation::from_axis_angle(n1, phi),
        );
        let out = run_bitflip_code(&QecScenario::multispin([g, g], QecError::None, 0.7, 1.9));
        for (i, a) in out.decoded.iter().enumerate() {
            if i & 3 != 0 {
                assert!(a.norm() < 1e-14);
            }
        }
        assert!((out.recovery - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_surface_shape() {
        let t = QecScenario::sequential_ideal(QecError::Electron, 0.0, 0.0);
        let s = error_surface(&t, &[0.0, 1.0, 2.0], &[0.0, 3.0]);
        assert_eq!((s.len(), s[0].len()), (3, 2));
        assert!(s.iter().flatten().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn trajectory_returns_to_north_pole_for_ideal_flip() {
        let g = ideal_crx();
        let path = nuclear_trajectory(&g, 1, 0);
        assert_eq!(path.len(), 4);
        assert!((path[0][2] + 1.0).abs() < 1e-15);
        assert!((path[3][2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_matches_sine_product() {
        let e = Electron::nv();
        let spin = NuclearSpin::from_khz("c", 20.569, 41.51, 432.0).unwrap();
        for t in [3.3e-6, 7.1e-6, 11.37e-6] {
            let rot = unit_propagator(&PulseSequence::cpmg(t).unwrap(), &spin, &e);
            let f = branch_frequencies(&spin, &e);
            let (w0, w1) = (f.omega[0], f.omega[1]);
            let (th0, th1) = (f.theta[0], f.theta[1]);
            let want = 2.0
                * (th0 - th1).sin()
                * (th1.sin() * (t * w0 / 4.0).sin() * (t * w1 / 8.0).sin().powi(2)
                    + th0.sin() * (t * w1 / 4.0).sin() * (t * w0 / 8.0).sin().powi(2));
            assert!((disentanglement_residual(&rot) - want.abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_vanishes_without_b() {
        let spin = NuclearSpin::from_khz("c", 30.0, 0.0, 432.0).unwrap();
        let rot = unit_propagator(&PulseSequence::cpmg(5e-6).unwrap(), &spin, &Electron::nv());
        assert!(disentanglement_residual(&rot) < 1e-15);
    }
}
