//! Dipolar inversion between hyperfine couplings and nuclear position.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Constants entering the dipolar coupling strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Vacuum permeability (T·m/A).
    pub mu0: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Electron gyromagnetic ratio (rad/(s·T)).
    pub gamma_e: f64,
    /// ¹³C gyromagnetic ratio (rad/(s·T)).
    pub gamma_n: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            mu0: 1.256_637_062_12e-6,
            hbar: 1.054_571_817e-34,
            gamma_e: 1.760_859_630_23e11,
            gamma_n: 67.2828e6,
        }
    }
}

impl PhysicalConstants {
    /// `μ0 γ_e γ_n ħ / 4π`, in rad/s · m³.
    pub fn dipolar_strength(&self) -> f64 {
        self.mu0 * self.gamma_e * self.gamma_n * self.hbar / (4.0 * std::f64::consts::PI)
    }
}

/// Distance from the electron (Å) and polar angle from the quantization axis (degrees).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub r_angstrom: f64,
    pub theta_deg: f64,
}

/// Position from angular hyperfine couplings `A`, `B` (rad/s).
pub fn estimate_position(a: f64, b: f64, consts: &PhysicalConstants) -> Result<Position> {
    if !(a.is_finite() && b.is_finite()) || b < 0.0 || (a == 0.0 && b == 0.0) {
        return Err(Error::NoSolution(format!(
            "no dipolar solution for A={a}, B={b}"
        )));
    }
    let theta = (-3.0 * a + (9.0 * a * a + 8.0 * b * b).sqrt()).atan2(2.0 * b);
    let (s, c) = theta.sin_cos();
    let da = 3.0 * c * c - 1.0;
    let db = 3.0 * c * s;
    let a0 = if da.abs() >= db.abs() { a / da } else { b / db };
    if !(a0 > 0.0) {
        return Err(Error::NoSolution(format!(
            "non-positive coupling strength {a0}"
        )));
    }
    let r = (consts.dipolar_strength() / a0).cbrt();
    Ok(Position {
        r_angstrom: r * 1e10,
        theta_deg: theta.to_degrees(),
    })
}

/// Angular couplings `(A, B)` of a nucleus at the given position.
pub fn hyperfine_from_position(pos: &Position, consts: &PhysicalConstants) -> (f64, f64) {
    let r = pos.r_angstrom * 1e-10;
    let a0 = consts.dipolar_strength() / (r * r * r);
    let (s, c) = pos.theta_deg.to_radians().sin_cos();
    (a0 * (3.0 * c * c - 1.0), 3.0 * a0 * c * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::khz;

    #[test]
    fn reference_rows() {
        let k = PhysicalConstants::default();
        let p = estimate_position(khz(195.78), khz(49.619), &k).unwrap();
        assert!((p.r_angstrom - 5.798).abs() < 5e-4 && (p.theta_deg - 9.4595).abs() < 1e-3);
        let p = estimate_position(khz(57.301), khz(157.25), &k).unwrap();
        assert!((p.r_angstrom - 5.7448).abs() < 5e-4 && (p.theta_deg - 44.115).abs() < 1e-3);
    }

    #[test]
    fn on_axis_dipole() {
        let k = PhysicalConstants::default();
        let a = khz(80.0);
        let p = estimate_position(a, 0.0, &k).unwrap();
        assert_eq!(p.theta_deg, 0.0);
        let want = (2.0 * k.dipolar_strength() / a).cbrt() * 1e10;
        assert!((p.r_angstrom - want).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let k = PhysicalConstants::default();
        for (r, th) in [(4.0, 10.0), (7.5, 60.0), (12.0, 85.0), (5.0, 54.0)] {
            let pos = Position {
                r_angstrom: r,
                theta_deg: th,
            };
            let (a, b) = hyperfine_from_position(&pos, &k);
            let back = estimate_position(a, b, &k).unwrap();
            assert!(((back.r_angstrom - r) / r).abs() < 1e-9);
            assert!(((back.theta_deg - th) / th).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_impossible() {
        let k = PhysicalConstants::default();
        assert!(estimate_position(0.0, 0.0, &k).is_err());
        assert!(estimate_position(1.0, -1.0, &k).is_err());
    }
}
