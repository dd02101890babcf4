//! Closed-form rotation angles for CPMG, UDD4 and symmetrized UDD3 units.

use super::{branch_frequencies, Electron, NuclearSpin, PulseSequence};
use crate::error::{invalid, Result};

/// Which closed form to evaluate; named by the electron rotation per unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedFormKind {
    /// CPMG: two pulses.
    TwoPi,
    /// Symmetrized UDD3: six pulses.
    ThreePi,
    /// UDD4: four pulses.
    FourPi,
}

impl ClosedFormKind {
    fn expected_len(self) -> usize {
        match self {
            ClosedFormKind::TwoPi => 3,
            ClosedFormKind::ThreePi => 7,
            ClosedFormKind::FourPi => 5,
        }
    }
}

/// `cos(φ/2)` up to sign for one branch; `a`, `b` are own/other phases `ω·t`.
fn half_cos(kind: ClosedFormKind, q: &[f64], a: f64, b: f64, th: f64) -> f64 {
    let so: f64 = q.iter().step_by(2).sum();
    let se: f64 = q.iter().skip(1).step_by(2).sum();
    let (st, ct) = th.sin_cos();
    let s2 = st * st;
    let base = (so * a / 2.0).cos() * (se * b / 2.0).cos()
        - ct * (so * a / 2.0).sin() * (se * b / 2.0).sin();
    match kind {
        ClosedFormKind::TwoPi => base,
        ClosedFormKind::FourPi => {
            base - 2.0
                * s2
                * (q[1] * b / 2.0).sin()
                * (q[2] * a / 2.0).sin()
                * (q[3] * b / 2.0).sin()
                * ((q[0] + q[4]) * a / 2.0).sin()
        }
        ClosedFormKind::ThreePi => {
            let (q1, q2) = (q[0], q[1]);
            let sq = |x: f64| x * x;
            base + 4.0
                * ct
                * s2
                * (q1 * a).sin()
                * (q1 * b).sin()
                * sq((q2 * a / 2.0).sin())
                * sq((q2 * b / 2.0).sin())
                - 2.0
                    * s2
                    * (q1 * b).cos()
                    * (q1 * a).sin()
                    * (q2 * a).sin()
                    * sq((q2 * b / 2.0).sin())
                - 2.0
                    * s2
                    * (q1 * b).sin()
                    * (q2 * b).sin()
                    * (q2 * a / 2.0).sin()
                    * (q1 * a + q2 * a / 2.0).sin()
        }
    }
}

/// Folded rotation angles `(φ0, φ1) ∈ [0, π]²` of one unit, without composing propagators.
pub fn closed_form_angles(
    kind: ClosedFormKind,
    seq: &PulseSequence,
    spin: &NuclearSpin,
    electron: &Electron,
) -> Result<[f64; 2]> {
    let q = seq.spacings();
    if q.len() != kind.expected_len() {
        return invalid(format!(
            "{kind:?} needs {} spacings, sequence has {}",
            kind.expected_len(),
            q.len()
        ));
    }
    let f = branch_frequencies(spin, electron);
    let t = seq.unit_time();
    let (a0, a1) = (f.omega[0] * t, f.omega[1] * t);
    let th = f.theta[0] - f.theta[1];
    let g0 = half_cos(kind, q, a0, a1, th);
    let g1 = half_cos(kind, q, a1, a0, -th);
    Ok([g0, g1].map(|g| 2.0 * g.abs().min(1.0).acos()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::unit_propagator;

    #[test]
    fn matches_propagator() {
        let e = Electron::spin_half();
        for (a, b, t) in [
            (60.0, 30.0, 3.3e-6),
            (-45.0, 70.0, 7.1e-6),
            (120.0, 90.0, 3.7889e-6),
        ] {
            let s = NuclearSpin::from_khz("x", a, b, 314.0).unwrap();
            for (kind, seq) in [
                (ClosedFormKind::TwoPi, PulseSequence::cpmg(t).unwrap()),
                (ClosedFormKind::ThreePi, PulseSequence::udd(3, t).unwrap()),
                (ClosedFormKind::FourPi, PulseSequence::udd(4, t).unwrap()),
            ] {
                let cf = closed_form_angles(kind, &seq, &s, &e).unwrap();
                let rot = unit_propagator(&seq, &s, &e);
                for (j, a) in cf.iter().enumerate() {
                    assert!((a - rot.angle(j)).abs() < 1e-9, "{kind:?} branch {j}");
                }
            }
        }
    }

    #[test]
    fn rejects_mismatched_sequence() {
        let s = NuclearSpin::from_khz("x", 60.0, 30.0, 314.0).unwrap();
        let seq = PulseSequence::cpmg(3e-6).unwrap();
        assert!(
            closed_form_angles(ClosedFormKind::FourPi, &seq, &s, &Electron::spin_half()).is_err()
        );
    }
}
