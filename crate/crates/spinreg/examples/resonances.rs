//! Resonance times of CPMG and UDD units for a few couplings.

use spinreg::spin_model::{
    build_sequence, resonance_time, unit_propagator, Electron, NuclearSpin, ResonanceVariant,
    SequenceKind,
};

fn main() -> spinreg::Result<()> {
    let e = Electron::spin_half();
    for (a, b) in [(80.0, 25.0), (60.0, 30.0), (-40.0, 90.0)] {
        let s = NuclearSpin::from_khz("c", a, b, 314.0)?;
        println!("A={a} kHz B={b} kHz");
        for k in 1..=4 {
            let t = resonance_time(&s, &e, k, ResonanceVariant::Primary)?;
            let row: Vec<String> = [
                SequenceKind::Cpmg,
                SequenceKind::Udd(3),
                SequenceKind::Udd(4),
            ]
            .iter()
            .map(|kind| {
                Ok(format!(
                    "{kind} n0.n1={:+.4}",
                    unit_propagator(&build_sequence(kind, t)?, &s, &e).axis_dot()
                ))
            })
            .collect::<spinreg::Result<_>>()?;
            println!("  k={k} t={:.4} us  {}", t * 1e6, row.join("  "));
        }
    }
    Ok(())
}
