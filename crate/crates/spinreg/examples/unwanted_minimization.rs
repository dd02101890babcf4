//! Keep a target maximally entangled while suppressing a neighbour.

use spinreg::designer::minimize_unwanted_tangle;
use spinreg::spin_model::{Electron, NuclearSpin, SequenceKind};

fn main() -> spinreg::Result<()> {
    let e = Electron::spin_half();
    let target = NuclearSpin::from_khz("t", 60.0, 30.0, 314.0)?;
    for (a, b) in [(62.0, 30.0), (70.0, 25.0), (-20.0, 40.0)] {
        let other = NuclearSpin::from_khz("u", a, b, 314.0)?;
        for kind in [SequenceKind::Cpmg, SequenceKind::Udd(3)] {
            let m = minimize_unwanted_tangle(&target, &other, &e, &kind, 1..=6, 2000)?;
            println!(
                "unwanted A={a} B={b} {kind}: k={} N={} t={:.4} us tangle {:.3e}",
                m.k,
                m.iterations,
                m.unit_time * 1e6,
                m.tangle
            );
        }
    }
    Ok(())
}
