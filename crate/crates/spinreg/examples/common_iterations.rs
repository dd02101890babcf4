//! Shared iteration counts for a ten-spin random register at one unit time.

use spinreg::designer::find_common_iterations;
use spinreg::entanglement::scaled_nuclear_one_tangle;
use spinreg::register::dataset;
use spinreg::spin_model::{unit_propagator, PulseSequence};

fn main() -> spinreg::Result<()> {
    let file = dataset("rand-cpmg-k1")?;
    let spins = file.spins(None)?;
    let e = file.electron(None, None)?;
    let spins = &spins[..spins.len().min(10)];
    let t = 3.1874e-6;
    let seq = PulseSequence::cpmg(t)?;
    let rots: Vec<_> = spins.iter().map(|s| unit_propagator(&seq, s, &e)).collect();
    let c = find_common_iterations(&rots, 2000)?;
    println!(
        "t={:.4} us N*={} candidates {:?}",
        t * 1e6,
        c.n_star,
        &c.candidates[..c.candidates.len().min(8)]
    );
    for (i, s) in spins.iter().enumerate() {
        let mark = if c.participants.contains(&i) {
            "*"
        } else {
            " "
        };
        println!(
            "{mark} {:>3} scaled tangle {:.4}",
            s.label,
            scaled_nuclear_one_tangle(&rots[i], c.n_star)
        );
    }
    Ok(())
}
