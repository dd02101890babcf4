//! Iteration counts that maximize the nuclear one-tangle, numeric scan against closed form.

use spinreg::entanglement::{analytic_minima, optimal_iterations, scaled_nuclear_one_tangle};
use spinreg::spin_model::{
    resonance_time, unit_propagator, Electron, NuclearSpin, PulseSequence, ResonanceVariant,
};

fn main() -> spinreg::Result<()> {
    let e = Electron::nv();
    let s = NuclearSpin::from_khz("C5", -11.346, 59.21, 432.0)?;
    for k in 1..=3 {
        let t = resonance_time(&s, &e, k, ResonanceVariant::Primary)?;
        let rot = unit_propagator(&PulseSequence::cpmg(t)?, &s, &e);
        let scan = optimal_iterations(&rot, 200);
        println!("k={k} t={:.4} us n0.n1={:+.5}", t * 1e6, rot.axis_dot());
        println!("  scan    {:?}", &scan[..scan.len().min(10)]);
        println!("  minima  {:?}", analytic_minima(&rot, 4));
        if let Some(&n) = scan.first() {
            println!(
                "  scaled tangle at N={n}: {:.5}",
                scaled_nuclear_one_tangle(&rot, n)
            );
        }
    }
    Ok(())
}
