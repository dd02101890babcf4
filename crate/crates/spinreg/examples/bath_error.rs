//! Gate error against growing baths drawn from tangle bins.

use spinreg::designer::{gate_error_vs_bath, generate_random_ensemble, EnsembleSpec, TangleBin};
use spinreg::spin_model::{
    resonance_time, unit_propagator, Electron, NuclearSpin, PulseSequence, ResonanceVariant,
};

fn main() -> spinreg::Result<()> {
    let e = Electron::spin_half();
    let target = NuclearSpin::from_khz("t", 60.0, 30.0, 314.0)?;
    let t = resonance_time(&target, &e, 2, ResonanceVariant::Primary)?;
    let seq = PulseSequence::cpmg(t)?;
    let spec = EnsembleSpec {
        count: 3000,
        a_range: (-200.0, 200.0),
        b_range: (0.0, 200.0),
        distinctness: 0.5,
        larmor: 314.0,
    };
    let pool: Vec<_> = generate_random_ensemble(&spec, 11)?
        .iter()
        .map(|s| unit_propagator(&seq, s, &e))
        .collect();
    let bins = [
        TangleBin { lo: 0.0, hi: 0.01 },
        TangleBin { lo: 0.01, hi: 0.05 },
        TangleBin { lo: 0.05, hi: 0.14 },
    ];
    let rows = gate_error_vs_bath(
        &[unit_propagator(&seq, &target, &e)],
        &pool,
        30,
        &bins,
        &[4, 8, 16, 24],
        10,
        3,
    )?;
    for r in rows {
        println!(
            "bin [{:.2},{:.2}) bath {:>2}/{:>2}: error {:.4e} +- {:.1e}",
            r.bin.lo, r.bin.hi, r.bath_size, r.requested, r.mean_error, r.std_error
        );
    }
    Ok(())
}
