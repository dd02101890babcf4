//! Single-target gate fidelity on the 27-spin register, explicit and factorized.

use spinreg::fidelity::{
    target_subspace_fidelity, target_subspace_fidelity_factorized, FidelityReport,
    RegisterPartition,
};
use spinreg::register::dataset;
use spinreg::spin_model::{resonance_time, unit_propagator, PulseSequence, ResonanceVariant};

fn main() -> spinreg::Result<()> {
    let file = dataset("nv27")?;
    let spins = file.spins(None)?;
    let e = file.electron(None, None)?;
    for (label, n) in [("C4", 82), ("C5", 6), ("C15", 118)] {
        let i = file.index_of(label)?;
        let t = resonance_time(&spins[i], &e, 3, ResonanceVariant::Primary)?;
        let seq = PulseSequence::cpmg(t)?;
        let rots: Vec<_> = spins.iter().map(|s| unit_propagator(&seq, s, &e)).collect();
        let rest: Vec<_> = rots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| *r)
            .collect();
        let report = FidelityReport::evaluate(&[rots[i]], &rest, n, t)?;
        let p = RegisterPartition::from_units(&[rots[i]], &rest, n)?;
        println!(
            "{label}: N={n} T={:.3} us tangle {:.4} error {:.5} (factorized {:.5}, explicit {:.5})",
            report.gate_time * 1e6,
            report.scaled_target_tangles()[0],
            report.gate_error(),
            1.0 - target_subspace_fidelity_factorized(&p),
            1.0 - target_subspace_fidelity(&p)?
        );
    }
    Ok(())
}
