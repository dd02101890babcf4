//! Analytic formulas against the dense brute-force engine on a four-spin register.

use spinreg::entanglement::{electron_one_tangle, makhlin_g1, nuclear_one_tangle};
use spinreg::fidelity::{target_subspace_fidelity, RegisterPartition};
use spinreg::oracle::{
    controlled_gate, dense_from_rotations, magic_basis_invariants, mc_bipartition_entangling_power,
    numeric_kraus_fidelity, piecewise_propagator,
};
use spinreg::spin_model::{unit_propagator, Electron, NuclearSpin, PulseSequence};

fn main() -> spinreg::Result<()> {
    let e = Electron::spin_half();
    let reg = [(60.0, 30.0), (80.0, 25.0), (-30.0, 45.0), (15.0, 70.0)]
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| NuclearSpin::from_khz(format!("n{i}"), a, b, 314.0))
        .collect::<spinreg::Result<Vec<_>>>()?;
    let seq = PulseSequence::udd(4, 3.1861e-6)?;
    let n = 40;
    let rots: Vec<_> = reg
        .iter()
        .map(|s| unit_propagator(&seq, s, &e).iterate(n))
        .collect();
    let u = dense_from_rotations(&rots)?;
    println!(
        "propagator vs matrix exponentials: {:.2e}",
        u.max_diff(&piecewise_propagator(&reg, &e, &seq, n)?)
    );
    let (g1, _) = magic_basis_invariants(&controlled_gate(&rots[0]))?;
    println!(
        "G1 magic basis {g1:.12} closed form {:.12}",
        makhlin_g1(&rots[0], 1)
    );
    let target = dense_from_rotations(&rots[..2])?;
    let p = RegisterPartition::new(rots[..2].to_vec(), rots[2..].to_vec())?;
    println!(
        "fidelity numeric {:.12} analytic {:.12}",
        numeric_kraus_fidelity(&u, &target, 2)?,
        target_subspace_fidelity(&p)?
    );
    let (m, se) = mc_bipartition_entangling_power(&u, 0, 100_000, 1)?;
    println!(
        "electron tangle MC {m:.5} +- {se:.1e} formula {:.5}",
        electron_one_tangle(&rots, 1)?
    );
    let (m, se) = mc_bipartition_entangling_power(&u, 1, 100_000, 2)?;
    println!(
        "nuclear tangle MC {m:.5} +- {se:.1e} formula {:.5}",
        nuclear_one_tangle(&rots[0], 1)
    );
    Ok(())
}
