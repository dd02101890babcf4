//! Three-qubit bit-flip code with a designed two-nucleus gate.

use spinreg::designer::{optimize_register_gate, DesignConstraints};
use spinreg::qec::{error_surface, run_bitflip_code, QecError, QecScenario};
use spinreg::register::dataset;
use spinreg::spin_model::{unit_propagator, PulseSequence};
use std::f64::consts::{FRAC_PI_2, PI};

fn main() -> spinreg::Result<()> {
    let file = dataset("nv27")?;
    let register = file.spins(None)?;
    let electron = file.electron(None, None)?;
    let anchor = file.index_of("C22")?;
    let Some(d) = optimize_register_gate(
        &register,
        &electron,
        &DesignConstraints::default(),
        anchor,
        4,
    )?
    else {
        println!("no design");
        return Ok(());
    };
    println!(
        "targets {:?} N={} T={:.2} us error {:.4}",
        d.targets,
        d.iterations,
        d.gate_time * 1e6,
        d.gate_error
    );
    if d.targets.len() != 2 {
        return Ok(());
    }
    let seq = PulseSequence::cpmg(d.unit_time)?;
    let gates = [0, 1].map(|i| {
        unit_propagator(&seq, &register[d.target_indices[i]], &electron).iterate(d.iterations)
    });

    for e in QecError::ALL {
        let out = run_bitflip_code(&QecScenario::multispin(gates, e, FRAC_PI_2, FRAC_PI_2));
        println!(
            "{e:?}: recovery {:.5} purity {:.5}",
            out.recovery, out.purity
        );
    }
    let grid: Vec<f64> = (0..20).map(|i| i as f64 * PI / 19.0).collect();
    let deltas: Vec<f64> = (0..20).map(|i| i as f64 * 2.0 * PI / 20.0).collect();
    let s = error_surface(
        &QecScenario::multispin(gates, QecError::Electron, 0.0, 0.0),
        &grid,
        &deltas,
    );
    let worst = s.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    println!("worst error over the (gamma, delta) grid {worst:.2e}");
    Ok(())
}
