//! Synchronous three-spin gate on the bundled 27-spin register.

use spinreg::designer::{optimize_register_gate, DesignConstraints};
use spinreg::register::dataset;

fn main() -> spinreg::Result<()> {
    let file = dataset("nv27")?;
    let register = file.spins(None)?;
    let electron = file.electron(None, None)?;
    let anchor = file.index_of("C20")?;
    let constraints = DesignConstraints::default();
    match optimize_register_gate(&register, &electron, &constraints, anchor, 3)? {
        Some(d) => {
            println!(
                "anchor {} k={} t={:.7} us N={} T={:.2} us",
                d.anchor,
                d.k,
                d.unit_time * 1e6,
                d.iterations,
                d.gate_time * 1e6
            );
            for (l, e) in d.targets.iter().zip(&d.target_tangles) {
                println!("  target {l:>4}  {e:.5}");
            }
            let worst = d
                .unwanted
                .iter()
                .zip(&d.unwanted_tangles)
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            println!("  worst unwanted {} {:.5}", worst.0, worst.1);
            println!("  gate error {:.5}", d.gate_error);
        }
        None => println!("no design"),
    }
    Ok(())
}
