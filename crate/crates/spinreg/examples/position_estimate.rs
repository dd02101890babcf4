//! Nuclear positions from hyperfine couplings of the 27-spin register.

use spinreg::designer::{estimate_position, hyperfine_from_position, PhysicalConstants};
use spinreg::register::dataset;
use spinreg::spin_model::khz;

fn main() -> spinreg::Result<()> {
    let consts = PhysicalConstants::default();
    for row in dataset("nv27")?.rows {
        match estimate_position(khz(row.a_khz), khz(row.b_khz.abs()), &consts) {
            Ok(p) => {
                let (a, b) = hyperfine_from_position(&p, &consts);
                println!(
                    "{:>4}: R={:6.3} A theta={:6.2} deg  back A={:8.3} B={:7.3} kHz",
                    row.label,
                    p.r_angstrom,
                    p.theta_deg,
                    a / khz(1.0),
                    b / khz(1.0)
                );
            }
            Err(err) => println!("{:>4}: {err}", row.label),
        }
    }
    Ok(())
}
