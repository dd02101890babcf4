//! Gate error as a function of the number of unwanted spins traced out.

use crate::entanglement::scaled_nuclear_one_tangle;
use crate::error::{invalid, Result};
use crate::fidelity::{
    target_subspace_fidelity, target_subspace_fidelity_factorized, RegisterPartition, MAX_UNWANTED,
};
use crate::spin_model::ConditionalRotation;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Half-open interval `[lo, hi)` of scaled one-tangles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangleBin {
    pub lo: f64,
    pub hi: f64,
}

impl TangleBin {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x < self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathErrorRow {
    pub bin: TangleBin,
    pub requested: usize,
    /// Bath size used, smaller than `requested` when the bin is short of spins.
    pub bath_size: usize,
    pub mean_error: f64,
    /// Standard error over ensembles.
    pub std_error: f64,
    pub ensembles: usize,
}

fn gate_error(targets: &[ConditionalRotation], bath: Vec<ConditionalRotation>) -> Result<f64> {
    let large = bath.len() > MAX_UNWANTED;
    let p = RegisterPartition::new(targets.to_vec(), bath)?;
    let f = if large {
        target_subspace_fidelity_factorized(&p)
    } else {
        target_subspace_fidelity(&p)?
    };
    Ok(1.0 - f)
}

/// Mean gate error over `n_ensembles` random baths per `(bin, size)`.
///
/// `targets` and `pool` are unit rotations; both are iterated `iterations` times.
/// Pool spins are binned by their scaled one-tangle.
pub fn gate_error_vs_bath(
    targets: &[ConditionalRotation],
    pool: &[ConditionalRotation],
    iterations: u64,
    bins: &[TangleBin],
    bath_sizes: &[usize],
    n_ensembles: usize,
    seed: u64,
) -> Result<Vec<BathErrorRow>> {
    if targets.is_empty() || n_ensembles == 0 {
        return invalid("need at least one target and one ensemble");
    }
    if pool.is_empty() {
        return Ok(Vec::new());
    }
    let targets: Vec<_> = targets.iter().map(|r| r.iterate(iterations)).collect();
    let gates: Vec<_> = pool.iter().map(|r| r.iterate(iterations)).collect();
    let tangles: Vec<f64> = gates
        .iter()
        .map(|g| scaled_nuclear_one_tangle(g, 1))
        .collect();
    let mut jobs = Vec::new();
    for (b, bin) in bins.iter().enumerate() {
        let members: Vec<usize> = (0..gates.len())
            .filter(|&i| bin.contains(tangles[i]))
            .collect();
        if members.is_empty() {
            continue;
        }
        for (s, &size) in bath_sizes.iter().enumerate() {
            jobs.push((b, s, *bin, size, members.clone()));
        }
    }
    jobs.par_iter()
        .map(|(b, s, bin, size, members)| {
            let used = (*size).min(members.len());
            let errors = (0..n_ensembles)
                .map(|e| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((*b as u64) << 40) | ((*s as u64) << 20) | e as u64);
                    let bath = sample(&mut rng, members.len(), used)
                        .iter()
                        .map(|i| gates[members[i]])
                        .collect();
                    gate_error(&targets, bath)
                })
                .collect::<Result<Vec<f64>>>()?;
            let m = errors.len() as f64;
            let mean = errors.iter().sum::<f64>() / m;
            let var = if errors.len() > 1 {
                errors.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
            } else {
                0.0
            };
            Ok(BathErrorRow {
                bin: *bin,
                requested: *size,
                bath_size: used,
                mean_error: mean,
                std_error: (var / m).sqrt(),
                ensembles: n_ensembles,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::Rotation;

    fn target() -> ConditionalRotation {
        ConditionalRotation::new(
            Rotation::about_x(std::f64::consts::FRAC_PI_2),
            Rotation::about_x(-std::f64::consts::FRAC_PI_2),
        )
    }

    fn bins() -> Vec<TangleBin> {
        vec![
            TangleBin { lo: 0.0, hi: 0.05 },
            TangleBin { lo: 0.05, hi: 0.2 },
        ]
    }

    #[test]
    fn trivial_bath_has_no_error() {
        let pool =
            vec![ConditionalRotation::new(Rotation::about_z(0.3), Rotation::about_z(0.3)); 20];
        let rows = gate_error_vs_bath(&[target()], &pool, 1, &bins(), &[1, 5, 20], 4, 7).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.mean_error.abs() < 1e-14));
    }

    #[test]
    fn empty_pool() {
        assert!(gate_error_vs_bath(&[target()], &[], 1, &bins(), &[1], 4, 7)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn short_bins_report_smaller_bath_and_error_grows() {
        let pool: Vec<_> = (0..30)
            .map(|i| {
                let phi = 0.2 + 0.01 * i as f64;
                ConditionalRotation::new(Rotation::about_x(phi), Rotation::about_z(phi))
            })
            .collect();
        let rows =
            gate_error_vs_bath(&[target()], &pool, 1, &bins(), &[2, 10, 100], 16, 3).unwrap();
        let last = rows.last().unwrap();
        assert!(last.bath_size < last.requested);
        for w in rows.windows(2).filter(|w| w[0].bin == w[1].bin) {
            assert!(
                w[1].mean_error + 3.0 * w[1].std_error >= w[0].mean_error - 3.0 * w[0].std_error
            );
        }
        let again =
            gate_error_vs_bath(&[target()], &pool, 1, &bins(), &[2, 10, 100], 16, 3).unwrap();
        assert_eq!(rows, again);
    }
}
