//! Seeded random hyperfine ensembles with pairwise distinctness.

use crate::error::{invalid, Error, Result};
use crate::spin_model::NuclearSpin;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Sampling ranges and distinctness, all in kHz.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub count: usize,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    /// Two spins must differ by at least this much in `A` or in `B`.
    pub distinctness: f64,
    pub larmor: f64,
}

/// Uniform draws of `(A, B)` with rejection of near-duplicates.
///
/// Fails once `20·count + 10⁴` draws have been rejected.
pub fn generate_random_ensemble(spec: &EnsembleSpec, seed: u64) -> Result<Vec<NuclearSpin>> {
    let (a0, a1) = spec.a_range;
    let (b0, b1) = spec.b_range;
    if !(a1 > a0 && b1 > b0 && b0 >= 0.0) || !(spec.distinctness >= 0.0) {
        return invalid("ranges must be increasing, B non-negative, distinctness non-negative");
    }
    let d = spec.distinctness;
    let cell = if d > 0.0 { d } else { 1.0 };
    let key = |a: f64, b: f64| {
        (
            ((a - a0) / cell).floor() as i64,
            ((b - b0) / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(spec.count);
    let budget = 20 * spec.count + 10_000;
    let mut rejected = 0usize;
    while out.len() < spec.count {
        let a = rng.random_range(a0..a1);
        let b = rng.random_range(b0..b1);
        let (ka, kb) = key(a, b);
        let clash = d > 0.0
            && (ka - 1..=ka + 1).any(|i| {
                (kb - 1..=kb + 1).any(|j| {
                    grid.get(&(i, j)).is_some_and(|pts| {
                        pts.iter()
                            .any(|&(pa, pb)| (pa - a).abs() < d && (pb - b).abs() < d)
                    })
                })
            });
        if clash {
            rejected += 1;
            if rejected > budget {
                return Err(Error::NoSolution(format!(
                    "placed {} of {} distinct spins before giving up",
                    out.len(),
                    spec.count
                )));
            }
            continue;
        }
        grid.entry((ka, kb)).or_default().push((a, b));
        out.push(NuclearSpin::from_khz(
            format!("R{}", out.len() + 1),
            a,
            b,
            spec.larmor,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::to_khz;

    fn spec(count: usize, d: f64) -> EnsembleSpec {
        EnsembleSpec {
            count,
            a_range: (10.0, 200.0),
            b_range: (10.0, 200.0),
            distinctness: d,
            larmor: 314.0,
        }
    }

    #[test]
    fn seeded_and_distinct() {
        let a = generate_random_ensemble(&spec(10, 25.0), 42).unwrap();
        let b = generate_random_ensemble(&spec(10, 25.0), 42).unwrap();
        assert_eq!(a, b);
        for i in 0..a.len() {
            for j in 0..i {
                let da = to_khz((a[i].a - a[j].a).abs());
                let db = to_khz((a[i].b - a[j].b).abs());
                assert!(da >= 25.0 - 1e-9 || db >= 25.0 - 1e-9);
            }
            assert!((10.0..200.0).contains(&to_khz(a[i].a)));
        }
        assert_ne!(a, generate_random_ensemble(&spec(10, 25.0), 43).unwrap());
    }

    #[test]
    fn large_bath_ensemble() {
        let s = EnsembleSpec {
            count: 300_000,
            a_range: (-2000.0, 2000.0),
            b_range: (0.0, 2000.0),
            distinctness: 3.0,
            larmor: 314.0,
        };
        let a = generate_random_ensemble(&s, 7).unwrap();
        assert_eq!(a.len(), 300_000);
        assert_eq!(a, generate_random_ensemble(&s, 7).unwrap());
    }

    #[test]
    fn impossible_distinctness_fails() {
        assert!(generate_random_ensemble(&spec(2, 500.0), 1).is_err());
    }
}
