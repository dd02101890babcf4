use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinreg::entanglement::{electron_one_tangle, makhlin_g1, makhlin_g2, nuclear_one_tangle};
use spinreg::fidelity::{target_subspace_fidelity, RegisterPartition};
use spinreg::oracle::{
    controlled_gate, dense_from_rotations, dense_propagator, magic_basis_invariants,
    mc_bipartition_entangling_power, numeric_kraus_fidelity, piecewise_propagator,
};
use spinreg::spin_model::{ConditionalRotation, Electron, NuclearSpin, PulseSequence, Rotation};
use spinreg::Error;

fn random_gate(rng: &mut ChaCha8Rng) -> ConditionalRotation {
    let mut r = || {
        let axis = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        Rotation::from_axis_angle(axis, rng.random_range(0.0..std::f64::consts::TAU))
    };
    ConditionalRotation::new(r(), r())
}

fn random_register(rng: &mut ChaCha8Rng, n: usize) -> Vec<NuclearSpin> {
    (0..n)
        .map(|i| {
            NuclearSpin::from_khz(
                format!("r{i}"),
                rng.random_range(-100.0..100.0),
                rng.random_range(5.0..100.0),
                314.0,
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn quaternion_propagator_matches_matrix_exponentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seq in [
        PulseSequence::cpmg(4.7e-6).unwrap(),
        PulseSequence::udd(3, 6.1e-6).unwrap(),
        PulseSequence::udd(4, 3.1861e-6).unwrap(),
    ] {
        for e in [Electron::spin_half(), Electron::nv()] {
            let reg = random_register(&mut rng, 3);
            let a = dense_propagator(&reg, &e, &seq, 7).unwrap();
            let b = piecewise_propagator(&reg, &e, &seq, 7).unwrap();
            assert!(a.max_diff(&b) < 1e-9, "{}", a.max_diff(&b));
        }
    }
}

#[test]
fn makhlin_formulas_match_magic_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let g = random_gate(&mut rng);
        let n = rng.random_range(1..50u64);
        let (g1, g2) = magic_basis_invariants(&controlled_gate(&g.iterate(n))).unwrap();
        assert!((g1 - makhlin_g1(&g, n)).abs() < 1e-10);
        assert!((g2 - makhlin_g2(&g, n)).abs() < 1e-10);
    }
}

#[test]
fn local_frame_leaves_g1_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let g = random_gate(&mut rng);
        let frame = random_gate(&mut rng).branch[0];
        let h = ConditionalRotation::new(
            frame.inverse().then(g.branch[0]).then(frame),
            frame.inverse().then(g.branch[1]).then(frame),
        );
        let (a, _) = magic_basis_invariants(&controlled_gate(&g)).unwrap();
        let (b, _) = magic_basis_invariants(&controlled_gate(&h)).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn analytic_fidelity_matches_numeric_kraus() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..30 {
        let k = rng.random_range(1..=3usize);
        let l = rng.random_range(0..=(8 - k));
        let rots: Vec<_> = (0..k + l).map(|_| random_gate(&mut rng)).collect();
        let u = dense_from_rotations(&rots).unwrap();
        let target = dense_from_rotations(&rots[..k]).unwrap();
        let num = numeric_kraus_fidelity(&u, &target, k).unwrap();
        let p = RegisterPartition::new(rots[..k].to_vec(), rots[k..].to_vec()).unwrap();
        assert!((num - target_subspace_fidelity(&p).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn one_tangles_match_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rots: Vec<_> = (0..3).map(|_| random_gate(&mut rng)).collect();
    let u = dense_from_rotations(&rots).unwrap();
    let (m, se) = mc_bipartition_entangling_power(&u, 0, 20_000, 9).unwrap();
    assert!((m - electron_one_tangle(&rots, 1).unwrap()).abs() < 4.0 * se);
    let (m, se) = mc_bipartition_entangling_power(&u, 2, 20_000, 10).unwrap();
    assert!((m - nuclear_one_tangle(&rots[1], 1)).abs() < 4.0 * se);
}

#[test]
fn oracle_refuses_large_registers() {
    let rots = vec![ConditionalRotation::identity(); 20];
    assert!(matches!(
        dense_from_rotations(&rots),
        Err(Error::Capacity(_))
    ));
}
