use proptest::prelude::*;
use spinreg::designer::{estimate_position, hyperfine_from_position, PhysicalConstants, Position};
use spinreg::entanglement::{
    electron_one_tangle, entangling_power, makhlin_g1, makhlin_g2, nuclear_one_tangle,
    NUCLEAR_TANGLE_MAX,
};
use spinreg::fidelity::{
    kraus_coefficients, kraus_sum_explicit, kraus_sum_factorized, target_subspace_fidelity,
    RegisterPartition,
};
use spinreg::register::{RegisterFile, RegisterRow};
use spinreg::spin_model::{
    resonance_time, unit_propagator, ConditionalRotation, Electron, NuclearSpin, PulseSequence,
    ResonanceVariant, Rotation,
};

fn rotation() -> impl Strategy<Value = Rotation> {
    (
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        0.0f64..std::f64::consts::TAU,
    )
        .prop_filter("axis", |(x, y, z, _)| x * x + y * y + z * z > 1e-3)
        .prop_map(|(x, y, z, a)| Rotation::from_axis_angle([x, y, z], a))
}

fn gate() -> impl Strategy<Value = ConditionalRotation> {
    (rotation(), rotation()).prop_map(|(a, b)| ConditionalRotation::new(a, b))
}

fn spin() -> impl Strategy<Value = NuclearSpin> {
    (-150.0f64..150.0, 1.0f64..150.0, 200.0f64..600.0)
        .prop_map(|(a, b, wl)| NuclearSpin::from_khz("p", a, b, wl).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn axis_angle_round_trip(r in rotation()) {
        let aa = r.axis_angle();
        prop_assert!((0.0..=std::f64::consts::PI + 1e-12).contains(&aa.angle));
        let back = aa.to_rotation();
        let same = (back.w - r.w).abs() < 1e-10 && back.v.iter().zip(&r.v).all(|(a, b)| (a - b).abs() < 1e-10);
        let flipped = (back.w + r.w).abs() < 1e-10 && back.v.iter().zip(&r.v).all(|(a, b)| (a + b).abs() < 1e-10);
        prop_assert!(same || flipped);
    }

    #[test]
    fn iterate_matches_repeated_product(g in gate(), n in 0u64..60) {
        let mut acc = ConditionalRotation::identity();
        for _ in 0..n {
            acc = ConditionalRotation::new(acc.branch[0].then(g.branch[0]), acc.branch[1].then(g.branch[1]));
        }
        let it = g.iterate(n);
        for j in 0..2 {
            prop_assert!((it.branch[j].w - acc.branch[j].w).abs() < 1e-9);
        }
    }

    #[test]
    fn makhlin_ranges(g in gate(), n in 1u64..1000) {
        let (g1, g2) = (makhlin_g1(&g, n), makhlin_g2(&g, n));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&g1));
        prop_assert!((1.0 - 1e-12..=3.0 + 1e-12).contains(&g2));
        prop_assert!((nuclear_one_tangle(&g, n) - entangling_power(&g, n)).abs() < 1e-12);
        prop_assert!((nuclear_one_tangle(&g, n) - NUCLEAR_TANGLE_MAX * (1.0 - g1)).abs() < 1e-12);
        prop_assert!((makhlin_g1(&g.swapped(), n) - g1).abs() < 1e-12);
    }

    #[test]
    fn single_nucleus_electron_tangle(g in gate(), n in 1u64..200) {
        let one = electron_one_tangle(&[g], n).unwrap();
        let padded = electron_one_tangle(&[g, ConditionalRotation::identity(), ConditionalRotation::identity()], n).unwrap();
        prop_assert!((one - padded).abs() < 1e-12);
    }

    #[test]
    fn kraus_completeness(gs in prop::collection::vec(gate(), 1..8)) {
        let mut tot = [0.0, 0.0];
        for i in 0..1u64 << gs.len() {
            let c = kraus_coefficients(&gs, i).unwrap();
            tot[0] += c[0].norm_sqr();
            tot[1] += c[1].norm_sqr();
        }
        prop_assert!((tot[0] - 1.0).abs() < 1e-9 && (tot[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn explicit_and_factorized_sums_agree(gs in prop::collection::vec(gate(), 0..12), w0 in 0.0f64..1.0, w1 in 0.0f64..1.0) {
        let a = kraus_sum_explicit(&gs, [w0, w1]).unwrap();
        let b = kraus_sum_factorized(&gs, [w0, w1]);
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn fidelity_bounds_and_idle_spin(ts in prop::collection::vec(gate(), 1..4), us in prop::collection::vec(gate(), 0..8)) {
        let p = RegisterPartition::new(ts.clone(), us.clone()).unwrap();
        let f = target_subspace_fidelity(&p).unwrap();
        let lo = 1.0 / ((1u64 << (ts.len() + 1)) as f64 + 1.0);
        prop_assert!(f >= lo - 1e-12 && f <= 1.0 + 1e-12);
        let idle = ConditionalRotation::new(Rotation::about_z(0.7), Rotation::about_z(0.7));
        let mut more = us;
        more.push(idle);
        let g = target_subspace_fidelity(&RegisterPartition::new(ts, more).unwrap()).unwrap();
        prop_assert!((f - g).abs() < 1e-12);
    }

    #[test]
    fn branch_swap_symmetry(s in spin(), t in 1e-6f64..2e-5) {
        let e = Electron::nv();
        let seq = PulseSequence::cpmg(t).unwrap();
        let a = unit_propagator(&seq, &s, &e);
        let b = unit_propagator(&seq, &s, &e.swapped());
        for j in 0..2 {
            let (x, y) = (a.axis_angle(j), b.axis_angle(1 - j));
            prop_assert!((x.angle - y.angle).abs() < 1e-9);
        }
    }

    #[test]
    fn resonances_increase_with_order(s in spin()) {
        let e = Electron::spin_half();
        let ts: Vec<f64> = (1..=4).map(|k| resonance_time(&s, &e, k, ResonanceVariant::Primary).unwrap()).collect();
        prop_assert!(ts[0] > 0.0 && ts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn position_round_trip(r in 3.0f64..30.0, theta in 1.0f64..179.0) {
        let c = PhysicalConstants::default();
        let (a, b) = hyperfine_from_position(&Position { r_angstrom: r, theta_deg: theta }, &c);
        if let Ok(p) = estimate_position(a, b.abs(), &c) {
            let (a2, b2) = hyperfine_from_position(&p, &c);
            prop_assert!((a2 - a).abs() <= 1e-9 * a.abs().max(b.abs()));
            prop_assert!((b2.abs() - b.abs()).abs() <= 1e-9 * a.abs().max(b.abs()));
        }
    }

    #[test]
    fn register_csv_round_trip(rows in prop::collection::vec((-500.0f64..500.0, 0.0f64..500.0), 0..20)) {
        let file = RegisterFile {
            rows: rows.iter().enumerate().map(|(i, &(a, b))| RegisterRow { label: format!("s{i}"), a_khz: a, b_khz: b }).collect(),
            larmor_khz: Some(314.0),
            s0: Some(0.0),
            s1: Some(-1.0),
        };
        prop_assert_eq!(RegisterFile::parse(&file.to_csv()).unwrap(), file);
    }
}
