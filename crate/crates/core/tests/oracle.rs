mod common;

use common::{brute_force_assign, enumerate_axis, micro_case, naive_grid, naive_sweep, pairs_of};
use gridlabel::geometry::{LabelConfig, MapBounds};
use gridlabel::grid::{generate_grid, sweep_phase};
use gridlabel::instance::random_instance;
use gridlabel::matching::{assign_labels, build_nlm, corner_distance_table};
use proptest::prelude::*;
use rand_pcg::Pcg64;

#[test]
fn micro_configs_match_brute_force() {
    let mut rng = Pcg64::new(2024, 0xda3e_39cb_94b9_5bdb);
    for case in 0..200 {
        let (points, cls, k) = micro_case(&mut rng);
        let table = corner_distance_table(&points, &cls);
        let nlm = build_nlm(&table, k).unwrap();
        let got = assign_labels(&nlm, &table);
        let want = brute_force_assign(&points, cls.labels(), k);
        assert_eq!(pairs_of(&got.pairs), want.pairs, "case {case}: k={k} m={}", cls.m());
        assert_eq!(got.unassigned, want.unassigned, "case {case}");
    }
}

#[test]
fn capacity_matches_unit_step_enumeration() {
    for (lsd, ssd, want) in [(0.0, 0.0, 800), (10.0, 10.0, 648)] {
        let cfg = LabelConfig {
            lsd,
            ssd,
            ..LabelConfig::default()
        };
        let cols = enumerate_axis(3000.0, 150.0, lsd, ssd);
        let rows = enumerate_axis(4000.0, 100.0, lsd, ssd);
        assert_eq!(cols * rows, want);
        let cls = generate_grid(&MapBounds::default(), &cfg, &[]).unwrap();
        assert_eq!(cls.m(), want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_matches_naive(n in 0usize..400, seed in any::<u64>(), lsd in 0.0f64..30.0, ssd in 0.0f64..30.0) {
        let cfg = LabelConfig { lsd, ssd, ..LabelConfig::default() };
        let inst = random_instance(n, MapBounds::default(), seed);
        let want = naive_grid(&inst.bounds, &cfg, &inst.points);
        match generate_grid(&inst.bounds, &cfg, &inst.points) {
            Ok(cls) => prop_assert_eq!(cls.labels(), &want[..]),
            Err(_) => prop_assert!(want.is_empty()),
        }
    }

    #[test]
    fn sweep_matches_naive(n in 1usize..300, seed in any::<u64>(), w in 60.0f64..200.0, h in 40.0f64..150.0) {
        let cfg = LabelConfig::default().with_size(w, h);
        let inst = random_instance(n, MapBounds::default(), seed);
        let cls = generate_grid(&inst.bounds, &cfg, &inst.points).unwrap();
        let want = naive_sweep(cls.labels(), &cfg, &inst.bounds, &inst.points);
        let got = sweep_phase(cls, &inst.points);
        prop_assert_eq!(got.m(), want.len());
        if let Some((a, b)) = got.labels().iter().zip(&want).find(|(a, b)| a != b) {
            prop_assert!(false, "first mismatch: got {:?}, naive {:?}", a, b);
        }
    }

    #[test]
    fn full_assignment_matches_brute_force(n in 1usize..80, seed in any::<u64>(), k in 1usize..12) {
        let cfg = LabelConfig::default().with_size(400.0, 300.0);
        let inst = random_instance(n, MapBounds::default(), seed);
        let cls = sweep_phase(generate_grid(&inst.bounds, &cfg, &inst.points).unwrap(), &inst.points);
        let k = k.min(cls.m());
        let table = corner_distance_table(&inst.points, &cls);
        let got = assign_labels(&build_nlm(&table, k).unwrap(), &table);
        let want = brute_force_assign(&inst.points, cls.labels(), k);
        prop_assert_eq!(pairs_of(&got.pairs), want.pairs);
        prop_assert_eq!(got.unassigned, want.unassigned);
    }
}
