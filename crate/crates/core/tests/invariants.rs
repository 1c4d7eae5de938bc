//! Cross-module property tests: the flag metric axioms and their
//! interaction with the group action, document round trips through real
//! JSON strings, and erasure-only channel decoding.

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flagcodes::channel::{simulate, ChannelConfig};
use flagcodes::flags::{
    build_odfc, flag_distance, max_flag_distance, orbit_flag_code, standard_full_flag, Flag,
    FlagCode,
};
use flagcodes::galois::FieldTower;
use flagcodes::groups::{build_g, random_subgroup, GroupAction, GroupDoc, MatrixGroup};
use flagcodes::matspace::SubspaceCode;

const SMALL_GRID: [(u64, usize, usize); 3] = [(2, 1, 2), (3, 1, 2), (2, 1, 3)];

struct Fixture {
    tower: FieldTower,
    group: MatrixGroup,
    /// The whole-group orbit of the standard full flag: a pool of flags
    /// rich enough to exercise every branch of the metric.
    pool: Vec<Flag>,
}

fn fixture(idx: usize) -> &'static Fixture {
    static CACHE: OnceLock<Vec<Fixture>> = OnceLock::new();
    &CACHE.get_or_init(|| {
        SMALL_GRID
            .iter()
            .map(|&(p, e, k)| {
                let tower = FieldTower::new(p, e, k).expect("grid parameters");
                let group = build_g(&tower).unwrap();
                let std = standard_full_flag(&tower, FieldTower::GROUND, 2 * k);
                let pool = orbit_flag_code(&tower, &group, &std).unwrap().flags().to_vec();
                Fixture { tower, group, pool }
            })
            .collect()
    })[idx]
}

fn odfc22() -> &'static (FieldTower, FlagCode) {
    static CACHE: OnceLock<(FieldTower, FlagCode)> = OnceLock::new();
    CACHE.get_or_init(|| {
        let tower = FieldTower::new(2, 1, 2).unwrap();
        let code = build_odfc(&tower).unwrap();
        (tower, code)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Symmetry, identity of indiscernibles, parity, the global bound,
    /// the triangle inequality, invariance under the group action, and
    /// compatibility of that action with matrix multiplication.
    #[test]
    fn flag_metric_axioms_and_group_invariance(
        t in 0..SMALL_GRID.len(),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        c in any::<prop::sample::Index>(),
        m1 in any::<prop::sample::Index>(),
        m2 in any::<prop::sample::Index>(),
    ) {
        let fx = fixture(t);
        let f = &fx.pool[a.index(fx.pool.len())];
        let g = &fx.pool[b.index(fx.pool.len())];
        let h = &fx.pool[c.index(fx.pool.len())];
        let x = &fx.group.elements()[m1.index(fx.group.order())];
        let y = &fx.group.elements()[m2.index(fx.group.order())];

        let dfg = flag_distance(&fx.tower, f, g).unwrap();
        prop_assert_eq!(dfg, flag_distance(&fx.tower, g, f).unwrap());
        prop_assert_eq!(dfg == 0, f == g);
        prop_assert_eq!(dfg % 2, 0);
        prop_assert!(dfg <= max_flag_distance(f.type_vec(), 2 * fx.tower.k()).unwrap());

        let dfh = flag_distance(&fx.tower, f, h).unwrap();
        let dgh = flag_distance(&fx.tower, g, h).unwrap();
        prop_assert!(dfg <= dfh + dgh);

        let fx_moved = f.apply(&fx.tower, x);
        let gx_moved = g.apply(&fx.tower, x);
        prop_assert_eq!(flag_distance(&fx.tower, &fx_moved, &gx_moved).unwrap(), dfg);

        let xy = x.mul(&fx.tower, y);
        prop_assert_eq!(fx_moved.apply(&fx.tower, y), f.apply(&fx.tower, &xy));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every document type survives a trip through an actual JSON string;
    /// the flag-code loader re-validates distance and optimality along
    /// the way.
    #[test]
    fn documents_round_trip_through_json(
        t in 0..SMALL_GRID.len(),
        seed in any::<u64>(),
        base in any::<prop::sample::Index>(),
    ) {
        let fx = fixture(t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sub = random_subgroup(&fx.tower, &fx.group, &mut rng);
        let flag = &fx.pool[base.index(fx.pool.len())];
        let code = orbit_flag_code(&fx.tower, &sub, flag).unwrap();

        let doc = flag.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back =
            Flag::from_doc(&fx.tower, FieldTower::GROUND, &serde_json::from_str(&json).unwrap())
                .unwrap();
        prop_assert_eq!(&back, flag);

        let doc = code.to_doc(&fx.tower);
        let json = serde_json::to_string(&doc).unwrap();
        let back = FlagCode::from_doc(
            &fx.tower,
            FieldTower::GROUND,
            &serde_json::from_str(&json).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(&back, &code);

        let proj = code.projected(fx.tower.k() - 1);
        let doc = proj.to_doc(&fx.tower);
        let json = serde_json::to_string(&doc).unwrap();
        let back = SubspaceCode::from_doc(
            &fx.tower,
            FieldTower::GROUND,
            &serde_json::from_str(&json).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(back.members(), proj.members());

        let doc = sub.to_doc(&fx.tower, true);
        let value = serde_json::to_value(&doc).unwrap();
        let parsed: GroupDoc = serde_json::from_value(value.clone()).unwrap();
        prop_assert_eq!(serde_json::to_value(&parsed).unwrap(), value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// With erasures strictly below each dimension and no error rows, the
    /// decoder always recovers the sent flag, at distance exactly the
    /// number of erased rows: the noise stays within half the minimum
    /// distance.
    #[test]
    fn erasures_below_dimension_always_decode(
        e2 in 0usize..2,
        e3 in 0usize..3,
        seed in any::<u64>(),
    ) {
        let (tower, code) = odfc22();
        let cfg = ChannelConfig::new(vec![0, e2, e3], vec![0, 0, 0], seed).unwrap();
        let sim = simulate(tower, code, &cfg, 8).unwrap();
        prop_assert_eq!(sim.summary.successes, 8);
        for r in &sim.records {
            prop_assert_eq!(r.success, r.sent == r.decoded);
            prop_assert_eq!(r.distance as usize, e2 + e3);
        }
    }
}
