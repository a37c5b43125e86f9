use proptest::prelude::*;

use surfmap::bijection::{map_of, mob, verify_roundtrip, Mobile};
use surfmap::mapcore::CombinatorialMap;
use surfmap::oracle::{enumerate, for_each_hypermap, Counting, EnumSpec, Mode, DEFAULT_DART_CAP};

fn degree_sets() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![Just(vec![2]), Just(vec![1, 2]), Just(vec![3]), Just(vec![1, 3])]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn roundtrip_on_random_small_classes(m in 2usize..=3, d in degree_sets(), g in 0usize..=1, n in 1usize..=3) {
        prop_assume!(2 * m * n <= 18);
        let r = verify_roundtrip(m, &d, g, n).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
    }

    #[test]
    fn mobile_text_and_genus(m in 2usize..=3, g in 0usize..=1, n in 1usize..=3, pick in any::<prop::sample::Index>()) {
        let spec = EnumSpec::new(m, &[1, 2], g, n, Mode::Hypermap, Counting::RootedPointed).unwrap();
        let maps = enumerate(&spec, DEFAULT_DART_CAP).unwrap();
        prop_assume!(!maps.is_empty());
        let (map, col) = &maps[pick.index(maps.len())];
        let text = map.to_text();
        prop_assert_eq!(&text.parse::<CombinatorialMap>().unwrap(), map);
        let t = mob(map, col).unwrap();
        t.validate().unwrap();
        prop_assert_eq!(t.genus(), g);
        prop_assert_eq!(t.map().faces().len(), 1);
        prop_assert_eq!(t.to_text().parse::<Mobile>().unwrap(), t.clone());
        let (back, _) = map_of(&t).unwrap();
        prop_assert_eq!(back.canonical_form(), map.canonical_form());
    }
}

#[test]
fn constellation_mobiles_have_leaf_black_vertices() {
    for n in 1..=3 {
        for_each_hypermap(3, &[1, 2], n, |h| {
            let (map, col) = h.to_map();
            for v in map.vertices() {
                let pm = map.clone().with_pointed(Some(v[0])).unwrap();
                assert_eq!(mob(&pm, &col).unwrap().is_constellation_mobile(), h.is_constellation());
            }
        });
    }
}

#[test]
fn garbage_mobiles_are_rejected() {
    assert!("darts 2\nsigma 1 2\nalpha 2 1\nroot 1\nvtype W\n".parse::<Mobile>().is_err());
    assert!("darts 3\nsigma 1 2 3\nalpha 2 1 3\nroot 1\n".parse::<CombinatorialMap>().is_err());
}
