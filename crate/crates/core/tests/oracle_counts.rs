use num_bigint::BigUint;
use proptest::prelude::*;

use surfmap::oracle::{count, count_table, general_map_counts, Counting, EnumSpec, Mode, DEFAULT_DART_CAP};

#[test]
fn constellations_are_a_subset_and_fill_the_sphere() {
    for (m, d, max_n) in [(2, vec![2], 6), (2, vec![1, 2], 5), (3, vec![1, 2], 3), (4, vec![1], 3)] {
        let hyper = count_table(m, &d, Mode::Hypermap, max_n, DEFAULT_DART_CAP).unwrap();
        let cons = count_table(m, &d, Mode::Constellation, max_n, DEFAULT_DART_CAP).unwrap();
        for (&(g, n), e) in &hyper.entries {
            let c = cons.get(g, n).0;
            assert!(c <= e.count, "m={m} D={d:?} g={g} n={n}");
            if g == 0 {
                assert_eq!(c, e.count, "planar hypermaps are constellations (m={m} D={d:?} n={n})");
            }
        }
    }
}

#[test]
fn bipartite_quadrangulations_are_general_maps() {
    for e in 1..=4 {
        let direct = general_map_counts(e);
        for (g, &want) in direct.iter().enumerate() {
            let spec = EnumSpec::new(2, &[2], g, 2 * e, Mode::Constellation, Counting::Rooted).unwrap();
            assert_eq!(count(&spec, 32).unwrap(), BigUint::from(want), "e={e} g={g}");
        }
    }
}

#[test]
fn known_general_map_counts() {
    // Rooted maps by edges: planar 2, 9, 54, 378; genus one 1, 20, 307.
    let got: Vec<Vec<u64>> = (1..=4).map(general_map_counts).collect();
    assert_eq!(got[0], vec![2]);
    assert_eq!(got[1], vec![9, 1]);
    assert_eq!(got[2], vec![54, 20]);
    assert_eq!(got[3], vec![378, 307, 21]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Pointed counts are rooted counts weighted by vertices; the table and a
    /// single-size count agree.
    #[test]
    fn pointed_counts_are_vertex_weighted(m in 2usize..=3, n in 1usize..=3, g in 0usize..=1) {
        let d = vec![1, 2];
        let spec = |c| EnumSpec::new(m, &d, g, n, Mode::Hypermap, c).unwrap();
        let rooted = count(&spec(Counting::Rooted), DEFAULT_DART_CAP).unwrap();
        let pointed = count(&spec(Counting::RootedPointed), DEFAULT_DART_CAP).unwrap();
        let table = count_table(m, &d, Mode::Hypermap, n, DEFAULT_DART_CAP).unwrap();
        let (c, vsum) = table.get(g, n);
        prop_assert_eq!(rooted, c);
        prop_assert_eq!(pointed, vsum);
    }
}
