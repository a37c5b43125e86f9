//! Turns a few pointed hypermaps into labelled mobiles and back, then runs the
//! exhaustive round trip on small sizes.

use surfmap::bijection::{map_of, mob, verify_roundtrip};
use surfmap::oracle::for_each_hypermap;

fn main() -> surfmap::Result<()> {
    let mut shown = 0;
    let mut result = Ok(());
    for_each_hypermap(2, &[2], 2, |h| {
        if shown == 2 || h.genus != 0 || result.is_err() {
            return;
        }
        shown += 1;
        let (map, col) = h.to_map();
        result = (|| {
            let pointed = map.clone().with_pointed(Some(map.root()))?;
            let t = mob(&pointed, &col)?;
            println!("map:\n{}mobile:\n{}", pointed.to_text(), t.to_text());
            let (back, _) = map_of(&t)?;
            println!("same map back: {}\n", back.canonical_form() == pointed.canonical_form());
            Ok(())
        })();
    });
    result?;

    for (m, d) in [(2, vec![2]), (3, vec![1, 2])] {
        for g in 0..=1 {
            for n in 1..=3 {
                let r = verify_roundtrip(m, &d, g, n)?;
                println!("m={m} D={d:?} g={g} n={n}: {} pointed maps, {} mobiles, ok={}", r.maps, r.mobiles, r.holds());
            }
        }
    }
    Ok(())
}
