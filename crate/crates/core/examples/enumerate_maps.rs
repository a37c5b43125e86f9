//! Exhaustive counts of quadrangulations by genus. The bipartite ones (the
//! 2-constellations) are general maps with half as many edges, which a direct
//! count of general maps confirms.

use surfmap::oracle::{count_table, general_map_counts, tutte_planar_maps, Mode, DEFAULT_DART_CAP};

fn main() -> surfmap::Result<()> {
    let all = count_table(2, &[2], Mode::Hypermap, 6, DEFAULT_DART_CAP)?;
    let bip = count_table(2, &[2], Mode::Constellation, 6, DEFAULT_DART_CAP)?;
    println!("edges  genus  quadrangulations  bipartite  general maps");
    for e in 1..=3 {
        let direct = general_map_counts(e);
        for (g, &c) in direct.iter().enumerate() {
            let (q, _) = all.get(g, 2 * e);
            let (b, _) = bip.get(g, 2 * e);
            println!("{e:>5}  {g:>5}  {q:>16}  {b:>9}  {c:>12}");
        }
        println!("       planar closed form: {}", tutte_planar_maps(e));
    }

    let hyper = count_table(3, &[1, 2], Mode::Hypermap, 3, DEFAULT_DART_CAP)?;
    let cons = count_table(3, &[1, 2], Mode::Constellation, 3, DEFAULT_DART_CAP)?;
    println!("\nm = 3, D = {{1, 2}}: (g, n) hypermaps / constellations");
    for (&(g, n), e) in &hyper.entries {
        println!("({g}, {n})  {} / {}", e.count, cons.get(g, n).0);
    }
    Ok(())
}
