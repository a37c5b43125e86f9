//! Exact counts next to the predicted asymptotics, plus the vertex density
//! that links pointed and unpointed counts.

use surfmap::asymptotics::{compare, depoint_report};
use surfmap::oracle::Mode;

fn main() -> surfmap::Result<()> {
    for (g, m, d, mode) in
        [(0, 2, vec![2], Mode::Hypermap), (1, 2, vec![2], Mode::Hypermap), (0, 3, vec![1, 2], Mode::Constellation)]
    {
        let (f, rows) = compare(g, m, &d, mode, if m == 2 { 6 } else { 4 })?;
        println!("g={g} m={m} D={d:?} {mode:?}: {:.5} · {:.5}^n · n^{}", f.prefactor, f.growth_rate, f.exponent);
        for r in rows {
            println!("  n={:<2} exact={:<8} predicted={:<12.3} ratio={:.4}", r.n, r.exact, r.predicted, r.ratio);
        }
    }

    let dp = depoint_report(2, &[2], 6)?;
    println!("\nvertices per face → {:.4}", dp.limit);
    for (g, rows) in &dp.empirical {
        println!("  genus {g}: {rows:?}");
    }
    Ok(())
}
