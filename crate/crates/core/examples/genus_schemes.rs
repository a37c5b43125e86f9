//! Schemes of genus 1 and 2: how many, how many are cubic, how many typings
//! each admits, and the constant built from the dominant ones.

use surfmap::asymptotics::t_g;
use surfmap::schemes::{enumerate_cubic_schemes, enumerate_schemes, enumerate_typings};

fn main() -> surfmap::Result<()> {
    for g in 1..=2 {
        let all = enumerate_schemes(g);
        let cubic = enumerate_cubic_schemes(g);
        println!("genus {g}: {} schemes, {} cubic", all.len(), cubic.len());
        for m in 2..=3 {
            let typings: usize = cubic.iter().map(|s| enumerate_typings(s, m).len()).sum();
            println!("  m={m}: {typings} typings over the cubic schemes");
        }
        let c = t_g(g)?;
        println!("  S_g = {}, t_g = {:.6e}", c.s_g.as_deref().unwrap_or("-"), c.t_g);
    }
    Ok(())
}
