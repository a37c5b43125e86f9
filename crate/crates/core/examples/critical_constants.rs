//! Critical point of the planar mobile series for a few degree sets.

use surfmap::series::critical_constants;

fn main() -> surfmap::Result<()> {
    println!("{:>3} {:>10} {:>12} {:>10} {:>10} {:>10}", "m", "D", "t_c", "beta", "gamma", "growth");
    for (m, d) in [(2, vec![2]), (2, vec![2, 3]), (3, vec![1]), (3, vec![2]), (3, vec![1, 2]), (4, vec![1, 2, 3])] {
        let c = critical_constants(m, &d)?;
        println!(
            "{m:>3} {:>10} {:>12.9} {:>10.6} {:>10.6} {:>10.6}",
            format!("{d:?}"),
            c.t_c,
            c.beta,
            c.gamma,
            c.growth_rate()
        );
        if let Some(s) = c.singleton {
            println!("    closed form: beta = {}, gamma = {}", s.beta, s.gamma);
        }
    }
    Ok(())
}
