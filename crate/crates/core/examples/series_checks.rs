//! The characteristic polynomial of cells, the kernel at the critical point,
//! the type-τ identity and the partial-fraction form of the chain series.

use surfmap::series::{
    characteristic_polynomial, critical_constants, h_tau_identity_check, kernel_roots, mn_check,
    verify_kernel_derivatives,
};

fn main() -> surfmap::Result<()> {
    let p = characteristic_polynomial(3, &[1, 2])?;
    println!("P(X, t) for m=3, D={{1,2}}:");
    for (i, s) in p.terms() {
        println!("  X^{i:<3} {s}");
    }

    for (m, d) in [(2, vec![2]), (3, vec![1, 3])] {
        let k = verify_kernel_derivatives(m, &d)?;
        println!("\nm={m} D={d:?}: kernel lemma holds = {}", k.holds(1e-10));
        let t = 0.5 * critical_constants(m, &d)?.t_c;
        let roots = kernel_roots(m, &d, t)?;
        println!("  small roots at t_c/2: {:?}", roots.small_roots());
        let mn = mn_check(m, &d, 4, 10)?;
        println!("  max |M_n residual| = {:.2e}", mn.max_residual);
        for tau in 1..m {
            let h = h_tau_identity_check(m, &d, tau, 3, 8)?;
            println!("  H^{tau} identity to z^8: {}", h.holds());
        }
    }
    Ok(())
}
