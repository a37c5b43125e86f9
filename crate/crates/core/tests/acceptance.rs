//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use surfmap::asymptotics::t1_consistency;
use surfmap::bijection::{map_of, mob, verify_roundtrip};
use surfmap::oracle::{count, enumerate, Counting, EnumSpec, Mode, DEFAULT_DART_CAP};
use surfmap::schemes::{
    classify_vertices, decompose_all, enumerate_cubic_schemes, enumerate_schemes, enumerate_typings, reconstruct,
    special_edges, VertexType,
};
use surfmap::series::{
    characteristic_polynomial, critical_constants, h_tau_identity_check, mn_check, puiseux_fit, second_moment_closed,
    second_moment_direct, verify_kernel_derivatives, PuiseuxQuantity,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn factorial(n: u32) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

fn roundtrip() -> Check {
    let configs: [(usize, &[usize], usize); 3] = [(2, &[2], 6), (2, &[1, 2], 6), (3, &[1, 2], 4)];
    let mut total = 0;
    for (m, d, max_n) in configs {
        for g in 0..=1 {
            for n in 1..=max_n {
                let r = verify_roundtrip(m, d, g, n).map_err(e2s)?;
                ensure(
                    r.holds(),
                    format!(
                        "m={m} D={d:?} g={g} n={n}: {} failures, {} maps vs {} mobiles",
                        r.failures, r.maps, r.mobiles
                    ),
                )?;
                total += r.maps;
            }
        }
    }
    Ok(format!("{total} rooted-pointed hypermaps with ≤ 12 edges, all round trips exact"))
}

fn golden_pair() -> Check {
    let (map, col, mobile) = common::bowtie();
    let t = mob(&map, &col).map_err(e2s)?;
    ensure(t.canonical_form() == mobile.canonical_form(), format!("mob gave\n{t}"))?;
    let (back, _) = map_of(&mobile).map_err(e2s)?;
    ensure(back.canonical_form() == map.canonical_form(), format!("map_of gave\n{back}"))?;
    Ok("hand-drawn planar 3-constellation and its mobile agree both ways".into())
}

fn planar_closed_form() -> Check {
    let mut got = Vec::new();
    for f in 1..=5u32 {
        let tutte =
            BigUint::from(2u32) * BigUint::from(3u32).pow(f) * factorial(2 * f) / (factorial(f) * factorial(f + 2));
        let spec = EnumSpec::new(2, &[2], 0, 2 * f as usize, Mode::Constellation, Counting::Rooted).map_err(e2s)?;
        let c = count(&spec, 40).map_err(e2s)?;
        ensure(c == tutte, format!("f={f}: oracle {c}, closed form {tutte}"))?;
        got.push(c.to_string());
    }
    Ok(format!("f = 1..5: {}", got.join(", ")))
}

fn critical_point() -> Check {
    let tol = 1e-12;
    let c = critical_constants(2, &[2]).map_err(e2s)?;
    let z2 = c.z_c.powi(-2);
    ensure((c.t_c - 1.0 / 3f64.sqrt()).abs() < tol, format!("t_c = {}", c.t_c))?;
    ensure((c.beta - 2.0).abs() < tol && (c.gamma - 2.0).abs() < tol, format!("β = {}, γ = {}", c.beta, c.gamma))?;
    ensure((z2 - 12.0).abs() < tol, format!("z_c^-2 = {z2}"))?;
    let mut worst: f64 = 0.0;
    for m in 2..=3 {
        for k in 2..=4 {
            let c = critical_constants(m, &[k]).map_err(e2s)?;
            let e = ((m - 1) * k) as f64;
            let err = (c.beta - e / (e - 1.0)).abs().max((c.gamma - e).abs());
            ensure(err < tol, format!("m={m} k={k}: β = {}, γ = {}", c.beta, c.gamma))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("t_c = {:.17}, β = γ = 2, z_c^-2 = 12; singleton forms max error {worst:.1e}", c.t_c))
}

fn characteristic() -> Check {
    let p = characteristic_polynomial(2, &[2]).map_err(e2s)?;
    ensure(p.x_range() == Some((-1, 1)), "P_{2,{2}} has the wrong X-range")?;
    for i in -1..=1 {
        let c = p.coeff(i);
        let want: Vec<BigRational> = [0, 0, 1].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        ensure(c.coeffs() == want.as_slice(), format!("[X^{i}] = {c}"))?;
    }
    let cases: [(usize, &[usize]); 6] =
        [(2, &[2]), (2, &[2, 3]), (2, &[1, 2, 4]), (3, &[1, 2, 3]), (3, &[2]), (4, &[1, 2])];
    for (m, d) in cases {
        let at_one = characteristic_polynomial(m, d).map_err(e2s)?.at_one();
        for k in 0..=*d.last().unwrap() {
            let want = if d.contains(&k) && (m - 1) * k >= 1 {
                BigInt::from((m - 1) * k - 1) * BigInt::from(num_integer::binomial(m * k - 1, k))
            } else {
                BigInt::zero()
            };
            ensure(
                at_one.coeff(k) == BigRational::from_integer(want.clone()),
                format!("m={m} D={d:?} k={k}: {} vs {want}", at_one.coeff(k)),
            )?;
        }
    }
    Ok("P_{2,{2}} = t²(X⁻¹+1+X); [t^k]P(1,t) identity on 6 (m, D)".into())
}

fn kernel_identities() -> Check {
    let mut worst: f64 = 0.0;
    let cases: [(usize, &[usize]); 4] = [(2, &[2]), (2, &[2, 3]), (3, &[2]), (3, &[1, 3])];
    for (m, d) in cases {
        let r = verify_kernel_derivatives(m, d).map_err(e2s)?;
        ensure(r.holds(1e-10), format!("m={m} D={d:?}: residual {:.2e}", r.max_residual))?;
        worst = worst.max(r.max_residual);
    }
    let mut moments = 0;
    for m in 2..=12 {
        for k in 1..=12 / m {
            if (m - 1) * k < 2 {
                continue;
            }
            let direct = BigRational::from_integer(second_moment_direct(m, k));
            ensure(direct == second_moment_closed(m, k), format!("p_k mismatch at m={m} k={k}"))?;
            moments += 1;
        }
    }
    Ok(format!("lemma residual ≤ {worst:.1e}; {moments} second moments exact"))
}

fn partial_fractions() -> Check {
    let mut worst: f64 = 0.0;
    let cases: [(usize, &[usize]); 4] = [(2, &[2]), (2, &[2, 3]), (3, &[2]), (3, &[1, 3])];
    for (m, d) in cases {
        let r = mn_check(m, d, 4, 10).map_err(e2s)?;
        ensure(r.max_residual <= 1e-8, format!("m={m} D={d:?}: residual {:.2e}", r.max_residual))?;
        worst = worst.max(r.max_residual);
    }
    Ok(format!("10 points in (0.2, 0.99)·t_c, |n| ≤ 4, 4 (m, D): max residual {worst:.1e}"))
}

fn h_tau() -> Check {
    let cases: [(usize, &[usize]); 4] = [(2, &[2]), (2, &[1, 2]), (3, &[2]), (3, &[1, 2])];
    let mut checked = 0;
    for (m, d) in cases {
        for tau in 1..m {
            let r = h_tau_identity_check(m, d, tau, 3, 8).map_err(e2s)?;
            ensure(r.holds(), format!("m={m} D={d:?} τ={tau}: first mismatch {:?}", r.first_mismatch))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (m, D, τ) agree to z^8 for |n| ≤ 3"))
}

fn schemes_and_typings() -> Check {
    for s in enumerate_schemes(1) {
        for m in 2..=4 {
            let n = enumerate_typings(&s, m).len();
            ensure(n == m * m, format!("genus-1 scheme with {n} typings for m={m}"))?;
        }
    }
    let mut typed = 0;
    for g in 1..=2 {
        for s in enumerate_cubic_schemes(g) {
            for m in 2..=3 {
                for tau in enumerate_typings(&s, m) {
                    let types = classify_vertices(&s, m, &tau).map_err(e2s)?;
                    let n = |t| types.iter().filter(|&&x| x == t).count();
                    let (v2, v31, v32) = (n(VertexType::Two), n(VertexType::ThreeOne), n(VertexType::ThreeTwo));
                    ensure(v31 == v32, format!("g={g} m={m} τ={tau:?}: v3 types {v31} ≠ {v32}"))?;
                    ensure(
                        2 * special_edges(&tau) == 3 * (v31 + v32) + 2 * v2,
                        format!("g={g} m={m} τ={tau:?}: edge balance"),
                    )?;
                    typed += 1;
                }
            }
        }
    }
    let mut mobiles = 0;
    let configs: [(usize, &[usize], usize); 3] = [(2, &[2], 6), (2, &[1, 2], 6), (3, &[1, 2], 4)];
    for (m, d, max_n) in configs {
        for n in 1..=max_n {
            let spec = EnumSpec::new(m, d, 1, n, Mode::Hypermap, Counting::RootedPointed).map_err(e2s)?;
            for (map, col) in enumerate(&spec, DEFAULT_DART_CAP).map_err(e2s)? {
                let t = mob(&map, &col).map_err(e2s)?;
                let decs = decompose_all(&t, m).map_err(e2s)?;
                let k = decs[0].scheme.n_edges();
                let distinct: HashSet<_> = decs.iter().collect();
                ensure(
                    decs.len() == 2 * k && distinct.len() == 2 * k,
                    format!("{} decompositions for k={k}\n{t}", distinct.len()),
                )?;
                for dec in &decs {
                    let back = reconstruct(dec).map_err(e2s)?;
                    ensure(back.canonical_form() == t.canonical_form(), format!("reconstruction differs\n{t}"))?;
                }
                mobiles += 1;
            }
        }
    }
    Ok(format!("m² typings; {typed} typed cubic schemes balanced; {mobiles} genus-1 mobiles rebuilt 2k ways"))
}

fn puiseux() -> Check {
    let mut lines = Vec::new();
    for m in [2, 3] {
        for q in [PuiseuxQuantity::Planar, PuiseuxQuantity::Alpha1, PuiseuxQuantity::C1] {
            let f = puiseux_fit(q, m, &[2]).map_err(e2s)?;
            let (s, a) = (f.slope_error(), f.amplitude_error());
            ensure(
                s < 0.02 && a < 0.05,
                format!("m={m} {q:?}: slope {:.4} (err {s:.2e}), amplitude err {a:.2e}", f.slope),
            )?;
            lines.push(format!("{q:?}/{m}: {:.1}%,{:.1}%", 100.0 * s, 100.0 * a));
        }
    }
    Ok(format!("slope/amplitude errors {}", lines.join(" ")))
}

fn bipartite_trend() -> Check {
    let fraction = |g: usize, n: usize| -> Result<(BigUint, BigUint), String> {
        let c = |mode| {
            let spec = EnumSpec::new(2, &[2], g, n, mode, Counting::Rooted).map_err(e2s)?;
            count(&spec, 48).map_err(e2s)
        };
        Ok((c(Mode::Constellation)?, c(Mode::Hypermap)?))
    };
    for n in (2..=12).step_by(2) {
        let (b, h) = fraction(0, n)?;
        ensure(b == h && !h.is_zero(), format!("g=0 n={n}: {b} of {h} bipartite"))?;
    }
    let mut last = f64::INFINITY;
    let mut shown = Vec::new();
    for n in (2..=12).step_by(2) {
        let (b, h) = fraction(1, n)?;
        let f = b.to_f64().unwrap() / h.to_f64().unwrap();
        let gap = (0.25 - f).abs();
        ensure(gap < last, format!("g=1 n={n}: fraction {f:.4} does not approach 1/4"))?;
        last = gap;
        shown.push(format!("{f:.4}"));
    }
    Ok(format!("g=0 all bipartite; g=1 fractions {} → 1/4", shown.join(", ")))
}

fn t1() -> Check {
    let c = t1_consistency(8).map_err(e2s)?;
    ensure(
        c.relative_error <= 0.10,
        format!("t_1 = {:.6} vs fit {:.6} ({:.1}%)", c.t_1, c.fit.a, 100.0 * c.relative_error),
    )?;
    Ok(format!(
        "t_1 = {:.6} (with m^2g: {:.6}); fit {:.6}, off by {:.1}%",
        c.t_1,
        c.t_1_with_typings_m2,
        c.fit.a,
        100.0 * c.relative_error
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("bijection round trip", roundtrip),
        ("golden map/mobile pair", golden_pair),
        ("planar closed form", planar_closed_form),
        ("critical constants", critical_point),
        ("characteristic polynomial", characteristic),
        ("kernel identities", kernel_identities),
        ("partial fractions", partial_fractions),
        ("H^tau identity", h_tau),
        ("schemes and typings", schemes_and_typings),
        ("Puiseux exponents", puiseux),
        ("bipartite fraction trend", bipartite_trend),
        ("t_1 consistency", t1),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
