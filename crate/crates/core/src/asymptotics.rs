//! Leading-order asymptotics of rooted constellations and hypermaps of genus
//! `g`: the universal constant `t_g` from the dominant scheme sum, the
//! `(m, D)`-dependent prefactor from the critical constants, de-pointing, and
//! comparison tables against exact counts.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{count_table, general_map_counts, normalize_degrees, tutte_planar_maps, Mode, DEFAULT_DART_CAP};
use crate::schemes::dominant_sum;
use crate::series::{critical_constants, planar_value, planar_value_u, CriticalConstants};

/// `Γ(j/2)` for an integer `j ≠ 0, −2, −4, …`, from `Γ(1) = 1`, `Γ(1/2) = √π`
/// and `Γ(x + 1) = xΓ(x)`.
pub fn gamma_half(j: i64) -> f64 {
    assert!(j > 0 || j % 2 != 0, "Γ has a pole at {}", j as f64 / 2.0);
    let (mut x, mut acc) = if j % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = j as f64 / 2.0;
    while x < target {
        acc *= x;
        x += 1.0;
    }
    while x > target {
        x -= 1.0;
        acc /= x;
    }
    acc
}

/// The genus constant.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeConstant {
    pub g: usize,
    /// `S_g`, the sum of the dominant-pair constants, exact (absent for `g = 0`).
    pub s_g: Option<String>,
    /// `t_g = S_g·3^g·2^{7−11g} / ((6g−3)·Γ((5g−3)/2))`, independent of `m`.
    pub t_g: f64,
}

impl SchemeConstant {
    /// The variant that also carries `m^{2g}/(6g−3)` inside `t_g`; reported for
    /// comparison only.
    pub fn t_g_with_typings(&self, m: usize) -> f64 {
        if self.g == 0 {
            return self.t_g;
        }
        self.t_g * (m as f64).powi(2 * self.g as i32) / (6 * self.g - 3) as f64
    }
}

/// `t_g` for `g ≤ 2`. Genus 0 has no scheme and uses the planar value `2/√π`.
pub fn t_g(g: usize) -> Result<SchemeConstant> {
    if g == 0 {
        return Ok(SchemeConstant { g, s_g: None, t_g: 2.0 / PI.sqrt() });
    }
    let s = dominant_sum(g)?;
    let t = t_g_from_sum(g, &s);
    Ok(SchemeConstant { g, s_g: Some(s.to_string()), t_g: t })
}

/// The assembly formula applied to a given `S_g`.
pub fn t_g_from_sum(g: usize, s: &BigRational) -> f64 {
    let gi = g as i32;
    s.to_f64().unwrap() * 3f64.powi(gi) * 2f64.powi(7 - 11 * gi) / ((6 * gi - 3) as f64 * gamma_half(5 * g as i64 - 3))
}

/// `A·n^p·ρ^n` on multiples of `period`, zero elsewhere.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticFormula {
    pub g: usize,
    pub m: usize,
    pub degrees: Vec<usize>,
    pub mode: Mode,
    pub prefactor: f64,
    pub exponent: f64,
    pub growth_rate: f64,
    pub period: usize,
    pub t_g: f64,
    pub s_g: Option<String>,
}

impl AsymptoticFormula {
    pub fn predict(&self, n: usize) -> f64 {
        if n == 0 || !n.is_multiple_of(self.period) {
            return 0.0;
        }
        let nf = n as f64;
        (self.prefactor.ln() + self.exponent * nf.ln() + nf * self.growth_rate.ln()).exp()
    }
}

fn theorem_prefactor(tg: f64, g: usize, m: usize, cc: &CriticalConstants) -> f64 {
    let mf = m as f64;
    let base = (mf - 1.0).powf(2.5) * (2.0 * cc.gamma).sqrt() / (mf * cc.beta.powf(2.5));
    tg * cc.period() as f64 / 2.0 * base.powi(g as i32 - 1)
}

fn formula(g: usize, m: usize, degrees: &[usize], mode: Mode) -> Result<AsymptoticFormula> {
    let d = normalize_degrees(m, degrees)?;
    let cc = critical_constants(m, &d)?;
    let sc = t_g(g)?;
    let scale = match mode {
        Mode::Constellation => 1.0,
        Mode::Hypermap => (m as f64).powi(2 * g as i32),
    };
    Ok(AsymptoticFormula {
        g,
        m,
        degrees: d,
        mode,
        prefactor: scale * theorem_prefactor(sc.t_g, g, m, &cc),
        exponent: 2.5 * (g as f64 - 1.0),
        growth_rate: cc.growth_rate(),
        period: cc.period(),
        t_g: sc.t_g,
        s_g: sc.s_g,
    })
}

/// `c_{g,D,m}(n) ∼ t_g (gcd(D)/2) ((m−1)^{5/2} √(2γ) / (m β^{5/2}))^{g−1} n^{5(g−1)/2} z_c^{−n}`.
pub fn constellation_asymptotics(g: usize, m: usize, degrees: &[usize]) -> Result<AsymptoticFormula> {
    formula(g, m, degrees, Mode::Constellation)
}

/// The constellation formula scaled by `m^{2g}`, one factor `m` per typing.
pub fn hypermap_asymptotics(g: usize, m: usize, degrees: &[usize]) -> Result<AsymptoticFormula> {
    formula(g, m, degrees, Mode::Hypermap)
}

/// The `D = {k}` prefactor written out: `t_g (k/2) (√2 √(m−1) [(m−1)k−1]^{5/2} / (m k²))^{g−1}`.
pub fn singleton_prefactor(tg: f64, g: usize, m: usize, k: usize) -> f64 {
    let a = ((m - 1) * k) as f64 - 1.0;
    let base = 2f64.sqrt() * (m as f64 - 1.0).sqrt() * a.powf(2.5) / (m as f64 * (k * k) as f64);
    tg * k as f64 / 2.0 * base.powi(g as i32 - 1)
}

/// All rooted `m`-constellations (no degree condition), through the bijection
/// with `(m+1)`-constellations whose white faces all have degree `m+1`.
pub fn all_constellations_asymptotics(g: usize, m: usize) -> Result<AsymptoticFormula> {
    let mut f = constellation_asymptotics(g, m + 1, &[1])?;
    f.m = m;
    f.degrees = Vec::new();
    Ok(f)
}

/// `m^{m+1}/(m−1)^{m−1}`, the closed growth rate of all `m`-constellations.
pub fn all_constellations_growth(m: usize) -> f64 {
    let mf = m as f64;
    mf.powi(m as i32 + 1) / (mf - 1.0).powi(m as i32 - 1)
}

/// `(all-constellations prefactor)` in closed form: `(t_g/2)(√(2m)(m−1)^{5/2}/(m+1))^{g−1}`.
pub fn all_constellations_prefactor(tg: f64, g: usize, m: usize) -> f64 {
    let mf = m as f64;
    tg / 2.0 * ((2.0 * mf).sqrt() * (mf - 1.0).powf(2.5) / (mf + 1.0)).powi(g as i32 - 1)
}

/// Limit of (labelled vertices)/(black faces) in large mobiles.
#[derive(Clone, Debug, Serialize)]
pub struct DepointReport {
    pub m: usize,
    pub degrees: Vec<usize>,
    /// `(m−1)/β`.
    pub limit: f64,
    /// `(n, mean (v−1)/n)` per genus over the exact hypermaps, `(g, rows)`.
    pub empirical: Vec<(usize, Vec<(usize, f64)>)>,
    /// `(ε, T_u·(1 − Φ_T), T_u/(z T_z))` at `z = z_c(1 − ε)` by finite differences of
    /// the bivariate planar equation.
    pub bivariate: Vec<(f64, f64, f64)>,
}

/// `(m−1)/β`.
pub fn depoint_ratio(m: usize, degrees: &[usize]) -> Result<f64> {
    let cc = critical_constants(m, degrees)?;
    Ok((m as f64 - 1.0) / cc.beta)
}

/// `T_u` and `z T_z` of `T(z, u) = u + Σ C(mk−1, k) z^k T^{(m−1)k}` at `u = 1` by
/// central differences, and `Φ_T = ∂/∂T` of the right-hand side.
pub fn bivariate_derivatives(m: usize, degrees: &[usize], z: f64) -> Result<(f64, f64, f64)> {
    let d = normalize_degrees(m, degrees)?;
    let cc = critical_constants(m, &d)?;
    let gap = 1.0 - z / cc.z_c;
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::Precondition(format!("z = {z} is not below z_c = {}", cc.z_c)));
    }
    let h = 1e-3 * gap;
    let t_u = (planar_value_u(m, &d, z, 1.0 + h)? - planar_value_u(m, &d, z, 1.0 - h)?) / (2.0 * h);
    let hz = h * z;
    let z_tz = z * (planar_value(m, &d, z + hz)? - planar_value(m, &d, z - hz)?) / (2.0 * hz);
    let t = planar_value(m, &d, z)?;
    let mf = m as f64;
    let phi_t: f64 = d
        .iter()
        .map(|&k| {
            let e = (mf - 1.0) * k as f64;
            crate::series::binomial_f64(m * k - 1, k) * z.powi(k as i32) * e * t.powf(e - 1.0)
        })
        .sum();
    Ok((t_u, z_tz, phi_t))
}

/// The de-pointing limit, its trend over exact hypermaps up to `max_n`, and
/// the bivariate-series check.
pub fn depoint_report(m: usize, degrees: &[usize], max_n: usize) -> Result<DepointReport> {
    let d = normalize_degrees(m, degrees)?;
    let cc = critical_constants(m, &d)?;
    let limit = (m as f64 - 1.0) / cc.beta;
    let table = count_table(m, &d, Mode::Hypermap, max_n, DEFAULT_DART_CAP)?;
    let mut genera: Vec<usize> = table.entries.keys().map(|&(g, _)| g).collect();
    genera.dedup();
    let empirical = genera
        .into_iter()
        .map(|g| {
            let rows = (1..=max_n)
                .filter_map(|n| {
                    let (c, v) = table.get(g, n);
                    (!c.is_zero()).then(|| {
                        let mean = (v - &c).to_f64().unwrap() / c.to_f64().unwrap();
                        (n, mean / n as f64)
                    })
                })
                .collect();
            (g, rows)
        })
        .collect();
    let bivariate = [1e-2, 1e-3, 1e-4]
        .into_iter()
        .map(|eps| {
            let (t_u, z_tz, phi) = bivariate_derivatives(m, &d, cc.z_c * (1.0 - eps))?;
            Ok((eps, t_u * (1.0 - phi), t_u / z_tz))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DepointReport { m, degrees: d, limit, empirical, bivariate })
}

/// One row of a comparison table.
#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub n: usize,
    pub exact: String,
    pub predicted: f64,
    pub ratio: f64,
    /// Closed-form planar count where one is known.
    pub closed_form: Option<String>,
}

/// Exact rooted counts against the asymptotic formula, for `n ≤ max_n` on
/// multiples of `gcd(D)`.
pub fn compare(
    g: usize,
    m: usize,
    degrees: &[usize],
    mode: Mode,
    max_n: usize,
) -> Result<(AsymptoticFormula, Vec<CompareRow>)> {
    let f = formula(g, m, degrees, mode)?;
    let table = count_table(m, &f.degrees, mode, max_n, DEFAULT_DART_CAP)?;
    let tutte = g == 0 && m == 2 && f.degrees == [2];
    let rows = (1..=max_n)
        .filter(|n| n % f.period == 0)
        .map(|n| {
            let exact = table.get(g, n).0;
            let predicted = f.predict(n);
            CompareRow {
                n,
                ratio: exact.to_f64().unwrap() / predicted,
                exact: exact.to_string(),
                predicted,
                closed_form: tutte.then(|| tutte_planar_maps(n / 2).to_string()),
            }
        })
        .collect();
    Ok((f, rows))
}

/// Exact counts fitted by `a(1 + b/√n)` through the two largest sizes.
#[derive(Clone, Debug, Serialize)]
pub struct TwoTermFit {
    pub a: f64,
    pub b: f64,
    /// `(n, count / (n^p ρ^n))`.
    pub ratios: Vec<(usize, f64)>,
}

/// Fits the normalised ratios `r_n = count_n / (n^p ρ^n)` by `a(1 + b/√n)` on the
/// last two entries.
pub fn two_term_fit(counts: &[(usize, BigUint)], exponent: f64, growth: f64) -> Result<TwoTermFit> {
    let ratios: Vec<(usize, f64)> = counts
        .iter()
        .map(|(n, c)| {
            let nf = *n as f64;
            (*n, (c.to_f64().unwrap().ln() - exponent * nf.ln() - nf * growth.ln()).exp())
        })
        .collect();
    if ratios.len() < 2 {
        return Err(Error::Precondition("a two-term fit needs two sizes".into()));
    }
    let (n1, r1) = ratios[ratios.len() - 2];
    let (n2, r2) = ratios[ratios.len() - 1];
    let (x1, x2) = (1.0 / (n1 as f64).sqrt(), 1.0 / (n2 as f64).sqrt());
    let slope = (r1 - r2) / (x1 - x2);
    let a = r2 - slope * x2;
    Ok(TwoTermFit { a, b: slope / a, ratios })
}

/// Genus-`g` rooted maps by number of edges `e ≤ max_e`, from the exhaustive
/// general-map enumeration.
pub fn general_map_series(g: usize, max_e: usize) -> Vec<(usize, BigUint)> {
    (1..=max_e)
        .into_par_iter()
        .map(|e| (e, BigUint::from(general_map_counts(e).get(g).copied().unwrap_or(0))))
        .collect()
}

/// `t_1` against the extrapolated genus-1 map counts `m_e^{(1)}/12^e`.
#[derive(Clone, Debug, Serialize)]
pub struct T1Check {
    pub t_1: f64,
    pub t_1_with_typings_m2: f64,
    pub fit: TwoTermFit,
    pub relative_error: f64,
}

pub fn t1_consistency(max_e: usize) -> Result<T1Check> {
    let sc = t_g(1)?;
    let counts: Vec<_> = general_map_series(1, max_e).into_iter().filter(|(_, c)| !c.is_zero()).collect();
    let fit = two_term_fit(&counts, 0.0, 12.0)?;
    Ok(T1Check {
        t_1: sc.t_g,
        t_1_with_typings_m2: sc.t_g_with_typings(2),
        relative_error: (fit.a - sc.t_g).abs() / sc.t_g,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    #[test]
    fn gamma_at_half_integers() {
        assert!(close(gamma_half(2), 1.0, 1e-15));
        assert!(close(gamma_half(1), PI.sqrt(), 1e-15));
        assert!(close(gamma_half(7), 15.0 * PI.sqrt() / 8.0, 1e-15));
        assert!(close(gamma_half(-3), 4.0 * PI.sqrt() / 3.0, 1e-15));
        assert!(close(gamma_half(12), 120.0, 1e-15));
    }

    #[test]
    fn genus_one_and_two_constants() {
        let t1 = t_g(1).unwrap();
        assert_eq!(t1.s_g.as_deref(), Some("2/3"));
        assert!(close(t1.t_g, 1.0 / 24.0, 1e-14));
        let s2: BigRational = "896/9".parse().unwrap();
        assert!(close(t_g_from_sum(2, &s2), 7.0 / (4320.0 * PI.sqrt()), 1e-14));
    }

    #[test]
    fn quadrangulation_prefactor_reduces_to_maps() {
        // n = 2f black faces; the formula must read t_g f^{5(g−1)/2} 12^f.
        for g in 0..=1 {
            let f = constellation_asymptotics(g, 2, &[2]).unwrap();
            let tg = f.t_g;
            for faces in [10usize, 50] {
                let want = tg * (faces as f64).powf(2.5 * (g as f64 - 1.0)) * 12f64.powi(faces as i32);
                assert!(close(f.predict(2 * faces), want, 1e-10));
                assert_eq!(f.predict(2 * faces + 1), 0.0);
            }
        }
    }

    #[test]
    fn singleton_prefactors_agree() {
        for g in 0..=1 {
            let tg = t_g(g).unwrap().t_g;
            for m in 2..=3 {
                for k in 2..=3 {
                    let f = constellation_asymptotics(g, m, &[k]).unwrap();
                    assert!(close(f.prefactor, singleton_prefactor(tg, g, m, k), 1e-12), "g={g} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn hypermap_scaling_and_all_constellations() {
        let c = constellation_asymptotics(1, 2, &[2]).unwrap();
        let h = hypermap_asymptotics(1, 2, &[2]).unwrap();
        assert!(close(h.prefactor, 4.0 * c.prefactor, 1e-15));
        let c0 = constellation_asymptotics(0, 3, &[1, 2]).unwrap();
        let h0 = hypermap_asymptotics(0, 3, &[1, 2]).unwrap();
        assert_eq!(c0.prefactor, h0.prefactor);
        for m in 2..=4 {
            let f = all_constellations_asymptotics(1, m).unwrap();
            assert!(close(f.growth_rate, all_constellations_growth(m), 1e-12));
            assert!(close(f.prefactor, all_constellations_prefactor(f.t_g, 1, m), 1e-12));
        }
    }

    #[test]
    fn depointing_limit_for_quadrangulations() {
        assert!(close(depoint_ratio(2, &[2]).unwrap(), 0.5, 1e-14));
        let (t_u, z_tz, phi) = bivariate_derivatives(2, &[2], 0.9 / 12f64.sqrt()).unwrap();
        assert!(close(t_u * (1.0 - phi), 1.0, 1e-6));
        assert!(t_u / z_tz > 0.5);
    }
}
