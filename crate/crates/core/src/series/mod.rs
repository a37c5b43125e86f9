//! Generating series of planar mobiles and of chains, the critical constants of
//! the planar equation, the characteristic polynomial of type-0 cells and the
//! analysis of its kernel.
//!
//! Exact identities run in [`TruncatedSeries`] over the rationals. Everything
//! numeric is `f64`: the constants are simple roots of explicit polynomials
//! and come out within a few ulps, which the checks here exploit fully.

mod cells;
mod kernel;
mod ring;

pub use cells::{
    black_special_stars, characteristic_polynomial, h_tau_identity_check, second_moment_closed, second_moment_direct,
    type0_cells, type_tau_cells, type_tau_kernel, white_special_stars, HtauReport,
};
pub use kernel::{
    alpha1, c1, chain_values_numeric, kernel_polynomial, kernel_roots, mn_check, puiseux_fit,
    verify_kernel_derivatives, KernelReport, KernelRoots, MnReport, PuiseuxFit, PuiseuxQuantity,
};
pub use ring::{LaurentPoly, TruncatedSeries, Var};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::normalize_degrees;

/// Default truncation order for exact series.
pub const DEFAULT_ORDER: usize = 16;

pub(crate) fn binomial(n: usize, k: usize) -> BigUint {
    num_integer::binomial(BigUint::from(n), BigUint::from(k))
}

pub(crate) fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

/// Validated, sorted degree set.
pub(crate) fn check_md(m: usize, degrees: &[usize]) -> Result<Vec<usize>> {
    normalize_degrees(m, degrees)
}

/// `r = (m−1)·max(D) − 1`, the largest increment of a type-0 cell.
pub fn kernel_radius(m: usize, degrees: &[usize]) -> Result<usize> {
    let d = check_md(m, degrees)?;
    Ok((m - 1) * d.last().unwrap() - 1)
}

/// `T∘(z) = 1 + Σ_{k∈D} C(mk−1, k) z^k T∘(z)^{(m−1)k}` to order `order`, by
/// fixed-point iteration (each pass fixes one more coefficient).
pub fn planar_series(m: usize, degrees: &[usize], order: usize) -> Result<TruncatedSeries> {
    let d = check_md(m, degrees)?;
    let one = TruncatedSeries::one(order, Var::Z);
    let mut t = one.clone();
    for _ in 0..=order {
        let mut next = one.clone();
        for &k in &d {
            let c = BigRational::from_integer(BigInt::from(binomial(m * k - 1, k)));
            let term = &TruncatedSeries::monomial(k, c, order, Var::Z) * &t.pow(((m - 1) * k) as u32);
            next = &next + &term;
        }
        if next == t {
            break;
        }
        t = next;
    }
    Ok(t)
}

/// `S(X, t) = 1/(1 − P(X, t))` to order `order` in `t`; `[X^n] S` is `M_n(t)`,
/// the series of type-0 chains of increment `n` (the empty chain included).
pub fn chain_series(m: usize, degrees: &[usize], order: usize) -> Result<LaurentPoly> {
    characteristic_polynomial(m, degrees)?.with_order(order).geometric_inverse()
}

/// `M_n(t)` to order `order`, exact.
pub fn chain_series_mn(m: usize, degrees: &[usize], n: i64, order: usize) -> Result<TruncatedSeries> {
    Ok(chain_series(m, degrees, order)?.coeff(n))
}

/// Exact values available when `D = {k}`.
#[derive(Clone, Debug, Serialize)]
pub struct SingletonForms {
    /// `([(m−1)k−1]·C(mk−1, k))^{−1/k}`.
    pub t_c: f64,
    /// `(m−1)k/((m−1)k−1)`.
    pub beta: String,
    /// `(m−1)k`.
    pub gamma: String,
}

/// The constants of the planar equation at its singularity.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalConstants {
    pub m: usize,
    pub degrees: Vec<usize>,
    pub t_c: f64,
    pub beta: f64,
    pub gamma: f64,
    pub z_c: f64,
    /// `T∘(z_c)`, equal to `beta`.
    pub t_cap: f64,
    pub singleton: Option<SingletonForms>,
}

impl CriticalConstants {
    /// Exponential growth rate `1/z_c` per black face.
    pub fn growth_rate(&self) -> f64 {
        1.0 / self.z_c
    }

    /// `gcd(D)`, the period of every count.
    pub fn period(&self) -> usize {
        self.degrees.iter().fold(0, |a, &b| num_integer::gcd(a, b))
    }
}

/// `Σ_{k∈D} w(k)·C(mk−1, k)·t^k`.
fn weighted_sum(m: usize, d: &[usize], t: f64, w: impl Fn(f64) -> f64) -> f64 {
    d.iter().map(|&k| w(k as f64) * binomial_f64(m * k - 1, k) * t.powi(k as i32)).sum()
}

/// `t_c` is the root of `Σ [(m−1)k−1] C(mk−1, k) t^k = 1` (increasing in `t`),
/// bracketed by doubling, bisected, then polished by Newton.
pub fn critical_constants(m: usize, degrees: &[usize]) -> Result<CriticalConstants> {
    let d = check_md(m, degrees)?;
    let mf = m as f64;
    let a = |k: f64| (mf - 1.0) * k - 1.0;
    let f = |t: f64| weighted_sum(m, &d, t, a) - 1.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mut t_c = 0.5 * (lo + hi);
    for _ in 0..3 {
        let df = weighted_sum(m, &d, t_c, |k| a(k) * k) / t_c;
        let step = f(t_c) / df;
        if !step.is_finite() {
            break;
        }
        t_c -= step;
    }
    let beta = weighted_sum(m, &d, t_c, |k| (mf - 1.0) * k);
    let gamma = weighted_sum(m, &d, t_c, |k| (mf - 1.0) * k * a(k));
    let z_c = t_c * beta.powf(1.0 - mf);
    let t_cap = planar_value(m, &d, z_c)?;
    let singleton = (d.len() == 1).then(|| {
        let k = d[0];
        let a = (m - 1) * k - 1;
        let count = (BigUint::from(a) * binomial(m * k - 1, k)).to_f64().unwrap();
        SingletonForms {
            t_c: count.powf(-1.0 / k as f64),
            beta: BigRational::new(BigInt::from((m - 1) * k), BigInt::from(a)).to_string(),
            gamma: ((m - 1) * k).to_string(),
        }
    });
    Ok(CriticalConstants { m, degrees: d, t_c, beta, gamma, z_c, t_cap, singleton })
}

/// `T∘(z)` for `0 ≤ z ≤ z_c`: the smallest root of `T = 1 + Σ C(mk−1, k) z^k T^{(m−1)k}`.
/// The defect `F(T)` is concave, so the root is bisected on `[1, T*]` with `T*`
/// the maximiser of `F`; at `z_c` the root is `T*` itself.
pub fn planar_value(m: usize, degrees: &[usize], z: f64) -> Result<f64> {
    planar_value_u(m, degrees, z, 1.0)
}

/// The bivariate version `T(z, u) = u + Σ C(mk−1, k) z^k T^{(m−1)k}`, where `u`
/// marks labelled vertices; same method as [`planar_value`].
pub fn planar_value_u(m: usize, degrees: &[usize], z: f64, u: f64) -> Result<f64> {
    let d = check_md(m, degrees)?;
    let mf = m as f64;
    let f = |t: f64| {
        t - u - d.iter().map(|&k| binomial_f64(m * k - 1, k) * (z * t.powf(mf - 1.0)).powi(k as i32)).sum::<f64>()
    };
    let df = |t: f64| {
        1.0 - d
            .iter()
            .map(|&k| {
                let e = (mf - 1.0) * k as f64;
                binomial_f64(m * k - 1, k) * z.powi(k as i32) * e * t.powf(e - 1.0)
            })
            .sum::<f64>()
    };
    let bisect = |mut lo: f64, mut hi: f64, pred: &dyn Fn(f64) -> bool| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pred(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let mut hi = 2.0 * u.max(1.0);
    while df(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numeric(format!("planar equation has no turning point at z = {z}")));
        }
    }
    let lo = u.min(1.0);
    let t_star = if df(lo) <= 0.0 { lo } else { bisect(lo, hi, &|t| df(t) > 0.0) };
    let peak = f(t_star);
    if peak < -1e-12 * t_star {
        return Err(Error::Precondition(format!("z = {z} lies beyond the radius of convergence")));
    }
    if peak <= 0.0 {
        return Ok(t_star);
    }
    Ok(bisect(lo, t_star, &|t| f(t) < 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn quadrangulation_planar_series() {
        let t = planar_series(2, &[2], 6).unwrap();
        let c: Vec<i64> = t.coeffs().iter().map(|c| c.to_integer().try_into().unwrap()).collect();
        assert_eq!(c, vec![1, 0, 3, 0, 18, 0, 135]);
        let t = planar_series(3, &[2, 4], 9).unwrap();
        assert!(t.is_nonneg_integral());
        assert!((0..=9).filter(|k| k % 2 == 1).all(|k| t.coeff(k) == BigRational::from_integer(0.into())));
        assert_eq!(t.coeff(0), BigRational::one());
    }

    #[test]
    fn quadrangulation_constants() {
        let c = critical_constants(2, &[2]).unwrap();
        assert!(close(c.t_c, 3f64.sqrt().recip(), 1e-14));
        assert!(close(c.beta, 2.0, 1e-14) && close(c.gamma, 2.0, 1e-14));
        assert!(close(c.z_c.powi(-2), 12.0, 1e-13));
        assert!(close(c.t_cap, c.beta, 1e-7));
    }

    #[test]
    fn singleton_closed_forms() {
        for m in 2..=3 {
            for k in 2..=4 {
                let c = critical_constants(m, &[k]).unwrap();
                let a = ((m - 1) * k) as f64;
                assert!(close(c.beta, a / (a - 1.0), 1e-12), "m={m} k={k}");
                assert!(close(c.gamma, a, 1e-12), "m={m} k={k}");
                assert!(close(c.t_c, c.singleton.as_ref().unwrap().t_c, 1e-13));
            }
        }
    }

    #[test]
    fn planar_value_matches_series_inside_the_disc() {
        let (m, d) = (3, [1, 2]);
        let c = critical_constants(m, &d).unwrap();
        let z = 0.3 * c.z_c;
        let s = planar_series(m, &d, 40).unwrap().eval_f64(z);
        assert!(close(planar_value(m, &d, z).unwrap(), s, 1e-12));
        assert!(planar_value(m, &d, 1.01 * c.z_c).is_err());
    }

    #[test]
    fn chains_of_quadrangle_cells_by_brute_force() {
        // Sequences of the three cells (increments −1, 0, 1; size 2) of total size ≤ 4 and sum 0.
        let mut direct = [0i64; 5];
        direct[0] = 1;
        direct[2] = 1;
        direct[4] = (-1..=1).flat_map(|a| (-1..=1).map(move |b| a + b)).filter(|&s| s == 0).count() as i64;
        let m0 = chain_series_mn(2, &[2], 0, 4).unwrap();
        let got: Vec<i64> = m0.coeffs().iter().map(|c| c.to_integer().try_into().unwrap()).collect();
        assert_eq!(got, direct.to_vec());
        let s = chain_series(2, &[2], 10).unwrap();
        for n in 1..4 {
            assert_eq!(s.coeff(n), s.coeff(-n));
            assert!(s.coeff(n).is_nonneg_integral());
        }
    }
}
