//! Cells enumerated as m-walks: type 0 (two marked labelled corners) and
//! type τ (a white star with two special split-edges glued to a black star).
//! The characteristic polynomial, the second moments and the H^τ identity
//! are all read off these enumerations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::ring::{LaurentPoly, TruncatedSeries, Var};
use super::{binomial, chain_series, check_md, planar_series};
use crate::error::{Error, Result};

/// Visits every sequence using each `(step, count)` exactly `count` times.
fn arrangements(multiset: &mut [(i64, usize)], seq: &mut Vec<i64>, visit: &mut impl FnMut(&[i64])) {
    if multiset.iter().all(|&(_, c)| c == 0) {
        visit(seq);
        return;
    }
    for i in 0..multiset.len() {
        if multiset[i].1 == 0 {
            continue;
        }
        multiset[i].1 -= 1;
        seq.push(multiset[i].0);
        arrangements(multiset, seq, visit);
        seq.pop();
        multiset[i].1 += 1;
    }
}

/// Type-0 cells of total degree `mk`, tallied by increment. A cell is a walk of
/// length `mk` that starts with the in corner (a `−1` step) and has `k` steps
/// `m−1`; the out corner is one of the other `−1` steps and the increment is
/// the sum of the steps strictly before it.
pub fn type0_cells(m: usize, k: usize) -> BTreeMap<i64, u64> {
    let mut tally = BTreeMap::new();
    if (m - 1) * k < 2 {
        return tally;
    }
    let mut ms = [(-1, (m - 1) * k - 1), (m as i64 - 1, k)];
    arrangements(&mut ms, &mut Vec::new(), &mut |rest| {
        let mut label = -1i64;
        for &s in rest {
            if s == -1 {
                *tally.entry(label).or_insert(0) += 1;
            }
            label += s;
        }
    });
    tally
}

/// White stars of degree `mk` whose in split-edge has type `tau` (first step
/// `tau−1`) and whose single other special split-edge, the out one, has type
/// `m−tau` (step `m−tau−1`, a value no ordinary step takes). Tallied by the sum
/// of the steps from the in edge through the out edge.
pub fn white_special_stars(m: usize, k: usize, tau: usize) -> BTreeMap<i64, u64> {
    assert!((1..m).contains(&tau) && k >= 1);
    let out = (m - tau) as i64 - 1;
    let mut tally = BTreeMap::new();
    let mut ms = [(-1, (m - 1) * k - 1), (m as i64 - 1, k - 1), (out, 1)];
    arrangements(&mut ms, &mut Vec::new(), &mut |rest| {
        let mut label = tau as i64 - 1;
        for &s in rest {
            label += s;
            if s == out {
                break;
            }
        }
        *tally.entry(label).or_insert(0) += 1;
    });
    tally
}

/// Black stars of degree `m` with two special split-edges: `m−1` of them, the
/// plain edges split as `g1 + g2 = m−2` on the two sides. Tallied by increment
/// `g1 − (m−2)`.
pub fn black_special_stars(m: usize) -> BTreeMap<i64, u64> {
    (0..=m as i64 - 2).map(|g1| (g1 - (m as i64 - 2), 1)).collect()
}

/// Type-τ cells of size `k` (a white star of degree `mk` glued to a black
/// star), tallied by increment.
pub fn type_tau_cells(m: usize, k: usize, tau: usize) -> BTreeMap<i64, u64> {
    let white = white_special_stars(m, k, tau);
    let black = black_special_stars(m);
    let mut tally = BTreeMap::new();
    for (&a, &x) in &white {
        for (&b, &y) in &black {
            *tally.entry(a + b).or_insert(0) += x * y;
        }
    }
    tally
}

/// `P(X, t) = Σ_F t^{|F|} X^{i(F)}` over type-0 cells with total degree in `mD`,
/// exact; its order in `t` is `max(D)`.
pub fn characteristic_polynomial(m: usize, degrees: &[usize]) -> Result<LaurentPoly> {
    let d = check_md(m, degrees)?;
    let order = *d.last().unwrap();
    let mut p = LaurentPoly::zero(order, Var::T);
    for &k in &d {
        for (i, c) in type0_cells(m, k) {
            p.add_term(i, k, BigRational::from_integer(c.into()));
        }
    }
    Ok(p)
}

/// Second moment `Σ_F i(F)²` over type-0 cells of size `k`, by enumeration.
pub fn second_moment_direct(m: usize, k: usize) -> BigInt {
    type0_cells(m, k).into_iter().map(|(i, c)| BigInt::from(i * i) * BigInt::from(c)).sum()
}

/// The closed form `mk(m−1)[(m−1)k−1]/6 · C(mk−1, k)` of the same moment.
pub fn second_moment_closed(m: usize, k: usize) -> BigRational {
    let num = BigInt::from(m * k * (m - 1)) * BigInt::from((m - 1) * k) - BigInt::from(m * k * (m - 1));
    BigRational::new(num * BigInt::from(binomial(m * k - 1, k)), BigInt::from(6))
}

/// The type-τ kernel `P^τ(X, z, T∘(z)) = Σ_cells z^k T∘^{(m−1)k−1} X^{i}`, to order `n` in `z`.
pub fn type_tau_kernel(m: usize, degrees: &[usize], tau: usize, n: usize) -> Result<LaurentPoly> {
    let d = check_md(m, degrees)?;
    if !(1..m).contains(&tau) {
        return Err(Error::Precondition(format!("type {tau} outside 1..{}", m - 1)));
    }
    let planar = planar_series(m, &d, n)?;
    let mut p = LaurentPoly::zero(n, Var::Z);
    for &k in &d {
        if k > n {
            continue;
        }
        let weight =
            &TruncatedSeries::monomial(k, BigRational::one(), n, Var::Z) * &planar.pow(((m - 1) * k - 1) as u32);
        for (i, c) in type_tau_cells(m, k, tau) {
            for (j, w) in weight.coeffs().iter().enumerate() {
                if !w.is_zero() {
                    p.add_term(i, j, w * BigRational::from_integer(c.into()));
                }
            }
        }
    }
    Ok(p)
}

/// Outcome of comparing `H^τ_n(z)` with `T∘(z)·M_n(t(z))`.
#[derive(Clone, Debug, Serialize)]
pub struct HtauReport {
    pub m: usize,
    pub degrees: Vec<usize>,
    pub tau: usize,
    pub order: usize,
    /// `(n, left coefficients, right coefficients)` as decimal strings.
    pub rows: Vec<(i64, Vec<String>, Vec<String>)>,
    /// First `(n, power of z)` where the two sides differ.
    pub first_mismatch: Option<(i64, usize)>,
}

impl HtauReport {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Left side from sequences of type-τ cells carrying planar mobiles, right
/// side from type-0 chains by substitution `t ← z T∘(z)^{m−1}`, compared
/// coefficientwise for `|n| ≤ n_max` up to `z^order`.
pub fn h_tau_identity_check(m: usize, degrees: &[usize], tau: usize, n_max: i64, order: usize) -> Result<HtauReport> {
    let d = check_md(m, degrees)?;
    let left = type_tau_kernel(m, &d, tau, order)?.geometric_inverse()?;
    let planar = planar_series(m, &d, order)?;
    let t_of_z = &TruncatedSeries::var_series(order, Var::Z) * &planar.pow(m as u32 - 1);
    let chains = chain_series(m, &d, order)?;
    let mut rows = Vec::new();
    let mut first_mismatch = None;
    for n in -n_max..=n_max {
        let l = left.coeff(n);
        let r = &planar * &chains.coeff(n).compose(&t_of_z)?;
        if first_mismatch.is_none() {
            first_mismatch = (0..=order).find(|&j| l.coeff(j) != r.coeff(j)).map(|j| (n, j));
        }
        let show = |s: &TruncatedSeries| s.coeffs().iter().map(|c| c.to_string()).collect();
        rows.push((n, show(&l), show(&r)));
    }
    Ok(HtauReport { m, degrees: d, tau, order, rows, first_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn three_quadrangle_cells() {
        let p = characteristic_polynomial(2, &[2]).unwrap();
        assert_eq!(p.x_range(), Some((-1, 1)));
        for i in -1..=1 {
            assert_eq!(p.coeff(i).coeffs().iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>(), vec![0, 0, 1]);
        }
        assert!(p.is_symmetric());
    }

    #[test]
    fn cell_counts_and_symmetry() {
        for (m, d) in [(2, vec![2, 3]), (3, vec![1, 2, 3]), (4, vec![1, 2])] {
            let p = characteristic_polynomial(m, &d).unwrap();
            assert!(p.is_symmetric(), "m={m} D={d:?}");
            let at_one = p.at_one();
            for k in 0..=*d.last().unwrap() {
                let want = if d.contains(&k) {
                    BigInt::from((m - 1) * k - 1) * BigInt::from(binomial(m * k - 1, k))
                } else {
                    BigInt::zero()
                };
                assert_eq!(at_one.coeff(k), BigRational::from_integer(want), "m={m} k={k}");
            }
            assert!(p.moment(1).is_zero());
        }
    }

    #[test]
    fn second_moments_match_closed_form() {
        assert_eq!(second_moment_direct(2, 2), BigInt::from(2));
        for m in 2..=6 {
            for k in 1..=12 / m {
                if (m - 1) * k < 2 {
                    continue;
                }
                assert_eq!(
                    BigRational::from_integer(second_moment_direct(m, k)),
                    second_moment_closed(m, k),
                    "m={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn type_tau_cells_fold_onto_type_zero() {
        // (black factor)·r_k(X) = C(mk−1, k) + [t^k] P(X, t).
        for m in 2..=4 {
            for k in 1..=3 {
                if (m - 1) * k < 2 {
                    continue;
                }
                let mut want = type0_cells(m, k);
                *want.entry(0).or_insert(0) += binomial(m * k - 1, k).to_u64().unwrap();
                for tau in 1..m {
                    assert_eq!(type_tau_cells(m, k, tau), want, "m={m} k={k} tau={tau}");
                    assert_eq!(white_special_stars(m, k, tau), white_special_stars(m, k, 1));
                }
            }
        }
    }

    #[test]
    fn h_tau_identity_small() {
        for (m, d) in [(2, vec![2]), (3, vec![1, 2])] {
            for tau in 1..m {
                let rep = h_tau_identity_check(m, &d, tau, 2, 6).unwrap();
                assert!(rep.holds(), "m={m} D={d:?} tau={tau}: {:?}", rep.first_mismatch);
            }
        }
    }
}
