//! Exact truncated power series over the rationals, and Laurent polynomials in
//! `X` whose coefficients are such series.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Name of the formal variable, kept so that a series in `t` is not silently
/// mixed with a series in `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Var {
    T,
    Z,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::T => "t",
            Var::Z => "z",
        })
    }
}

/// `Σ_{k ≤ N} a_k v^k + O(v^{N+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
    var: Var,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl TruncatedSeries {
    pub fn zero(order: usize, var: Var) -> Self {
        TruncatedSeries { coeffs: vec![BigRational::zero(); order + 1], var }
    }

    pub fn one(order: usize, var: Var) -> Self {
        Self::monomial(0, BigRational::one(), order, var)
    }

    /// `c·v^k`, which is zero when `k` exceeds the order.
    pub fn monomial(k: usize, c: BigRational, order: usize, var: Var) -> Self {
        let mut s = Self::zero(order, var);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The variable itself.
    pub fn var_series(order: usize, var: Var) -> Self {
        Self::monomial(1, BigRational::one(), order, var)
    }

    /// Pads with zeros or drops terms so that exactly `order + 1` coefficients remain.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>, order: usize, var: Var) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        TruncatedSeries { coeffs, var }
    }

    pub fn from_integers(coeffs: &[i64], order: usize, var: Var) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| q(c)).collect(), order, var)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `v^k`; zero above the order as well (callers check the order).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Same series seen at another order. Raising the order is only meaningful
    /// for polynomials, whose higher terms really are zero.
    pub fn with_order(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), order, self.var)
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect(), var: self.var }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order(), self.var);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `1/self`; needs an invertible constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::Precondition("reciprocal of a series with zero constant term".into()));
        }
        let n = self.order();
        let inv0 = a0.recip();
        let mut b = vec![BigRational::zero(); n + 1];
        b[0] = inv0.clone();
        for k in 1..=n {
            let mut s = BigRational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    s += &self.coeffs[j] * &b[k - j];
                }
            }
            b[k] = -(s * &inv0);
        }
        Ok(TruncatedSeries { coeffs: b, var: self.var })
    }

    /// `self(inner(w))`, a series in the variable of `inner`; needs `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Precondition("composition with a series of nonzero constant term".into()));
        }
        let n = inner.order();
        // Horner: a_0 + inner·(a_1 + inner·(…)).
        let mut acc = Self::zero(n, inner.var);
        for k in (0..=self.order().min(n)).rev() {
            acc = &acc * inner;
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Sum of the retained terms at a real point.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// All coefficients are nonnegative integers.
    pub fn is_nonneg_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && !c.is_negative())
    }

    /// Integer coefficients, when they all are integers.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·{}", self.var)?,
                _ => write!(f, "{c}·{}^{k}", self.var)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order() + 1)
    }
}

fn check_var(a: &TruncatedSeries, b: &TruncatedSeries) {
    assert_eq!(a.var, b.var, "series in different variables");
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        check_var(self, rhs);
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect();
        TruncatedSeries { coeffs, var: self.var }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        check_var(self, rhs);
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect();
        TruncatedSeries { coeffs, var: self.var }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c).collect(), var: self.var }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        check_var(self, rhs);
        let n = self.order().min(rhs.order());
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncatedSeries { coeffs, var: self.var }
    }
}

/// `Σ_i c_i(v) X^i` with finitely many nonzero `c_i`, all truncated at the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, TruncatedSeries>,
    order: usize,
    var: Var,
}

impl LaurentPoly {
    pub fn zero(order: usize, var: Var) -> Self {
        LaurentPoly { terms: BTreeMap::new(), order, var }
    }

    pub fn one(order: usize, var: Var) -> Self {
        let mut p = Self::zero(order, var);
        p.terms.insert(0, TruncatedSeries::one(order, var));
        p
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Adds `c·v^k·X^i`.
    pub fn add_term(&mut self, i: i64, k: usize, c: BigRational) {
        if k > self.order || c.is_zero() {
            return;
        }
        let (order, var) = (self.order, self.var);
        let e = self.terms.entry(i).or_insert_with(|| TruncatedSeries::zero(order, var));
        e.coeffs[k] += c;
        if e.is_zero() {
            self.terms.remove(&i);
        }
    }

    /// Coefficient of `X^i`.
    pub fn coeff(&self, i: i64) -> TruncatedSeries {
        self.terms.get(&i).cloned().unwrap_or_else(|| TruncatedSeries::zero(self.order, self.var))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &TruncatedSeries)> {
        self.terms.iter().map(|(&i, s)| (i, s))
    }

    /// Smallest and largest exponent of `X` carried.
    pub fn x_range(&self) -> Option<(i64, i64)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    /// Same polynomial at another order (see [`TruncatedSeries::with_order`]).
    pub fn with_order(&self, order: usize) -> Self {
        let mut p = LaurentPoly::zero(order, self.var);
        for (&i, s) in &self.terms {
            let s = s.with_order(order);
            if !s.is_zero() {
                p.terms.insert(i, s);
            }
        }
        p
    }

    /// `P(X^{-1}) = P(X)`.
    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(&i, s)| self.terms.get(&-i) == Some(s))
    }

    /// `P(1, v)`.
    pub fn at_one(&self) -> TruncatedSeries {
        self.terms.values().fold(TruncatedSeries::zero(self.order, self.var), |acc, s| &acc + s)
    }

    /// `Σ_i i^j c_i(v)`, i.e. `(X d/dX)^j P` at `X = 1`.
    pub fn moment(&self, j: u32) -> TruncatedSeries {
        self.terms
            .iter()
            .fold(TruncatedSeries::zero(self.order, self.var), |acc, (&i, s)| &acc + &s.scale(&q(i.pow(j))))
    }

    /// `1/(1 − P)` as the geometric sum `Σ_j P^j`; needs `P` without constant
    /// term in `v`, so that `P^j = O(v^j)` and the sum is finite at this order.
    pub fn geometric_inverse(&self) -> Result<LaurentPoly> {
        if self.terms.values().any(|s| !s.coeff(0).is_zero()) {
            return Err(Error::Precondition("geometric inverse needs a kernel without constant term".into()));
        }
        let mut sum = LaurentPoly::one(self.order, self.var);
        let mut power = LaurentPoly::one(self.order, self.var);
        for _ in 0..self.order {
            power = &power * self;
            if power.terms.is_empty() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum)
    }

    /// Each coefficient evaluated at a real point of `v`.
    pub fn eval_coeffs_f64(&self, v: f64) -> BTreeMap<i64, f64> {
        self.terms.iter().map(|(&i, s)| (i, s.eval_f64(v))).collect()
    }

    /// Applies `f` to every coefficient series.
    pub fn map_coeffs(&self, f: impl Fn(&TruncatedSeries) -> Result<TruncatedSeries>) -> Result<LaurentPoly> {
        let mut out: Option<LaurentPoly> = None;
        for (&i, s) in &self.terms {
            let c = f(s)?;
            let p = out.get_or_insert_with(|| LaurentPoly::zero(c.order(), c.var()));
            if !c.is_zero() {
                p.terms.insert(i, c);
            }
        }
        Ok(out.unwrap_or_else(|| LaurentPoly::zero(self.order, self.var)))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: Self) -> LaurentPoly {
        assert_eq!(self.var, rhs.var, "series in different variables");
        let order = self.order.min(rhs.order);
        let mut out = self.with_order(order);
        for (&i, s) in &rhs.terms {
            let sum = &out.coeff(i) + s;
            if sum.is_zero() {
                out.terms.remove(&i);
            } else {
                out.terms.insert(i, sum);
            }
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: Self) -> LaurentPoly {
        assert_eq!(self.var, rhs.var, "series in different variables");
        let order = self.order.min(rhs.order);
        let mut out = LaurentPoly::zero(order, self.var);
        for (&i, a) in &self.terms {
            for (&j, b) in &rhs.terms {
                let prod = a * b;
                if prod.is_zero() {
                    continue;
                }
                let e = out.terms.entry(i + j).or_insert_with(|| TruncatedSeries::zero(order, self.var));
                *e = &*e + &prod;
            }
        }
        out.terms.retain(|_, s| !s.is_zero());
        out
    }
}
