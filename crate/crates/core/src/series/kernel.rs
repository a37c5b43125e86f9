//! The kernel `1 − P(X, t)`: its small roots, the partial-fraction weights
//! `C_i`, the chain values `M_n(t)` and the square-root behaviour at `t_c`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::cells::{characteristic_polynomial, second_moment_closed, second_moment_direct};
use super::{check_md, critical_constants, planar_value};
use crate::error::{Error, Result};

/// Numeric coefficients `c_{i,k}` of `P(X, t) = Σ c_{i,k} X^i t^k`.
fn cell_table(m: usize, d: &[usize]) -> Result<Vec<(i64, i32, f64)>> {
    let p = characteristic_polynomial(m, d)?;
    let mut out = Vec::new();
    for (i, s) in p.terms() {
        for (k, c) in s.coeffs().iter().enumerate() {
            let c = c.to_f64().unwrap_or(0.0);
            if c != 0.0 {
                out.push((i, k as i32, c));
            }
        }
    }
    Ok(out)
}

/// Coefficients `q_0, …, q_{2r}` of `X^r (1 − P(X, t))`.
pub fn kernel_polynomial(m: usize, degrees: &[usize], t: f64) -> Result<Vec<f64>> {
    let d = check_md(m, degrees)?;
    let r = (m - 1) * d.last().unwrap() - 1;
    let mut q = vec![0.0; 2 * r + 1];
    q[r] = 1.0;
    for (i, k, c) in cell_table(m, &d)? {
        q[(i + r as i64) as usize] -= c * t.powi(k);
    }
    Ok(q)
}

fn horner(q: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in q.iter().rev() {
        dv = dv * x + v;
        v = v * x + c;
    }
    (v, dv)
}

fn companion_roots(q: &[f64]) -> Vec<Complex64> {
    let n = q.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = q[n];
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        c[(i, n - 1)] = -q[i] / lead;
    }
    c.complex_eigenvalues().iter().copied().collect()
}

fn polish(q: &[f64], mut x: Complex64) -> Complex64 {
    for _ in 0..50 {
        let (v, dv) = horner(q, x);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        x -= step;
        if step.norm() <= 4.0 * f64::EPSILON * x.norm().max(1.0) {
            break;
        }
    }
    x
}

/// Divides `q` by `(X − 1)`, dropping the remainder.
fn deflate_one(q: &[f64]) -> Vec<f64> {
    let n = q.len() - 1;
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for j in (1..=n).rev() {
        acc += q[j];
        out[j - 1] = acc;
    }
    out
}

/// Roots of the kernel at one value of `t`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelRoots {
    pub t: f64,
    pub r: usize,
    /// The `r` roots inside the unit disc, the principal root `α₁` first.
    pub small: Vec<(f64, f64)>,
    /// The `r` roots outside, `1/α_i` in the same order.
    pub large: Vec<(f64, f64)>,
    /// `C_i`; the first one is infinite at `t_c`.
    pub c: Vec<(f64, f64)>,
    /// `α₁ − max_{i≠1} |α_i|`.
    pub separation: f64,
}

fn cx(z: (f64, f64)) -> Complex64 {
    Complex64::new(z.0, z.1)
}

impl KernelRoots {
    pub fn alpha1(&self) -> f64 {
        self.small[0].0
    }

    pub fn small_roots(&self) -> Vec<Complex64> {
        self.small.iter().copied().map(cx).collect()
    }

    pub fn weights(&self) -> Vec<Complex64> {
        self.c.iter().copied().map(cx).collect()
    }

    /// `M_n(t) = Σ_i C_i α_i^{|n|}`.
    pub fn m_n(&self, n: i64) -> f64 {
        let e = n.unsigned_abs() as i32;
        self.small_roots().iter().zip(self.weights()).map(|(a, c)| c * a.powi(e)).sum::<Complex64>().re
    }

    /// `Σ_n M_n x^n` from the partial fractions, for `|α_i| < |x| < 1/|α_i|`.
    pub fn partial_fraction_sum(&self, x: Complex64) -> Complex64 {
        self.small_roots()
            .iter()
            .zip(self.weights())
            .map(|(&a, c)| c * (1.0 / (1.0 - a * x) + 1.0 / (1.0 - a / x) - 1.0))
            .sum()
    }
}

/// Small roots of `1 − P(X, t)` for `0 < t ≤ t_c` and their weights
/// `C_i = α_i^{r−1} / (L ∏_{j≠i}(α_i − α_j) ∏_j (α_i − 1/α_j))`, `L = −[X^r]P`.
/// Roots come from the companion matrix of `X^r(1 − P)`, polished by Newton;
/// at `t_c` the double root 1 is divided out first.
pub fn kernel_roots(m: usize, degrees: &[usize], t: f64) -> Result<KernelRoots> {
    let d = check_md(m, degrees)?;
    let t_c = critical_constants(m, &d)?.t_c;
    if !(t > 0.0 && t <= t_c * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!("t = {t} outside (0, t_c = {t_c}]")));
    }
    let critical = (t - t_c).abs() <= 1e-12 * t_c;
    let q = kernel_polynomial(m, &d, if critical { t_c } else { t })?;
    let r = (q.len() - 1) / 2;
    let mut roots: Vec<Complex64> = if critical {
        let rest = deflate_one(&deflate_one(&q));
        let mut v: Vec<Complex64> = companion_roots(&rest).into_iter().map(|x| polish(&rest, x)).collect();
        v.push(Complex64::new(1.0, 0.0));
        v.push(Complex64::new(1.0, 0.0));
        v
    } else {
        companion_roots(&q).into_iter().map(|x| polish(&q, x)).collect()
    };
    if roots.len() != 2 * r || roots.iter().any(|z| !z.is_finite()) {
        return Err(Error::Numeric(format!("companion matrix gave {} roots for degree {}", roots.len(), 2 * r)));
    }
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut small: Vec<Complex64> = roots[..r].to_vec();
    // Principal root: the largest small root, which must be real and positive.
    let (p, _) = small.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
    small.swap(0, p);
    let a1 = small[0];
    if a1.im.abs() > 1e-8 || a1.re <= 0.0 {
        return Err(Error::Numeric(format!("principal root {a1} is not real positive at t = {t}")));
    }
    small[0] = Complex64::new(a1.re, 0.0);
    let separation = a1.re - small[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    if r > 1 && separation <= 0.0 {
        return Err(Error::Numeric(format!("no separated principal root at t = {t}: gap {separation}")));
    }
    let lead = q[2 * r];
    let c = small
        .iter()
        .enumerate()
        .map(|(i, &ai)| {
            if critical && i == 0 {
                return Complex64::new(f64::INFINITY, 0.0);
            }
            let mut den = Complex64::new(lead, 0.0);
            for (j, &aj) in small.iter().enumerate() {
                if j != i {
                    den *= ai - aj;
                }
                den *= ai - 1.0 / aj;
            }
            ai.powi(r as i32 - 1) / den
        })
        .collect::<Vec<_>>();
    let pair = |z: &Complex64| (z.re, z.im);
    Ok(KernelRoots {
        t,
        r,
        large: small.iter().map(|z| pair(&(1.0 / z))).collect(),
        small: small.iter().map(pair).collect(),
        c: c.iter().map(pair).collect(),
        separation,
    })
}

/// `M_n(t)` for `0 ≤ n ≤ n_max` by summing chains directly: a dynamic program
/// over total size with weight `t^size`, run until the remaining layers carry
/// relative mass below `1e−17`. Valid for `0 < t < t_c`.
pub fn chain_values_numeric(m: usize, degrees: &[usize], t: f64, n_max: usize) -> Result<Vec<f64>> {
    let d = check_md(m, degrees)?;
    let t_c = critical_constants(m, &d)?.t_c;
    if !(t > 0.0 && t < t_c) {
        return Err(Error::Precondition(format!("t = {t} outside (0, t_c)")));
    }
    let r = (m - 1) * d.last().unwrap() - 1;
    let kmax = *d.last().unwrap();
    // Cells by size, weighted.
    let mut by_size: Vec<Vec<(i64, f64)>> = vec![Vec::new(); kmax + 1];
    for (i, k, c) in cell_table(m, &d)? {
        by_size[k as usize].push((i, c * t.powi(k)));
    }
    let limit = 1_000_000usize;
    let mut layers: Vec<Vec<f64>> = vec![vec![1.0]];
    let mut masses = vec![1.0];
    let mut total = 1.0;
    let mut out = vec![0.0; n_max + 1];
    out[0] = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        if k > limit {
            return Err(Error::Resource(format!("chain sum did not converge within {limit} layers")));
        }
        let w = r * k;
        let mut layer = vec![0.0; 2 * w + 1];
        for (s, cells) in by_size.iter().enumerate().skip(1) {
            if s > k || cells.is_empty() {
                continue;
            }
            let prev = &layers[k - s];
            let pw = (r * (k - s)) as i64;
            for (j, &v) in prev.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let base = j as i64 - pw + w as i64;
                for &(i, c) in cells {
                    layer[(base + i) as usize] += c * v;
                }
            }
        }
        let mass: f64 = layer.iter().sum();
        for (n, o) in out.iter_mut().enumerate() {
            if n <= w {
                *o += layer[w + n];
            }
        }
        total += mass;
        layers.push(layer);
        masses.push(mass);
        if k > kmax {
            // Free layers no longer reachable.
            layers[k - kmax - 1] = Vec::new();
            let recent: f64 = masses[k + 1 - kmax..].iter().sum();
            if recent < 1e-17 * total {
                break;
            }
        }
    }
    Ok(out)
}

/// `Σ_i C_i α_i^{|n|}` against the direct chain sum at sampled `t`.
#[derive(Clone, Debug, Serialize)]
pub struct MnReport {
    pub m: usize,
    pub degrees: Vec<usize>,
    /// `(t/t_c, n, partial fractions, direct sum)`.
    pub rows: Vec<(f64, usize, f64, f64)>,
    pub max_residual: f64,
}

/// Samples `samples` points evenly inside `(0.2 t_c, 0.99 t_c)` and compares
/// `M_n(t)`, `0 ≤ n ≤ n_max`, from the roots with the direct chain sum
/// (relative residual, floored at absolute scale 1).
pub fn mn_check(m: usize, degrees: &[usize], n_max: usize, samples: usize) -> Result<MnReport> {
    let d = check_md(m, degrees)?;
    let t_c = critical_constants(m, &d)?.t_c;
    let mut rows = Vec::new();
    let mut max_residual: f64 = 0.0;
    for j in 0..samples {
        let frac = 0.2 + 0.79 * (j as f64 + 0.5) / samples as f64;
        let t = frac * t_c;
        let kr = kernel_roots(m, &d, t)?;
        let direct = chain_values_numeric(m, &d, t, n_max)?;
        for (n, &b) in direct.iter().enumerate() {
            let a = kr.m_n(n as i64);
            max_residual = max_residual.max((a - b).abs() / b.abs().max(1.0));
            rows.push((frac, n, a, b));
        }
    }
    Ok(MnReport { m, degrees: d, rows, max_residual })
}

/// Lemma-level evaluations at `(1, t_c)` and the second-moment closed form.
#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub m: usize,
    pub degrees: Vec<usize>,
    pub p_at_one: f64,
    pub t_dp_dt: f64,
    pub gamma_over_m1: f64,
    pub dp_dx: f64,
    pub d2p_dx2: f64,
    pub m_gamma_over_6: f64,
    /// `(k, enumerated moment, closed form)` for `k ∈ D`.
    pub moments: Vec<(usize, String, String)>,
    pub max_residual: f64,
}

impl KernelReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_residual <= tol && self.moments.iter().all(|(_, a, b)| a == b)
    }
}

/// `t ∂P/∂t(1, t_c) = γ/(m−1)`, `∂P/∂X(1, t_c) = 0`, `∂²P/∂X²(1, t_c) = mγ/6`,
/// and `P(1, t_c) = 1`.
pub fn verify_kernel_derivatives(m: usize, degrees: &[usize]) -> Result<KernelReport> {
    let d = check_md(m, degrees)?;
    let cc = critical_constants(m, &d)?;
    let t = cc.t_c;
    let mut p1 = 0.0;
    let mut dt = 0.0;
    let mut dx = 0.0;
    let mut dxx = 0.0;
    for (i, k, c) in cell_table(m, &d)? {
        let w = c * t.powi(k);
        p1 += w;
        dt += k as f64 * w;
        dx += i as f64 * w;
        dxx += (i * (i - 1)) as f64 * w;
    }
    let gamma_over_m1 = cc.gamma / (m as f64 - 1.0);
    let m_gamma_over_6 = m as f64 * cc.gamma / 6.0;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let max_residual =
        [rel(p1, 1.0), rel(dt, gamma_over_m1), dx.abs(), rel(dxx, m_gamma_over_6)].into_iter().fold(0.0, f64::max);
    let moments = d
        .iter()
        .map(|&k| (k, second_moment_direct(m, k).to_string(), second_moment_closed(m, k).to_string()))
        .collect();
    Ok(KernelReport {
        m,
        degrees: d,
        p_at_one: p1,
        t_dp_dt: dt,
        gamma_over_m1,
        dp_dx: dx,
        d2p_dx2: dxx,
        m_gamma_over_6,
        moments,
        max_residual,
    })
}

fn p_real(cells: &[(i64, i32, f64)], x: f64, t: f64) -> (f64, f64) {
    // (P(x, t), x ∂P/∂x(x, t))
    cells.iter().fold((0.0, 0.0), |(p, dp), &(i, k, c)| {
        let w = c * t.powi(k) * x.powi(i as i32);
        (p + w, dp + i as f64 * w)
    })
}

fn alpha1_with(cells: &[(i64, i32, f64)], t: f64) -> Result<f64> {
    // P(·, t) decreases on (0, 1] and blows up at 0.
    let (at_one, _) = p_real(cells, 1.0, t);
    if at_one > 1.0 + 1e-14 {
        return Err(Error::Precondition(format!("t = {t} beyond t_c: P(1, t) = {at_one}")));
    }
    if at_one >= 1.0 {
        return Ok(1.0);
    }
    let mut lo = 0.5;
    while p_real(cells, lo, t).0 < 1.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Numeric("no principal root found".into()));
        }
    }
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p_real(cells, mid, t).0 > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The principal root `α₁(t) ∈ (0, 1]`, by bisection of `P(X, t) = 1`.
pub fn alpha1(m: usize, degrees: &[usize], t: f64) -> Result<f64> {
    let d = check_md(m, degrees)?;
    alpha1_with(&cell_table(m, &d)?, t)
}

/// `C₁(t) = −1/(α₁ ∂P/∂X(α₁, t))`, the residue form of the weight of `α₁`.
pub fn c1(m: usize, degrees: &[usize], t: f64) -> Result<f64> {
    let d = check_md(m, degrees)?;
    let cells = cell_table(m, &d)?;
    let a = alpha1_with(&cells, t)?;
    Ok(-1.0 / p_real(&cells, a, t).1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PuiseuxQuantity {
    /// `1 − T∘(z)/T_c` against `1 − z/z_c`.
    Planar,
    /// `1 − α₁(t)` against `1 − t/t_c`.
    Alpha1,
    /// `C₁(t)` against `1 − t/t_c`.
    C1,
}

/// Least-squares line through `(ln ε, ln y)`.
#[derive(Clone, Debug, Serialize)]
pub struct PuiseuxFit {
    pub quantity: PuiseuxQuantity,
    pub m: usize,
    pub degrees: Vec<usize>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub amplitude: f64,
    pub expected_slope: f64,
    pub expected_amplitude: f64,
    pub points: Vec<(f64, f64)>,
}

impl PuiseuxFit {
    pub fn slope_error(&self) -> f64 {
        ((self.slope - self.expected_slope) / self.expected_slope).abs()
    }

    pub fn amplitude_error(&self) -> f64 {
        ((self.amplitude - self.expected_amplitude) / self.expected_amplitude).abs()
    }
}

/// Fits `y ≈ A ε^s` on 13 geometric points `ε ∈ [1e−7, 1e−4]`.
pub fn puiseux_fit(quantity: PuiseuxQuantity, m: usize, degrees: &[usize]) -> Result<PuiseuxFit> {
    let d = check_md(m, degrees)?;
    let cc = critical_constants(m, &d)?;
    let cells = cell_table(m, &d)?;
    let mf = m as f64;
    let (expected_slope, expected_amplitude) = match quantity {
        PuiseuxQuantity::Planar => (0.5, (2.0 * cc.beta / ((mf - 1.0) * cc.gamma)).sqrt()),
        PuiseuxQuantity::Alpha1 => (0.5, (12.0 / (mf * (mf - 1.0))).sqrt()),
        PuiseuxQuantity::C1 => (-0.5, (3.0 * (mf - 1.0) / mf).sqrt() / cc.gamma),
    };
    let n = 13;
    let mut points = Vec::with_capacity(n);
    for j in 0..n {
        let eps = 10f64.powf(-4.0 - 3.0 * j as f64 / (n - 1) as f64);
        let y = match quantity {
            PuiseuxQuantity::Planar => 1.0 - planar_value(m, &d, cc.z_c * (1.0 - eps))? / cc.beta,
            PuiseuxQuantity::Alpha1 => 1.0 - alpha1_with(&cells, cc.t_c * (1.0 - eps))?,
            PuiseuxQuantity::C1 => {
                let t = cc.t_c * (1.0 - eps);
                let a = alpha1_with(&cells, t)?;
                -1.0 / p_real(&cells, a, t).1
            }
        };
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::Numeric(format!("{quantity:?} is {y} at ε = {eps}; data {points:?}")));
        }
        points.push((eps, y));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let slope_stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok(PuiseuxFit {
        quantity,
        m,
        degrees: d,
        slope,
        slope_stderr,
        amplitude: icpt.exp(),
        expected_slope,
        expected_amplitude,
        points,
    })
}

/// `M_n` from exact convolution evaluated at `t`, for cross-checks at small `t`.
#[cfg(test)]
fn exact_values(m: usize, d: &[usize], t: f64, n_max: i64, order: usize) -> std::collections::BTreeMap<i64, f64> {
    let s = super::chain_series(m, d, order).unwrap();
    (0..=n_max).map(|n| (n, s.coeff(n).eval_f64(t))).collect()
}
