//! Exhaustive generation of rooted hypermaps, constellations and general maps.
//!
//! A rooted m-hypermap with `n` black faces is stored on its `N = mn` black
//! darts by two permutations: `beta` (next dart clockwise around the black face)
//! and `omega` (next black dart clockwise around the white face, i.e.
//! `alpha∘sigma` restricted to black darts). Darts receive labels in a
//! breadth-first order: the root face is `0..m` and whenever `omega(d)` lands in a
//! face not yet seen, that face takes the next `m` labels in `beta` order starting
//! at `omega(d)`. Every rooted hypermap has exactly one such labelling, so the
//! search below meets each one exactly once and no isomorphism test is needed.
//! White-face lengths are checked while the cycles of `omega` are built.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapcore::{count_cycles, CombinatorialMap, FaceColoring};

pub const DEFAULT_DART_CAP: usize = 24;
const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Hypermap,
    Constellation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Counting {
    Rooted,
    RootedPointed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumSpec {
    pub m: usize,
    pub degrees: Vec<usize>,
    pub genus: usize,
    pub size: usize,
    pub mode: Mode,
    pub counting: Counting,
}

/// Checks `m ≥ 2`, a nonempty set of positive degrees, and `D ≠ {1}` when `m = 2`.
/// Returns the degree set sorted and deduplicated.
pub fn normalize_degrees(m: usize, degrees: &[usize]) -> Result<Vec<usize>> {
    if m < 2 {
        return Err(Error::Precondition(format!("m = {m} must be at least 2")));
    }
    let mut d = degrees.to_vec();
    d.sort_unstable();
    d.dedup();
    if d.is_empty() || d[0] == 0 {
        return Err(Error::Precondition("degree set must be a nonempty set of positive integers".into()));
    }
    if m == 2 && d == [1] {
        return Err(Error::Precondition("for m = 2 the degree set cannot be {1}".into()));
    }
    Ok(d)
}

impl EnumSpec {
    pub fn new(m: usize, degrees: &[usize], genus: usize, size: usize, mode: Mode, counting: Counting) -> Result<Self> {
        Ok(EnumSpec { m, degrees: normalize_degrees(m, degrees)?, genus, size, mode, counting })
    }

    pub fn darts(&self) -> usize {
        2 * self.m * self.size
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.darts() > cap {
            return Err(Error::Resource(format!("{} darts exceed the cap of {cap}", self.darts())));
        }
        Ok(())
    }
}

/// Backtracking construction of `omega` for a fixed block permutation.
///
/// Darts come in blocks of `block` consecutive labels cycled by `beta`. The
/// partial `omega` is a union of paths; each dart `d` is processed in label
/// order and `omega(d)` either closes the path ending at `d`, joins another
/// path start, or opens a new block.
#[derive(Clone)]
struct Search {
    block: usize,
    total: usize,
    allowed: Vec<bool>,
    max_len: usize,
    omega: Vec<usize>,
    omega_inv: Vec<usize>,
    start_of_end: Vec<usize>,
    end_of_start: Vec<usize>,
    len: Vec<usize>,
    labelled: usize,
    closed: usize,
}

/// A finished leaf: `omega` on `total` darts with `closed` cycles.
pub(crate) struct Leaf<'a> {
    pub omega: &'a [usize],
    pub closed: usize,
}

impl Search {
    fn new(block: usize, total: usize, allowed_lengths: impl Fn(usize) -> bool) -> Self {
        let allowed: Vec<bool> = (0..=total).map(|l| l > 0 && allowed_lengths(l)).collect();
        let max_len = (0..=total).rev().find(|&l| allowed[l]).unwrap_or(0);
        let mut s = Search {
            block,
            total,
            allowed,
            max_len,
            omega: vec![NONE; total],
            omega_inv: vec![NONE; total],
            start_of_end: vec![NONE; total],
            end_of_start: vec![NONE; total],
            len: vec![0; total],
            labelled: 0,
            closed: 0,
        };
        if total > 0 {
            s.open_block();
        }
        s
    }

    fn open_block(&mut self) {
        for d in self.labelled..self.labelled + self.block {
            self.start_of_end[d] = d;
            self.end_of_start[d] = d;
            self.len[d] = 1;
        }
        self.labelled += self.block;
    }

    /// Try `omega(d) = e`; runs `k` on success and restores the state.
    fn with_link(&mut self, d: usize, e: usize, k: &mut dyn FnMut(&mut Self)) {
        let s = self.start_of_end[d];
        let ld = self.len[s];
        if e == s {
            if !self.allowed[ld] {
                return;
            }
            self.omega[d] = e;
            self.omega_inv[e] = d;
            self.closed += 1;
            k(self);
            self.closed -= 1;
            self.omega[d] = NONE;
            self.omega_inv[e] = NONE;
        } else {
            let le = self.len[e];
            if ld + le > self.max_len {
                return;
            }
            let end_e = self.end_of_start[e];
            let saved = (self.end_of_start[s], self.start_of_end[end_e], self.len[s]);
            self.omega[d] = e;
            self.omega_inv[e] = d;
            self.end_of_start[s] = end_e;
            self.start_of_end[end_e] = s;
            self.len[s] = ld + le;
            k(self);
            self.end_of_start[s] = saved.0;
            self.start_of_end[end_e] = saved.1;
            self.len[s] = saved.2;
            self.omega[d] = NONE;
            self.omega_inv[e] = NONE;
        }
    }

    fn children(&mut self, d: usize, k: &mut dyn FnMut(&mut Self)) {
        if d >= self.labelled {
            return; // the labelled part is closed off: not connected
        }
        for e in 0..self.labelled {
            if self.omega_inv[e] == NONE {
                self.with_link(d, e, k);
            }
        }
        if self.labelled + self.block <= self.total {
            let first = self.labelled;
            self.open_block();
            self.with_link(d, first, k);
            self.labelled -= self.block;
        }
    }

    fn run(&mut self, d: usize, visit: &mut dyn FnMut(Leaf<'_>)) {
        if d == self.total {
            visit(Leaf { omega: &self.omega, closed: self.closed });
            return;
        }
        self.children(d, &mut |s: &mut Search| s.run(d + 1, visit));
    }

    /// States reached after assigning `omega` on darts `0..depth`.
    fn frontier(&mut self, depth: usize) -> Vec<Search> {
        fn go(s: &mut Search, d: usize, depth: usize, out: &mut Vec<Search>) {
            if d == depth || d == s.total {
                out.push(s.clone());
                return;
            }
            s.children(d, &mut |t: &mut Search| go(t, d + 1, depth, out));
        }
        let mut out = Vec::new();
        go(self, 0, depth, &mut out);
        out
    }
}

/// A generated hypermap in compact form (black darts only).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RawHypermap {
    pub m: usize,
    pub omega: Vec<usize>,
    pub white_faces: usize,
    pub vertices: usize,
    pub genus: usize,
}

impl RawHypermap {
    pub fn black_faces(&self) -> usize {
        self.omega.len() / self.m
    }

    pub fn beta(&self, d: usize) -> usize {
        let m = self.m;
        d - d % m + (d % m + 1) % m
    }

    fn from_leaf(m: usize, leaf: &Leaf<'_>) -> Self {
        let n_darts = leaf.omega.len();
        let nu: Vec<usize> = (0..n_darts)
            .map(|b| {
                let w = leaf.omega[b];
                w - w % m + (w % m + 1) % m
            })
            .collect();
        let v = count_cycles(&nu);
        let twice_g = 2 + n_darts - (n_darts / m) - leaf.closed - v;
        RawHypermap { m, omega: leaf.omega.to_vec(), white_faces: leaf.closed, vertices: v, genus: twice_g / 2 }
    }

    /// Whether vertices carry Z/m labels increasing along each black dart.
    pub fn is_constellation(&self) -> bool {
        let n = self.omega.len();
        let m = self.m;
        // vertex of a black dart = its cycle under nu = beta∘omega; the edge from
        // black dart b ends at the vertex of beta(b)
        let nu: Vec<usize> = (0..n).map(|b| self.beta(self.omega[b])).collect();
        let vid = crate::mapcore::cycle_ids(&nu);
        let mut lab = vec![NONE; n];
        lab[vid[0]] = 1 % m;
        let mut changed = true;
        while changed {
            changed = false;
            for b in 0..n {
                let (x, y) = (vid[b], vid[self.beta(b)]);
                match (lab[x], lab[y]) {
                    (NONE, NONE) => {}
                    (lx, NONE) => {
                        lab[y] = (lx + 1) % m;
                        changed = true;
                    }
                    (NONE, ly) => {
                        lab[x] = (ly + m - 1) % m;
                        changed = true;
                    }
                    (lx, ly) if (lx + 1) % m != ly => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Expand to a full rotation system on `2N` darts. Black dart `b` keeps its
    /// label and its opposite white dart is `N + b`; the root is dart 0.
    pub fn to_map(&self) -> (CombinatorialMap, FaceColoring) {
        let n = self.omega.len();
        let mut sigma = vec![0; 2 * n];
        let mut alpha = vec![0; 2 * n];
        for b in 0..n {
            sigma[b] = n + self.omega[b];
            sigma[n + b] = self.beta(b);
            alpha[b] = n + b;
            alpha[n + b] = b;
        }
        let map = CombinatorialMap::new(sigma, alpha, 0).expect("generated hypermap is a valid map");
        let col = FaceColoring::from_darts((0..2 * n).map(|d| d < n).collect());
        (map, col)
    }
}

/// Visit every rooted m-hypermap with `n` black faces and white degrees in `m·degrees`.
pub fn for_each_hypermap(m: usize, degrees: &[usize], n: usize, mut visit: impl FnMut(&RawHypermap)) {
    if n == 0 {
        return;
    }
    let mut s = Search::new(m, m * n, |l| l % m == 0 && degrees.contains(&(l / m)));
    s.run(0, &mut |leaf| visit(&RawHypermap::from_leaf(m, &leaf)));
}

fn matches(spec: &EnumSpec, h: &RawHypermap) -> bool {
    h.genus == spec.genus && (spec.mode == Mode::Hypermap || h.is_constellation())
}

/// All rooted (or rooted-pointed) maps of the requested class, each in canonical
/// form, sorted by their `sigma` images.
pub fn enumerate(spec: &EnumSpec, cap: usize) -> Result<Vec<(CombinatorialMap, FaceColoring)>> {
    spec.check_cap(cap)?;
    let mut out = Vec::new();
    for_each_hypermap(spec.m, &spec.degrees, spec.size, |h| {
        if !matches(spec, h) {
            return;
        }
        let (map, col) = h.to_map();
        let pointings: Vec<Option<usize>> = match spec.counting {
            Counting::Rooted => vec![None],
            Counting::RootedPointed => map.vertices().iter().map(|c| Some(c[0])).collect(),
        };
        for p in pointings {
            let pm = map.clone().with_pointed(p).expect("vertex id is a dart");
            let lab = pm.canonical_labelling();
            out.push((pm.relabel(&lab), col.relabel(&lab)));
        }
    });
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Exact number of rooted maps; with `RootedPointed`, the sum of their vertex counts.
pub fn count(spec: &EnumSpec, cap: usize) -> Result<BigUint> {
    spec.check_cap(cap)?;
    let mut total: u64 = 0;
    for_each_hypermap(spec.m, &spec.degrees, spec.size, |h| {
        if matches(spec, h) {
            total += match spec.counting {
                Counting::Rooted => 1,
                Counting::RootedPointed => h.vertices as u64,
            };
        }
    });
    Ok(BigUint::from(total))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountEntry {
    #[serde(serialize_with = "as_decimal")]
    pub count: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub vertex_sum: BigUint,
}

fn as_decimal<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Counts indexed by (genus, number of black faces).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    pub entries: BTreeMap<(usize, usize), CountEntry>,
}

impl CountTable {
    pub fn get(&self, g: usize, n: usize) -> (BigUint, BigUint) {
        self.entries.get(&(g, n)).map(|e| (e.count.clone(), e.vertex_sum.clone())).unwrap_or_default()
    }
}

/// One pass per size `1..=max_n`, all genera at once.
pub fn count_table(m: usize, degrees: &[usize], mode: Mode, max_n: usize, cap: usize) -> Result<CountTable> {
    let degrees = normalize_degrees(m, degrees)?;
    if 2 * m * max_n > cap {
        return Err(Error::Resource(format!("{} darts exceed the cap of {cap}", 2 * m * max_n)));
    }
    let rows: Vec<BTreeMap<usize, (u64, u64)>> = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let mut row: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
            for_each_hypermap(m, &degrees, n, |h| {
                if mode == Mode::Hypermap || h.is_constellation() {
                    let e = row.entry(h.genus).or_default();
                    e.0 += 1;
                    e.1 += h.vertices as u64;
                }
            });
            row
        })
        .collect();
    let mut table = CountTable::default();
    for (i, row) in rows.into_iter().enumerate() {
        for (g, (c, v)) in row {
            table.entries.insert((g, i + 1), CountEntry { count: c.into(), vertex_sum: v.into() });
        }
    }
    Ok(table)
}

/// Rooted maps (no colouring constraint) with `e` edges, tallied by genus:
/// `result[g]`. Darts `2i, 2i+1` form edge `i` and the search builds `sigma`
/// in the same breadth-first labelling as the hypermap search.
pub fn general_map_counts(e: usize) -> Vec<u64> {
    if e == 0 {
        return vec![1];
    }
    let n = 2 * e;
    let mut root = Search::new(2, n, |_| true);
    let depth = 3.min(n);
    let frontier = root.frontier(depth);
    let tally = |mut s: Search| {
        let mut by_genus = vec![0u64; e / 2 + 2];
        let mut phi = vec![0usize; n];
        s.run(depth, &mut |leaf| {
            for d in 0..n {
                phi[d] = leaf.omega[d ^ 1];
            }
            let f = count_cycles(&phi);
            let g = (2 + e - leaf.closed - f) / 2;
            by_genus[g] += 1;
        });
        by_genus
    };
    let mut counts = frontier
        .into_par_iter()
        .map(tally)
        .reduce(|| vec![0u64; e / 2 + 2], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    while counts.len() > 1 && *counts.last().unwrap() == 0 {
        counts.pop();
    }
    counts
}

/// Rooted one-face maps with `e` edges whose vertices all have degree at least
/// `min_degree`. The face is walked as `0, 1, …, 2e−1` from the root, so such a
/// map is the same as a fixed-point-free involution `alpha` with `sigma(d) = alpha(d) + 1`.
pub fn one_face_maps(e: usize, min_degree: usize, visit: impl FnMut(&CombinatorialMap)) {
    one_face_maps_bounded(e, min_degree, usize::MAX, visit)
}

/// As [`one_face_maps`], with vertex degrees also bounded above by `max_degree`.
pub fn one_face_maps_bounded(e: usize, min_degree: usize, max_degree: usize, mut visit: impl FnMut(&CombinatorialMap)) {
    let n = 2 * e;
    let mut alpha = vec![NONE; n];
    // the (partial) vertex through d, as far as sigma is known, violates the bounds
    fn bad_vertex(alpha: &[usize], d: usize, lo: usize, hi: usize) -> bool {
        let n = alpha.len();
        let mut len = 1;
        let mut x = d;
        loop {
            let a = alpha[x];
            if a == NONE {
                break;
            }
            x = (a + 1) % n;
            if x == d {
                return len < lo || len > hi;
            }
            len += 1;
        }
        // open vertex: extend backwards, sigma⁻¹(y) = alpha(y − 1)
        let mut y = d;
        loop {
            let a = alpha[(y + n - 1) % n];
            if a == NONE {
                break;
            }
            y = a;
            len += 1;
        }
        len > hi
    }
    fn go(alpha: &mut Vec<usize>, lo: usize, hi: usize, visit: &mut dyn FnMut(&CombinatorialMap)) {
        let n = alpha.len();
        let Some(a) = alpha.iter().position(|&x| x == NONE) else {
            let sigma = (0..n).map(|d| (alpha[d] + 1) % n).collect();
            let map = CombinatorialMap::new(sigma, alpha.clone(), 0).expect("one-face map is connected");
            visit(&map);
            return;
        };
        for b in a + 1..n {
            if alpha[b] != NONE {
                continue;
            }
            alpha[a] = b;
            alpha[b] = a;
            // only the vertices through a + 1 and b + 1 changed
            if !bad_vertex(alpha, (a + 1) % n, lo, hi) && !bad_vertex(alpha, (b + 1) % n, lo, hi) {
                go(alpha, lo, hi, visit);
            }
            alpha[a] = NONE;
            alpha[b] = NONE;
        }
    }
    if n > 0 {
        go(&mut alpha, min_degree, max_degree, &mut visit);
    }
}

/// Number of mobiles with `n` black vertices, white degrees in `m·degrees` and genus `g`,
/// built directly from their definition rather than through the bijection.
///
/// Edges are numbered along the face contour, so a one-face bipartite
/// embedding is a permutation `rho_w` (white rotations) with
/// `rho_w ∘ rho_o = (0 1 … E−1)`. For every such embedding, every choice of
/// black/labelled for the other vertices, and every choice of flagged-edge
/// increments, labels are solved up to the root normalisation and each
/// candidate is checked by [`crate::bijection::Mobile::validate`].
pub fn count_mobiles(m: usize, degrees: &[usize], g: usize, n: usize) -> Result<BigUint> {
    let degrees = normalize_degrees(m, degrees)?;
    if n == 0 {
        return Ok(BigUint::from(0u32));
    }
    let e = m * n;
    if 2 * e > DEFAULT_DART_CAP {
        return Err(Error::Resource(format!("mobile count needs {} darts, above the cap", 2 * e)));
    }
    let mut total: u64 = 0;
    let mut rho_w = vec![NONE; e];
    white_rotations(&mut rho_w, m, &degrees, &mut |rho_w| {
        total += mobiles_on(rho_w, m, g, n);
    });
    Ok(BigUint::from(total))
}

fn white_rotations(rho: &mut Vec<usize>, m: usize, degrees: &[usize], visit: &mut dyn FnMut(&[usize])) {
    let Some(first) = rho.iter().position(|&x| x == NONE) else {
        visit(rho);
        return;
    };
    fn extend(
        rho: &mut Vec<usize>,
        first: usize,
        last: usize,
        left: usize,
        m: usize,
        degrees: &[usize],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if left == 0 {
            rho[last] = first;
            white_rotations(rho, m, degrees, visit);
            rho[last] = NONE;
            return;
        }
        for x in first + 1..rho.len() {
            if rho[x] == NONE && x != last {
                rho[last] = x;
                // mark x as used by pointing it at itself until it is linked
                rho[x] = x;
                extend(rho, first, x, left - 1, m, degrees, visit);
                rho[x] = NONE;
                rho[last] = NONE;
            }
        }
    }
    let free = rho.iter().filter(|&&x| x == NONE).count();
    for &k in degrees {
        if m * k <= free {
            rho[first] = first;
            extend(rho, first, first, m * k - 1, m, degrees, visit);
            rho[first] = NONE;
        }
    }
}

/// Mobiles whose white rotations are `rho_w`; see [`count_mobiles`].
fn mobiles_on(rho_w: &[usize], m: usize, g: usize, n: usize) -> u64 {
    use crate::bijection::{Mobile, VertexKind};
    use crate::mapcore::cycle_ids;

    let e = rho_w.len();
    let winv = crate::mapcore::inverse(rho_w);
    let rho_o: Vec<usize> = (0..e).map(|i| winv[(i + 1) % e]).collect();
    let wid = cycle_ids(rho_w);
    let oid = cycle_ids(&rho_o);
    let whites: Vec<usize> = (0..e).filter(|&i| wid[i] == i).collect();
    let others: Vec<usize> = (0..e).filter(|&i| oid[i] == i).collect();
    let v = whites.len() + others.len();
    if 1 + e != v + 2 * g || others.len() < n {
        return 0;
    }
    let degree = |i: usize| (0..e).filter(|&j| oid[j] == i).count();
    let mut found = 0;
    // choose which other-vertices are black
    let k = others.len();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let is_black_v = |o: usize| mask >> others.iter().position(|&x| x == o).unwrap() & 1 == 1;
        if others.iter().any(|&o| is_black_v(o) && degree(o) > m) {
            continue;
        }
        let flagged: Vec<bool> = (0..e).map(|i| is_black_v(oid[i])).collect();
        let fl: Vec<usize> = (0..e).filter(|&i| flagged[i]).collect();
        let mut tau = vec![0i64; e];
        // odometer over increments of flagged edges
        loop {
            let sums_ok = whites.iter().all(|&w| {
                let (mut s, mut plain) = (0, 0);
                for i in (0..e).filter(|&i| wid[i] == w) {
                    if flagged[i] {
                        s += tau[i]
                    } else {
                        plain += 1
                    }
                }
                s == plain
            }) && others
                .iter()
                .filter(|&&o| is_black_v(o))
                .all(|&o| (0..e).filter(|&i| oid[i] == o).map(|i| tau[i] + 1).sum::<i64>() == m as i64);
            if sums_ok {
                found += label_solutions(e, &wid, &oid, &winv, &rho_o, &flagged, &tau, m, &mut |entry| {
                    // assemble and validate the candidate mobile
                    let mut sigma = vec![0; 2 * e];
                    let mut alpha = vec![0; 2 * e];
                    let mut kind = vec![VertexKind::White; 2 * e];
                    let mut flag = vec![None; 2 * e];
                    for i in 0..e {
                        sigma[i] = rho_w[i];
                        sigma[e + i] = e + rho_o[i];
                        alpha[i] = e + i;
                        alpha[e + i] = i;
                        if flagged[i] {
                            kind[e + i] = VertexKind::Black;
                            flag[i] = Some(entry[i]);
                            flag[e + i] = Some(entry[i] + tau[i]);
                        } else {
                            kind[e + i] = VertexKind::Labelled(entry[i]);
                        }
                    }
                    let map = CombinatorialMap::new(sigma, alpha, 0).expect("contour embedding is connected");
                    let t = Mobile::new(map, kind, flag).expect("kinds are constant on vertices");
                    t.validate().is_ok()
                });
            }
            let mut j = 0;
            while j < fl.len() {
                tau[fl[j]] += 1;
                if tau[fl[j]] < m as i64 {
                    break;
                }
                tau[fl[j]] = 0;
                j += 1;
            }
            if j == fl.len() {
                break;
            }
        }
    }
    found
}

/// Enumerate entry labels (the label read first on each edge, clockwise around
/// its white vertex) consistent with the increments; the root edge reads 0.
/// Returns how many candidates `accept` approves.
#[allow(clippy::too_many_arguments)]
fn label_solutions(
    e: usize,
    wid: &[usize],
    oid: &[usize],
    winv: &[usize],
    rho_o: &[usize],
    flagged: &[bool],
    tau: &[i64],
    m: usize,
    accept: &mut dyn FnMut(&[i64]) -> bool,
) -> u64 {
    // relative entry labels inside each white vertex, walking clockwise (rho_w⁻¹)
    let mut rel = vec![i64::MIN; e];
    for i in 0..e {
        if wid[i] != i {
            continue;
        }
        let mut x = i;
        let mut l = 0;
        loop {
            rel[x] = l;
            l += if flagged[x] { tau[x] } else { -1 };
            x = winv[x];
            if x == i {
                break;
            }
        }
        if l != 0 {
            return 0;
        }
    }
    // white vertices glued through shared labelled vertices: offsets by union-find
    let mut comp: Vec<usize> = (0..e).collect();
    let mut shift = vec![0i64; e]; // label(white w) = label(comp root) + shift[w]
    fn find(comp: &mut [usize], shift: &mut [i64], x: usize) -> (usize, i64) {
        if comp[x] == x {
            return (x, 0);
        }
        let (r, s) = find(comp, shift, comp[x]);
        comp[x] = r;
        shift[x] += s;
        (r, shift[x])
    }
    let mut first_at: Vec<Option<usize>> = vec![None; e];
    for i in 0..e {
        if flagged[i] {
            continue;
        }
        match first_at[oid[i]] {
            None => first_at[oid[i]] = Some(i),
            Some(j) => {
                // rel[i] + base(w_i) == rel[j] + base(w_j)
                let (ri, si) = find(&mut comp, &mut shift, wid[i]);
                let (rj, sj) = find(&mut comp, &mut shift, wid[j]);
                let need = rel[j] + sj - rel[i] - si; // base(ri) - base(rj)
                if ri == rj {
                    if need != 0 {
                        return 0;
                    }
                } else {
                    comp[ri] = rj;
                    shift[ri] = need;
                }
            }
        }
    }
    let roots: Vec<usize> = (0..e).filter(|&w| wid[w] == w && find(&mut comp, &mut shift, w).0 == w).collect();
    let root_comp = find(&mut comp, &mut shift, wid[0]).0;
    let base_of = |comp: &mut [usize], shift: &mut [i64], bases: &[i64], w: usize| {
        let (r, s) = find(comp, shift, w);
        bases[r] + s
    };
    // gaps between consecutive edges around a black vertex are at most m, so the
    // remaining component offsets range over a bounded window around the root one
    let span = (m * e) as i64;
    let mut count = 0;
    let others: Vec<usize> = roots.iter().copied().filter(|&r| r != root_comp).collect();
    let mut bases = vec![0i64; e];
    let mut idx = vec![-span; others.len()];
    loop {
        for (k, &r) in others.iter().enumerate() {
            bases[r] = idx[k];
        }
        bases[root_comp] = 0;
        let base0 = base_of(&mut comp, &mut shift, &bases, wid[0]);
        let entry: Vec<i64> =
            (0..e).map(|i| rel[i] + base_of(&mut comp, &mut shift, &bases, wid[i]) - rel[0] - base0).collect();
        let black_ok = (0..e).filter(|&i| flagged[i]).all(|i| {
            let j = crate::mapcore::inverse(rho_o)[i];
            // clockwise around the black vertex the edge after i is rho_o⁻¹(i)
            entry[j] + tau[j] >= entry[i]
        });
        if black_ok && accept(&entry) {
            count += 1;
        }
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] <= span {
                break;
            }
            idx[k] = -span;
            k += 1;
        }
        if k == idx.len() {
            break;
        }
    }
    count
}

/// Tutte's count of rooted planar maps with `e` edges, `2·3^e·(2e)!/(e!(e+2)!)`.
pub fn tutte_planar_maps(e: usize) -> BigUint {
    let fact = |k: usize| (1..=k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i));
    BigUint::from(2u32) * BigUint::from(3u32).pow(e as u32) * fact(2 * e) / (fact(e) * fact(e + 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapcore::{bicolor, is_m_constellation, is_m_hypermap};

    #[test]
    fn single_quadrangle() {
        let spec = EnumSpec::new(2, &[2], 0, 2, Mode::Constellation, Counting::Rooted).unwrap();
        assert_eq!(count(&spec, DEFAULT_DART_CAP).unwrap(), 2u32.into());
        let torus = EnumSpec { genus: 1, ..spec.clone() };
        assert_eq!(count(&torus, DEFAULT_DART_CAP).unwrap(), 0u32.into());
        let hyper = EnumSpec { genus: 1, mode: Mode::Hypermap, ..spec };
        // the one-vertex torus map with two interleaved loops, edges doubled
        assert_eq!(count(&hyper, DEFAULT_DART_CAP).unwrap(), 1u32.into());
    }

    #[test]
    fn generated_maps_pass_predicates() {
        for (m, d) in [(2, vec![1, 2]), (3, vec![1, 2])] {
            for n in 1..=3 {
                for_each_hypermap(m, &d, n, |h| {
                    let (map, col) = h.to_map();
                    assert_eq!(bicolor(&map).as_ref(), Some(&col));
                    assert!(is_m_hypermap(&map, &col, m, &d));
                    assert_eq!(map.genus(), h.genus);
                    assert_eq!(map.n_vertices(), h.vertices);
                    assert_eq!(is_m_constellation(&map, &col, m), h.is_constellation());
                });
            }
        }
    }

    #[test]
    fn off_lattice_sizes_are_empty() {
        let spec = EnumSpec::new(2, &[2, 4], 0, 3, Mode::Hypermap, Counting::Rooted).unwrap();
        assert_eq!(count(&spec, DEFAULT_DART_CAP).unwrap(), 0u32.into());
    }

    #[test]
    fn cap_and_degree_guards() {
        let spec = EnumSpec::new(2, &[2], 0, 7, Mode::Hypermap, Counting::Rooted).unwrap();
        assert!(matches!(count(&spec, DEFAULT_DART_CAP), Err(Error::Resource(_))));
        assert!(EnumSpec::new(2, &[1], 0, 1, Mode::Hypermap, Counting::Rooted).is_err());
        assert!(EnumSpec::new(1, &[2], 0, 1, Mode::Hypermap, Counting::Rooted).is_err());
    }

    #[test]
    fn small_general_map_counts() {
        assert_eq!(general_map_counts(1), vec![2]);
        assert_eq!(general_map_counts(2), vec![9, 1]);
        assert_eq!(general_map_counts(3), vec![54, 20]);
        assert_eq!(general_map_counts(4), vec![378, 307, 21]);
    }

    #[test]
    fn tutte_values() {
        let v: Vec<u64> = (1..=5).map(|e| tutte_planar_maps(e).try_into().unwrap()).collect();
        assert_eq!(v, vec![2, 9, 54, 378, 2916]);
    }

    #[test]
    fn mobiles_match_pointed_counts() {
        for (m, d, max_n) in [(2, vec![2], 4), (2, vec![1, 2], 4), (3, vec![1, 2], 2)] {
            for g in 0..=1 {
                for n in 1..=max_n {
                    let spec = EnumSpec::new(m, &d, g, n, Mode::Hypermap, Counting::RootedPointed).unwrap();
                    assert_eq!(
                        count_mobiles(m, &d, g, n).unwrap(),
                        count(&spec, DEFAULT_DART_CAP).unwrap(),
                        "m={m} D={d:?} g={g} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn one_face_genus_one() {
        let mut k = 0;
        one_face_maps(2, 1, |m| {
            if m.genus() == 1 {
                k += 1;
            }
        });
        // 2 edges: one planar tree shape count is 2 (Catalan), genus 1 count is 1
        assert_eq!(k, 1);
    }
}
