//! Rooted maps on orientable surfaces, encoded as rotation systems.
//!
//! A map on darts `0..2e` is a pair of permutations: `sigma` (counterclockwise
//! successor around a vertex) and `alpha` (the other half of the edge). Faces are
//! the cycles of `phi = sigma ∘ alpha`; the `phi`-cycle through a dart `d` is the
//! face lying on the right of `d`, walked clockwise. Vertices and faces are named
//! by the smallest dart of their cycle. The text format is 1-indexed.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const UNSET: usize = usize::MAX;

/// Cycles of a permutation, each starting at its minimum, sorted by minimum.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            cyc.push(d);
            d = perm[d];
        }
        out.push(cyc);
    }
    out
}

/// For every element, the minimum of its cycle.
pub fn cycle_ids(perm: &[usize]) -> Vec<usize> {
    let mut id = vec![UNSET; perm.len()];
    for start in 0..perm.len() {
        if id[start] != UNSET {
            continue;
        }
        let mut d = start;
        while id[d] == UNSET {
            id[d] = start;
            d = perm[d];
        }
    }
    id
}

pub fn count_cycles(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut c = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        c += 1;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            d = perm[d];
        }
    }
    c
}

pub fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// A rooted, optionally pointed, map.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombinatorialMap {
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    root: usize,
    pointed: Option<usize>,
}

/// Counts attached to a map. `face_degrees` is sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapStats {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub genus: usize,
    pub face_degrees: Vec<usize>,
}

impl CombinatorialMap {
    pub fn new(sigma: Vec<usize>, alpha: Vec<usize>, root: usize) -> Result<Self> {
        let n = sigma.len();
        if n == 0 || n % 2 == 1 {
            return Err(Error::Structural(format!("dart count {n} must be positive and even")));
        }
        if alpha.len() != n {
            return Err(Error::Structural("sigma and alpha sizes differ".into()));
        }
        if !is_permutation(&sigma) || !is_permutation(&alpha) {
            return Err(Error::Structural("not a permutation".into()));
        }
        if (0..n).any(|d| alpha[d] == d || alpha[alpha[d]] != d) {
            return Err(Error::Structural("alpha is not a fixed-point-free involution".into()));
        }
        if root >= n {
            return Err(Error::Structural(format!("root {root} out of range")));
        }
        let map = CombinatorialMap { sigma, alpha, root, pointed: None };
        if map.orbit_size(0) != n {
            return Err(Error::Structural("sigma and alpha do not act transitively".into()));
        }
        Ok(map)
    }

    /// Same map with a distinguished vertex, given by any dart incident to it.
    pub fn with_pointed(mut self, dart: Option<usize>) -> Result<Self> {
        self.pointed = match dart {
            None => None,
            Some(d) if d < self.n_darts() => Some(self.vertex_of(d)),
            Some(d) => return Err(Error::Structural(format!("pointed dart {d} out of range"))),
        };
        Ok(self)
    }

    fn orbit_size(&self, start: usize) -> usize {
        let mut seen = vec![false; self.n_darts()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut k = 1;
        while let Some(d) = stack.pop() {
            for e in [self.sigma[d], self.alpha[d]] {
                if !seen[e] {
                    seen[e] = true;
                    k += 1;
                    stack.push(e);
                }
            }
        }
        k
    }

    pub fn n_darts(&self) -> usize {
        self.sigma.len()
    }
    pub fn n_edges(&self) -> usize {
        self.sigma.len() / 2
    }
    pub fn sigma(&self, d: usize) -> usize {
        self.sigma[d]
    }
    pub fn alpha(&self, d: usize) -> usize {
        self.alpha[d]
    }
    /// Next dart clockwise along the face on the right of `d`.
    pub fn phi(&self, d: usize) -> usize {
        self.sigma[self.alpha[d]]
    }
    pub fn sigma_perm(&self) -> &[usize] {
        &self.sigma
    }
    pub fn alpha_perm(&self) -> &[usize] {
        &self.alpha
    }
    pub fn phi_perm(&self) -> Vec<usize> {
        (0..self.n_darts()).map(|d| self.phi(d)).collect()
    }
    pub fn root(&self) -> usize {
        self.root
    }
    pub fn pointed(&self) -> Option<usize> {
        self.pointed
    }

    pub fn vertices(&self) -> Vec<Vec<usize>> {
        cycles(&self.sigma)
    }
    pub fn faces(&self) -> Vec<Vec<usize>> {
        cycles(&self.phi_perm())
    }
    pub fn vertex_ids(&self) -> Vec<usize> {
        cycle_ids(&self.sigma)
    }
    pub fn face_ids(&self) -> Vec<usize> {
        cycle_ids(&self.phi_perm())
    }
    pub fn vertex_of(&self, d: usize) -> usize {
        let mut best = d;
        let mut e = self.sigma[d];
        while e != d {
            best = best.min(e);
            e = self.sigma[e];
        }
        best
    }
    pub fn n_vertices(&self) -> usize {
        count_cycles(&self.sigma)
    }
    pub fn n_faces(&self) -> usize {
        count_cycles(&self.phi_perm())
    }

    pub fn genus(&self) -> usize {
        let chi = self.n_vertices() as i64 - self.n_edges() as i64 + self.n_faces() as i64;
        // transitivity and orientability make 2 - chi a nonnegative even number
        debug_assert!(chi <= 2 && (2 - chi) % 2 == 0);
        ((2 - chi) / 2) as usize
    }

    pub fn stats(&self) -> MapStats {
        let mut face_degrees: Vec<usize> = self.faces().iter().map(Vec::len).collect();
        face_degrees.sort_unstable();
        let v = self.n_vertices();
        let e = self.n_edges();
        let f = face_degrees.len();
        MapStats { v, e, f, genus: (2 + e - v - f) / 2, face_degrees }
    }

    /// Old-to-new dart relabelling by breadth-first search from the root,
    /// trying `alpha` before `sigma` at each dart.
    pub fn canonical_labelling(&self) -> Vec<usize> {
        let n = self.n_darts();
        let mut lab = vec![UNSET; n];
        let mut queue = VecDeque::with_capacity(n);
        lab[self.root] = 0;
        queue.push_back(self.root);
        let mut next = 1;
        while let Some(d) = queue.pop_front() {
            for e in [self.alpha[d], self.sigma[d]] {
                if lab[e] == UNSET {
                    lab[e] = next;
                    next += 1;
                    queue.push_back(e);
                }
            }
        }
        lab
    }

    /// Apply an old-to-new relabelling of darts.
    pub fn relabel(&self, lab: &[usize]) -> Self {
        let n = self.n_darts();
        let mut sigma = vec![0; n];
        let mut alpha = vec![0; n];
        for d in 0..n {
            sigma[lab[d]] = lab[self.sigma[d]];
            alpha[lab[d]] = lab[self.alpha[d]];
        }
        let mut out = CombinatorialMap { sigma, alpha, root: lab[self.root], pointed: None };
        out.pointed = self.pointed.map(|p| out.vertex_of(lab[p]));
        out
    }

    /// Two rooted (pointed) maps are isomorphic iff their canonical forms are equal.
    pub fn canonical_form(&self) -> Self {
        self.relabel(&self.canonical_labelling())
    }

    /// Same map rooted at another dart.
    pub fn rerooted(&self, root: usize) -> Self {
        let mut out = self.clone();
        out.root = root;
        out
    }

    pub fn to_text(&self) -> String {
        let join = |p: &[usize]| p.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" ");
        let mut s = format!(
            "darts {}\nsigma {}\nalpha {}\nroot {}\n",
            self.n_darts(),
            join(&self.sigma),
            join(&self.alpha),
            self.root + 1
        );
        if let Some(p) = self.pointed {
            s.push_str(&format!("pointed {}\n", p + 1));
        }
        s
    }

    /// Parse the leading map block of `text`; returns the map and the unconsumed lines.
    pub(crate) fn parse_block<'a, I>(lines: &mut std::iter::Peekable<I>) -> Result<Self>
    where
        I: Iterator<Item = &'a str>,
    {
        fn field(line: Option<&str>, key: &str) -> Result<Vec<usize>> {
            let line = line.ok_or_else(|| Error::Parse(format!("missing `{key}` line")))?;
            let mut toks = line.split_whitespace();
            if toks.next() != Some(key) {
                return Err(Error::Parse(format!("expected `{key}`, found `{line}`")));
            }
            toks.map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{key}: {e}")))).collect()
        }
        fn zero_based(v: Vec<usize>, n: usize, key: &str) -> Result<Vec<usize>> {
            v.into_iter()
                .map(|x| {
                    if x >= 1 && x <= n {
                        Ok(x - 1)
                    } else {
                        Err(Error::Parse(format!("{key}: dart {x} out of range")))
                    }
                })
                .collect()
        }
        let next_nonempty = |lines: &mut std::iter::Peekable<I>| loop {
            match lines.next() {
                Some(l) if l.trim().is_empty() => continue,
                other => break other,
            }
        };
        let darts = field(next_nonempty(lines), "darts")?;
        let [n] = darts[..] else { return Err(Error::Parse("`darts` takes one value".into())) };
        let sigma = zero_based(field(next_nonempty(lines), "sigma")?, n, "sigma")?;
        let alpha = zero_based(field(next_nonempty(lines), "alpha")?, n, "alpha")?;
        if sigma.len() != n || alpha.len() != n {
            return Err(Error::Parse("permutation length differs from dart count".into()));
        }
        let root = zero_based(field(next_nonempty(lines), "root")?, n, "root")?;
        let [root] = root[..] else { return Err(Error::Parse("`root` takes one value".into())) };
        let mut map = CombinatorialMap::new(sigma, alpha, root)?;
        if lines.peek().is_some_and(|l| l.trim_start().starts_with("pointed")) {
            let p = zero_based(field(lines.next(), "pointed")?, n, "pointed")?;
            let [p] = p[..] else { return Err(Error::Parse("`pointed` takes one value".into())) };
            if map.vertex_of(p) != p {
                return Err(Error::Parse(format!("pointed {} is not a vertex id", p + 1)));
            }
            map = map.with_pointed(Some(p))?;
        }
        Ok(map)
    }
}

impl fmt::Display for CombinatorialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for CombinatorialMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().peekable();
        let map = Self::parse_block(&mut lines)?;
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse("trailing content after map".into()));
        }
        Ok(map)
    }
}

/// Black/white colouring of faces, stored per dart (the colour of the face on its right).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FaceColoring {
    black: Vec<bool>,
}

impl FaceColoring {
    pub fn from_darts(black: Vec<bool>) -> Self {
        FaceColoring { black }
    }
    pub fn is_black(&self, d: usize) -> bool {
        self.black[d]
    }
    pub fn black_darts(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.black.len()).filter(|&d| self.black[d])
    }
    pub fn relabel(&self, lab: &[usize]) -> Self {
        let mut black = vec![false; self.black.len()];
        for (d, &b) in self.black.iter().enumerate() {
            black[lab[d]] = b;
        }
        FaceColoring { black }
    }
    /// Degrees of the white faces, sorted.
    pub fn white_degrees(&self, map: &CombinatorialMap) -> Vec<usize> {
        let mut v: Vec<usize> = map.faces().into_iter().filter(|c| !self.black[c[0]]).map(|c| c.len()).collect();
        v.sort_unstable();
        v
    }
    pub fn black_degrees(&self, map: &CombinatorialMap) -> Vec<usize> {
        let mut v: Vec<usize> = map.faces().into_iter().filter(|c| self.black[c[0]]).map(|c| c.len()).collect();
        v.sort_unstable();
        v
    }
}

/// The proper face 2-colouring with a black face right of the root, if the dual is bipartite.
pub fn bicolor(map: &CombinatorialMap) -> Option<FaceColoring> {
    let n = map.n_darts();
    let fid = map.face_ids();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    let faces = map.faces();
    let mut by_id = vec![UNSET; n];
    for (i, c) in faces.iter().enumerate() {
        by_id[c[0]] = i;
    }
    let start = fid[map.root()];
    colour[start] = Some(true);
    let mut stack = vec![start];
    while let Some(f) = stack.pop() {
        let c = colour[f].unwrap();
        for &d in &faces[by_id[f]] {
            let g = fid[map.alpha(d)];
            match colour[g] {
                None => {
                    colour[g] = Some(!c);
                    stack.push(g);
                }
                Some(cg) if cg == c => return None,
                _ => {}
            }
        }
    }
    Some(FaceColoring { black: (0..n).map(|d| colour[fid[d]].unwrap()).collect() })
}

/// Black faces of degree `m`, white faces of degree `m·k` with `k ∈ degrees`.
pub fn is_m_hypermap(map: &CombinatorialMap, col: &FaceColoring, m: usize, degrees: &[usize]) -> bool {
    map.faces().iter().all(|c| {
        let deg = c.len();
        if col.is_black(c[0]) {
            deg == m
        } else {
            deg % m == 0 && degrees.contains(&(deg / m))
        }
    })
}

/// Whether vertices admit labels in Z/m increasing by one along every edge
/// oriented with its black face on the right. The root origin is labelled 1.
pub fn is_m_constellation(map: &CombinatorialMap, col: &FaceColoring, m: usize) -> bool {
    constellation_labels(map, col, m).is_some()
}

/// The Z/m vertex labelling (indexed by vertex id) witnessing the constellation property.
pub fn constellation_labels(map: &CombinatorialMap, col: &FaceColoring, m: usize) -> Option<Vec<Option<usize>>> {
    let n = map.n_darts();
    let vid = map.vertex_ids();
    let mut lab: Vec<Option<usize>> = vec![None; n];
    lab[vid[map.root()]] = Some(1 % m);
    // darts grouped by vertex so propagation only revisits neighbours
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for d in 0..n {
        at[vid[d]].push(d);
    }
    let mut stack = vec![vid[map.root()]];
    while let Some(v) = stack.pop() {
        let l = lab[v].unwrap();
        for &d in &at[v] {
            let w = vid[map.alpha(d)];
            let want = if col.is_black(d) { (l + 1) % m } else { (l + m - 1) % m };
            match lab[w] {
                None => {
                    lab[w] = Some(want);
                    stack.push(w);
                }
                Some(x) if x != want => return None,
                _ => {}
            }
        }
    }
    Some(lab)
}

/// Collapse every black 2-gon of a 2-hypermap to an edge, giving the underlying even map.
/// Darts of the result are the black darts of the input, renumbered in increasing order.
pub fn contract_black_faces(map: &CombinatorialMap, col: &FaceColoring) -> Result<CombinatorialMap> {
    let n = map.n_darts();
    for c in map.faces() {
        if col.is_black(c[0]) && c.len() != 2 {
            return Err(Error::Precondition(format!("black face of degree {} (expected 2)", c.len())));
        }
    }
    if !col.is_black(map.root()) {
        return Err(Error::Precondition("root dart must have a black face on its right".into()));
    }
    let mut new_of = vec![UNSET; n];
    let black: Vec<usize> = col.black_darts().collect();
    for (i, &b) in black.iter().enumerate() {
        new_of[b] = i;
    }
    let sigma = black.iter().map(|&b| new_of[map.sigma(map.sigma(b))]).collect();
    let alpha = black.iter().map(|&b| new_of[map.phi(b)]).collect();
    let even = CombinatorialMap::new(sigma, alpha, new_of[map.root()])?;
    let pointed = map.pointed().map(|p| if col.is_black(p) { new_of[p] } else { new_of[map.sigma(p)] });
    even.with_pointed(pointed)
}

/// Inverse of [`contract_black_faces`]: thicken each edge into a black 2-gon.
/// Dart `d` of the even map becomes black dart `2d` and white dart `2d+1`.
pub fn double_edges(map: &CombinatorialMap) -> (CombinatorialMap, FaceColoring) {
    let n = map.n_darts();
    let sinv = inverse(map.sigma_perm());
    let mut sigma = vec![0; 2 * n];
    let mut alpha = vec![0; 2 * n];
    for d in 0..n {
        sigma[2 * d] = 2 * d + 1;
        sigma[2 * d + 1] = 2 * map.sigma(d);
        let w = 2 * sinv[map.alpha(d)] + 1;
        alpha[2 * d] = w;
        alpha[w] = 2 * d;
    }
    let hyper = CombinatorialMap::new(sigma, alpha, 2 * map.root())
        .and_then(|h| h.with_pointed(map.pointed().map(|p| 2 * p)))
        .expect("doubling a valid map yields a valid map");
    let col = FaceColoring { black: (0..2 * n).map(|d| d % 2 == 0).collect() };
    (hyper, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(sigma: &[usize], alpha: &[usize], root: usize) -> CombinatorialMap {
        CombinatorialMap::new(sigma.iter().map(|x| x - 1).collect(), alpha.iter().map(|x| x - 1).collect(), root - 1)
            .unwrap()
    }

    #[test]
    fn segment_and_loop() {
        let seg = one_based(&[1, 2], &[2, 1], 1);
        assert_eq!(seg.faces().len(), 1);
        assert_eq!(seg.faces()[0].len(), 2);
        assert_eq!(seg.genus(), 0);
        let lp = one_based(&[2, 1], &[2, 1], 1);
        assert_eq!(lp.faces().iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 1]);
        assert_eq!(lp.genus(), 0);
        assert!(bicolor(&lp).is_some());
        assert_ne!(seg.canonical_form(), lp.canonical_form());
    }

    #[test]
    fn interleaved_loops_on_torus() {
        let m = one_based(&[3, 4, 2, 1], &[2, 1, 4, 3], 1);
        assert_eq!(m.faces(), vec![vec![0, 3, 1, 2]]);
        assert_eq!(m.genus(), 1);
        let (h, col) = double_edges(&m);
        assert_eq!(h.genus(), 1);
        assert_eq!(contract_black_faces(&h, &col).unwrap().canonical_form(), m.canonical_form());
    }

    #[test]
    fn triangle_colours_but_segment_does_not() {
        // three vertices of degree 2: the inner and outer faces share every edge,
        // so the dual is a triple edge between two vertices and is bipartite
        let tri = CombinatorialMap::new(vec![1, 0, 3, 2, 5, 4], vec![2, 5, 0, 4, 3, 1], 0).unwrap();
        assert_eq!(tri.n_faces(), 2);
        let col = bicolor(&tri).unwrap();
        assert!(col.is_black(0) && !col.is_black(1));
        let seg = one_based(&[1, 2], &[2, 1], 1);
        assert!(bicolor(&seg).is_none());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CombinatorialMap::new(vec![], vec![], 0).is_err());
        assert!(CombinatorialMap::new(vec![0, 1], vec![0, 1], 0).is_err());
        assert!(CombinatorialMap::new(vec![0, 1, 2, 3], vec![1, 0, 3, 2], 0).is_err());
        assert!(CombinatorialMap::new(vec![0, 0], vec![1, 0], 0).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let m = one_based(&[3, 4, 2, 1], &[2, 1, 4, 3], 2).with_pointed(Some(2)).unwrap();
        let t = m.to_text();
        assert_eq!(t, "darts 4\nsigma 3 4 2 1\nalpha 2 1 4 3\nroot 2\npointed 1\n");
        assert_eq!(t.parse::<CombinatorialMap>().unwrap(), m);
        assert!("darts 2\nsigma 1 2\nalpha 2 1\nroot 3\n".parse::<CombinatorialMap>().is_err());
    }

    #[test]
    fn doubled_maps_are_two_hypermaps() {
        let torus = one_based(&[3, 4, 2, 1], &[2, 1, 4, 3], 1);
        let (h, col) = double_edges(&torus);
        assert_eq!(bicolor(&h).unwrap(), col);
        assert_eq!(col.black_degrees(&h), vec![2, 2]);
        assert_eq!(col.white_degrees(&h), vec![4]);
        assert!(is_m_hypermap(&h, &col, 2, &[2]));
        assert!(!is_m_hypermap(&h, &col, 2, &[3]));
        // two loops at a single vertex: not bipartite
        assert!(!is_m_constellation(&h, &col, 2));

        let seg = one_based(&[1, 2], &[2, 1], 1);
        let (h, col) = double_edges(&seg);
        assert!(is_m_hypermap(&h, &col, 2, &[1]));
        assert!(is_m_constellation(&h, &col, 2));
        let lp = one_based(&[2, 1], &[2, 1], 1);
        let (h, col) = double_edges(&lp);
        assert!(!is_m_hypermap(&h, &col, 2, &[1]));
        assert_eq!(contract_black_faces(&h, &col).unwrap().canonical_form(), lp.canonical_form());
    }
}
