//! Schemes: rooted one-face maps with all degrees at least 3, which index the
//! finitely many "shapes" of a genus-g mobile once trees and degree-2 paths
//! are stripped away. Also typings (cycle space over Z/mZ), vertex types and
//! the dominant pairs that carry the leading asymptotic constant.

mod full;

pub use full::{decompose, decompose_all, reconstruct, Chain, Decomposition, FullScheme, Node, Star, StarItem};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapcore::CombinatorialMap;
use crate::oracle::one_face_maps_bounded;

/// A scheme in canonical form. Edge `i` is the `i`-th edge by smallest dart and is
/// oriented away from the vertex of that dart; vertex `j` is the `j`-th vertex by
/// smallest dart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scheme {
    map: CombinatorialMap,
}

impl Scheme {
    /// Checks one face and minimum degree 3, and puts the map in canonical form.
    pub fn new(map: &CombinatorialMap) -> Result<Self> {
        if map.n_faces() != 1 {
            return Err(Error::Structural(format!("a scheme has one face, got {}", map.n_faces())));
        }
        if let Some(v) = map.vertices().iter().find(|v| v.len() < 3) {
            return Err(Error::Structural(format!("vertex of degree {} in a scheme", v.len())));
        }
        Ok(Scheme { map: map.canonical_form() })
    }

    pub fn map(&self) -> &CombinatorialMap {
        &self.map
    }

    pub fn genus(&self) -> usize {
        self.map.genus()
    }

    pub fn n_edges(&self) -> usize {
        self.map.n_edges()
    }

    pub fn n_vertices(&self) -> usize {
        self.map.n_vertices()
    }

    /// Smallest dart of each edge, in edge order.
    pub fn edge_darts(&self) -> Vec<usize> {
        (0..self.map.n_darts()).filter(|&d| d < self.map.alpha(d)).collect()
    }

    /// Edge index of every dart.
    pub fn edge_of_dart(&self) -> Vec<usize> {
        let mut out = vec![0; self.map.n_darts()];
        for (i, d) in self.edge_darts().into_iter().enumerate() {
            out[d] = i;
            out[self.map.alpha(d)] = i;
        }
        out
    }

    /// Vertex index of every dart.
    pub fn vertex_of_dart(&self) -> Vec<usize> {
        let ids = self.map.vertex_ids();
        let mut uniq = ids.clone();
        uniq.sort_unstable();
        uniq.dedup();
        ids.iter().map(|v| uniq.binary_search(v).unwrap()).collect()
    }

    /// `(tail, head)` vertex indices of every edge under its canonical orientation.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let vid = self.vertex_of_dart();
        self.edge_darts().into_iter().map(|d| (vid[d], vid[self.map.alpha(d)])).collect()
    }

    /// Degree → number of vertices of that degree.
    pub fn degree_profile(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for v in self.map.vertices() {
            *out.entry(v.len()).or_insert(0) += 1;
        }
        out
    }

    pub fn is_cubic(&self) -> bool {
        self.map.vertices().iter().all(|v| v.len() == 3)
    }
}

/// Degree profiles `{i: n_i}` with `Σ (i−2)/2 · n_i = 2g − 1`.
pub fn degree_profiles(g: usize) -> Vec<BTreeMap<usize, usize>> {
    if g == 0 {
        return Vec::new();
    }
    // Σ (i−2) n_i = 4g − 2 over degrees 3..=4g
    let target = 4 * g - 2;
    let mut out = Vec::new();
    fn go(deg: usize, left: usize, cur: &mut BTreeMap<usize, usize>, out: &mut Vec<BTreeMap<usize, usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if deg - 2 > left {
            return;
        }
        for k in (0..=left / (deg - 2)).rev() {
            if k > 0 {
                cur.insert(deg, k);
            }
            go(deg + 1, left - k * (deg - 2), cur, out);
            cur.remove(&deg);
        }
    }
    go(3, target, &mut BTreeMap::new(), &mut out);
    out
}

fn schemes_with_degrees(g: usize, max_degree: usize) -> Vec<Scheme> {
    if g == 0 {
        return Vec::new();
    }
    // E − V = 2g − 1 and 2E ≥ 3V give 2g ≤ E ≤ 6g − 3
    let sizes: Vec<usize> = (2 * g..=6 * g - 3).collect();
    let mut out: Vec<Scheme> = sizes
        .par_iter()
        .flat_map_iter(|&e| {
            let mut found = Vec::new();
            one_face_maps_bounded(e, 3, max_degree, |m| {
                if m.genus() == g {
                    found.push(Scheme { map: m.canonical_form() });
                }
            });
            found
        })
        .collect();
    out.sort();
    out
}

/// All schemes of genus `g`, sorted; empty for `g = 0`.
pub fn enumerate_schemes(g: usize) -> Vec<Scheme> {
    schemes_with_degrees(g, usize::MAX)
}

/// Schemes of genus `g` whose vertices all have degree 3 (`6g − 3` edges).
pub fn enumerate_cubic_schemes(g: usize) -> Vec<Scheme> {
    schemes_with_degrees(g, 3)
}

/// Net type `Σ_out τ − Σ_in τ` at each vertex, modulo `m`.
fn kirchhoff_defects(scheme: &Scheme, m: usize, tau: &[usize]) -> Vec<usize> {
    let mut net = vec![0usize; scheme.n_vertices()];
    for (i, &(tail, head)) in scheme.edges().iter().enumerate() {
        net[tail] = (net[tail] + tau[i]) % m;
        net[head] = (net[head] + m - tau[i] % m) % m;
    }
    net
}

/// Whether `tau` (one value in `0..m` per edge) satisfies the Kirchhoff law.
pub fn is_typing(scheme: &Scheme, m: usize, tau: &[usize]) -> bool {
    tau.len() == scheme.n_edges()
        && tau.iter().all(|&t| t < m)
        && kirchhoff_defects(scheme, m, tau).iter().all(|&x| x == 0)
}

/// All typings, built from the cycle space: the edges outside a spanning tree take
/// arbitrary values and the tree edges are then forced, peeling leaves.
pub fn enumerate_typings(scheme: &Scheme, m: usize) -> Vec<Vec<usize>> {
    let edges = scheme.edges();
    let nv = scheme.n_vertices();
    // spanning tree by breadth-first search from vertex 0
    let mut seen = vec![false; nv];
    let mut in_tree = vec![false; edges.len()];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for (i, &(a, b)) in edges.iter().enumerate() {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                in_tree[i] = true;
                queue.push_back(w);
            }
        }
    }
    let free: Vec<usize> = (0..edges.len()).filter(|&i| !in_tree[i]).collect();
    let mut out = Vec::new();
    let mut values = vec![0usize; free.len()];
    loop {
        let mut tau = vec![None; edges.len()];
        for (k, &i) in free.iter().enumerate() {
            tau[i] = Some(values[k]);
        }
        // a vertex with exactly one undetermined edge fixes it
        loop {
            let mut progress = false;
            for v in 0..nv {
                let mut net = 0i64;
                let mut unknown = None;
                let mut count = 0;
                for (i, &(a, b)) in edges.iter().enumerate() {
                    if a != v && b != v {
                        continue;
                    }
                    match tau[i] {
                        Some(t) => {
                            if a == v {
                                net += t as i64;
                            }
                            if b == v {
                                net -= t as i64;
                            }
                        }
                        None => {
                            unknown = Some(i);
                            count += 1;
                        }
                    }
                }
                if count == 1 {
                    let i = unknown.unwrap();
                    // solve net ± t ≡ 0; tree edges are never loops
                    let t = if edges[i].0 == v { (-net).rem_euclid(m as i64) } else { net.rem_euclid(m as i64) };
                    tau[i] = Some(t as usize);
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        let tau: Vec<usize> = tau.into_iter().map(|t| t.expect("spanning tree edges are forced")).collect();
        debug_assert!(is_typing(scheme, m, &tau));
        out.push(tau);
        let mut k = 0;
        while k < values.len() {
            values[k] += 1;
            if values[k] < m {
                break;
            }
            values[k] = 0;
            k += 1;
        }
        if k == values.len() {
            break;
        }
    }
    out.sort();
    out
}

/// All `m^{|E|}` assignments filtered by the Kirchhoff law; for cross-checks.
pub fn brute_force_typings(scheme: &Scheme, m: usize) -> Vec<Vec<usize>> {
    let k = scheme.n_edges();
    let mut out = Vec::new();
    let mut tau = vec![0usize; k];
    loop {
        if is_typing(scheme, m, &tau) {
            out.push(tau.clone());
        }
        let mut j = 0;
        while j < k {
            tau[j] += 1;
            if tau[j] < m {
                break;
            }
            tau[j] = 0;
            j += 1;
        }
        if j == k {
            break;
        }
    }
    out
}

/// The core of a one-face map and its paths between nodes.
#[derive(Clone, Debug)]
pub(crate) struct Core {
    /// Darts of the input whose edge survives leaf pruning.
    pub alive: Vec<bool>,
    /// Scheme darts = first input dart of each oriented path, in scheme dart order.
    pub starts: Vec<usize>,
    /// Input darts along each oriented path.
    pub paths: Vec<Vec<usize>>,
    pub sigma: Vec<usize>,
    pub alpha: Vec<usize>,
    /// Scheme dart carrying the transferred root.
    pub root: usize,
}

impl Core {
    pub fn of(map: &CombinatorialMap) -> Result<Core> {
        if map.n_faces() != 1 {
            return Err(Error::Precondition("the scheme is defined for one-face maps".into()));
        }
        if map.genus() == 0 {
            return Err(Error::Precondition("a plane tree has an empty core".into()));
        }
        let n = map.n_darts();
        let vid = map.vertex_ids();
        let mut deg = vec![0usize; n];
        for d in 0..n {
            deg[vid[d]] += 1;
        }
        let mut alive = vec![true; n];
        // parent[d] for a pruned dart d leaving a leaf: dart at the parent towards it
        let mut toward = vec![usize::MAX; n];
        let mut stack: Vec<usize> = (0..n).filter(|&d| vid[d] == d && deg[d] == 1).collect();
        while let Some(v) = stack.pop() {
            if deg[v] != 1 {
                continue;
            }
            let d = (0..n).find(|&d| vid[d] == v && alive[d]).expect("leaf has an edge");
            let a = map.alpha(d);
            alive[d] = false;
            alive[a] = false;
            deg[v] = 0;
            toward[a] = d;
            let w = vid[a];
            deg[w] -= 1;
            if deg[w] == 1 {
                stack.push(w);
            }
        }
        let next_alive = |mut d: usize| loop {
            d = map.sigma(d);
            if alive[d] {
                return d;
            }
        };
        let is_node = |d: usize| deg[vid[d]] >= 3;
        let starts: Vec<usize> = (0..n).filter(|&d| alive[d] && is_node(d)).collect();
        let mut index = vec![usize::MAX; n];
        for (i, &d) in starts.iter().enumerate() {
            index[d] = i;
        }
        let mut paths = Vec::with_capacity(starts.len());
        let mut path_of = vec![(usize::MAX, usize::MAX); n];
        for (i, &d) in starts.iter().enumerate() {
            let mut p = vec![d];
            let mut x = d;
            while !is_node(map.alpha(x)) {
                x = next_alive(map.alpha(x));
                p.push(x);
            }
            for (k, &y) in p.iter().enumerate() {
                path_of[y] = (i, k);
            }
            paths.push(p);
        }
        let sigma: Vec<usize> = starts.iter().map(|&d| index[next_alive(d)]).collect();
        let alpha: Vec<usize> = paths.iter().map(|p| index[map.alpha(*p.last().unwrap())]).collect();
        // root transfer: a pruned root moves to the first core edge clockwise after its subtree
        let in_core: Vec<bool> = {
            let mut c = vec![false; n];
            for d in (0..n).filter(|&d| alive[d]) {
                c[vid[d]] = true;
            }
            c
        };
        let mut r = map.root();
        if !alive[r] {
            // x points down into the subtree, from the vertex it hangs at
            let mut x = if toward[r] != usize::MAX { r } else { map.alpha(r) };
            while !in_core[vid[x]] {
                let up = (0..n)
                    .find(|&u| vid[u] == vid[x] && !alive[u] && toward[u] == usize::MAX)
                    .expect("a pruned vertex has one edge towards the core");
                x = map.alpha(up);
            }
            r = x;
            loop {
                r = sigma_inv(map, r);
                if alive[r] {
                    break;
                }
            }
        }
        let (i, _) = path_of[r];
        Ok(Core { alive, starts, paths, sigma, alpha, root: i })
    }

    pub fn scheme_map(&self, root: usize) -> CombinatorialMap {
        CombinatorialMap::new(self.sigma.clone(), self.alpha.clone(), root).expect("core of a one-face map")
    }
}

fn sigma_inv(map: &CombinatorialMap, d: usize) -> usize {
    let mut x = d;
    loop {
        let y = map.sigma(x);
        if y == d {
            return x;
        }
        x = y;
    }
}

/// The scheme of a one-face map of positive genus, with the root transferred from
/// a pruned subtree to the first core edge met clockwise after it.
pub fn scheme_of(map: &CombinatorialMap) -> Result<Scheme> {
    let core = Core::of(map)?;
    Scheme::new(&core.scheme_map(core.root))
}

/// Node types of a typed cubic scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VertexType {
    /// No special edge.
    One,
    /// Two special half-edges, adjusted types summing to `m`.
    Two,
    /// Three special half-edges summing to `m`.
    ThreeOne,
    /// Three special half-edges summing to `2m`.
    ThreeTwo,
}

/// Adjusted types per vertex: `τ` on incoming half-edges, `m − τ` on outgoing ones,
/// for special edges only.
fn adjusted_types(scheme: &Scheme, m: usize, tau: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); scheme.n_vertices()];
    for (i, &(tail, head)) in scheme.edges().iter().enumerate() {
        if tau[i] != 0 {
            out[tail].push(m - tau[i]);
            out[head].push(tau[i]);
        }
    }
    out
}

pub fn classify_vertices(scheme: &Scheme, m: usize, tau: &[usize]) -> Result<Vec<VertexType>> {
    if !scheme.is_cubic() {
        return Err(Error::Precondition("vertex types are defined on cubic schemes".into()));
    }
    if !is_typing(scheme, m, tau) {
        return Err(Error::Precondition("not a typing".into()));
    }
    adjusted_types(scheme, m, tau)
        .into_iter()
        .map(|t| {
            let s: usize = t.iter().sum();
            match (t.len(), s / m) {
                (0, _) => Ok(VertexType::One),
                (2, 1) => Ok(VertexType::Two),
                (3, 1) => Ok(VertexType::ThreeOne),
                (3, 2) => Ok(VertexType::ThreeTwo),
                _ => Err(Error::Structural(format!("adjusted types {t:?} fit no vertex type"))),
            }
        })
        .collect()
}

/// Number of special edges of a typing.
pub fn special_edges(tau: &[usize]) -> usize {
    tau.iter().filter(|&&t| t != 0).count()
}

/// A cubic scheme with a bijective vertex labelling `lambda` and its constant
/// `c = 1 / ∏_j #{edges e : λ(e₋) < j ≤ λ(e₊)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominantPair {
    pub scheme: usize,
    pub lambda: Vec<usize>,
    pub c: BigRational,
}

/// `1 / ∏_{j=1}^{M} Σ_e A_{e,j}` where `A_{e,j} = 1` iff the labels of the ends of `e`
/// straddle `j` (`min < j ≤ max`).
pub fn scheme_constant(scheme: &Scheme, lambda: &[usize]) -> BigRational {
    let big_m = lambda.iter().copied().max().unwrap_or(0);
    let mut den = BigInt::one();
    for j in 1..=big_m {
        let a = scheme
            .edges()
            .iter()
            .filter(|&&(u, v)| {
                let (lo, hi) = (lambda[u].min(lambda[v]), lambda[u].max(lambda[v]));
                lo < j && j <= hi
            })
            .count();
        den *= BigInt::from(a);
    }
    if den.is_zero() {
        // an unreachable level cannot occur for a connected scheme
        return BigRational::zero();
    }
    BigRational::new(BigInt::one(), den)
}

/// Lexicographic successor of a permutation; false at the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All dominant pairs of genus `g` (cubic schemes × vertex orders) and their constants.
pub fn dominant_pairs(g: usize) -> Result<(Vec<Scheme>, Vec<DominantPair>)> {
    if g == 0 {
        return Err(Error::Precondition("dominant pairs need g ≥ 1".into()));
    }
    if g > 2 {
        return Err(Error::Resource(format!("dominant pairs are capped at genus 2, got {g}")));
    }
    let schemes = enumerate_cubic_schemes(g);
    let pairs = schemes
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, s)| {
            let mut lambda: Vec<usize> = (0..s.n_vertices()).collect();
            let mut out = Vec::new();
            loop {
                out.push(DominantPair { scheme: k, lambda: lambda.clone(), c: scheme_constant(s, &lambda) });
                if !next_permutation(&mut lambda) {
                    break;
                }
            }
            out
        })
        .collect();
    Ok((schemes, pairs))
}

/// `S_g = Σ c_{s,λ}` over the dominant pairs of genus `g`.
pub fn dominant_sum(g: usize) -> Result<BigRational> {
    let (_, pairs) = dominant_pairs(g)?;
    Ok(pairs.into_iter().fold(BigRational::zero(), |acc, p| acc + p.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::one_face_maps;

    fn theta() -> Scheme {
        enumerate_cubic_schemes(1).into_iter().next().unwrap()
    }

    #[test]
    fn genus_one_profiles() {
        let p = degree_profiles(1);
        assert_eq!(p.len(), 2);
        assert!(p.contains(&BTreeMap::from([(3, 2)])));
        assert!(p.contains(&BTreeMap::from([(4, 1)])));
        assert!(degree_profiles(0).is_empty());
    }

    #[test]
    fn schemes_match_filtered_one_face_maps() {
        for g in 1..=1 {
            let schemes = enumerate_schemes(g);
            let mut filtered = Vec::new();
            for e in 1..=6 * g {
                one_face_maps(e, 1, |m| {
                    if m.genus() == g && m.vertices().iter().all(|v| v.len() >= 3) {
                        filtered.push(m.canonical_form());
                    }
                });
            }
            filtered.sort();
            assert_eq!(schemes.iter().map(|s| s.map().clone()).collect::<Vec<_>>(), filtered);
            for s in &schemes {
                assert_eq!(s.map().n_faces(), 1);
                let lhs: usize = s.degree_profile().iter().map(|(i, n)| (i - 2) * n).sum();
                assert_eq!(lhs, 2 * (2 * g - 1));
            }
        }
        assert_eq!(enumerate_schemes(1).len(), 2);
        assert!(enumerate_schemes(0).is_empty());
    }

    #[test]
    fn typings_form_the_cycle_space() {
        for s in enumerate_schemes(1) {
            for m in 2..=4 {
                let t = enumerate_typings(&s, m);
                assert_eq!(t.len(), m * m);
                let mut brute = brute_force_typings(&s, m);
                brute.sort();
                assert_eq!(t, brute);
                assert!(t.contains(&vec![0; s.n_edges()]));
            }
        }
    }

    #[test]
    fn theta_constant_is_a_third() {
        let s = theta();
        assert_eq!(s.n_edges(), 3);
        assert_eq!(s.n_vertices(), 2);
        assert_eq!(scheme_constant(&s, &[0, 1]), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn genus_one_dominant_sum() {
        let (schemes, pairs) = dominant_pairs(1).unwrap();
        assert_eq!(schemes.len(), 1);
        assert_eq!(pairs.len(), 2);
        assert_eq!(dominant_sum(1).unwrap(), BigRational::new(2.into(), 3.into()));
    }

    #[test]
    fn vertex_type_balance() {
        for g in 1..=2 {
            for s in enumerate_cubic_schemes(g) {
                for m in 2..=3 {
                    for tau in enumerate_typings(&s, m) {
                        let types = classify_vertices(&s, m, &tau).unwrap();
                        let count = |t| types.iter().filter(|&&x| x == t).count();
                        let (v2, v31, v32) =
                            (count(VertexType::Two), count(VertexType::ThreeOne), count(VertexType::ThreeTwo));
                        assert_eq!(v31, v32);
                        assert_eq!(2 * special_edges(&tau), 3 * v31 + 3 * v32 + 2 * v2);
                    }
                }
            }
        }
    }

    #[test]
    fn a_scheme_is_its_own_scheme() {
        for s in enumerate_schemes(1) {
            for r in 0..s.map().n_darts() {
                let rooted = s.map().rerooted(r);
                assert_eq!(scheme_of(&rooted).unwrap().map(), &rooted.canonical_form());
            }
        }
    }

    #[test]
    fn hand_built_one_tree() {
        // figure-eight on the torus, one loop subdivided at w, a pendant edge at v
        // (darts 4/5) and one at w (darts 8/9) carrying the root
        let sigma = vec![4, 0, 1, 2, 3, 5, 8, 6, 7, 9];
        let alpha = vec![2, 6, 0, 7, 5, 4, 1, 3, 9, 8];
        let tree = CombinatorialMap::new(sigma, alpha, 9).unwrap();
        assert_eq!((tree.n_faces(), tree.genus()), (1, 1));
        // the root moves clockwise from the pendant at w onto dart 6, i.e. onto the
        // loop leaving the node by dart 3
        let eight = CombinatorialMap::new(vec![3, 0, 1, 2], vec![2, 3, 0, 1], 3).unwrap();
        assert_eq!(scheme_of(&tree).unwrap().map(), &eight.canonical_form());
        // rooted on the pendant at v: first core dart clockwise after dart 4 is 0
        let at_v = tree.rerooted(5);
        assert_eq!(scheme_of(&at_v).unwrap().map(), &eight.rerooted(0).canonical_form());
        // genus-1 schemes have a single rooting up to isomorphism, so check the dart itself
        let core = Core::of(&tree).unwrap();
        assert_eq!(core.paths[core.root], vec![3, 6]);
        let core = Core::of(&at_v).unwrap();
        assert_eq!(core.paths[core.root], vec![0]);
        assert!(scheme_of(&CombinatorialMap::new(vec![0, 1], vec![1, 0], 0).unwrap()).is_err());
    }
}
