//! Cutting a mobile of positive genus along its scheme, and gluing it back.
//!
//! Every edge of a mobile has an unlabelled end, so a mobile is a family of
//! elementary stars (one per unlabelled vertex) glued along split-edges and at
//! labelled vertices. A [`Decomposition`] stores those stars grouped the way the
//! reconstruction consumes them: nodal stars at the scheme vertices, a superchain
//! per scheme edge, and planar branches hung in the corners of labelled vertices.
//! [`reconstruct`] rebuilds the mobile from that data alone.

use std::collections::BTreeMap;

use crate::bijection::{Mobile, VertexKind};
use crate::error::{Error, Result};
use crate::mapcore::CombinatorialMap;

use super::{is_typing, Core, Scheme};

/// One dart leaving the centre of a star, read clockwise. Labels are relative to
/// the star's first item.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarItem {
    /// Label on the left of the dart: the labelled vertex itself for a plain edge.
    pub left: i64,
    /// Right flag of a split-edge; `None` for a plain edge.
    pub right: Option<i64>,
    /// Branches hung in the corner of a non-port labelled vertex, clockwise.
    pub hang: Vec<Star>,
    /// Whether this dart is the root of the mobile.
    pub root: bool,
}

/// An elementary star. Item 0 is the star's entry: the canonical element of a
/// nodal star, the in-port of a chain star, the parent edge of a branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Star {
    pub black: bool,
    pub items: Vec<StarItem>,
}

impl Star {
    /// The same star with hangs and root marks removed.
    pub fn bare(&self) -> Star {
        Star {
            black: self.black,
            items: self
                .items
                .iter()
                .map(|it| StarItem { left: it.left, right: it.right, hang: Vec::new(), root: false })
                .collect(),
        }
    }

    /// Value handed to the next star glued at item `i`: the shared labelled
    /// vertex, or the right flag of a split-edge.
    fn handoff(&self, i: usize) -> i64 {
        self.items[i].right.unwrap_or(self.items[i].left)
    }
}

/// The superchain substituted for one scheme edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    /// Chain type: 0, or the type of the split-edge entering its first white star.
    pub tau: usize,
    /// Leading black star (type ≠ 0 only), with the index of its out item.
    pub a1: Option<(Star, usize)>,
    /// Trailing white star (type ≠ 0 only), with the index of its out item.
    pub a2: Option<(Star, usize)>,
    /// Stars of the cells in order, each with the index of its out item.
    pub cells: Vec<(Star, usize)>,
    /// Type 0: branches in the two corners of each labelled vertex joining two
    /// consecutive stars (after the incoming edge, after the outgoing edge).
    pub joints: Vec<[Vec<Star>; 2]>,
}

impl Chain {
    /// Increment of the cells: the label handed on at the end minus the one received.
    pub fn increment(&self) -> i64 {
        self.cells.iter().map(|(s, o)| s.handoff(*o)).sum()
    }
}

/// What sits at a scheme vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// A labelled vertex; branches in the corner after each scheme dart, clockwise.
    Labelled { hangs: BTreeMap<usize, Vec<Star>> },
    /// An unlabelled vertex with its star; `ports` maps scheme darts to items.
    Star { star: Star, ports: BTreeMap<usize, usize> },
}

/// A mobile cut along its scheme (rooted at a chosen oriented scheme edge).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub m: usize,
    pub scheme: Scheme,
    pub tau: Vec<usize>,
    pub nodes: Vec<Node>,
    pub chains: Vec<Chain>,
    /// Rank of each node's canonical label among the distinct canonical labels.
    pub lambda: Vec<usize>,
    /// Gaps between consecutive distinct canonical labels (all positive).
    pub delta: Vec<i64>,
}

/// The finite part of a decomposition: scheme, typing, nodal stars, correcting
/// stars and label order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FullScheme {
    pub scheme: Scheme,
    pub tau: Vec<usize>,
    pub nodal: Vec<Option<(Star, BTreeMap<usize, usize>)>>,
    pub a: Vec<(Option<(Star, usize)>, Option<(Star, usize)>)>,
    pub lambda: Vec<usize>,
}

impl FullScheme {
    /// Correction `a(e)` with `l(head) − l(tail) = a(e) + Δ(e)`, from the decorations only.
    pub fn corrections(&self) -> Vec<i64> {
        let darts = self.scheme.edge_darts();
        let alpha = |d| self.scheme.map().alpha(d);
        let port = |v: usize, d: usize| -> (i64, i64) {
            match &self.nodal[v] {
                None => (0, 0),
                Some((s, ports)) => {
                    let i = ports[&d];
                    (s.items[i].left, s.handoff(i))
                }
            }
        };
        let vid = self.scheme.vertex_of_dart();
        darts
            .iter()
            .enumerate()
            .map(|(e, &d)| {
                let (_, out) = port(vid[d], d);
                let (back, _) = port(vid[alpha(d)], alpha(d));
                let (a1, a2) = &self.a[e];
                out + a1.as_ref().map_or(0, |(s, o)| s.handoff(*o)) + a2.as_ref().map_or(0, |(s, o)| s.handoff(*o))
                    - back
            })
            .collect()
    }

    /// Truncation constant `K = max_e |a(e)| + 1`.
    pub fn truncation_constant(&self) -> i64 {
        self.corrections().iter().map(|a| a.abs()).max().unwrap_or(0) + 1
    }
}

impl Decomposition {
    pub fn full_scheme(&self) -> FullScheme {
        FullScheme {
            scheme: self.scheme.clone(),
            tau: self.tau.clone(),
            nodal: self
                .nodes
                .iter()
                .map(|n| match n {
                    Node::Labelled { .. } => None,
                    Node::Star { star, ports } => Some((star.bare(), ports.clone())),
                })
                .collect(),
            a: self
                .chains
                .iter()
                .map(|c| (c.a1.as_ref().map(|(s, o)| (s.bare(), *o)), c.a2.as_ref().map(|(s, o)| (s.bare(), *o))))
                .collect(),
            lambda: self.lambda.clone(),
        }
    }

    /// Canonical labels `l_v` with minimum 0.
    pub fn node_labels(&self) -> Vec<i64> {
        let prefix: Vec<i64> = std::iter::once(0)
            .chain(self.delta.iter().scan(0, |acc, d| {
                *acc += d;
                Some(*acc)
            }))
            .collect();
        self.lambda.iter().map(|&k| prefix[k]).collect()
    }
}

// ---------------------------------------------------------------- decomposition

struct Cutter<'a> {
    t: &'a Mobile,
    m: usize,
    alive: &'a [bool],
}

impl Cutter<'_> {
    fn sigma_inv(&self, d: usize) -> usize {
        let map = self.t.map();
        let mut x = d;
        loop {
            let y = map.sigma(x);
            if y == d {
                return x;
            }
            x = y;
        }
    }

    fn label_at(&self, d: usize) -> i64 {
        self.t.kind(d).label().expect("labelled end")
    }

    /// Darts of a vertex clockwise from `d`.
    fn clockwise(&self, d: usize) -> Vec<usize> {
        let mut out = vec![d];
        let mut x = self.sigma_inv(d);
        while x != d {
            out.push(x);
            x = self.sigma_inv(x);
        }
        out
    }

    /// Star centred at the vertex of `d` (unlabelled), item 0 = `d`. Items whose
    /// dart is in `ports` are left bare; the others must be plain edges to
    /// labelled vertices (whose corner is cut recursively) or non-special
    /// split-edges to univalent black vertices.
    fn star(&self, d: usize, ports: &[usize]) -> Result<Star> {
        let map = self.t.map();
        let black = matches!(self.t.kind(d), VertexKind::Black);
        let darts = self.clockwise(d);
        let base = if self.t.is_flagged(d) { self.t.flag_left(d).unwrap() } else { self.label_at(map.alpha(d)) };
        let mut items = Vec::with_capacity(darts.len());
        for &x in &darts {
            let a = map.alpha(x);
            let port = ports.contains(&x);
            let item = if self.t.is_flagged(x) {
                let (l, r) = (self.t.flag_left(x).unwrap(), self.t.flag_right(x).unwrap());
                if !port {
                    let ty = if black { l - r + 1 } else { r - l + 1 };
                    if ty != self.m as i64 || self.clockwise(a).len() != 1 {
                        return Err(Error::Structural("special split-edge outside the core paths".into()));
                    }
                }
                StarItem { left: l - base, right: Some(r - base), hang: Vec::new(), root: x == map.root() }
            } else {
                let hang = if port { Vec::new() } else { self.corner(a, None)? };
                StarItem { left: self.label_at(a) - base, right: None, hang, root: x == map.root() }
            };
            items.push(item);
        }
        Ok(Star { black, items })
    }

    /// Branches hung at a labelled vertex clockwise after `d`, up to `stop`
    /// (the whole vertex when `None`).
    fn corner(&self, d: usize, stop: Option<usize>) -> Result<Vec<Star>> {
        let map = self.t.map();
        let mut out = Vec::new();
        let mut x = self.sigma_inv(d);
        while x != d && Some(x) != stop {
            if self.alive[x] {
                return Err(Error::Structural("core edge inside a hung corner".into()));
            }
            out.push(self.star(map.alpha(x), &[map.alpha(x)])?);
            x = self.sigma_inv(x);
        }
        Ok(out)
    }

    /// Corner after `d` up to the next core dart.
    fn core_corner(&self, d: usize) -> Result<Vec<Star>> {
        let mut x = self.sigma_inv(d);
        while !self.alive[x] {
            x = self.sigma_inv(x);
        }
        self.corner(d, Some(x))
    }

    fn position(&self, star_start: usize, d: usize) -> usize {
        self.clockwise(star_start).iter().position(|&x| x == d).expect("dart of the star")
    }

    fn unlabelled(&self, d: usize) -> bool {
        !matches!(self.t.kind(d), VertexKind::Labelled(_))
    }

    /// Split type of a flagged dart, read from the white end.
    fn edge_type(&self, d: usize) -> i64 {
        let (l, r) = (self.t.flag_left(d).unwrap(), self.t.flag_right(d).unwrap());
        match self.t.kind(d) {
            VertexKind::White => r - l + 1,
            _ => l - r + 1,
        }
    }
}

/// Decompose `t` with its scheme rooted at core path `secondary` (an index into
/// the oriented paths of the core, see [`decompose_all`]).
fn decompose_core(t: &Mobile, m: usize, core: &Core, secondary: usize) -> Result<Decomposition> {
    let map = t.map();
    let core_map = core.scheme_map(secondary);
    let lab = core_map.canonical_labelling();
    let scheme = Scheme::new(&core_map)?;
    let k = core.starts.len();
    let mut path_of = vec![0; k]; // canonical scheme dart -> core path index
    for (i, &c) in lab.iter().enumerate() {
        path_of[c] = i;
    }
    let cut = Cutter { t, m, alive: &core.alive };
    let svid = scheme.vertex_of_dart();
    let nv = scheme.n_vertices();
    let sdarts_at = |v: usize| (0..k).filter(|&c| svid[c] == v).collect::<Vec<_>>();
    let start = |c: usize| core.paths[path_of[c]][0];

    // nodes and canonical labels
    let mut nodes = Vec::with_capacity(nv);
    let mut canon = Vec::with_capacity(nv);
    for v in 0..nv {
        let darts: Vec<usize> = sdarts_at(v);
        let d0 = start(darts[0]);
        if cut.unlabelled(d0) {
            let port_darts: Vec<usize> = darts.iter().map(|&c| start(c)).collect();
            let star = cut.star(d0, &port_darts)?;
            let ports = darts.iter().map(|&c| (c, cut.position(d0, start(c)))).collect();
            canon.push(if t.is_flagged(d0) { t.flag_left(d0).unwrap() } else { cut.label_at(map.alpha(d0)) });
            nodes.push(Node::Star { star, ports });
        } else {
            let mut hangs = BTreeMap::new();
            for &c in &darts {
                hangs.insert(c, cut.core_corner(start(c))?);
            }
            canon.push(cut.label_at(d0));
            nodes.push(Node::Labelled { hangs });
        }
    }
    let mut distinct = canon.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let lambda = canon.iter().map(|l| distinct.binary_search(l).unwrap()).collect();
    let delta = distinct.windows(2).map(|w| w[1] - w[0]).collect();

    // chains along the canonically oriented edges
    let mut chains = Vec::with_capacity(scheme.n_edges());
    let mut tau = Vec::with_capacity(scheme.n_edges());
    for c in scheme.edge_darts() {
        let path = &core.paths[path_of[c]];
        let ty = if !t.is_flagged(path[0]) {
            if path.iter().any(|&d| t.is_flagged(d)) {
                return Err(Error::Structural("a core path mixes plain and split edges".into()));
            }
            0
        } else {
            let first = cut.edge_type(path[0]);
            let tt = if matches!(t.kind(path[0]), VertexKind::White) { m as i64 - first } else { first };
            for &d in path {
                let expect = if matches!(t.kind(d), VertexKind::White) { m as i64 - tt } else { tt };
                if !t.is_flagged(d) || cut.edge_type(d) != expect {
                    return Err(Error::Structural("split-edge types alternate wrongly along a core path".into()));
                }
            }
            if tt <= 0 || tt >= m as i64 {
                return Err(Error::Structural("non-special split-edge on a core path".into()));
            }
            tt as usize
        };
        tau.push(ty);
        // interior vertices: entered by alpha(path[j]), left by path[j + 1]
        let mut units = Vec::new();
        let mut joints = Vec::new();
        for j in 0..path.len() - 1 {
            let inn = map.alpha(path[j]);
            let out = path[j + 1];
            if cut.unlabelled(inn) {
                let star = cut.star(inn, &[inn, out])?;
                units.push((star, cut.position(inn, out)));
            } else {
                joints.push([cut.corner(inn, Some(out))?, cut.corner(out, Some(inn))?]);
            }
        }
        // a joint also sits between the last star and an unlabelled head reached by a plain edge
        let (mut a1, mut a2) = (None, None);
        if ty != 0 {
            if units.first().is_some_and(|(s, _)| s.black) {
                a1 = Some(units.remove(0));
            }
            if units.last().is_some_and(|(s, _)| !s.black) {
                a2 = units.pop();
            }
        }
        chains.push(Chain { tau: ty, a1, a2, cells: units, joints });
    }
    if !is_typing(&scheme, m, &tau) {
        return Err(Error::Structural(format!("chain types {tau:?} break the Kirchhoff law")));
    }
    Ok(Decomposition { m, scheme, tau, nodes, chains, lambda, delta })
}

/// Decomposition of `t` with the scheme carrying its own (transferred) root.
pub fn decompose(t: &Mobile, m: usize) -> Result<Decomposition> {
    let core = Core::of(t.map())?;
    decompose_core(t, m, &core, core.root)
}

/// One decomposition per oriented scheme edge taken as the scheme's root: the
/// `2k` runs of the reconstruction that produce `t`.
pub fn decompose_all(t: &Mobile, m: usize) -> Result<Vec<Decomposition>> {
    let core = Core::of(t.map())?;
    (0..core.starts.len()).map(|r| decompose_core(t, m, &core, r)).collect()
}

// ---------------------------------------------------------------- reconstruction

#[derive(Default)]
struct Builder {
    /// Clockwise dart lists, one per vertex.
    rotations: Vec<Vec<usize>>,
    alpha: Vec<usize>,
    kind: Vec<VertexKind>,
    flag: Vec<Option<i64>>,
    root: Option<usize>,
}

/// Where the chain currently ends: a dangling star item, or a labelled node.
#[derive(Clone, Copy)]
enum End {
    Item { dart: usize, left: i64, right: Option<i64> },
    Node { label: i64 },
}

impl Builder {
    fn dart(&mut self, kind: VertexKind, flag: Option<i64>) -> usize {
        self.alpha.push(usize::MAX);
        self.kind.push(kind);
        self.flag.push(flag);
        self.alpha.len() - 1
    }

    fn pair(&mut self, a: usize, b: usize) {
        self.alpha[a] = b;
        self.alpha[b] = a;
    }

    /// Place a star with its labels shifted by `off`; returns the centre dart of
    /// each item. Non-port items are completed (labelled vertices with their
    /// branches, univalent black vertices).
    fn star(&mut self, s: &Star, off: i64, ports: &[usize]) -> Vec<usize> {
        let centre = if s.black { VertexKind::Black } else { VertexKind::White };
        let darts: Vec<usize> = s.items.iter().map(|it| self.dart(centre, it.right.map(|_| it.left + off))).collect();
        for (i, it) in s.items.iter().enumerate() {
            if it.root {
                self.root = Some(darts[i]);
            }
            if ports.contains(&i) {
                continue;
            }
            match it.right {
                Some(r) => {
                    let b = self.dart(VertexKind::Black, Some(r + off));
                    self.pair(darts[i], b);
                    self.rotations.push(vec![b]);
                }
                None => {
                    let label = it.left + off;
                    let l = self.dart(VertexKind::Labelled(label), None);
                    self.pair(darts[i], l);
                    let mut rot = vec![l];
                    rot.extend(self.branches(&it.hang, label));
                    self.rotations.push(rot);
                }
            }
        }
        self.rotations.push(darts.clone());
        darts
    }

    /// Branch stars hung at a labelled vertex of label `label`; returns the
    /// labelled-side darts in clockwise order.
    fn branches(&mut self, hang: &[Star], label: i64) -> Vec<usize> {
        hang.iter()
            .map(|b| {
                let darts = self.star(b, label, &[0]);
                let l = self.dart(VertexKind::Labelled(label), None);
                self.pair(darts[0], l);
                l
            })
            .collect()
    }

    /// Glue the dangling `end` to item 0 of a star to be placed; returns the offset
    /// for that star and, for a labelled end, the labelled label.
    fn offset_for(end: End) -> i64 {
        match end {
            End::Item { left, right, .. } => right.unwrap_or(left),
            End::Node { label, .. } => label,
        }
    }
}

/// Rebuild the mobile described by a decomposition.
pub fn reconstruct(dec: &Decomposition) -> Result<Mobile> {
    let s = &dec.scheme;
    let smap = s.map();
    let k = smap.n_darts();
    let svid = s.vertex_of_dart();
    let labels = dec.node_labels();
    let mut b = Builder::default();
    // labelled-node slots: scheme dart -> labelled-side dart of its first edge
    let mut node_dart: Vec<Option<usize>> = vec![None; k];
    let mut port_end: Vec<Option<End>> = vec![None; k];
    for (v, node) in dec.nodes.iter().enumerate() {
        match node {
            Node::Labelled { .. } => {
                for c in (0..k).filter(|&c| svid[c] == v) {
                    port_end[c] = Some(End::Node { label: labels[v] });
                }
            }
            Node::Star { star, ports } => {
                let items: Vec<usize> = ports.values().copied().collect();
                let darts = b.star(star, labels[v], &items);
                for (&c, &i) in ports {
                    let it = &star.items[i];
                    port_end[c] = Some(End::Item {
                        dart: darts[i],
                        left: it.left + labels[v],
                        right: it.right.map(|r| r + labels[v]),
                    });
                }
            }
        }
    }
    let mismatch = |e: usize| Error::Structural(format!("superchain of edge {e} does not meet its head"));
    for (e, c) in s.edge_darts().into_iter().enumerate() {
        let chain = &dec.chains[e];
        let mut end = port_end[c].expect("every scheme dart has a port");
        let mut joints = chain.joints.iter();
        let units = chain.a1.iter().chain(chain.cells.iter()).chain(chain.a2.iter());
        let mut glue = |b: &mut Builder,
                        end: End,
                        node_dart: &mut Vec<Option<usize>>,
                        next: usize,
                        next_left: i64,
                        next_right: Option<i64>|
         -> Result<()> {
            match end {
                End::Node { label, .. } => {
                    if next_right.is_some() || next_left != label {
                        return Err(mismatch(e));
                    }
                    let l = b.dart(VertexKind::Labelled(label), None);
                    b.pair(next, l);
                    // only the tail can still be a bare labelled node
                    node_dart[c] = Some(l);
                }
                End::Item { dart, left, right: None } => {
                    if next_right.is_some() || next_left != left {
                        return Err(mismatch(e));
                    }
                    // a labelled vertex joining two stars, with its two corners
                    let [after_in, after_out] = joints.next().ok_or_else(|| mismatch(e))?;
                    let li = b.dart(VertexKind::Labelled(left), None);
                    let lo = b.dart(VertexKind::Labelled(left), None);
                    b.pair(dart, li);
                    b.pair(next, lo);
                    let mut rot = vec![li];
                    rot.extend(b.branches(after_in, left));
                    rot.push(lo);
                    rot.extend(b.branches(after_out, left));
                    b.rotations.push(rot);
                }
                End::Item { dart, left, right: Some(r) } => {
                    if next_right != Some(left) || next_left != r {
                        return Err(mismatch(e));
                    }
                    b.pair(dart, next);
                }
            }
            Ok(())
        };
        for (star, out) in units {
            let off = Builder::offset_for(end);
            let darts = b.star(star, off, &[0, *out]);
            let first = &star.items[0];
            glue(&mut b, end, &mut node_dart, darts[0], first.left + off, first.right.map(|r| r + off))?;
            let o = &star.items[*out];
            end = End::Item { dart: darts[*out], left: o.left + off, right: o.right.map(|r| r + off) };
        }
        // meet the head
        let h = smap.alpha(c);
        match (port_end[h].expect("port"), end) {
            (End::Item { dart, left, right }, _) => {
                glue(&mut b, end, &mut node_dart, dart, left, right)?;
            }
            (End::Node { label, .. }, End::Item { dart, left, right: None }) => {
                if left != label {
                    return Err(mismatch(e));
                }
                let l = b.dart(VertexKind::Labelled(label), None);
                b.pair(dart, l);
                node_dart[h] = Some(l);
            }
            _ => return Err(mismatch(e)),
        }
        if joints.next().is_some() {
            return Err(mismatch(e));
        }
    }
    // labelled nodes: scheme darts clockwise, each followed by its corner
    for (v, node) in dec.nodes.iter().enumerate() {
        if let Node::Labelled { hangs } = node {
            let first = (0..k).find(|&c| svid[c] == v).unwrap();
            let inv = crate::mapcore::inverse(smap.sigma_perm());
            let mut rot = Vec::new();
            let mut c = first;
            loop {
                rot.push(node_dart[c].ok_or_else(|| Error::Structural("unreached labelled node".into()))?);
                rot.extend(b.branches(&hangs[&c], labels[v]));
                c = inv[c];
                if c == first {
                    break;
                }
            }
            b.rotations.push(rot);
        }
    }
    let n = b.alpha.len();
    if b.alpha.contains(&usize::MAX) {
        return Err(Error::Structural("dangling half-edge after gluing".into()));
    }
    let mut sigma = vec![0; n];
    for rot in &b.rotations {
        for (i, &d) in rot.iter().enumerate() {
            sigma[d] = rot[(i + rot.len() - 1) % rot.len()];
        }
    }
    let root = b.root.ok_or_else(|| Error::Structural("no root mark".into()))?;
    // shift so that the root reads 0
    let shift = match b.flag[root] {
        Some(f) => f,
        None => b.kind[b.alpha[root]].label().expect("plain root ends at a labelled vertex"),
    };
    let kind = b.kind.iter().map(|k| match k {
        VertexKind::Labelled(l) => VertexKind::Labelled(l - shift),
        other => *other,
    });
    let flag = b.flag.iter().map(|f| f.map(|x| x - shift)).collect();
    let map = CombinatorialMap::new(sigma, b.alpha, root)?;
    let t = Mobile::new(map, kind.collect(), flag)?;
    t.validate()?;
    Ok(t)
}
