//! The mobile bijection between rooted-pointed Eulerian maps and labelled
//! one-face maps ("mobiles").
//!
//! A mobile reuses [`CombinatorialMap`] for its embedding. Each dart records the
//! kind of its vertex, and a dart of a flagged edge carries the flag lying on its
//! left side. Clockwise around a vertex means following `sigma⁻¹`.
//!
//! Edge increments: a flagged edge stands for a map edge whose label drops by
//! `τ ≥ 0` along the black-on-the-right orientation, and `τ` is reported as its
//! increment. A plain edge stands for a step up by one and counts as `−1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapcore::{bicolor, inverse, CombinatorialMap, FaceColoring};
use crate::oracle::{count_mobiles, for_each_hypermap, normalize_degrees};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Labelled(i64),
    White,
    Black,
}

impl VertexKind {
    pub fn label(self) -> Option<i64> {
        match self {
            VertexKind::Labelled(l) => Some(l),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mobile {
    map: CombinatorialMap,
    kind: Vec<VertexKind>,
    flag: Vec<Option<i64>>,
}

impl Mobile {
    /// Assemble a mobile from its embedding, the kind of the vertex at each dart,
    /// and the left flag of each dart (for flagged edges). Checks only shape
    /// consistency; use [`Mobile::validate`] for the full set of mobile rules.
    pub fn new(map: CombinatorialMap, kind: Vec<VertexKind>, flag: Vec<Option<i64>>) -> Result<Self> {
        let n = map.n_darts();
        if kind.len() != n || flag.len() != n {
            return Err(Error::Structural("per-dart tables have the wrong length".into()));
        }
        for d in 0..n {
            if kind[map.sigma(d)] != kind[d] {
                return Err(Error::Structural(format!("dart {} disagrees with its vertex kind", d + 1)));
            }
        }
        Ok(Mobile { map, kind, flag })
    }

    pub fn map(&self) -> &CombinatorialMap {
        &self.map
    }
    pub fn kind(&self, d: usize) -> VertexKind {
        self.kind[d]
    }
    pub fn flag_left(&self, d: usize) -> Option<i64> {
        self.flag[d]
    }
    pub fn flag_right(&self, d: usize) -> Option<i64> {
        self.flag[self.map.alpha(d)]
    }
    pub fn is_flagged(&self, d: usize) -> bool {
        self.flag[d].is_some()
    }
    pub fn n_edges(&self) -> usize {
        self.map.n_edges()
    }

    fn vertices_of(&self, pred: impl Fn(VertexKind) -> bool) -> Vec<Vec<usize>> {
        self.map.vertices().into_iter().filter(|c| pred(self.kind[c[0]])).collect()
    }
    pub fn black_vertices(&self) -> Vec<Vec<usize>> {
        self.vertices_of(|k| k == VertexKind::Black)
    }
    pub fn white_vertices(&self) -> Vec<Vec<usize>> {
        self.vertices_of(|k| k == VertexKind::White)
    }
    pub fn labelled_vertices(&self) -> Vec<Vec<usize>> {
        self.vertices_of(|k| matches!(k, VertexKind::Labelled(_)))
    }
    pub fn genus(&self) -> usize {
        self.map.genus()
    }

    /// Relabel darts with the rooted canonical labelling of the embedding.
    pub fn canonical_form(&self) -> Self {
        let lab = self.map.canonical_labelling();
        self.relabel(&lab)
    }

    pub fn relabel(&self, lab: &[usize]) -> Self {
        let n = lab.len();
        let mut kind = vec![VertexKind::White; n];
        let mut flag = vec![None; n];
        for d in 0..n {
            kind[lab[d]] = self.kind[d];
            flag[lab[d]] = self.flag[d];
        }
        Mobile { map: self.map.relabel(lab), kind, flag }
    }

    /// Label on the left of the root: the adjacent labelled vertex, or the left flag.
    pub fn root_label(&self) -> Option<i64> {
        let r = self.map.root();
        self.kind[self.map.alpha(r)].label().or(self.flag[r])
    }

    /// The structural rules of a mobile: one face, allowed edge types, the
    /// clockwise label rules around white and black vertices, and root label 0.
    pub fn validate(&self) -> Result<()> {
        use VertexKind::*;
        let m = &self.map;
        let bad = |msg: String| Err(Error::Structural(msg));
        if m.n_faces() != 1 {
            return bad(format!("{} faces, expected one", m.n_faces()));
        }
        for d in 0..m.n_darts() {
            let a = m.alpha(d);
            let flagged = match (self.kind[d], self.kind[a]) {
                (Labelled(_), White) | (White, Labelled(_)) => false,
                (White, Black) | (Black, White) => true,
                (x, y) => return bad(format!("edge {}–{} joins {x:?} to {y:?}", d + 1, a + 1)),
            };
            if flagged != self.flag[d].is_some() {
                return bad(format!("dart {} has a misplaced flag", d + 1));
            }
        }
        let sinv = inverse(m.sigma_perm());
        for cyc in m.vertices() {
            let clockwise: Vec<usize> = {
                let mut v = vec![cyc[0]];
                let mut x = sinv[cyc[0]];
                while x != cyc[0] {
                    v.push(x);
                    x = sinv[x];
                }
                v
            };
            match self.kind[cyc[0]] {
                White => {
                    // (first, last) label read on each incident edge, clockwise
                    let items: Vec<(i64, i64, bool)> = clockwise
                        .iter()
                        .map(|&x| match self.flag[x] {
                            None => {
                                let l = self.kind[m.alpha(x)].label().unwrap();
                                (l, l, true)
                            }
                            Some(l) => (l, self.flag_right(x).unwrap(), false),
                        })
                        .collect();
                    for (i, &(first, last, plain)) in items.iter().enumerate() {
                        if !plain && last < first {
                            return bad(format!("flags {first},{last} decrease clockwise around a white vertex"));
                        }
                        let next = items[(i + 1) % items.len()].0;
                        let want = if plain { first - 1 } else { last };
                        if next != want {
                            return bad(format!("label {next} follows {last} around a white vertex"));
                        }
                    }
                }
                Black => {
                    let items: Vec<(i64, i64)> =
                        clockwise.iter().map(|&x| (self.flag[x].unwrap(), self.flag_right(x).unwrap())).collect();
                    for (i, &(l, l2)) in items.iter().enumerate() {
                        if l2 > l {
                            return bad(format!("flags {l},{l2} increase clockwise around a black vertex"));
                        }
                        if items[(i + 1) % items.len()].0 < l2 {
                            return bad("flag drops after an edge around a black vertex".to_string());
                        }
                    }
                }
                Labelled(_) => {}
            }
        }
        if self.kind[m.root()] != White {
            return bad("root does not leave a white vertex".into());
        }
        if self.root_label() != Some(0) {
            return bad(format!("root label is {:?}, expected 0", self.root_label()));
        }
        Ok(())
    }

    /// `τ` for every flagged edge, listed by the edge's white-side dart.
    pub fn increments(&self) -> Vec<(usize, i64)> {
        (0..self.map.n_darts())
            .filter(|&d| self.kind[d] == VertexKind::White && self.is_flagged(d))
            .map(|d| (d, self.flag_right(d).unwrap() - self.flag_left(d).unwrap()))
            .collect()
    }

    /// A mobile comes from a constellation iff its black vertices are leaves.
    pub fn is_constellation_mobile(&self) -> bool {
        self.black_vertices().iter().all(|c| c.len() == 1)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.map.to_text();
        let tokens: Vec<String> = self
            .map
            .vertices()
            .iter()
            .map(|c| match self.kind[c[0]] {
                VertexKind::Labelled(l) => format!("L{l}"),
                VertexKind::White => "W".into(),
                VertexKind::Black => "B".into(),
            })
            .collect();
        s.push_str(&format!("vtype {}\n", tokens.join(" ")));
        for d in 0..self.map.n_darts() {
            if d < self.map.alpha(d) {
                if let Some(l) = self.flag[d] {
                    s.push_str(&format!("flags {} {} {}\n", d + 1, l, self.flag_right(d).unwrap()));
                }
            }
        }
        s
    }
}

impl fmt::Display for Mobile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Mobile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty()).peekable();
        let map = CombinatorialMap::parse_block(&mut lines)?;
        let n = map.n_darts();
        let vt = lines.next().ok_or_else(|| Error::Parse("missing `vtype` line".into()))?;
        let mut toks = vt.split_whitespace();
        if toks.next() != Some("vtype") {
            return Err(Error::Parse(format!("expected `vtype`, found `{vt}`")));
        }
        let verts = map.vertices();
        let toks: Vec<&str> = toks.collect();
        if toks.len() != verts.len() {
            return Err(Error::Parse(format!("{} vertex types for {} vertices", toks.len(), verts.len())));
        }
        let mut kind = vec![VertexKind::White; n];
        for (c, t) in verts.iter().zip(toks) {
            let k = match t {
                "W" => VertexKind::White,
                "B" => VertexKind::Black,
                _ if t.starts_with('L') => {
                    VertexKind::Labelled(t[1..].parse().map_err(|e| Error::Parse(format!("label `{t}`: {e}")))?)
                }
                _ => return Err(Error::Parse(format!("unknown vertex type `{t}`"))),
            };
            for &d in c {
                kind[d] = k;
            }
        }
        let mut flag = vec![None; n];
        for line in lines {
            let mut it = line.split_whitespace();
            if it.next() != Some("flags") {
                return Err(Error::Parse(format!("unexpected line `{line}`")));
            }
            let v: Vec<i64> =
                it.map(|x| x.parse().map_err(|e| Error::Parse(format!("flags: {e}")))).collect::<Result<_>>()?;
            let [e, l, r] = v[..] else { return Err(Error::Parse("`flags` takes three values".into())) };
            if e < 1 || e as usize > n {
                return Err(Error::Parse(format!("flags: dart {e} out of range")));
            }
            let d = e as usize - 1;
            flag[d] = Some(l);
            flag[map.alpha(d)] = Some(r);
        }
        Mobile::new(map, kind, flag)
    }
}

/// Distances from the pointed vertex along edges oriented black-on-the-right,
/// indexed by vertex id.
pub fn distance_labels(map: &CombinatorialMap, col: &FaceColoring) -> Result<Vec<i64>> {
    let p = map.pointed().ok_or_else(|| Error::Precondition("map is not pointed".into()))?;
    let n = map.n_darts();
    let vid = map.vertex_ids();
    let mut lab = vec![-1i64; n];
    lab[p] = 0;
    let mut queue = std::collections::VecDeque::from([p]);
    while let Some(v) = queue.pop_front() {
        let mut d = v;
        loop {
            if col.is_black(d) {
                let w = vid[map.alpha(d)];
                if lab[w] < 0 {
                    lab[w] = lab[v] + 1;
                    queue.push_back(w);
                }
            }
            d = map.sigma(d);
            if d == v {
                break;
            }
        }
    }
    if (0..n).any(|d| lab[vid[d]] < 0) {
        return Err(Error::Precondition("some vertex is unreachable along oriented edges".into()));
    }
    Ok(lab)
}

fn check_coloring(map: &CombinatorialMap, col: &FaceColoring) -> Result<()> {
    if (0..map.n_darts()).any(|d| col.is_black(d) == col.is_black(map.alpha(d))) {
        return Err(Error::Precondition("colouring is not proper".into()));
    }
    if (0..map.n_darts()).any(|d| col.is_black(d) != col.is_black(map.phi(d))) {
        return Err(Error::Precondition("colouring is not constant on faces".into()));
    }
    if !col.is_black(map.root()) {
        return Err(Error::Precondition("root must have a black face on its right".into()));
    }
    Ok(())
}

/// The mobile of a rooted-pointed Eulerian map.
///
/// Mobile darts are the map darts. A white dart `d` from `u` to `w` becomes the
/// mobile dart at the centre of its white face; its partner `alpha(d)` is moved
/// to `u` when the label drops by one from `u` to `w` (plain edge) and to the
/// centre of the black face otherwise (flagged edge, left flag `l(u)`, right
/// flag `l(w)`). The mobile is rooted at `alpha(root)`.
pub fn mob(map: &CombinatorialMap, col: &FaceColoring) -> Result<Mobile> {
    check_coloring(map, col)?;
    let lab = distance_labels(map, col)?;
    let n = map.n_darts();
    let vid = map.vertex_ids();
    let sinv = inverse(map.sigma_perm());
    let phi_inv = |d: usize| map.alpha(sinv[d]);
    let l = |d: usize| lab[vid[d]];
    let plain_white = |d: usize| !col.is_black(d) && l(d) == l(map.alpha(d)) + 1;
    let flagged_black = |d: usize| col.is_black(d) && !plain_white(map.alpha(d));

    let mut sigma = vec![0; n];
    for d in 0..n {
        sigma[d] = if !col.is_black(d) {
            phi_inv(d)
        } else if plain_white(map.alpha(d)) {
            let mut e = map.sigma(map.alpha(d));
            while !plain_white(e) {
                e = map.sigma(e);
            }
            map.alpha(e)
        } else {
            let mut e = phi_inv(d);
            while !flagged_black(e) {
                e = phi_inv(e);
            }
            e
        };
    }
    let root = map.alpha(map.root());
    let shift = l(root);
    let mut kind = vec![VertexKind::White; n];
    let mut flag = vec![None; n];
    for d in 0..n {
        if col.is_black(d) {
            let w = map.alpha(d);
            if plain_white(w) {
                kind[d] = VertexKind::Labelled(l(w) - shift);
            } else {
                kind[d] = VertexKind::Black;
                flag[d] = Some(l(d) - shift);
                flag[w] = Some(l(w) - shift);
            }
        }
    }
    let tree = CombinatorialMap::new(sigma, map.alpha_perm().to_vec(), root)?;
    Mobile::new(tree, kind, flag)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Item {
    /// the corner just before this dart (counterclockwise) at a labelled vertex
    Corner(usize),
    /// the flag on the right of this dart
    Flag(usize),
}

const V0: usize = usize::MAX;

/// The rooted-pointed Eulerian map of a mobile (inverse of [`mob`]).
///
/// The face contour lists corners of labelled vertices and flags. Every corner
/// labelled `n ≥ 2` is joined to the first corner or flag labelled `n−1`, and
/// every flag labelled `n ≥ 1` to the first corner or flag labelled `n`, met
/// when walking the contour backwards; corners labelled 1 and flags labelled 0
/// are joined to a new pointed vertex.
pub fn map_of(t: &Mobile) -> Result<(CombinatorialMap, FaceColoring)> {
    t.validate().map_err(|e| Error::Precondition(format!("invalid mobile: {e}")))?;
    let tm = t.map();
    let mut items = Vec::new();
    let mut labels = Vec::new();
    let mut corner_of = vec![usize::MAX; tm.n_darts()];
    let mut d = tm.root();
    loop {
        if let VertexKind::Labelled(l) = t.kind(d) {
            corner_of[d] = items.len();
            items.push(Item::Corner(d));
            labels.push(l);
        }
        if let Some(l) = t.flag_right(d) {
            items.push(Item::Flag(d));
            labels.push(l);
        }
        d = tm.phi(d);
        if d == tm.root() {
            break;
        }
    }
    let len = items.len();
    let shift = items
        .iter()
        .zip(&labels)
        .map(|(it, &l)| if matches!(it, Item::Corner(_)) { l - 1 } else { l })
        .min()
        .ok_or_else(|| Error::Structural("mobile has no labels".into()))?;
    for l in labels.iter_mut() {
        *l -= shift;
    }
    let mut bucket: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        bucket.entry(l).or_default().push(i);
    }
    // successor of every item, searching backwards along the contour
    let mut succ = vec![V0; len];
    for i in 0..len {
        let target = match items[i] {
            Item::Corner(_) if labels[i] == 1 => continue,
            Item::Flag(_) if labels[i] == 0 => continue,
            Item::Corner(_) => labels[i] - 1,
            Item::Flag(_) => labels[i],
        };
        let b =
            bucket.get(&target).ok_or_else(|| Error::Structural(format!("no successor for label {}", labels[i])))?;
        let k = b.partition_point(|&j| j < i);
        let j = if k > 0 { b[k - 1] } else { *b.last().unwrap() };
        if j == i {
            return Err(Error::Structural("flag is its own successor".into()));
        }
        succ[i] = j;
    }
    // items attached to each target, in counterclockwise order at the target
    let offset = |r: usize, p: usize| (r + len - p) % len;
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); len];
    let mut at_v0 = Vec::new();
    for i in 0..len {
        if succ[i] == V0 {
            at_v0.push(i);
        } else {
            incoming[succ[i]].push(i);
        }
    }
    for (p, inc) in incoming.iter_mut().enumerate() {
        inc.sort_by_key(|&r| std::cmp::Reverse(offset(r, p)));
    }
    at_v0.reverse();

    // new darts: a corner owns (out, in); a flag owns one dart
    let mut dart_of = vec![[usize::MAX; 2]; len];
    let mut next = 0;
    for i in 0..len {
        match items[i] {
            Item::Corner(_) => {
                dart_of[i] = [next, next + 1];
                next += 2;
            }
            Item::Flag(_) => {
                dart_of[i] = [next, usize::MAX];
                next += 1;
            }
        }
    }
    let n_new = next;
    let mut alpha = vec![usize::MAX; n_new];
    let mut black = vec![false; n_new];
    let flag_item: BTreeMap<usize, usize> = items
        .iter()
        .enumerate()
        .filter_map(|(i, it)| if let Item::Flag(d) = it { Some((*d, i)) } else { None })
        .collect();
    for i in 0..len {
        match items[i] {
            Item::Corner(_) => {
                let [o, inn] = dart_of[i];
                alpha[o] = inn;
                alpha[inn] = o;
                black[inn] = true;
            }
            Item::Flag(d) => {
                let j = flag_item[&tm.alpha(d)];
                alpha[dart_of[i][0]] = dart_of[j][0];
                black[dart_of[i][0]] = t.kind(d) == VertexKind::White;
            }
        }
    }
    // strands arriving through item r, left to right along the direction of travel
    fn bundle(r: usize, items: &[Item], incoming: &[Vec<usize>], dart_of: &[[usize; 2]], out: &mut Vec<usize>) {
        match items[r] {
            Item::Corner(_) => out.push(dart_of[r][1]),
            Item::Flag(_) => {
                for &q in &incoming[r] {
                    bundle(q, items, incoming, dart_of, out);
                }
                out.push(dart_of[r][0]);
            }
        }
    }
    let mut sigma = vec![usize::MAX; n_new];
    let mut close = |rot: &[usize]| {
        for k in 0..rot.len() {
            sigma[rot[k]] = rot[(k + 1) % rot.len()];
        }
    };
    for cyc in t.labelled_vertices() {
        let mut rot = Vec::new();
        let mut x = cyc[0];
        loop {
            let p = corner_of[x];
            rot.push(dart_of[p][0]);
            for &r in &incoming[p] {
                bundle(r, &items, &incoming, &dart_of, &mut rot);
            }
            x = tm.sigma(x);
            if x == cyc[0] {
                break;
            }
        }
        close(&rot);
    }
    let mut rot0 = Vec::new();
    for &r in &at_v0 {
        bundle(r, &items, &incoming, &dart_of, &mut rot0);
    }
    close(&rot0);
    let root_dart = tm.root();
    let root = match t.kind(tm.alpha(root_dart)) {
        VertexKind::Labelled(_) => dart_of[corner_of[tm.sigma(tm.alpha(root_dart))]][1],
        _ => dart_of[flag_item[&root_dart]][0],
    };
    let pointed = rot0.first().copied();
    if sigma.contains(&usize::MAX) {
        return Err(Error::Structural("closure left a dart without rotation".into()));
    }
    let map = CombinatorialMap::new(sigma, alpha, root)?.with_pointed(pointed)?;
    Ok((map, FaceColoring::from_darts(black)))
}

/// Outcome of `map_of ∘ mob` over every rooted-pointed hypermap of one size and genus.
#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub m: usize,
    pub degrees: Vec<usize>,
    pub genus: usize,
    pub n: usize,
    /// Rooted-pointed hypermaps checked.
    pub maps: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
    /// Mobiles counted independently of the bijection.
    pub mobiles: String,
}

impl RoundtripReport {
    pub fn holds(&self) -> bool {
        self.failures == 0 && self.mobiles == self.maps.to_string()
    }
}

/// Runs the bijection both ways on each rooted-pointed hypermap with `n` black
/// faces and genus `genus`, and compares the number of maps with an independent
/// count of mobiles.
pub fn verify_roundtrip(m: usize, degrees: &[usize], genus: usize, n: usize) -> Result<RoundtripReport> {
    let d = normalize_degrees(m, degrees)?;
    let mobiles = count_mobiles(m, &d, genus, n)?;
    let mut maps = 0u64;
    let mut failures = 0u64;
    let mut first_failure = None;
    for_each_hypermap(m, &d, n, |h| {
        if h.genus != genus {
            return;
        }
        let (map, col) = h.to_map();
        for v in map.vertices() {
            maps += 1;
            let pm = map.clone().with_pointed(Some(v[0])).expect("vertex id is a dart");
            let ok = mob(&pm, &col).and_then(|t| {
                t.validate()?;
                let (back, bcol) = map_of(&t)?;
                Ok(back.canonical_form() == pm.canonical_form() && bicolor(&back).as_ref() == Some(&bcol))
            });
            if !matches!(ok, Ok(true)) {
                failures += 1;
                if first_failure.is_none() {
                    first_failure = Some(format!("{ok:?}\n{pm}"));
                }
            }
        }
    });
    Ok(RoundtripReport { m, degrees: d, genus, n, maps, failures, first_failure, mobiles: mobiles.to_string() })
}
