//! Abstract 2-dimensional simplicial complexes on the ground set `{1, ..., n}`.
//!
//! Vertices are plain `u8` labels starting at 1. A [`TriangleSet`] is kept
//! lexicographically sorted, so comparing two complexes on the same ground set
//! is an ordinary sequence comparison.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Vertex label in `1..=n`.
pub type VertexId = u8;

/// Largest supported ground set.
pub const MAX_VERTICES: usize = 64;

/// A triangle with strictly increasing vertex labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle([VertexId; 3]);

impl Triangle {
    /// Builds a triangle from three distinct labels in any order.
    pub fn new(a: VertexId, b: VertexId, c: VertexId) -> Result<Self> {
        let mut v = [a, b, c];
        v.sort_unstable();
        if v[0] == 0 {
            return Err(invalid("vertex labels start at 1"));
        }
        if v[0] == v[1] || v[1] == v[2] {
            return Err(invalid(format!("repeated vertex in triangle {a},{b},{c}")));
        }
        Ok(Triangle(v))
    }

    /// Caller guarantees `0 < a < b < c`.
    pub(crate) const fn new_unchecked(a: VertexId, b: VertexId, c: VertexId) -> Self {
        Triangle([a, b, c])
    }

    pub fn vertices(&self) -> [VertexId; 3] {
        self.0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    /// The three edges `{a,b}`, `{a,c}`, `{b,c}`.
    pub fn edges(&self) -> [Edge; 3] {
        let [a, b, c] = self.0;
        [Edge { u: a, v: b }, Edge { u: a, v: c }, Edge { u: b, v: c }]
    }

    /// The edge opposite `v`, if `v` is a vertex of the triangle.
    pub fn opposite(&self, v: VertexId) -> Option<Edge> {
        let [a, b, c] = self.0;
        match v {
            x if x == a => Some(Edge { u: b, v: c }),
            x if x == b => Some(Edge { u: a, v: c }),
            x if x == c => Some(Edge { u: a, v: b }),
            _ => None,
        }
    }

    pub fn max_vertex(&self) -> VertexId {
        self.0[2]
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// An edge `{u, v}` with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Result<Self> {
        if a == 0 || b == 0 || a == b {
            return Err(invalid(format!("invalid edge {a},{b}")));
        }
        Ok(Edge {
            u: a.min(b),
            v: a.max(b),
        })
    }

    pub fn index(&self, n: usize) -> usize {
        pair_index(self.u as usize, self.v as usize, n)
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.u, self.v)
    }
}

/// Number of unordered pairs on `n` elements.
pub const fn num_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[inline]
pub(crate) const fn pair_index(u: usize, v: usize, n: usize) -> usize {
    // pairs (1,*) .. (u-1,*) precede (u,v): sum_{i<u} (n-i)
    (u - 1) * (2 * n - u) / 2 + (v - u - 1)
}

/// Dense lexicographic index of the pair `u < v` among all pairs on `{1..n}`:
/// `12 -> 0, 13 -> 1, ..., (n-1)n -> C(n,2)-1`.
pub fn edge_index(u: VertexId, v: VertexId, n: usize) -> Result<usize> {
    if n > MAX_VERTICES {
        return Err(invalid(format!("n = {n} exceeds {MAX_VERTICES}")));
    }
    if u == 0 || u >= v || v as usize > n {
        return Err(invalid(format!("need 1 <= u < v <= n, got ({u},{v}) with n = {n}")));
    }
    Ok(pair_index(u as usize, v as usize, n))
}

/// Inverse of [`edge_index`].
pub fn edge_from_index(index: usize, n: usize) -> Result<Edge> {
    if index >= num_edges(n) {
        return Err(invalid(format!("edge index {index} out of range for n = {n}")));
    }
    let mut rest = index;
    for u in 1..n {
        let row = n - u;
        if rest < row {
            return Ok(Edge {
                u: u as VertexId,
                v: (u + 1 + rest) as VertexId,
            });
        }
        rest -= row;
    }
    unreachable!("index bounded by C(n,2)")
}

/// A lexicographically sorted, duplicate-free list of triangles on `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriangleSet {
    n: usize,
    triangles: Vec<Triangle>,
}

impl TriangleSet {
    /// Sorts the input; rejects duplicates and labels above `n`.
    pub fn new(n: usize, mut triangles: Vec<Triangle>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(invalid(format!("n = {n} exceeds {MAX_VERTICES}")));
        }
        triangles.sort_unstable();
        if let Some(w) = triangles.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid(format!("duplicate triangle {}", w[0])));
        }
        if let Some(t) = triangles.iter().find(|t| t.max_vertex() as usize > n) {
            return Err(invalid(format!("triangle {t} exceeds n = {n}")));
        }
        Ok(TriangleSet { n, triangles })
    }

    /// Caller guarantees sortedness, no duplicates and range.
    pub(crate) fn from_sorted_unchecked(n: usize, triangles: Vec<Triangle>) -> Self {
        debug_assert!(triangles.windows(2).all(|w| w[0] < w[1]));
        TriangleSet { n, triangles }
    }

    /// Convenience constructor from raw triples, e.g. `[[1,2,3],[1,2,4]]`.
    pub fn from_triples(n: usize, triples: &[[VertexId; 3]]) -> Result<Self> {
        let tris = triples
            .iter()
            .map(|&[a, b, c]| Triangle::new(a, b, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, tris)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Same triangles on a larger (or equal) ground set.
    pub fn with_ground_set(&self, n: usize) -> Result<Self> {
        Self::new(n, self.triangles.clone())
    }

    pub fn contains(&self, t: &Triangle) -> bool {
        self.triangles.binary_search(t).is_ok()
    }

    /// Applies `perm` (indexed by old label, `perm[0]` unused) and re-sorts.
    pub fn relabel(&self, perm: &[VertexId]) -> Self {
        let tris = self
            .triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.0;
                let mut v = [perm[a as usize], perm[b as usize], perm[c as usize]];
                v.sort_unstable();
                Triangle(v)
            })
            .collect::<Vec<_>>();
        let mut tris = tris;
        tris.sort_unstable();
        TriangleSet {
            n: self.n,
            triangles: tris,
        }
    }

    /// Sorted neighbor lists, indexed by vertex (index 0 unused).
    pub fn neighbors(&self) -> Vec<Vec<VertexId>> {
        let mut nb = vec![Vec::new(); self.n + 1];
        for t in &self.triangles {
            for e in t.edges() {
                nb[e.u as usize].push(e.v);
                nb[e.v as usize].push(e.u);
            }
        }
        for list in &mut nb {
            list.sort_unstable();
            list.dedup();
        }
        nb
    }

    /// Parses one line of the text format on the ground set `{1..n}`.
    /// With `n = None` the ground set is `{1..max label}`.
    pub fn parse_line(line: &str, n: Option<usize>, line_no: usize) -> Result<Self> {
        let err = |column: usize, message: String| Error::Parse {
            line: line_no,
            column,
            message,
        };
        let mut tris: Vec<Triangle> = Vec::new();
        let mut offset = 0usize;
        for chunk in line.split(';') {
            let col = offset + 1;
            offset += chunk.len() + 1;
            let trimmed = chunk.trim();
            if trimmed.is_empty() {
                return Err(err(col, "empty triangle".into()));
            }
            let mut v = [0u8; 3];
            let mut count = 0;
            for part in trimmed.split(',') {
                if count == 3 {
                    return Err(err(col, format!("triangle `{trimmed}` has more than 3 vertices")));
                }
                let label: u32 = part
                    .trim()
                    .parse()
                    .map_err(|_| err(col, format!("bad vertex label `{}`", part.trim())))?;
                if label == 0 || label as usize > MAX_VERTICES {
                    return Err(err(col, format!("vertex label {label} out of range 1..={MAX_VERTICES}")));
                }
                v[count] = label as u8;
                count += 1;
            }
            if count != 3 {
                return Err(err(col, format!("triangle `{trimmed}` needs 3 vertices")));
            }
            if !(v[0] < v[1] && v[1] < v[2]) {
                return Err(err(col, format!("triangle `{trimmed}` is not strictly increasing")));
            }
            let t = Triangle(v);
            if let Some(prev) = tris.last() {
                if *prev == t {
                    return Err(err(col, format!("duplicate triangle `{trimmed}`")));
                }
                if *prev > t {
                    return Err(err(col, format!("triangle `{trimmed}` out of lexicographic order")));
                }
            }
            if let Some(n) = n {
                if v[2] as usize > n {
                    return Err(err(col, format!("vertex {} exceeds n = {n}", v[2])));
                }
            }
            tris.push(t);
        }
        let n = n.unwrap_or_else(|| tris.iter().map(|t| t.max_vertex() as usize).max().unwrap_or(0));
        Ok(TriangleSet { n, triangles: tris })
    }
}

impl fmt::Display for TriangleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.triangles.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for TriangleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TriangleSet::parse_line(s.trim(), None, 1)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct TriangleSetRepr {
    n: usize,
    triangles: String,
}

impl serde::Serialize for TriangleSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TriangleSetRepr {
            n: self.n,
            triangles: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for TriangleSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TriangleSetRepr::deserialize(d)?;
        TriangleSet::parse_line(&r.triangles, Some(r.n), 1).map_err(serde::de::Error::custom)
    }
}

/// Parses a whole file: one complex per non-empty line. Lines starting with
/// `#` are skipped. Returns `(line number, complex)` pairs.
pub fn parse_complexes(text: &str, n: Option<usize>) -> Result<Vec<(usize, TriangleSet)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| TriangleSet::parse_line(l.trim(), n, i + 1).map(|c| (i + 1, c)))
        .collect()
}

/// Per-edge triangle multiplicities; the row sum of the triangle-edge
/// incidence matrix over a set of triangles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSumVector {
    n: usize,
    pub(crate) counts: Vec<u8>,
    overflow: bool,
}

impl EdgeSumVector {
    pub fn zeros(n: usize) -> Self {
        EdgeSumVector {
            n,
            counts: vec![0; num_edges(n)],
            overflow: false,
        }
    }

    pub fn from_complex(c: &TriangleSet) -> Self {
        let mut s = Self::zeros(c.n());
        for t in c.triangles() {
            s.add(t);
        }
        s
    }

    /// Adds the row of `t`. If some entry would exceed 2, nothing changes,
    /// the overflow flag is raised and `false` is returned.
    pub fn add(&mut self, t: &Triangle) -> bool {
        let idx = t.edges().map(|e| e.index(self.n));
        if idx.iter().any(|&i| self.counts[i] >= 2) {
            self.overflow = true;
            return false;
        }
        for i in idx {
            self.counts[i] += 1;
        }
        true
    }

    /// Removes the row of `t`; entries must be positive.
    pub fn remove(&mut self, t: &Triangle) {
        for e in t.edges() {
            let i = e.index(self.n);
            debug_assert!(self.counts[i] > 0);
            self.counts[i] -= 1;
        }
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }

    pub fn get(&self, e: Edge) -> u8 {
        self.counts[e.index(self.n)]
    }

    pub fn overflowed(&self) -> bool {
        self.overflow
    }

    pub fn clear_overflow(&mut self) {
        self.overflow = false;
    }
}

/// True iff every entry is 0 or 2, at least one entry is 2, and no overflow
/// was recorded.
pub fn is_closed(s: &EdgeSumVector) -> bool {
    !s.overflow && s.counts.iter().all(|&c| c == 0 || c == 2) && s.counts.contains(&2)
}

/// The link of a vertex: opposite edges of the triangles containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexLink {
    pub center: VertexId,
    pub edges: Vec<Edge>,
}

impl VertexLink {
    /// Distinct vertices of the link, sorted.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.edges.iter().flat_map(|e| [e.u, e.v]).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

pub fn vertex_link(c: &TriangleSet, v: VertexId) -> VertexLink {
    let mut edges: Vec<Edge> = c.triangles().iter().filter_map(|t| t.opposite(v)).collect();
    edges.sort_unstable();
    VertexLink { center: v, edges }
}

/// True iff the link edges form exactly one cycle of length at least 3.
pub fn link_is_single_circle(link: &VertexLink) -> bool {
    let edges = &link.edges;
    if edges.len() < 3 {
        return false;
    }
    let verts = link.vertices();
    if verts.len() != edges.len() {
        return false;
    }
    let pos = |x: VertexId| verts.binary_search(&x).expect("link vertex");
    let mut adj = vec![Vec::with_capacity(2); verts.len()];
    for e in edges {
        let (a, b) = (pos(e.u), pos(e.v));
        adj[a].push(b);
        adj[b].push(a);
    }
    if adj.iter().any(|a| a.len() != 2) {
        return false;
    }
    // walk the cycle through vertex 0
    let (mut prev, mut cur, mut steps) = (0usize, adj[0][0], 1usize);
    while cur != 0 {
        let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
        prev = cur;
        cur = next;
        steps += 1;
        if steps > verts.len() {
            return false;
        }
    }
    steps == verts.len()
}

/// Connectivity through shared edges, and every vertex of `{1..n}` used.
pub fn is_connected(c: &TriangleSet) -> bool {
    let tris = c.triangles();
    if tris.is_empty() {
        return false;
    }
    let mut used = vec![false; c.n() + 1];
    for t in tris {
        for v in t.vertices() {
            used[v as usize] = true;
        }
    }
    if used[1..].iter().any(|u| !u) {
        return false;
    }
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut first_with_edge: Vec<Option<usize>> = vec![None; num_edges(c.n())];
    for (i, t) in tris.iter().enumerate() {
        for e in t.edges() {
            let slot = &mut first_with_edge[e.index(c.n())];
            match *slot {
                None => *slot = Some(i),
                Some(j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    let root = find(&mut parent, 0);
    (1..tris.len()).all(|i| find(&mut parent, i) == root)
}

/// Closed, connected on all `n` vertices, and every vertex link a single circle.
pub fn verify_surface(c: &TriangleSet) -> bool {
    if c.n() < 4 {
        return false;
    }
    let sums = EdgeSumVector::from_complex(c);
    if !is_closed(&sums) || !is_connected(c) {
        return false;
    }
    (1..=c.n()).all(|v| link_is_single_circle(&vertex_link(c, v as VertexId)))
}

/// `(f0, f1, f2)`: vertices, distinct edges, triangles.
pub fn f_vector(c: &TriangleSet) -> (usize, usize, usize) {
    let sums = EdgeSumVector::from_complex(c);
    let f1 = sums.counts().iter().filter(|&&x| x > 0).count();
    (c.n(), f1, c.len())
}

pub fn euler_characteristic(c: &TriangleSet) -> i64 {
    let (f0, f1, f2) = f_vector(c);
    f0 as i64 - f1 as i64 + f2 as i64
}
