//! Lexicographic backtracking enumeration of triangulated surfaces.
//!
//! The search starts from a beginning segment `B_k` (the canonical star of
//! vertex 1 with degree `k`) and adds triangles in strictly increasing
//! lexicographic order while keeping a running edge multiplicity vector. A
//! branch is cut as soon as
//!
//! * some edge would lie in three triangles,
//! * some vertex link closes into a circle while further link edges exist, or
//!   a triangle is added at a vertex whose link is already closed,
//! * a degree bound tied to `k` is violated (closed links shorter than `k` in
//!   [`Order::Lex`], degrees above `k` in [`Order::MixedLex`]),
//! * one of the two reflection exclusions on triangles `23j` / `24j` applies,
//! * a vertex is used before all smaller labels are used.
//!
//! Every complex whose multiplicities are all 0 or 2 on all `n` vertices is
//! verified and emitted. The raw stream still contains relabeled copies of
//! the same surface; [`crate::classify::deduplicate`] removes them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::classify::{self, SurfaceRecord};
use crate::complex::{
    is_closed, num_edges, pair_index, verify_surface, EdgeSumVector, Triangle, TriangleSet,
    VertexId, VertexLink, MAX_VERTICES,
};
use crate::error::{invalid, Error, Result};

/// Processing order of the beginning segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// `B_3, B_4, ..., B_{n-1}`; vertex 1 has minimum degree.
    Lex,
    /// `B_{n-1}, ..., B_3`; vertex 1 has maximum degree.
    #[serde(rename = "mixed")]
    MixedLex,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Lex => "lex",
            Order::MixedLex => "mixed",
        })
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex" => Ok(Order::Lex),
            "mixed" | "mixedlex" | "mixed-lex" => Ok(Order::MixedLex),
            other => Err(invalid(format!("unknown order `{other}` (expected lex or mixed)"))),
        }
    }
}

/// Selects the subtrees `i, i+m, i+2m, ...` out of the list of first
/// triangles added after the beginning segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Partition {
    pub index: usize,
    pub count: usize,
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (i, m) = s
            .split_once('/')
            .ok_or_else(|| invalid(format!("partition `{s}` must look like i/m")))?;
        let index: usize = i.trim().parse().map_err(|_| invalid(format!("bad partition index `{i}`")))?;
        let count: usize = m.trim().parse().map_err(|_| invalid(format!("bad partition count `{m}`")))?;
        if count == 0 || index >= count {
            return Err(invalid(format!("partition {index}/{count} needs 0 <= i < m")));
        }
        Ok(Partition { index, count })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.index, self.count)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EnumerationConfig {
    pub n: usize,
    pub order: Order,
    /// Return raw candidates instead of one canonical form per class.
    pub emit_duplicates: bool,
    pub partition: Option<Partition>,
}

impl EnumerationConfig {
    pub fn new(n: usize, order: Order) -> Result<Self> {
        let cfg = EnumerationConfig {
            n,
            order,
            emit_duplicates: false,
            partition: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(4..=MAX_VERTICES).contains(&self.n) {
            return Err(invalid(format!("n must be in 4..={MAX_VERTICES}, got {}", self.n)));
        }
        if let Some(p) = self.partition {
            if p.count == 0 || p.index >= p.count {
                return Err(invalid(format!("partition {p} needs 0 <= i < m")));
            }
        }
        Ok(())
    }

    /// Beginning-segment degrees in processing order.
    pub fn segment_degrees(&self) -> Vec<usize> {
        let ks = 3..self.n;
        match self.order {
            Order::Lex => ks.collect(),
            Order::MixedLex => ks.rev().collect(),
        }
    }
}

/// The canonical star of vertex 1 with degree `k`:
/// `123, 124, 135, 146, ..., 1(k-1)(k+1), 1k(k+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeginningSegment {
    pub k: usize,
    pub triangles: Vec<Triangle>,
}

pub fn beginning_segment(k: usize) -> Result<BeginningSegment> {
    if k < 3 {
        return Err(invalid(format!("beginning segment needs k >= 3, got {k}")));
    }
    if k + 1 > MAX_VERTICES {
        return Err(invalid(format!("beginning segment B_{k} needs more than {MAX_VERTICES} vertices")));
    }
    let k8 = k as VertexId;
    let mut tris = vec![Triangle::new_unchecked(1, 2, 3), Triangle::new_unchecked(1, 2, 4)];
    for j in 3..k8 {
        tris.push(Triangle::new_unchecked(1, j, j + 2));
    }
    tris.push(Triangle::new_unchecked(1, k8, k8 + 1));
    Ok(BeginningSegment { k, triangles: tris })
}

/// Why a triangle was rejected by [`SearchState::push`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prune {
    EdgeOverflow,
    LinkAnomaly,
    DegreeBound,
    Symmetry,
    VertexOrder,
    NotIncreasing,
}

#[derive(Clone, Copy, Debug)]
struct Frame {
    mate_log_len: usize,
    open_ends: [u8; 3],
    closed: [bool; 3],
    used: u8,
    sym_i: u8,
}

/// The backtracking state: the chosen triangles, the edge multiplicity
/// vector and per-vertex link bookkeeping.
///
/// A vertex link inside the search is a disjoint union of paths plus at most
/// one closed circle. For every path endpoint `a` in the link of `x`,
/// `mate[x][a]` is the other endpoint of the same path, so closing a circle
/// and joining two paths are both constant-time events.
#[derive(Clone, Debug)]
pub struct SearchState {
    n: usize,
    order: Order,
    k: usize,
    chosen: Vec<Triangle>,
    sums: EdgeSumVector,
    /// `(n+1)^2` table of edge indices.
    eidx: Vec<u16>,
    /// `(n+1)^2` path-endpoint table, row = link center.
    mate: Vec<u8>,
    degree: Vec<u8>,
    link_len: Vec<u8>,
    open_ends: Vec<u8>,
    closed: Vec<bool>,
    used: u8,
    /// `i` if the triangle `23i` is present (0 otherwise).
    sym_i: u8,
    symmetry: bool,
    mate_log: Vec<(u16, u8)>,
    frames: Vec<Frame>,
}

impl SearchState {
    /// An empty state for degree bound `k`.
    pub fn new(n: usize, order: Order, k: usize) -> Result<Self> {
        if !(3..=MAX_VERTICES).contains(&n) {
            return Err(invalid(format!("n must be in 3..={MAX_VERTICES}, got {n}")));
        }
        let w = n + 1;
        let mut eidx = vec![u16::MAX; w * w];
        for u in 1..=n {
            for v in (u + 1)..=n {
                let i = pair_index(u, v, n) as u16;
                eidx[u * w + v] = i;
                eidx[v * w + u] = i;
            }
        }
        Ok(SearchState {
            n,
            order,
            k,
            chosen: Vec::with_capacity(num_edges(n)),
            sums: EdgeSumVector::zeros(n),
            eidx,
            mate: vec![0; w * w],
            degree: vec![0; w],
            link_len: vec![0; w],
            open_ends: vec![0; w],
            closed: vec![false; w],
            used: 0,
            sym_i: 0,
            symmetry: true,
            mate_log: Vec::new(),
            frames: Vec::new(),
        })
    }

    /// Builds a state from an arbitrary triangle list without applying any
    /// pruning rule; used to evaluate the individual rules.
    pub fn from_triangles(n: usize, order: Order, k: usize, triangles: &[Triangle]) -> Result<Self> {
        let mut s = Self::new(n, order, k)?;
        let mut tris = triangles.to_vec();
        tris.sort_unstable();
        for t in tris {
            if t.max_vertex() as usize > n {
                return Err(invalid(format!("triangle {t} exceeds n = {n}")));
            }
            s.apply(t);
        }
        Ok(s)
    }

    /// A state holding `B_k`.
    pub fn with_segment(n: usize, order: Order, k: usize) -> Result<Self> {
        if k + 1 > n {
            return Err(invalid(format!("B_{k} needs at least {} vertices", k + 1)));
        }
        let seg = beginning_segment(k)?;
        let mut s = Self::new(n, order, k)?;
        for t in seg.triangles {
            s.push(t).map_err(|p| invalid(format!("beginning segment rejected: {p:?}")))?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn chosen(&self) -> &[Triangle] {
        &self.chosen
    }

    pub fn sums(&self) -> &EdgeSumVector {
        &self.sums
    }

    /// Turns the two reflection exclusions on or off (on by default).
    pub fn set_symmetry_exclusions(&mut self, on: bool) {
        self.symmetry = on;
    }

    #[inline]
    fn count(&self, a: usize, b: usize) -> u8 {
        self.sums.counts[self.eidx[a * (self.n + 1) + b] as usize]
    }

    #[inline]
    fn set_mate(&mut self, x: usize, a: usize, val: u8) {
        let pos = x * (self.n + 1) + a;
        self.mate_log.push((pos as u16, self.mate[pos]));
        self.mate[pos] = val;
    }

    /// Adds `t` if no pruning rule fires; otherwise leaves the state
    /// untouched and reports the rule.
    pub fn push(&mut self, t: Triangle) -> std::result::Result<(), Prune> {
        if let Some(last) = self.chosen.last() {
            if t <= *last {
                return Err(Prune::NotIncreasing);
            }
        }
        let [a, b, c] = t.vertices();
        let (a, b, c) = (a as usize, b as usize, c as usize);
        if self.count(a, b) >= 2 || self.count(a, c) >= 2 || self.count(b, c) >= 2 {
            return Err(Prune::EdgeOverflow);
        }
        if self.closed[a] || self.closed[b] || self.closed[c] {
            return Err(Prune::LinkAnomaly);
        }
        if self.symmetry && symmetry_excluded(self.k, self.sym_i as usize, &t) {
            return Err(Prune::Symmetry);
        }
        // new vertices must appear in increasing label order
        let used = self.used as usize;
        let fresh = [a, b, c].iter().filter(|&&v| v > used).count();
        if fresh > 0 && c != used + fresh || (fresh >= 2 && b != used + fresh - 1) || (fresh == 3 && a != used + 1)
        {
            return Err(Prune::VertexOrder);
        }
        let reason = self.apply(t);
        match reason {
            None => Ok(()),
            Some(p) => {
                self.pop();
                Err(p)
            }
        }
    }

    /// Applies `t` unconditionally; returns the first rule the resulting
    /// state violates, if any.
    fn apply(&mut self, t: Triangle) -> Option<Prune> {
        let [a, b, c] = t.vertices();
        let vs = [a as usize, b as usize, c as usize];
        let frame = Frame {
            mate_log_len: self.mate_log.len(),
            open_ends: [self.open_ends[vs[0]], self.open_ends[vs[1]], self.open_ends[vs[2]]],
            closed: [self.closed[vs[0]], self.closed[vs[1]], self.closed[vs[2]]],
            used: self.used,
            sym_i: self.sym_i,
        };
        // link-degrees before the update
        let dab = self.count(vs[0], vs[1]);
        let dac = self.count(vs[0], vs[2]);
        let dbc = self.count(vs[1], vs[2]);
        let mut verdict = None;
        // (center, y, z, deg of y in link(center), deg of z in link(center))
        let updates = [
            (vs[0], vs[1], vs[2], dab, dac),
            (vs[1], vs[0], vs[2], dab, dbc),
            (vs[2], vs[0], vs[1], dac, dbc),
        ];
        for (x, y, z, dy, dz) in updates {
            let w = self.n + 1;
            match (dy, dz) {
                (0, 0) => {
                    self.set_mate(x, y, z as u8);
                    self.set_mate(x, z, y as u8);
                    self.open_ends[x] += 2;
                }
                (1, 0) => {
                    let e = self.mate[x * w + y] as usize;
                    self.set_mate(x, e, z as u8);
                    self.set_mate(x, z, e as u8);
                }
                (0, 1) => {
                    let e = self.mate[x * w + z] as usize;
                    self.set_mate(x, e, y as u8);
                    self.set_mate(x, y, e as u8);
                }
                (1, 1) => {
                    self.open_ends[x] = self.open_ends[x].saturating_sub(2);
                    if self.mate[x * w + y] as usize == z {
                        // a circle closes
                        if self.open_ends[x] > 0 {
                            verdict.get_or_insert(Prune::LinkAnomaly);
                        } else {
                            self.closed[x] = true;
                            let len = self.link_len[x] as usize + 1;
                            if self.order == Order::Lex && len < self.k {
                                verdict.get_or_insert(Prune::DegreeBound);
                            }
                        }
                    } else {
                        let e = self.mate[x * w + y] as usize;
                        let f = self.mate[x * w + z] as usize;
                        self.set_mate(x, e, f as u8);
                        self.set_mate(x, f, e as u8);
                    }
                }
                // only reachable through `from_triangles` on non-pseudomanifolds
                _ => {
                    verdict.get_or_insert(Prune::EdgeOverflow);
                }
            }
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let i = self.eidx[vs[p] * (self.n + 1) + vs[q]] as usize;
            if self.sums.counts[i] == 0 {
                self.degree[vs[p]] += 1;
                self.degree[vs[q]] += 1;
            }
            self.sums.counts[i] += 1;
        }
        for &x in &vs {
            self.link_len[x] += 1;
        }
        self.used = self.used.max(vs[2] as u8);
        if vs[0] == 2 && vs[1] == 3 {
            self.sym_i = vs[2] as u8;
        }
        if self.order == Order::MixedLex && vs.iter().any(|&x| self.degree[x] as usize > self.k) {
            verdict.get_or_insert(Prune::DegreeBound);
        }
        self.chosen.push(t);
        self.frames.push(frame);
        verdict
    }

    /// Removes the most recently added triangle.
    pub fn pop(&mut self) -> Option<Triangle> {
        let t = self.chosen.pop()?;
        let frame = self.frames.pop().expect("frame per triangle");
        let [a, b, c] = t.vertices();
        let vs = [a as usize, b as usize, c as usize];
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let i = self.eidx[vs[p] * (self.n + 1) + vs[q]] as usize;
            self.sums.counts[i] -= 1;
            if self.sums.counts[i] == 0 {
                self.degree[vs[p]] -= 1;
                self.degree[vs[q]] -= 1;
            }
        }
        for (j, &x) in vs.iter().enumerate() {
            self.link_len[x] -= 1;
            self.open_ends[x] = frame.open_ends[j];
            self.closed[x] = frame.closed[j];
        }
        while self.mate_log.len() > frame.mate_log_len {
            let (pos, old) = self.mate_log.pop().expect("log entry");
            self.mate[pos as usize] = old;
        }
        self.used = frame.used;
        self.sym_i = frame.sym_i;
        Some(t)
    }

    /// Lowest vertex whose link is non-empty but not yet a closed circle.
    fn lowest_open(&self) -> Option<usize> {
        (1..=self.used as usize).find(|&v| !self.closed[v])
    }

    /// Candidate triangles for the next step, in increasing order.
    ///
    /// All vertices below the lowest open vertex `m` are closed, so the next
    /// triangle is `{m, a, b}`; `a` cannot exceed the smallest `a*` with
    /// `{m, a*}` in exactly one triangle, or that edge could never be
    /// completed.
    fn for_each_candidate(&self, mut f: impl FnMut(Triangle)) {
        let Some(m) = self.lowest_open() else {
            return;
        };
        let n = self.n;
        let a_star = ((m + 1)..=n).find(|&a| self.count(m, a) == 1).unwrap_or(n);
        let b_max = (self.used as usize + 1).min(n);
        let last = self.chosen.last().copied();
        for a in (m + 1)..=a_star {
            if self.count(m, a) >= 2 {
                continue;
            }
            for b in (a + 1)..=b_max {
                let t = Triangle::new_unchecked(m as u8, a as u8, b as u8);
                if last.is_some_and(|l| t <= l) {
                    continue;
                }
                f(t);
            }
        }
    }

    fn is_terminal(&self) -> bool {
        self.lowest_open().is_none()
    }
}

/// True iff adding `t` would put some edge into a third triangle.
pub fn prune_edge_overflow(state: &SearchState, t: &Triangle) -> bool {
    t.edges().iter().any(|e| state.sums.get(*e) >= 2)
}

/// Connected components of a link graph as (vertex count, edge count, all
/// degrees equal to 2).
fn link_components(link: &VertexLink) -> Vec<(usize, usize, bool)> {
    let verts = link.vertices();
    let pos = |x: VertexId| verts.binary_search(&x).expect("link vertex");
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut deg = vec![0usize; verts.len()];
    for e in &link.edges {
        let (a, b) = (pos(e.u), pos(e.v));
        deg[a] += 1;
        deg[b] += 1;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut comps: std::collections::BTreeMap<usize, (usize, usize, bool)> = Default::default();
    for i in 0..verts.len() {
        let r = find(&mut parent, i);
        let entry = comps.entry(r).or_insert((0, 0, true));
        entry.0 += 1;
        entry.1 += deg[i];
        entry.2 &= deg[i] == 2;
    }
    comps.into_values().map(|(v, d, c)| (v, d / 2, c)).collect()
}

fn current_links(state: &SearchState) -> Vec<VertexLink> {
    let set = TriangleSet::from_sorted_unchecked(state.n, state.chosen.clone());
    (1..=state.n as VertexId).map(|v| crate::complex::vertex_link(&set, v)).collect()
}

/// True iff some vertex link contains a closed circle plus at least one
/// further edge.
pub fn prune_link_anomaly(state: &SearchState) -> bool {
    current_links(state).iter().any(|link| {
        let comps = link_components(link);
        comps.iter().any(|&(_, e, cycle)| cycle && e < link.edges.len())
    })
}

/// `Lex`: some link has closed into a circle shorter than `k`.
/// `MixedLex`: some vertex has degree or link size above `k`.
pub fn prune_degree_bounds(state: &SearchState) -> bool {
    let links = current_links(state);
    match state.order {
        Order::Lex => links.iter().any(|link| {
            let comps = link_components(link);
            comps.len() == 1 && comps[0].2 && comps[0].1 < state.k
        }),
        Order::MixedLex => links
            .iter()
            .any(|link| link.edges.len() > state.k || link.vertices().len() > state.k),
    }
}

fn symmetry_excluded(k: usize, sym_i: usize, t: &Triangle) -> bool {
    let [a, b, c] = t.vertices();
    let (a, b, c) = (a as usize, b as usize, c as usize);
    if a != 2 {
        return false;
    }
    // 23j with odd 5 <= j <= k
    if b == 3 && c % 2 == 1 && (5..=k).contains(&c) {
        return true;
    }
    // with 23i (even 6 <= i <= k) present: no 24j with odd 3 <= j <= i-3
    if sym_i % 2 == 0 && (6..=k).contains(&sym_i) {
        let j = if b == 4 {
            c
        } else if b == 3 && c == 4 {
            3
        } else {
            return false;
        };
        return j % 2 == 1 && j >= 3 && j + 3 <= sym_i;
    }
    false
}

/// The two reflection exclusions for the active segment `B_k`.
pub fn prune_symmetry_exclusions(state: &SearchState, t: &Triangle) -> bool {
    let sym_i = state
        .chosen
        .iter()
        .filter(|x| {
            let [a, b, _] = x.vertices();
            a == 2 && b == 3
        })
        .map(|x| x.vertices()[2] as usize)
        .find(|&i| i % 2 == 0 && (6..=state.k).contains(&i))
        .unwrap_or(0);
    symmetry_excluded(state.k, sym_i, t)
}

/// The chosen triangles if they form a surface on all `n` vertices.
pub fn finalize_candidate(state: &SearchState) -> Option<TriangleSet> {
    if !is_closed(&state.sums) {
        return None;
    }
    let set = TriangleSet::from_sorted_unchecked(state.n, state.chosen.clone());
    verify_surface(&set).then_some(set)
}

/// A search subtree: the segment degree and the triangles fixed after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subtree {
    pub k: usize,
    pub prefix: Vec<Triangle>,
}

/// Sequential backtracking engine.
#[derive(Clone, Debug)]
pub struct Enumerator {
    config: EnumerationConfig,
    symmetry: bool,
}

impl Enumerator {
    pub fn new(config: EnumerationConfig) -> Result<Self> {
        config.validate()?;
        Ok(Enumerator { config, symmetry: true })
    }

    pub fn config(&self) -> &EnumerationConfig {
        &self.config
    }

    /// Disables the reflection exclusions (they only remove duplicates).
    pub fn without_symmetry_exclusions(mut self) -> Self {
        self.symmetry = false;
        self
    }

    fn root(&self, k: usize) -> Option<SearchState> {
        let mut s = SearchState::with_segment(self.config.n, self.config.order, k).ok()?;
        s.set_symmetry_exclusions(self.symmetry);
        Some(s)
    }

    /// Subtrees at the given depth below the beginning segments, in search
    /// order. A branch that terminates above that depth is its own subtree.
    pub fn subtrees(&self, depth: usize) -> Vec<Subtree> {
        let mut out = Vec::new();
        for k in self.config.segment_degrees() {
            let Some(mut s) = self.root(k) else { continue };
            let base = s.chosen.len();
            collect_subtrees(&mut s, base, depth, k, &mut out);
        }
        out
    }

    /// Depth-1 subtrees kept by the configured partition.
    fn selected_subtrees(&self) -> Vec<Subtree> {
        let all = self.subtrees(1);
        match self.config.partition {
            None => all,
            Some(p) => all
                .into_iter()
                .enumerate()
                .filter(|(i, _)| i % p.count == p.index)
                .map(|(_, s)| s)
                .collect(),
        }
    }

    /// Runs one subtree, calling `emit` for every surface found, in order.
    pub fn run_subtree(&self, sub: &Subtree, emit: &mut dyn FnMut(TriangleSet)) {
        let Some(mut s) = self.root(sub.k) else { return };
        for &t in &sub.prefix {
            if s.push(t).is_err() {
                return;
            }
        }
        search(&mut s, emit);
    }

    /// Streams every raw candidate surface in search order.
    pub fn for_each(&self, mut emit: impl FnMut(TriangleSet)) {
        for sub in self.selected_subtrees() {
            self.run_subtree(&sub, &mut emit);
        }
    }

    /// All raw candidates, computed on the rayon pool. The result is the same
    /// sequence [`Enumerator::for_each`] produces.
    pub fn candidates(&self) -> Vec<TriangleSet> {
        self.par_map_subtrees(|sub| {
            let mut v = Vec::new();
            self.run_subtree(sub, &mut |c| v.push(c));
            v
        })
        .into_iter()
        .flatten()
        .collect()
    }

    /// Applies `f` to fine-grained subtrees in parallel; results in search order.
    pub fn par_map_subtrees<T: Send>(&self, f: impl Fn(&Subtree) -> T + Sync + Send) -> Vec<T> {
        let units: Vec<Subtree> = self
            .selected_subtrees()
            .into_iter()
            .flat_map(|top| self.refine(top, PARALLEL_DEPTH))
            .collect();
        units.par_iter().map(f).collect()
    }

    fn refine(&self, top: Subtree, depth: usize) -> Vec<Subtree> {
        let Some(mut s) = self.root(top.k) else { return Vec::new() };
        for &t in &top.prefix {
            if s.push(t).is_err() {
                return Vec::new();
            }
        }
        let base = s.chosen.len() - top.prefix.len();
        let mut out = Vec::new();
        collect_subtrees(&mut s, base, depth, top.k, &mut out);
        out
    }
}

const PARALLEL_DEPTH: usize = 3;

fn collect_subtrees(s: &mut SearchState, base: usize, depth: usize, k: usize, out: &mut Vec<Subtree>) {
    if s.chosen.len() - base >= depth || s.is_terminal() {
        out.push(Subtree {
            k,
            prefix: s.chosen[base..].to_vec(),
        });
        return;
    }
    let mut cands = Vec::new();
    s.for_each_candidate(|t| cands.push(t));
    for t in cands {
        if s.push(t).is_ok() {
            collect_subtrees(s, base, depth, k, out);
            s.pop();
        }
    }
}

fn search(s: &mut SearchState, emit: &mut dyn FnMut(TriangleSet)) {
    if s.is_terminal() {
        if s.used as usize == s.n {
            if let Some(c) = finalize_candidate(s) {
                emit(c);
            }
        }
        return;
    }
    let mut cands = Vec::with_capacity(16);
    s.for_each_candidate(|t| cands.push(t));
    for t in cands {
        if s.push(t).is_ok() {
            search(s, emit);
            s.pop();
        }
    }
}

/// Runs the search and, unless `emit_duplicates` is set, removes duplicates
/// up to relabeling. Deduplicated output holds canonical forms ordered by
/// [`classify::catalog_order`].
pub fn enumerate(config: &EnumerationConfig) -> Result<Vec<TriangleSet>> {
    let e = Enumerator::new(config.clone())?;
    let raw = e.candidates();
    if config.emit_duplicates {
        return Ok(raw);
    }
    Ok(enumerate_from(raw, config.order).into_iter().map(|r| r.complex).collect())
}

fn enumerate_from(raw: Vec<TriangleSet>, order: Order) -> Vec<SurfaceRecord> {
    let mut records = classify::deduplicate(raw);
    classify::catalog_order(&mut records, order);
    records
}

/// Enumeration followed by deduplication, returning the full records.
pub fn enumerate_records(config: &EnumerationConfig) -> Result<Vec<SurfaceRecord>> {
    let e = Enumerator::new(config.clone())?;
    Ok(enumerate_from(e.candidates(), config.order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(a: u8, b: u8, c: u8) -> Triangle {
        Triangle::new(a, b, c).unwrap()
    }

    fn tris(list: &[[u8; 3]]) -> Vec<Triangle> {
        list.iter().map(|&[a, b, c]| tri(a, b, c)).collect()
    }

    #[test]
    fn segments() {
        assert_eq!(beginning_segment(3).unwrap().triangles, tris(&[[1, 2, 3], [1, 2, 4], [1, 3, 4]]));
        assert_eq!(
            beginning_segment(4).unwrap().triangles,
            tris(&[[1, 2, 3], [1, 2, 4], [1, 3, 5], [1, 4, 5]])
        );
        let b5 = beginning_segment(5).unwrap();
        assert_eq!(b5.triangles, tris(&[[1, 2, 3], [1, 2, 4], [1, 3, 5], [1, 4, 6], [1, 5, 6]]));
        assert!(beginning_segment(2).is_err());
        for k in 3..=12 {
            let seg = beginning_segment(k).unwrap();
            assert_eq!(seg.triangles.len(), k);
            let set = TriangleSet::new(k + 1, seg.triangles).unwrap();
            let link = crate::complex::vertex_link(&set, 1);
            assert!(crate::complex::link_is_single_circle(&link));
            assert_eq!(link.vertices(), (2..=(k as u8 + 1)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn segment_five_link_is_the_expected_cycle() {
        // 3-2-4-6-5-3
        let set = TriangleSet::new(6, beginning_segment(5).unwrap().triangles).unwrap();
        let link = crate::complex::vertex_link(&set, 1);
        let mut expected = vec![
            crate::Edge::new(2, 3).unwrap(),
            crate::Edge::new(2, 4).unwrap(),
            crate::Edge::new(4, 6).unwrap(),
            crate::Edge::new(5, 6).unwrap(),
            crate::Edge::new(3, 5).unwrap(),
        ];
        expected.sort();
        assert_eq!(link.edges, expected);
    }

    #[test]
    fn overflow_rule() {
        let b3 = SearchState::from_triangles(5, Order::Lex, 3, &beginning_segment(3).unwrap().triangles).unwrap();
        assert!(prune_edge_overflow(&b3, &tri(1, 2, 5)));
        assert!(!prune_edge_overflow(&b3, &tri(2, 3, 4)));
        let empty = SearchState::new(5, Order::Lex, 3).unwrap();
        assert!(!prune_edge_overflow(&empty, &tri(1, 2, 3)));
    }

    #[test]
    fn anomaly_rule() {
        let s = SearchState::from_triangles(6, Order::Lex, 3, &tris(&[[1, 2, 3], [1, 2, 4], [1, 3, 4], [1, 5, 6]]))
            .unwrap();
        assert!(prune_link_anomaly(&s));
        let s = SearchState::from_triangles(6, Order::Lex, 3, &tris(&[[1, 2, 3], [1, 2, 4], [1, 3, 4]])).unwrap();
        assert!(!prune_link_anomaly(&s));
        let s = SearchState::from_triangles(6, Order::Lex, 3, &tris(&[[1, 2, 3], [1, 2, 4], [1, 3, 5], [1, 4, 5]]))
            .unwrap();
        assert!(!prune_link_anomaly(&s));
    }

    #[test]
    fn degree_rules() {
        let mut b4 = beginning_segment(4).unwrap().triangles;
        b4.push(tri(2, 3, 4));
        let s = SearchState::from_triangles(5, Order::Lex, 4, &b4).unwrap();
        assert!(prune_degree_bounds(&s));
        // incremental engine agrees
        let mut live = SearchState::with_segment(5, Order::Lex, 4).unwrap();
        assert_eq!(live.push(tri(2, 3, 4)), Err(Prune::DegreeBound));
        assert_eq!(live.push(tri(2, 3, 5)), Err(Prune::DegreeBound));

        let s = SearchState::from_triangles(5, Order::Lex, 3, &tris(&[[1, 2, 3], [1, 2, 4], [1, 3, 4]])).unwrap();
        assert!(!prune_degree_bounds(&s));

        let b6 = beginning_segment(6).unwrap().triangles;
        let s = SearchState::from_triangles(7, Order::MixedLex, 5, &b6).unwrap();
        assert!(prune_degree_bounds(&s));
        let s = SearchState::from_triangles(7, Order::MixedLex, 6, &b6).unwrap();
        assert!(!prune_degree_bounds(&s));
    }

    #[test]
    fn symmetry_rules() {
        let b6 = beginning_segment(6).unwrap().triangles;
        let s = SearchState::from_triangles(8, Order::Lex, 6, &b6).unwrap();
        assert!(prune_symmetry_exclusions(&s, &tri(2, 3, 5)));
        let mut with236 = b6.clone();
        with236.push(tri(2, 3, 6));
        let s = SearchState::from_triangles(8, Order::Lex, 6, &with236).unwrap();
        assert!(prune_symmetry_exclusions(&s, &tri(2, 4, 3)));
        assert!(!prune_symmetry_exclusions(&s, &tri(2, 4, 5)));
        let b4 = beginning_segment(4).unwrap().triangles;
        let s = SearchState::from_triangles(6, Order::Lex, 4, &b4).unwrap();
        assert!(!prune_symmetry_exclusions(&s, &tri(2, 3, 5)));
    }

    #[test]
    fn candidate_finalization() {
        let mut b3 = beginning_segment(3).unwrap().triangles;
        b3.push(tri(2, 3, 4));
        let s = SearchState::from_triangles(5, Order::Lex, 3, &b3).unwrap();
        assert!(is_closed(s.sums()));
        assert_eq!(finalize_candidate(&s), None);

        let mut b3 = beginning_segment(3).unwrap().triangles;
        b3.extend(tris(&[[2, 3, 5], [2, 4, 5], [3, 4, 5]]));
        let s = SearchState::from_triangles(5, Order::Lex, 3, &b3).unwrap();
        assert_eq!(
            finalize_candidate(&s).unwrap().to_string(),
            "1,2,3;1,2,4;1,3,4;2,3,5;2,4,5;3,4,5"
        );
    }

    #[test]
    fn push_pop_restores_state() {
        let mut s = SearchState::with_segment(7, Order::Lex, 3).unwrap();
        let snapshot = (s.sums.clone(), s.mate.clone(), s.degree.clone(), s.open_ends.clone(), s.closed.clone());
        for t in tris(&[[2, 3, 5], [2, 4, 6]]) {
            s.push(t).unwrap();
        }
        s.pop();
        s.pop();
        assert_eq!(
            (s.sums.clone(), s.mate.clone(), s.degree.clone(), s.open_ends.clone(), s.closed.clone()),
            snapshot
        );
    }

    #[test]
    fn raw_trace_for_five_vertices() {
        let e = Enumerator::new(EnumerationConfig::new(5, Order::Lex).unwrap()).unwrap();
        let mut out = Vec::new();
        e.for_each(|c| out.push(c.to_string()));
        assert_eq!(out, vec!["1,2,3;1,2,4;1,3,4;2,3,5;2,4,5;3,4,5"]);
    }

    #[test]
    fn lex_stream_is_strictly_increasing() {
        for n in 4..=8 {
            let e = Enumerator::new(EnumerationConfig::new(n, Order::Lex).unwrap()).unwrap();
            let raw = e.candidates();
            assert!(!raw.is_empty());
            assert!(raw.windows(2).all(|w| w[0] < w[1]), "n = {n}");
            let mut seq = Vec::new();
            e.for_each(|c| seq.push(c));
            assert_eq!(seq, raw);
        }
    }

    #[test]
    fn partitions_cover_the_run() {
        let cfg = EnumerationConfig::new(7, Order::MixedLex).unwrap();
        let full = Enumerator::new(cfg.clone()).unwrap().candidates();
        let mut merged = Vec::new();
        for i in 0..3 {
            let mut c = cfg.clone();
            c.partition = Some(Partition { index: i, count: 3 });
            merged.extend(Enumerator::new(c).unwrap().candidates());
        }
        let mut a = full.clone();
        a.sort();
        merged.sort();
        assert_eq!(a, merged);
    }

    #[test]
    fn partition_parsing() {
        assert_eq!("1/4".parse::<Partition>().unwrap(), Partition { index: 1, count: 4 });
        assert!("4/4".parse::<Partition>().is_err());
        assert!("x".parse::<Partition>().is_err());
        assert!(EnumerationConfig::new(3, Order::Lex).is_err());
    }
}
