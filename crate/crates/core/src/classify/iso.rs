//! Simplicial isomorphisms between triangulated surfaces.
//!
//! Fix one ordered triangle of the source. Once its image is chosen, the map
//! is forced: crossing an edge `pq` from a triangle `pqr` leads to the unique
//! other triangle `pqr'`, whose apex must go to the apex of the other
//! triangle on the image edge. One attempt is therefore linear in the number
//! of triangles, and trying every ordered image triangle finds every
//! isomorphism.

use crate::complex::{num_edges, pair_index, Triangle, TriangleSet, VertexId};

/// Edge-to-apex table of a closed surface.
#[derive(Clone, Debug)]
pub(crate) struct SurfaceIndex {
    pub n: usize,
    pub triangles: Vec<Triangle>,
    /// For edge index `e`, the apexes of the (at most two) triangles on it.
    apex: Vec<[u8; 2]>,
    pub degree: Vec<u8>,
    /// relabeling-invariant vertex colors, see [`SurfaceIndex::refine`]
    color: Vec<u64>,
    /// flag whose color triple is rarest, used as the source of every map
    anchor: [u8; 3],
}

impl SurfaceIndex {
    pub fn new(c: &TriangleSet) -> Self {
        let n = c.n();
        let mut apex = vec![[0u8; 2]; num_edges(n)];
        let mut degree = vec![0u8; n + 1];
        for t in c.triangles() {
            let [a, b, x] = t.vertices();
            for (p, q, r) in [(a, b, x), (a, x, b), (b, x, a)] {
                let slot = &mut apex[pair_index(p as usize, q as usize, n)];
                if slot[0] == 0 {
                    slot[0] = r;
                } else {
                    slot[1] = r;
                }
            }
        }
        for (i, s) in apex.iter().enumerate() {
            if s[0] != 0 {
                let e = crate::complex::edge_from_index(i, n).expect("index in range");
                degree[e.u as usize] += 1;
                degree[e.v as usize] += 1;
            }
        }
        let mut idx = SurfaceIndex {
            n,
            triangles: c.triangles().to_vec(),
            apex,
            degree,
            color: Vec::new(),
            anchor: [0; 3],
        };
        if !idx.triangles.is_empty() {
            idx.refine();
            idx.anchor = anchor_flag(&idx);
        }
        idx
    }

    /// Color refinement along vertex links: starting from degrees, a vertex
    /// is recolored by its color and the cyclic sequence of its neighbors'
    /// colors, read from the rotation or reflection that is smallest.
    fn refine(&mut self) {
        let n = self.n;
        let cycles: Vec<Vec<u8>> = (0..=n as u8)
            .map(|v| if v == 0 || self.degree[v as usize] == 0 { Vec::new() } else { self.link_cycle(v) })
            .collect();
        let mut color: Vec<u64> = self.degree.iter().map(|&d| d as u64).collect();
        let mut next = vec![0u64; n + 1];
        let mut fwd = Vec::new();
        let mut rev = Vec::new();
        for _ in 0..3 {
            for v in 1..=n {
                let cyc = &cycles[v];
                let d = cyc.len();
                if d == 0 {
                    continue;
                }
                // both directions, doubled so every rotation is a window
                fwd.clear();
                fwd.extend(cyc.iter().chain(cyc).map(|&w| color[w as usize]));
                rev.clear();
                rev.extend(fwd.iter().rev());
                let mut best = &fwd[0..d];
                for s in 0..d {
                    for w in [&fwd[s..s + d], &rev[s..s + d]] {
                        if w < best {
                            best = w;
                        }
                    }
                }
                next[v] = best.iter().fold(mix(0x51_7cc1_b727_220a, color[v]), |h, &x| mix(h, x));
            }
            std::mem::swap(&mut color, &mut next);
        }
        self.color = color;
    }

    /// Hash of the sorted vertex colors.
    pub fn signature(&self) -> u64 {
        let mut all = self.color[1..].to_vec();
        all.sort_unstable();
        all.into_iter().fold(self.n as u64, mix)
    }

    #[inline]
    pub fn apexes(&self, p: u8, q: u8) -> Option<[u8; 2]> {
        if p == q {
            return None;
        }
        let (u, v) = if p < q { (p, q) } else { (q, p) };
        let a = self.apex[pair_index(u as usize, v as usize, self.n)];
        (a[0] != 0).then_some(a)
    }

    /// Neighbors of `x` in cyclic order around it, starting at its smallest
    /// neighbor.
    pub fn link_cycle(&self, x: u8) -> Vec<u8> {
        let d = self.degree[x as usize] as usize;
        let start = (1..=self.n as u8)
            .find(|&y| self.apexes(x, y).is_some())
            .expect("vertex is used");
        let mut cycle = Vec::with_capacity(d);
        cycle.push(start);
        let mut prev = start;
        let mut cur = self.apexes(x, start).expect("edge exists")[0];
        while cur != start && cycle.len() <= d {
            cycle.push(cur);
            let ap = self.apexes(x, cur).expect("edge exists");
            let next = if ap[0] == prev { ap[1] } else { ap[0] };
            prev = cur;
            cur = next;
        }
        cycle
    }

    /// Ordered triangles `(x, y, z)` of the surface.
    pub fn flags(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.triangles.iter().flat_map(|t| {
            let [a, b, c] = t.vertices();
            [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
        })
    }
}

/// Tries to extend `from -> to` to an isomorphism `src -> dst`. Returns the
/// vertex map (index 0 unused) on success.
pub(crate) fn extend(src: &SurfaceIndex, dst: &SurfaceIndex, from: [u8; 3], to: [u8; 3]) -> Option<Vec<VertexId>> {
    let n = src.n;
    if dst.n != n || src.triangles.len() != dst.triangles.len() {
        return None;
    }
    let mut map = vec![0u8; n + 1];
    let mut taken = vec![false; n + 1];
    for i in 0..3 {
        if src.color[from[i] as usize] != dst.color[to[i] as usize] {
            return None;
        }
        map[from[i] as usize] = to[i];
        taken[to[i] as usize] = true;
    }
    let mut queue: Vec<[u8; 3]> = vec![from];
    let mut seen_edge = vec![false; num_edges(n)];
    let mut head = 0;
    while head < queue.len() {
        let [a, b, c] = queue[head];
        head += 1;
        for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
            let (u, v) = if p < q { (p, q) } else { (q, p) };
            let ei = pair_index(u as usize, v as usize, n);
            if seen_edge[ei] {
                continue;
            }
            seen_edge[ei] = true;
            let src_ap = src.apexes(p, q)?;
            let other = if src_ap[0] == r { src_ap[1] } else { src_ap[0] };
            if other == 0 {
                return None;
            }
            let (mp, mq, mr) = (map[p as usize], map[q as usize], map[r as usize]);
            let dst_ap = dst.apexes(mp, mq)?;
            let image_other = if dst_ap[0] == mr {
                dst_ap[1]
            } else if dst_ap[1] == mr {
                dst_ap[0]
            } else {
                return None;
            };
            if image_other == 0 {
                return None;
            }
            let cur = map[other as usize];
            if cur == 0 {
                if taken[image_other as usize]
                    || src.color[other as usize] != dst.color[image_other as usize]
                {
                    return None;
                }
                map[other as usize] = image_other;
                taken[image_other as usize] = true;
            } else if cur != image_other {
                return None;
            }
            queue.push([p, q, other]);
        }
    }
    if map[1..].contains(&0) {
        return None;
    }
    Some(map)
}

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(29) ^ (h >> 17)
}

/// A source flag whose vertex colors are as rare as possible in `src`.
fn anchor_flag(src: &SurfaceIndex) -> [u8; 3] {
    let mut keyed: Vec<([u64; 3], [u8; 3])> = src
        .flags()
        .map(|f| (f.map(|v| src.color[v as usize]), f))
        .collect();
    keyed.sort_unstable();
    let mut best = (usize::MAX, keyed[0].1);
    for run in keyed.chunk_by(|x, y| x.0 == y.0) {
        if run.len() < best.0 {
            best = (run.len(), run[0].1);
        }
    }
    best.1
}

/// Some isomorphism `a -> b`, if one exists.
pub(crate) fn find_isomorphism(a: &SurfaceIndex, b: &SurfaceIndex) -> Option<Vec<VertexId>> {
    if a.n != b.n || a.triangles.len() != b.triangles.len() || a.triangles.is_empty() {
        return None;
    }
    let from = a.anchor;
    let want = from.map(|v| a.color[v as usize]);
    b.flags()
        .filter(|f| f.map(|v| b.color[v as usize]) == want)
        .find_map(|to| extend(a, b, from, to))
}

/// Number of vertex permutations mapping the surface onto itself.
pub fn automorphism_group_order(c: &TriangleSet) -> u64 {
    let idx = SurfaceIndex::new(c);
    if idx.triangles.is_empty() {
        return 1;
    }
    let from = idx.anchor;
    let want = from.map(|v| idx.color[v as usize]);
    idx.flags()
        .filter(|f| f.map(|v| idx.color[v as usize]) == want)
        .filter(|&to| extend(&idx, &idx, from, to).is_some())
        .count() as u64
}
