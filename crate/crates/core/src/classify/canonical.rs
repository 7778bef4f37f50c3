//! Lexicographically smallest relabeling of a surface.
//!
//! The sorted triangle list of a labeled surface splits into blocks: block
//! `m` holds the triangles whose smallest label is `m`, that is, the link
//! edges of `m` with both ends above `m`. Comparing two lists block by block
//! decides the order, with one twist: if block `m` of one list is a proper
//! prefix of block `m` of the other, the longer one is smaller (its next
//! entry still starts with `m`).
//!
//! In a minimal list every label first appears after all smaller labels, so
//! the vertices labeled by the end of block `m` are exactly `1..=L` for some
//! `L`, and block `m` only depends on how the unlabeled neighbors of vertex
//! `m` receive `L+1, L+2, ...`. Vertex 1 has minimum degree `k` and its link
//! carries the pattern of the beginning segment `B_k`. A beam keeps every
//! partial labeling whose blocks so far are minimal.

use std::cmp::Ordering;

use super::iso::SurfaceIndex;
use crate::complex::{TriangleSet, VertexId};

#[derive(Clone)]
struct Partial {
    /// label of each vertex (0 = none)
    label: Vec<u8>,
    /// vertex carrying each label
    vertex: Vec<u8>,
    used: u8,
}

/// Labels `2..=k+1` around the link of vertex 1 in `B_k`: odd labels up,
/// then even labels down.
pub(crate) fn segment_link_pattern(k: usize) -> Vec<u8> {
    let top = k as u8 + 1;
    let mut p = vec![2u8];
    p.extend((3..=top).step_by(2));
    let max_even = if top % 2 == 0 { top } else { top - 1 };
    p.extend((4..=max_even).rev().step_by(2));
    p
}

fn cmp_block(a: &[(u8, u8)], b: &[(u8, u8)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x.cmp(y);
        }
    }
    b.len().cmp(&a.len())
}

fn block(cycle: &[u8], label: &[u8], m: u8, out: &mut Vec<(u8, u8)>) {
    out.clear();
    for i in 0..cycle.len() {
        let a = label[cycle[i] as usize];
        let b = label[cycle[(i + 1) % cycle.len()] as usize];
        if a > m && b > m {
            out.push(if a < b { (a, b) } else { (b, a) });
        }
    }
    out.sort_unstable();
}

/// Heap's algorithm over `items`, calling `f` after every arrangement.
fn permutations(items: &mut [u8], mut f: impl FnMut(&[u8])) {
    let r = items.len();
    let mut c = vec![0usize; r];
    f(items);
    let mut i = 1;
    while i < r {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// A relabeling (index 0 unused) taking `c` to its canonical form.
pub fn canonical_labeling(c: &TriangleSet) -> Vec<VertexId> {
    let idx = SurfaceIndex::new(c);
    let n = idx.n;
    if c.is_empty() {
        return (0..=n as u8).collect();
    }
    let cycles: Vec<Vec<u8>> = (0..=n as u8)
        .map(|v| if v == 0 || idx.degree[v as usize] == 0 { Vec::new() } else { idx.link_cycle(v) })
        .collect();
    let k = (1..=n).map(|v| idx.degree[v]).filter(|&d| d > 0).min().unwrap_or(0) as usize;
    let pattern = segment_link_pattern(k);

    let mut beam = Vec::new();
    for v in 1..=n {
        if idx.degree[v] as usize != k {
            continue;
        }
        let cyc = &cycles[v];
        for start in 0..k {
            for dir in [1, k - 1] {
                let mut p = Partial {
                    label: vec![0; n + 1],
                    vertex: vec![0; n + 1],
                    used: k as u8 + 1,
                };
                p.label[v] = 1;
                p.vertex[1] = v as u8;
                for (j, &l) in pattern.iter().enumerate() {
                    let w = cyc[(start + j * dir) % k];
                    p.label[w as usize] = l;
                    p.vertex[l as usize] = w;
                }
                beam.push(p);
            }
        }
    }

    let mut best: Vec<(u8, u8)> = Vec::new();
    let mut scratch = Vec::new();
    let mut label = Vec::new();
    for m in 2..=n as u8 {
        let mut next: Vec<Partial> = Vec::new();
        let mut have_best = false;
        for p in &beam {
            let x = p.vertex[m as usize];
            assert!(x != 0, "surface is connected");
            let cyc = &cycles[x as usize];
            let mut fresh: Vec<u8> = cyc.iter().copied().filter(|&w| p.label[w as usize] == 0).collect();
            fresh.sort_unstable();
            label.clone_from(&p.label);
            permutations(&mut fresh, |arr| {
                for (i, &w) in arr.iter().enumerate() {
                    label[w as usize] = p.used + 1 + i as u8;
                }
                block(cyc, &label, m, &mut scratch);
                let ord = if have_best { cmp_block(&scratch, &best) } else { Ordering::Less };
                if ord == Ordering::Greater {
                    return;
                }
                if ord == Ordering::Less {
                    best.clone_from(&scratch);
                    have_best = true;
                    next.clear();
                }
                let mut q = p.clone();
                for (i, &w) in arr.iter().enumerate() {
                    let l = p.used + 1 + i as u8;
                    q.label[w as usize] = l;
                    q.vertex[l as usize] = w;
                }
                q.used += arr.len() as u8;
                next.push(q);
            });
        }
        beam = next;
    }
    beam.swap_remove(0).label
}

/// The lexicographically smallest relabeled copy of a connected closed
/// surface.
pub fn canonical_form(c: &TriangleSet) -> TriangleSet {
    c.relabel(&canonical_labeling(c))
}
