//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use trisurf::complex::verify_surface;
use trisurf::realize::CoordinateAssignment;
use trisurf::{Triangle, TriangleSet};

/// Every permutation of `1..=n`, as relabeling arrays with index 0 unused.
pub fn permutations(n: usize) -> Vec<Vec<u8>> {
    fn go(prefix: &mut Vec<u8>, left: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut vec![0], &mut (1..=n as u8).collect(), &mut out);
    out
}

pub fn brute_canonical(c: &TriangleSet, perms: &[Vec<u8>]) -> TriangleSet {
    perms.iter().map(|p| c.relabel(p)).min().unwrap()
}

pub fn brute_automorphisms(c: &TriangleSet, perms: &[Vec<u8>]) -> u64 {
    perms.iter().filter(|p| c.relabel(p) == *c).count() as u64
}

pub fn brute_isomorphic(a: &TriangleSet, b: &TriangleSet, perms: &[Vec<u8>]) -> bool {
    a.n() == b.n() && a.len() == b.len() && perms.iter().any(|p| a.relabel(p) == *b)
}

/// Tries every choice of orientation per triangle and accepts if some choice
/// uses each directed edge at most once.
pub fn brute_orientable(c: &TriangleSet) -> bool {
    let tris: Vec<[u8; 3]> = c.triangles().iter().map(|t| t.vertices()).collect();
    (0u64..1 << tris.len()).any(|mask| {
        let mut seen = HashSet::new();
        tris.iter().enumerate().all(|(i, &[a, b, x])| {
            let cyc = if mask >> i & 1 == 0 { [a, b, x] } else { [a, x, b] };
            (0..3).all(|j| seen.insert((cyc[j], cyc[(j + 1) % 3])))
        })
    })
}

/// All closed surfaces on exactly `1..=n`, found by walking every triangle
/// subset whose edges are each used 0 or 2 times, filtering by
/// `verify_surface` and the triangle counts allowed by Euler's formula, and
/// collapsing relabelings. Returns one lex-minimal representative per class.
pub fn subset_filter_surfaces(n: usize) -> BTreeSet<TriangleSet> {
    let mut all = Vec::new();
    for a in 1..=n as u8 {
        for b in a + 1..=n as u8 {
            for c in b + 1..=n as u8 {
                all.push(Triangle::new(a, b, c).unwrap());
            }
        }
    }
    let edge = |u: u8, v: u8| (u as usize - 1) * n + v as usize - 1;
    let tri_edges: Vec<[usize; 3]> = all
        .iter()
        .map(|t| {
            let [a, b, c] = t.vertices();
            [edge(a, b), edge(a, c), edge(b, c)]
        })
        .collect();
    let mut last = vec![0usize; n * n];
    for (i, es) in tri_edges.iter().enumerate() {
        for &e in es {
            last[e] = i;
        }
    }
    // f2 = 2(n - chi) with chi <= 2 and f1 = 3 f2 / 2 <= n(n-1)/2
    let max_f2 = n * (n - 1) / 3;
    let sizes: Vec<usize> = (2 * (n - 2)..=max_f2).filter(|s| s % 2 == 0).collect();

    struct Walk<'a> {
        tri_edges: &'a [[usize; 3]],
        last: &'a [usize],
        count: Vec<u8>,
        chosen: Vec<usize>,
        max_f2: usize,
        found: Vec<Vec<usize>>,
    }
    impl Walk<'_> {
        fn go(&mut self, i: usize) {
            if i == self.tri_edges.len() {
                if self.count.iter().all(|&c| c == 0 || c == 2) {
                    self.found.push(self.chosen.clone());
                }
                return;
            }
            // an edge used once whose last chance has passed can never close
            if i > 0 {
                for &e in &self.tri_edges[i - 1] {
                    if self.count[e] == 1 && self.last[e] < i {
                        return;
                    }
                }
            }
            let es = self.tri_edges[i];
            if self.chosen.len() < self.max_f2 && es.iter().all(|&e| self.count[e] < 2) {
                for &e in &es {
                    self.count[e] += 1;
                }
                self.chosen.push(i);
                self.go(i + 1);
                self.chosen.pop();
                for &e in &es {
                    self.count[e] -= 1;
                }
            }
            self.go(i + 1);
        }
    }
    let mut w = Walk {
        tri_edges: &tri_edges,
        last: &last,
        count: vec![0; n * n],
        chosen: Vec::new(),
        max_f2,
        found: Vec::new(),
    };
    w.go(0);

    let perms = permutations(n);
    let mut seen: HashSet<TriangleSet> = HashSet::new();
    let mut classes = BTreeSet::new();
    for set in w.found {
        if !sizes.contains(&set.len()) {
            continue;
        }
        let c = TriangleSet::new(n, set.iter().map(|&i| all[i]).collect()).unwrap();
        if seen.contains(&c) || !verify_surface(&c) {
            continue;
        }
        let orbit: Vec<TriangleSet> = perms.iter().map(|p| c.relabel(p)).collect();
        classes.insert(orbit.iter().min().unwrap().clone());
        seen.extend(orbit);
    }
    classes
}

type Q = BigRational;

fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn sub(a: &[Q; 3], b: &[Q; 3]) -> [Q; 3] {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn det(u: &[Q; 3], v: &[Q; 3], w: &[Q; 3]) -> Q {
    &u[0] * (&v[1] * &w[2] - &v[2] * &w[1]) - &u[1] * (&v[0] * &w[2] - &v[2] * &w[0])
        + &u[2] * (&v[0] * &w[1] - &v[1] * &w[0])
}

/// Whether the closed segment `pq` meets the closed triangle `abc`, by
/// solving `p + s(q - p) = a + u(b - a) + v(c - a)` in rationals. Segments
/// parallel to the plane count as meeting only if they lie in it.
fn segment_meets_triangle(a: &[Q; 3], b: &[Q; 3], c: &[Q; 3], p: &[Q; 3], qq: &[Q; 3]) -> bool {
    let d = sub(qq, p);
    let e1 = sub(b, a);
    let e2 = sub(c, a);
    let neg = |x: &[Q; 3]| [-x[0].clone(), -x[1].clone(), -x[2].clone()];
    let (m1, m2) = (neg(&e1), neg(&e2));
    let rhs = sub(a, p);
    let dd = det(&d, &m1, &m2);
    if dd.is_zero() {
        return det(&e1, &e2, &sub(p, a)).is_zero();
    }
    let s = det(&rhs, &m1, &m2) / &dd;
    let u = det(&d, &rhs, &m2) / &dd;
    let v = det(&d, &m1, &rhs) / &dd;
    let zero = Q::zero();
    s >= zero && s <= Q::one() && u >= zero && v >= zero && &u + &v <= Q::one()
}

/// Independent check that straight triangles at `coords` form an embedding
/// in general position: no vertex lies on the plane of a triangle not
/// containing it, and no edge meets a vertex-disjoint triangle.
pub fn rational_embedding(c: &TriangleSet, coords: &CoordinateAssignment) -> bool {
    let pt = |v: u8| {
        let p = coords.get(v);
        [q(p.x), q(p.y), q(p.z)]
    };
    let mut edges = BTreeSet::new();
    for t in c.triangles() {
        let [a, b, x] = t.vertices();
        edges.extend([(a, b), (a, x), (b, x)]);
    }
    for t in c.triangles() {
        let [a, b, x] = t.vertices();
        let (pa, pb, px) = (pt(a), pt(b), pt(x));
        let (e1, e2) = (sub(&pb, &pa), sub(&px, &pa));
        for w in 1..=c.n() as u8 {
            if !t.contains(w) && det(&e1, &e2, &sub(&pt(w), &pa)).is_zero() {
                return false;
            }
        }
        for &(u, w) in &edges {
            if t.contains(u) || t.contains(w) {
                continue;
            }
            if segment_meets_triangle(&pa, &pb, &px, &pt(u), &pt(w)) {
                return false;
            }
        }
    }
    true
}

pub fn moebius_torus() -> TriangleSet {
    TriangleSet::from_triples(
        7,
        &[
            [1, 2, 3], [1, 4, 5], [1, 5, 6], [3, 4, 5], [1, 6, 7], [4, 6, 7], [2, 4, 7],
            [1, 2, 4], [2, 3, 6], [2, 5, 6], [3, 4, 6], [2, 5, 7], [3, 5, 7], [1, 3, 7],
        ],
    )
    .unwrap()
}

pub const CSASZAR: &str = "1 3 -3 0\n2 -3 3 0\n3 -3 -3 1\n4 3 3 1\n5 -1 -2 3\n6 1 2 3\n7 0 0 15\n";
