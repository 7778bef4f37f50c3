//! Deduplication up to relabeling, topological type and symmetry order.

mod canonical;
mod determinant;
mod iso;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use canonical::{canonical_form, canonical_labeling};
pub use determinant::{as_determinant, determinant, incidence_gram};
pub use iso::automorphism_group_order;

use crate::complex::{euler_characteristic, f_vector, TriangleSet, VertexId};
use crate::enumerate::Order;
use crate::error::{invalid, Result};
use iso::SurfaceIndex;

/// Number of neighbors of each vertex, sorted ascending.
pub fn degree_sequence(c: &TriangleSet) -> Vec<u32> {
    let mut d: Vec<u32> = c.neighbors()[1..].iter().map(|l| l.len() as u32).collect();
    d.sort_unstable();
    d
}

/// True iff a vertex bijection maps the triangles of `a` onto those of `b`.
pub fn are_isomorphic(a: &TriangleSet, b: &TriangleSet) -> bool {
    if a.n() != b.n() || a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    if InvariantKey::of(a) != InvariantKey::of(b) {
        return false;
    }
    isomorphism(a, b).is_some()
}

/// Some vertex map (index 0 unused) with `a.relabel(map) == b`.
pub fn isomorphism(a: &TriangleSet, b: &TriangleSet) -> Option<Vec<VertexId>> {
    iso::find_isomorphism(&SurfaceIndex::new(a), &SurfaceIndex::new(b))
}

/// Whether the triangles can be oriented coherently.
pub fn orientability(c: &TriangleSet) -> bool {
    coherent_orientation(c).is_some()
}

/// A coherent orientation, one ordered triple per triangle, if the surface
/// is orientable. Orientations are propagated from the first triangle across
/// shared edges; a conflict means the surface is non-orientable.
pub fn coherent_orientation(c: &TriangleSet) -> Option<Vec<[VertexId; 3]>> {
    let tris = c.triangles();
    // edge -> (triangle, direction of the edge in its positive boundary)
    let mut by_edge: HashMap<(u8, u8), Vec<(usize, i8)>> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        let [a, b, x] = t.vertices();
        by_edge.entry((a, b)).or_default().push((i, 1));
        by_edge.entry((b, x)).or_default().push((i, 1));
        by_edge.entry((a, x)).or_default().push((i, -1));
    }
    let mut sign = vec![0i8; tris.len()];
    for seed in 0..tris.len() {
        if sign[seed] != 0 {
            continue;
        }
        sign[seed] = 1;
        let mut stack = vec![seed];
        while let Some(i) = stack.pop() {
            let [a, b, x] = tris[i].vertices();
            for e in [(a, b), (b, x), (a, x)] {
                let list = &by_edge[&e];
                let mine = list.iter().find(|&&(j, _)| j == i).expect("own edge").1 * sign[i];
                for &(j, dir) in list {
                    if j == i {
                        continue;
                    }
                    let want = -mine * dir;
                    if sign[j] == 0 {
                        sign[j] = want;
                        stack.push(j);
                    } else if sign[j] != want {
                        return None;
                    }
                }
            }
        }
    }
    Some(
        tris.iter()
            .zip(&sign)
            .map(|(t, &s)| {
                let [a, b, x] = t.vertices();
                if s > 0 { [a, b, x] } else { [a, x, b] }
            })
            .collect(),
    )
}

/// Homology groups as ranks plus the `Z/2` torsion flag of `H1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homology {
    pub h0: u32,
    pub h1_rank: u32,
    pub h1_torsion: bool,
    pub h2: u32,
}

impl fmt::Display for Homology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let group = |r: u32| match r {
            0 => "0".to_string(),
            1 => "Z".to_string(),
            r => format!("Z^{r}"),
        };
        let h1 = match (self.h1_rank, self.h1_torsion) {
            (0, true) => "Z2".to_string(),
            (r, true) => format!("{}+Z2", group(r)),
            (r, false) => group(r),
        };
        write!(f, "({}, {}, {})", group(self.h0), h1, group(self.h2))
    }
}

/// Closed surface up to homeomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopologicalType {
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub genus: u32,
}

impl TopologicalType {
    pub fn homology(&self) -> Homology {
        if self.orientable {
            Homology { h0: 1, h1_rank: 2 * self.genus, h1_torsion: false, h2: 1 }
        } else {
            Homology { h0: 1, h1_rank: self.genus - 1, h1_torsion: true, h2: 0 }
        }
    }

    /// `S2`, `T2`, `RP2`, `K2`, otherwise `M(g,+)` / `M(g,-)`.
    pub fn name(&self) -> String {
        match (self.orientable, self.genus) {
            (true, 0) => "S2".into(),
            (true, 1) => "T2".into(),
            (false, 1) => "RP2".into(),
            (false, 2) => "K2".into(),
            (true, g) => format!("M({g},+)"),
            (false, g) => format!("M({g},-)"),
        }
    }

    /// File-name friendly form of [`name`](Self::name), e.g. `M3n`.
    pub fn slug(&self) -> String {
        match (self.orientable, self.genus) {
            (true, 0 | 1) | (false, 1 | 2) => self.name(),
            (true, g) => format!("M{g}p"),
            (false, g) => format!("M{g}n"),
        }
    }

    /// Inverse of [`name`](Self::name) and [`slug`](Self::slug).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || invalid(format!("unknown surface type `{s}`"));
        let (g, orientable) = match s {
            "S2" => (0, true),
            "T2" => (1, true),
            "RP2" => (1, false),
            "K2" => (2, false),
            _ => {
                if let Some(body) = s.strip_prefix("M(").and_then(|r| r.strip_suffix(')')) {
                    let (g, o) = body.split_once(',').ok_or_else(bad)?;
                    let o = match o {
                        "+" => true,
                        "-" => false,
                        _ => return Err(bad()),
                    };
                    (g.parse().map_err(|_| bad())?, o)
                } else if let Some(g) = s.strip_prefix('M').and_then(|r| r.strip_suffix('p')) {
                    (g.parse().map_err(|_| bad())?, true)
                } else if let Some(g) = s.strip_prefix('M').and_then(|r| r.strip_suffix('n')) {
                    (g.parse().map_err(|_| bad())?, false)
                } else {
                    return Err(bad());
                }
            }
        };
        if !orientable && g == 0 {
            return Err(bad());
        }
        let chi = if orientable { 2 - 2 * g as i64 } else { 2 - g as i64 };
        topological_type(chi, orientable)
    }

    /// Sort key: orientable surfaces first, then by genus.
    pub fn sort_key(&self) -> (bool, u32) {
        (!self.orientable, self.genus)
    }
}

impl fmt::Display for TopologicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Type of the closed surface with the given Euler characteristic and
/// orientability.
pub fn topological_type(chi: i64, orientable: bool) -> Result<TopologicalType> {
    let genus = if orientable {
        if chi > 2 || chi % 2 != 0 {
            return Err(invalid(format!("no orientable surface has Euler characteristic {chi}")));
        }
        (2 - chi) / 2
    } else {
        if chi > 1 {
            return Err(invalid(format!("no non-orientable surface has Euler characteristic {chi}")));
        }
        2 - chi
    };
    Ok(TopologicalType {
        euler_characteristic: chi,
        orientable,
        genus: genus as u32,
    })
}

/// Type of a verified surface.
pub fn classify_surface(c: &TriangleSet) -> TopologicalType {
    topological_type(euler_characteristic(c), orientability(c)).expect("verified surface has a valid type")
}

/// Fewest vertices a triangulation of the surface can have.
pub fn heawood_min_vertices(t: &TopologicalType) -> usize {
    let disc = 49 - 24 * t.euler_characteristic;
    let mut n = 4usize;
    loop {
        let s = 2 * n as i64 - 7;
        if s >= 0 && s * s >= disc {
            break;
        }
        n += 1;
    }
    let exceptional = matches!((t.orientable, t.genus), (true, 2) | (false, 2) | (false, 3));
    n + exceptional as usize
}

/// Whether the 1-skeleton is the complete graph.
pub fn is_neighborly(c: &TriangleSet) -> bool {
    let n = c.n();
    let (_, f1, _) = f_vector(c);
    let neighborly = f1 == n * (n - 1) / 2;
    if neighborly && orientability(c) {
        let g = classify_surface(c).genus as usize;
        debug_assert_eq!(12 * g, (n - 3) * (n - 4));
    }
    neighborly
}

/// Relabeling-invariant bucket key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InvariantKey {
    pub f_vector: (usize, usize, usize),
    pub degree_sequence: Vec<u32>,
    #[serde(with = "bigint_string")]
    pub as_determinant: BigInt,
}

impl InvariantKey {
    pub fn of(c: &TriangleSet) -> Self {
        InvariantKey {
            f_vector: f_vector(c),
            degree_sequence: degree_sequence(c),
            as_determinant: as_determinant(c),
        }
    }
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// One equivalence class of surfaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceRecord {
    /// canonical representative
    pub complex: TriangleSet,
    pub key: InvariantKey,
    #[serde(rename = "type")]
    pub topology: TopologicalType,
    pub automorphism_order: u64,
    pub neighborly: bool,
}

impl SurfaceRecord {
    /// Classifies a verified surface.
    pub fn new(c: &TriangleSet) -> Self {
        let complex = canonical_form(c);
        SurfaceRecord {
            key: InvariantKey::of(&complex),
            topology: classify_surface(&complex),
            automorphism_order: automorphism_group_order(&complex),
            neighborly: is_neighborly(&complex),
            complex,
        }
    }

    /// Largest vertex degree.
    pub fn max_degree(&self) -> u32 {
        self.key.degree_sequence.last().copied().unwrap_or(0)
    }
}

/// One record per isomorphism class, in order of first appearance. Inputs
/// are bucketed by [`InvariantKey`] (refined by a color-refinement hash over
/// vertex links) and
/// compared by explicit isomorphism tests inside each bucket.
pub fn deduplicate(input: impl IntoIterator<Item = TriangleSet>) -> Vec<SurfaceRecord> {
    deduplicate_indexed(input).into_iter().map(|(_, r)| r).collect()
}

/// Like [`deduplicate`], with the input position of each class's first
/// member.
pub fn deduplicate_indexed(input: impl IntoIterator<Item = TriangleSet>) -> Vec<(usize, SurfaceRecord)> {
    let items: Vec<TriangleSet> = input.into_iter().collect();
    let keys: Vec<InvariantKey> = items.par_iter().map(InvariantKey::of).collect();

    let refined: Vec<u64> = items.par_iter().map(|c| SurfaceIndex::new(c).signature()).collect();
    let mut buckets: HashMap<(&InvariantKey, u64), Vec<usize>> = HashMap::new();
    for (i, k) in keys.iter().enumerate() {
        buckets.entry((k, refined[i])).or_default().push(i);
    }
    let buckets: Vec<Vec<usize>> = buckets.into_values().collect();

    let mut reps: Vec<usize> = buckets
        .par_iter()
        .flat_map_iter(|members| {
            let mut reps: Vec<(usize, SurfaceIndex)> = Vec::new();
            for &i in members {
                let idx = SurfaceIndex::new(&items[i]);
                if !reps.iter().any(|(_, r)| iso::find_isomorphism(&idx, r).is_some()) {
                    reps.push((i, idx));
                }
            }
            reps.into_iter().map(|(i, _)| i)
        })
        .collect();
    reps.sort_unstable();

    reps.par_iter()
        .map(|&i| {
            let complex = canonical_form(&items[i]);
            let record = SurfaceRecord {
                topology: classify_surface(&complex),
                automorphism_order: automorphism_group_order(&complex),
                neighborly: is_neighborly(&complex),
                key: keys[i].clone(),
                complex,
            };
            (i, record)
        })
        .collect()
}

/// Catalog order: by canonical form for [`Order::Lex`]; by maximum degree
/// (descending) and then canonical form for [`Order::MixedLex`].
pub fn catalog_order(records: &mut [SurfaceRecord], order: Order) {
    match order {
        Order::Lex => records.sort_by(|a, b| a.complex.cmp(&b.complex)),
        Order::MixedLex => records.sort_by(|a, b| {
            b.max_degree()
                .cmp(&a.max_degree())
                .then_with(|| a.complex.cmp(&b.complex))
        }),
    }
}

/// Per-type counts, orientable types first.
pub fn type_counts(records: &[SurfaceRecord]) -> Vec<(TopologicalType, usize)> {
    let mut counts: Vec<(TopologicalType, usize)> = Vec::new();
    for r in records {
        match counts.iter_mut().find(|(t, _)| *t == r.topology) {
            Some((_, c)) => *c += 1,
            None => counts.push((r.topology, 1)),
        }
    }
    counts.sort_by_key(|(t, _)| t.sort_key());
    counts
}
