//! Random geometric realization of orientable surfaces in 3-space.
//!
//! A labeled point set realizes a surface if no triangle meets an edge that
//! shares no vertex with it. All tests use exact integer orientation signs,
//! and a zero sign anywhere rejects the point set as not being in general
//! position.

mod io;
mod predicates;
mod shrink;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use io::{parse_coordinates, to_off, write_coordinates};
pub use predicates::{orient3d, triangle_segment_disjoint, Disjointness, Point3};
pub use shrink::shrink;

use crate::classify::orientability;
use crate::complex::TriangleSet;
use crate::error::{invalid, Result};

/// Points indexed by vertex: `points[v - 1]` is the position of vertex `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoordinateAssignment {
    pub points: Vec<Point3>,
}

impl CoordinateAssignment {
    pub fn new(points: Vec<Point3>) -> Self {
        CoordinateAssignment { points }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Position of vertex `v` (1-based).
    pub fn get(&self, v: u8) -> Point3 {
        self.points[v as usize - 1]
    }

    pub fn max_norm(&self) -> u64 {
        self.points.iter().map(Point3::max_norm).max().unwrap_or(0)
    }
}

/// Random search parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationConfig {
    /// side length `k` of the cube `{0..k-1}^3`
    pub cube_side: u64,
    pub seed: u64,
    pub max_tries: u64,
    /// perturbation radius used when recycling
    pub delta: u64,
    pub recycle: bool,
    /// RNG stream; every try of one search uses the same stream
    pub stream: u64,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        RealizationConfig {
            cube_side: 32768,
            seed: 0,
            max_tries: 1_000_000,
            delta: 8,
            recycle: false,
            stream: 0,
        }
    }
}

impl RealizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cube_side < 2 {
            return Err(invalid(format!("cube side must be at least 2, got {}", self.cube_side)));
        }
        if self.cube_side > 1 << 62 {
            return Err(invalid("cube side too large"));
        }
        if self.max_tries == 0 {
            return Err(invalid("max tries must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Fresh,
    Recycled,
    Perturbed,
    Shrunk,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Fresh => "fresh",
            Provenance::Recycled => "recycled",
            Provenance::Perturbed => "perturbed",
            Provenance::Shrunk => "shrunk",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationResult {
    pub coords: CoordinateAssignment,
    pub tries_used: u64,
    pub provenance: Provenance,
}

/// Precomputed (triangle, vertex-disjoint edge) pairs of a surface.
#[derive(Clone, Debug)]
pub struct Embedder {
    n: usize,
    triangles: Vec<[u8; 3]>,
    /// (triangle index, edge) pairs
    pairs: Vec<(usize, u8, u8)>,
}

impl Embedder {
    pub fn new(c: &TriangleSet) -> Self {
        let triangles: Vec<[u8; 3]> = c.triangles().iter().map(|t| t.vertices()).collect();
        let mut edges: Vec<(u8, u8)> = c
            .triangles()
            .iter()
            .flat_map(|t| t.edges())
            .map(|e| (e.u, e.v))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut pairs = Vec::new();
        for (i, t) in triangles.iter().enumerate() {
            for &(u, v) in &edges {
                if !t.contains(&u) && !t.contains(&v) {
                    pairs.push((i, u, v));
                }
            }
        }
        Embedder {
            n: c.n(),
            triangles,
            pairs,
        }
    }

    /// Number of (triangle, edge) tests per point set.
    pub fn num_tests(&self) -> usize {
        self.pairs.len()
    }

    /// Whether `coords` realizes the surface in general position.
    pub fn check(&self, coords: &CoordinateAssignment) -> bool {
        if coords.n() != self.n {
            return false;
        }
        let pt = |v: u8| coords.points[v as usize - 1];
        // every triangle spans a plane that avoids all other vertices
        for t in &self.triangles {
            let (a, b, c) = (pt(t[0]), pt(t[1]), pt(t[2]));
            for v in 1..=self.n as u8 {
                if !t.contains(&v) && orient3d(a, b, c, pt(v)) == 0 {
                    return false;
                }
            }
        }
        self.pairs.iter().all(|&(i, u, v)| {
            let t = self.triangles[i];
            triangle_segment_disjoint(pt(t[0]), pt(t[1]), pt(t[2]), pt(u), pt(v)) == Disjointness::Disjoint
        })
    }
}

/// Whether `coords` is a general-position straight-line embedding of `c`.
pub fn is_embedding(c: &TriangleSet, coords: &CoordinateAssignment) -> bool {
    coords.n() == c.n() && Embedder::new(c).check(coords)
}

/// ChaCha8 seeded with `seed`, switched to `stream`, positioned at word
/// `counter * 2^20`. Each address yields its own independent block.
pub fn rng_at(seed: u64, stream: u64, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos((counter as u128) << 20);
    rng
}

/// Points of try number `counter`, each coordinate uniform on
/// `{0..k-1}`, drawn x, y, z for vertices `1..=n` in turn.
pub fn random_coordinates(n: usize, config: &RealizationConfig, stream: u64, counter: u64) -> CoordinateAssignment {
    let mut rng = rng_at(config.seed, stream, counter);
    let k = config.cube_side as i64;
    let points = (0..n)
        .map(|_| Point3::new(rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k)))
        .collect();
    CoordinateAssignment { points }
}

/// Fresh random search. Try `t` uses the point set addressed by
/// `(seed, stream, t)`; the result is the smallest successful `t`, which
/// does not depend on the number of worker threads.
pub fn random_realize(c: &TriangleSet, config: &RealizationConfig) -> Result<Option<RealizationResult>> {
    config.validate()?;
    if !orientability(c) {
        return Err(invalid("closed non-orientable surfaces do not embed in 3-space"));
    }
    let emb = Embedder::new(c);
    let best = AtomicU64::new(u64::MAX);
    let workers = rayon::current_num_threads().max(1) as u64;
    (0..workers).into_par_iter().for_each(|w| {
        let mut t = w;
        while t < config.max_tries && t < best.load(Ordering::Relaxed) {
            if emb.check(&random_coordinates(c.n(), config, config.stream, t)) {
                best.fetch_min(t, Ordering::Relaxed);
                return;
            }
            t += workers;
        }
    });
    let t = best.into_inner();
    Ok((t != u64::MAX).then(|| RealizationResult {
        coords: random_coordinates(c.n(), config, config.stream, t),
        tries_used: t + 1,
        provenance: Provenance::Fresh,
    }))
}

/// All `(target, pool entry)` pairs where the pool coordinates realize the
/// target, target-major.
pub fn recycle(pool: &[CoordinateAssignment], targets: &[TriangleSet]) -> Vec<(usize, usize)> {
    targets
        .par_iter()
        .enumerate()
        .flat_map_iter(|(ti, t)| {
            let emb = Embedder::new(t);
            pool.iter()
                .enumerate()
                .filter(move |(_, p)| p.n() == t.n() && emb.check(p))
                .map(move |(pi, _)| (ti, pi))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Offsets every coordinate by an independent uniform integer in
/// `[-delta, delta]`.
pub fn perturb(coords: &CoordinateAssignment, delta: u64, rng: &mut impl Rng) -> CoordinateAssignment {
    if delta == 0 {
        return coords.clone();
    }
    let d = delta as i64;
    let points = coords
        .points
        .iter()
        .map(|p| Point3::new(p.x + rng.gen_range(-d..=d), p.y + rng.gen_range(-d..=d), p.z + rng.gen_range(-d..=d)))
        .collect();
    CoordinateAssignment { points }
}

/// Tries every pool entry and up to `attempts` perturbations of each
/// against `c`. Perturbation `j` of pool entry `i` uses the RNG address
/// `(seed, stream, i * attempts + j)`.
pub fn recycle_with_perturbation(
    c: &TriangleSet,
    pool: &[CoordinateAssignment],
    config: &RealizationConfig,
    attempts: u64,
) -> Option<RealizationResult> {
    let emb = Embedder::new(c);
    let mut tries = 0;
    for p in pool.iter().filter(|p| p.n() == c.n()) {
        tries += 1;
        if emb.check(p) {
            return Some(RealizationResult {
                coords: p.clone(),
                tries_used: tries,
                provenance: Provenance::Recycled,
            });
        }
    }
    for (i, p) in pool.iter().enumerate().filter(|(_, p)| p.n() == c.n()) {
        for j in 0..attempts {
            tries += 1;
            let mut rng = rng_at(config.seed, config.stream, i as u64 * attempts + j);
            let q = perturb(p, config.delta, &mut rng);
            if emb.check(&q) {
                return Some(RealizationResult {
                    coords: q,
                    tries_used: tries,
                    provenance: Provenance::Perturbed,
                });
            }
        }
    }
    None
}


#[cfg(test)]
mod tests {
    use super::fixtures::csaszar;
    use super::*;
    use crate::complex::fixtures::*;

    #[test]
    fn csaszar_embeds() {
        assert!(is_embedding(&moebius_torus(), &csaszar()));
        let line = CoordinateAssignment::new((0..7).map(|i| Point3::new(i, 2 * i, 3 * i)).collect());
        assert!(!is_embedding(&moebius_torus(), &line));
    }

    #[test]
    fn tetrahedron_frame() {
        let pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]].into_iter().map(Point3::from).collect();
        assert!(is_embedding(&tetrahedron(), &CoordinateAssignment::new(pts)));
        let flat = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]].into_iter().map(Point3::from).collect();
        assert!(!is_embedding(&tetrahedron(), &CoordinateAssignment::new(flat)));
    }

    #[test]
    fn invariances() {
        let t = moebius_torus();
        let c = csaszar();
        let moved = CoordinateAssignment::new(c.points.iter().map(|p| Point3::new(p.x + 101, p.y - 7, p.z + 3)).collect());
        assert!(is_embedding(&t, &moved));
        let scaled = CoordinateAssignment::new(c.points.iter().map(|p| Point3::new(p.x * 13, p.y * 13, p.z * 13)).collect());
        assert!(is_embedding(&t, &scaled));
        // relabel by perm and move points along with their labels
        let perm = [0u8, 5, 3, 7, 1, 2, 6, 4];
        let mut pts = vec![Point3::default(); 7];
        for v in 1..=7 {
            pts[perm[v] as usize - 1] = c.points[v - 1];
        }
        assert!(is_embedding(&t.relabel(&perm), &CoordinateAssignment::new(pts)));
    }

    #[test]
    fn rng_addressing() {
        let cfg = RealizationConfig { cube_side: 2, ..Default::default() };
        let a = random_coordinates(7, &cfg, 3, 11);
        assert_eq!(a, random_coordinates(7, &cfg, 3, 11));
        assert_ne!(random_coordinates(7, &RealizationConfig::default(), 3, 11), random_coordinates(7, &RealizationConfig::default(), 3, 12));
        assert!(a.points.iter().all(|p| p.coords().iter().all(|&x| x == 0 || x == 1)));
    }

    #[test]
    fn residue_frequencies() {
        // 10^5 draws at k = 4: each value within 5 sigma of n/4
        let cfg = RealizationConfig { cube_side: 4, seed: 17, ..Default::default() };
        let mut hist = [0u64; 4];
        let mut draws = 0u64;
        let mut counter = 0;
        while draws < 100_000 {
            for p in random_coordinates(10, &cfg, 0, counter).points {
                for x in p.coords() {
                    hist[x as usize] += 1;
                    draws += 1;
                }
            }
            counter += 1;
        }
        let mean = draws as f64 / 4.0;
        let sigma = (draws as f64 * 0.25 * 0.75).sqrt();
        for h in hist {
            assert!((h as f64 - mean).abs() <= 5.0 * sigma, "{hist:?}");
        }
    }

    #[test]
    fn realize_tetrahedron_and_reject_rp2() {
        let cfg = RealizationConfig { max_tries: 1000, seed: 5, ..Default::default() };
        let r = random_realize(&tetrahedron(), &cfg).unwrap().unwrap();
        assert!(is_embedding(&tetrahedron(), &r.coords));
        assert_eq!(r.provenance, Provenance::Fresh);
        assert!(random_realize(&rp2_6(), &cfg).is_err());
    }

    #[test]
    fn realize_is_thread_independent() {
        let cfg = RealizationConfig { max_tries: 100_000, seed: 9, ..Default::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| random_realize(&sphere5(), &cfg).unwrap());
        let b = four.install(|| random_realize(&sphere5(), &cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.is_some());
    }

    #[test]
    fn recycling() {
        assert_eq!(recycle(&[csaszar()], &[moebius_torus()]), vec![(0, 0)]);
        assert!(recycle(&[], &[moebius_torus()]).is_empty());
        let cfg = RealizationConfig::default();
        let r = recycle_with_perturbation(&moebius_torus(), &[csaszar()], &cfg, 4).unwrap();
        assert_eq!(r.provenance, Provenance::Recycled);
    }

    #[test]
    fn perturbation() {
        let c = csaszar();
        let mut rng = rng_at(1, 0, 0);
        assert_eq!(perturb(&c, 0, &mut rng), c);
        let q = perturb(&c, 1, &mut rng);
        for (a, b) in c.points.iter().zip(&q.points) {
            assert!((a.x - b.x).abs() <= 1 && (a.y - b.y).abs() <= 1 && (a.z - b.z).abs() <= 1);
        }
        let q1 = perturb(&c, 8, &mut rng_at(2, 0, 0));
        let q2 = perturb(&c, 8, &mut rng_at(2, 0, 0));
        assert_eq!(q1, q2);
    }
}
