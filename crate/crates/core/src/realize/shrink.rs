//! Reducing the coordinates of a realization.

use super::{CoordinateAssignment, Embedder, Point3};
use crate::complex::TriangleSet;

fn map(c: &CoordinateAssignment, f: impl Fn(i64) -> i64) -> CoordinateAssignment {
    CoordinateAssignment::new(c.points.iter().map(|p| Point3::new(f(p.x), f(p.y), f(p.z))).collect())
}

/// Moves the point set into the nonnegative orthant, halves all coordinates
/// (rounding) while the result still embeds, then lowers single coordinates
/// by one while possible. Falls back to the input if the result ends up with
/// a larger maximum norm.
pub fn shrink(c: &TriangleSet, coords: &CoordinateAssignment) -> CoordinateAssignment {
    let emb = Embedder::new(c);
    debug_assert!(emb.check(coords));
    let min = |f: fn(&Point3) -> i64| coords.points.iter().map(f).min().unwrap_or(0);
    let (mx, my, mz) = (min(|p| p.x), min(|p| p.y), min(|p| p.z));
    let mut cur = CoordinateAssignment::new(
        coords.points.iter().map(|p| Point3::new(p.x - mx, p.y - my, p.z - mz)).collect(),
    );
    if !emb.check(&cur) {
        return coords.clone();
    }

    loop {
        let half = map(&cur, |x| (x + 1) / 2);
        if half == cur || !emb.check(&half) {
            break;
        }
        cur = half;
    }

    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..cur.points.len() {
            for axis in 0..3 {
                loop {
                    let mut next = cur.clone();
                    let p = &mut next.points[i];
                    let slot = match axis {
                        0 => &mut p.x,
                        1 => &mut p.y,
                        _ => &mut p.z,
                    };
                    if *slot == 0 {
                        break;
                    }
                    *slot -= 1;
                    if !emb.check(&next) {
                        break;
                    }
                    cur = next;
                    changed = true;
                }
            }
        }
    }

    if cur.max_norm() > coords.max_norm() {
        coords.clone()
    } else {
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;
    use crate::realize::fixtures::csaszar;
    use crate::realize::{is_embedding, random_realize, RealizationConfig};

    #[test]
    fn scaled_csaszar_shrinks_back() {
        let t = moebius_torus();
        let c = csaszar();
        let big = map(&c, |x| 16 * x);
        let s = shrink(&t, &big);
        assert!(is_embedding(&t, &s));
        assert!(s.max_norm() <= c.max_norm());
    }

    #[test]
    fn fixed_point() {
        let t = moebius_torus();
        let once = shrink(&t, &csaszar());
        assert_eq!(shrink(&t, &once), once);
    }

    #[test]
    fn random_spheres_shrink() {
        let cfg = RealizationConfig { seed: 3, max_tries: 100_000, ..Default::default() };
        let r = random_realize(&sphere5(), &cfg).unwrap().unwrap();
        let s = shrink(&sphere5(), &r.coords);
        assert!(is_embedding(&sphere5(), &s));
        assert!(s.max_norm() <= r.coords.max_norm());
    }
}
