//! Exact orientation and triangle/segment predicates on integer points.

use std::fmt;

use num_bigint::{BigInt, Sign};
use serde::{Deserialize, Serialize};

/// A point with integer coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Point3 {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Point3 { x, y, z }
    }

    pub fn max_norm(&self) -> u64 {
        self.x.unsigned_abs().max(self.y.unsigned_abs()).max(self.z.unsigned_abs())
    }

    pub fn coords(&self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[i64; 3]> for Point3 {
    fn from([x, y, z]: [i64; 3]) -> Self {
        Point3 { x, y, z }
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

// Below these bounds the 3x3 determinant of coordinate differences fits.
const I64_SAFE: u64 = 1 << 19;
const I128_SAFE: u64 = 1 << 40;

#[inline]
fn det3<T>(u: [T; 3], v: [T; 3], w: [T; 3]) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Sub<Output = T> + std::ops::Add<Output = T>,
{
    u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0])
}

fn orient3d_big(p: Point3, q: Point3, r: Point3, s: Point3) -> i8 {
    let d = |a: Point3| {
        [
            BigInt::from(a.x) - p.x,
            BigInt::from(a.y) - p.y,
            BigInt::from(a.z) - p.z,
        ]
    };
    let (u, v, w) = (d(q), d(r), d(s));
    let det = &u[0] * (&v[1] * &w[2] - &v[2] * &w[1]) - &u[1] * (&v[0] * &w[2] - &v[2] * &w[0])
        + &u[2] * (&v[0] * &w[1] - &v[1] * &w[0]);
    match det.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Sign of `det(q - p, r - p, s - p)`: `+1`, `0` or `-1`. Exact for all
/// inputs.
#[inline]
pub fn orient3d(p: Point3, q: Point3, r: Point3, s: Point3) -> i8 {
    let m = p.max_norm().max(q.max_norm()).max(r.max_norm()).max(s.max_norm());
    if m < I64_SAFE {
        let d = |a: Point3| [a.x - p.x, a.y - p.y, a.z - p.z];
        det3(d(q), d(r), d(s)).signum() as i8
    } else if m < I128_SAFE {
        let d = |a: Point3| [(a.x - p.x) as i128, (a.y - p.y) as i128, (a.z - p.z) as i128];
        det3(d(q), d(r), d(s)).signum() as i8
    } else {
        orient3d_big(p, q, r, s)
    }
}

/// Outcome of a triangle/segment test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Disjointness {
    Disjoint,
    Intersecting,
    /// Some orientation test was zero.
    Degenerate,
}

/// Decides whether the closed triangle `abc` and the closed segment `pq`
/// are disjoint using only orientation signs.
pub fn triangle_segment_disjoint(a: Point3, b: Point3, c: Point3, p: Point3, q: Point3) -> Disjointness {
    let sp = orient3d(a, b, c, p);
    let sq = orient3d(a, b, c, q);
    if sp == 0 || sq == 0 {
        return Disjointness::Degenerate;
    }
    if sp == sq {
        return Disjointness::Disjoint;
    }
    // pq crosses the plane; the crossing is inside abc iff the line pq
    // passes the three edges on the same side
    let t1 = orient3d(p, q, a, b);
    let t2 = orient3d(p, q, b, c);
    let t3 = orient3d(p, q, c, a);
    if t1 == 0 || t2 == 0 || t3 == 0 {
        Disjointness::Degenerate
    } else if t1 == t2 && t2 == t3 {
        Disjointness::Intersecting
    } else {
        Disjointness::Disjoint
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: i64, y: i64, z: i64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn orient_examples() {
        let o = p(0, 0, 0);
        assert_eq!(orient3d(o, p(1, 0, 0), p(0, 1, 0), p(0, 0, 1)), 1);
        assert_eq!(orient3d(o, p(1, 0, 0), p(0, 1, 0), p(5, 7, 0)), 0);
        assert_eq!(orient3d(o, p(1, 0, 0), p(0, 1, 0), p(0, 0, -1)), -1);
    }

    #[test]
    fn segment_examples() {
        let (a, b, c) = (p(0, 0, 0), p(4, 0, 0), p(0, 4, 0));
        use Disjointness::*;
        assert_eq!(triangle_segment_disjoint(a, b, c, p(1, 1, -1), p(1, 1, 1)), Intersecting);
        assert_eq!(triangle_segment_disjoint(a, b, c, p(10, 10, 1), p(10, 10, 5)), Disjoint);
        assert_eq!(triangle_segment_disjoint(a, b, c, p(1, 1, 0), p(5, 5, 5)), Degenerate);
        // crosses the plane outside the triangle
        assert_eq!(triangle_segment_disjoint(a, b, c, p(9, 9, -1), p(9, 9, 1)), Disjoint);
    }

    #[test]
    fn precision_tiers_agree() {
        let big = 1i64 << 50;
        let q = [p(big, 1, 2), p(3, big, 5), p(7, 11, big), p(big - 1, big - 2, big - 3)];
        assert_eq!(orient3d(q[0], q[1], q[2], q[3]), orient3d_big(q[0], q[1], q[2], q[3]));
        let m = (1i64 << 40) - 1;
        let r = [p(-m, m, -m), p(m, -m, m), p(m, m, -m), p(-m, -m, m)];
        assert_eq!(orient3d(r[0], r[1], r[2], r[3]), orient3d_big(r[0], r[1], r[2], r[3]));
    }

    fn point(bound: i64) -> impl Strategy<Value = Point3> {
        (-bound..=bound, -bound..=bound, -bound..=bound).prop_map(|(x, y, z)| p(x, y, z))
    }

    proptest! {
        #[test]
        fn matches_big_oracle(a in point(1 << 20), b in point(1 << 20), c in point(1 << 20), d in point(1 << 20)) {
            prop_assert_eq!(orient3d(a, b, c, d), orient3d_big(a, b, c, d));
        }

        #[test]
        fn matches_big_oracle_wide(a in point(1 << 45), b in point(1 << 45), c in point(1 << 45), d in point(1 << 45)) {
            prop_assert_eq!(orient3d(a, b, c, d), orient3d_big(a, b, c, d));
        }

        #[test]
        fn disjointness_symmetric(a in point(6), b in point(6), c in point(6), s in point(6), t in point(6)) {
            let r = triangle_segment_disjoint(a, b, c, s, t);
            prop_assert_eq!(r, triangle_segment_disjoint(b, c, a, s, t));
            prop_assert_eq!(r, triangle_segment_disjoint(b, a, c, s, t));
            prop_assert_eq!(r, triangle_segment_disjoint(a, b, c, t, s));
        }
    }
}
