//! Exact planar PL primitives for the pairing geometry.
//!
//! Everything here is generic over an exact ordered-field scalar (64-bit or
//! arbitrary-precision rationals); the pairing pipeline instantiates with
//! [`crate::Rat`]. Floats never enter: intersection points, winding numbers
//! and rotation counts are all decided by sign tests on cross products.
//!
//! Rotation bookkeeping follows the immersed-curves convention: boundary
//! corners of a bigon are idealized to right angles, so chain rotations are
//! exact quarter-turn counts. [`chain_rotation_quarters`] computes the total
//! counterclockwise rotation of a PL chain whose endpoint directions are
//! snapped to quarter rotations of the pairing line, by counting signed
//! crossings of a fixed reference direction.

use num_traits::Signed;

/// Exact ordered scalar. `Ratio<i64>` is the working type; `BigRational`
/// instantiates the same kernel when more headroom is wanted.
pub trait Scalar: Clone + Ord + Signed + std::fmt::Debug {
    fn from_i64(n: i64) -> Self;
    fn from_frac(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for crate::Rat {
    fn from_i64(n: i64) -> Self {
        crate::Rat::from_integer(n)
    }
    fn from_frac(num: i64, den: i64) -> Self {
        crate::Rat::new(num, den)
    }
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Scalar for crate::BigRat {
    fn from_i64(n: i64) -> Self {
        crate::BigRat::from_integer(n.into())
    }
    fn from_frac(num: i64, den: i64) -> Self {
        crate::BigRat::new(num.into(), den.into())
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }
    pub fn sub(&self, rhs: &Point<T>) -> Vec2<T> {
        Vec2 { x: self.x.clone() - rhs.x.clone(), y: self.y.clone() - rhs.y.clone() }
    }
    pub fn lerp(&self, other: &Point<T>, t: &T) -> Point<T> {
        Point {
            x: self.x.clone() + t.clone() * (other.x.clone() - self.x.clone()),
            y: self.y.clone() + t.clone() * (other.y.clone() - self.y.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }
    pub fn neg(&self) -> Vec2<T> {
        Vec2 { x: -self.x.clone(), y: -self.y.clone() }
    }
    /// Quarter-turn counterclockwise.
    pub fn rot90(&self) -> Vec2<T> {
        Vec2 { x: -self.y.clone(), y: self.x.clone() }
    }
    pub fn rot90_k(&self, k: u8) -> Vec2<T> {
        let mut v = self.clone();
        for _ in 0..(k % 4) {
            v = v.rot90();
        }
        v
    }
    pub fn is_zero_vec(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

pub fn cross<T: Scalar>(a: &Vec2<T>, b: &Vec2<T>) -> T {
    a.x.clone() * b.y.clone() - a.y.clone() * b.x.clone()
}

pub fn dot<T: Scalar>(a: &Vec2<T>, b: &Vec2<T>) -> T {
    a.x.clone() * b.x.clone() + a.y.clone() * b.y.clone()
}

fn sgn<T: Scalar>(t: &T) -> i8 {
    if t.is_positive() {
        1
    } else if t.is_negative() {
        -1
    } else {
        0
    }
}

/// Oriented infinite line through `base` with direction `dir`.
#[derive(Debug, Clone)]
pub struct OrientedLine<T> {
    pub base: Point<T>,
    pub dir: Vec2<T>,
}

impl<T: Scalar> OrientedLine<T> {
    /// Positive on the left of the direction vector.
    pub fn side(&self, p: &Point<T>) -> T {
        cross(&self.dir, &p.sub(&self.base))
    }
    /// Monotone coordinate along the line, for sorting intersections.
    pub fn param(&self, p: &Point<T>) -> T {
        dot(&self.dir, &p.sub(&self.base))
    }
    pub fn at_x(&self, x: &T) -> Point<T> {
        // Requires dir.x != 0.
        let t = (x.clone() - self.base.x.clone()) / self.dir.x.clone();
        Point {
            x: x.clone(),
            y: self.base.y.clone() + t * self.dir.y.clone(),
        }
    }
}

/// Transversal intersection of the open segment `(a, b)` with `line`.
///
/// The scene construction guarantees no segment endpoint ever lies on a
/// pairing line, so a zero side is a geometry bug, not an input condition.
pub fn segment_line_intersection<T: Scalar>(
    a: &Point<T>,
    b: &Point<T>,
    line: &OrientedLine<T>,
) -> Option<Point<T>> {
    let sa = line.side(a);
    let sb = line.side(b);
    let (ga, gb) = (sgn(&sa), sgn(&sb));
    assert!(ga != 0 && gb != 0, "segment endpoint on pairing line: {a:?} {b:?}");
    if ga == gb {
        return None;
    }
    let t = sa.clone() / (sa - sb);
    Some(a.lerp(b, &t))
}

/// Winding number of the closed polygon `pts` around `p` (standard
/// crossing-count form; `p` must avoid the boundary).
pub fn winding_number<T: Scalar>(pts: &[Point<T>], p: &Point<T>) -> i64 {
    let mut wn = 0i64;
    let n = pts.len();
    for i in 0..n {
        let a = &pts[i];
        let b = &pts[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && sgn(&cross(&b.sub(a), &p.sub(a))) > 0 {
                wn += 1;
            }
        } else if b.y <= p.y && sgn(&cross(&b.sub(a), &p.sub(a))) < 0 {
            wn -= 1;
        }
    }
    wn
}

/// `+1`/`-1` if the principal turn from `u` to `v` sweeps the direction `r`
/// counterclockwise / clockwise, `0` otherwise. Exact reversals are rejected:
/// chains are split at cusps before rotation counting.
fn turn_crosses_reference<T: Scalar>(u: &Vec2<T>, v: &Vec2<T>, r: &Vec2<T>) -> i64 {
    let c = cross(u, v);
    match sgn(&c) {
        1 => {
            if sgn(&cross(u, r)) > 0 && sgn(&cross(r, v)) > 0 {
                1
            } else {
                0
            }
        }
        -1 => {
            if sgn(&cross(v, r)) > 0 && sgn(&cross(r, u)) > 0 {
                -1
            } else {
                0
            }
        }
        _ => {
            assert!(
                sgn(&dot(u, v)) > 0,
                "exact direction reversal inside a smooth chain: {u:?} -> {v:?}"
            );
            0
        }
    }
}

/// Is `r` strictly inside the counterclockwise sector spanned by `q` quarter
/// turns starting at `from`? (`q < 4`; quarter wedges are strictly convex.)
fn reference_in_ccw_quarters<T: Scalar>(from: &Vec2<T>, q: u8, r: &Vec2<T>) -> bool {
    let mut lo = from.clone();
    for _ in 0..q {
        let hi = lo.rot90();
        if sgn(&cross(&lo, r)) > 0 && sgn(&cross(r, &hi)) > 0 {
            return true;
        }
        lo = hi;
    }
    false
}

/// Total counterclockwise rotation, in quarter turns, of a smooth chain.
///
/// `dirs` are the actual PL segment directions in traversal order. The
/// endpoint directions are idealized to `line_dir` rotated by `k_start` and
/// `k_end` quarter turns (the right-corner convention); the integer part of
/// the rotation is recovered exactly by counting signed crossings of the
/// `reference` direction, which must not be parallel to any direction in
/// play.
pub fn chain_rotation_quarters<T: Scalar>(
    line_dir: &Vec2<T>,
    k_start: u8,
    dirs: &[Vec2<T>],
    k_end: u8,
    reference: &Vec2<T>,
) -> i64 {
    let start = line_dir.rot90_k(k_start);
    let end = line_dir.rot90_k(k_end);
    let mut seq: Vec<&Vec2<T>> = Vec::with_capacity(dirs.len() + 2);
    seq.push(&start);
    for d in dirs {
        seq.push(d);
    }
    seq.push(&end);
    let mut full = 0i64;
    for w in seq.windows(2) {
        full += turn_crosses_reference(w[0], w[1], reference);
    }
    let q = (k_end + 8 - k_start) % 4;
    let wrap = if reference_in_ccw_quarters(&start, q, reference) { 1 } else { 0 };
    4 * full + q as i64 - 4 * wrap
}
