//! Planar primitives: points, segments, closed polygonal chains, a robust
//! orientation predicate and two independent winding-number algorithms.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used for ray genericity and default point clearance.
pub const REL_EPS: f64 = 1e-9;

/// Maximum distance between an accumulated angle sum and the nearest integer
/// number of turns.
pub const TURN_RESIDUE: f64 = 1e-6;

const MAX_RAY_ATTEMPTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("chain needs at least {min} vertices, got {got}")]
    TooFewVertices { min: usize, got: usize },
    #[error("consecutive chain vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),
    #[error("point lies on the chain")]
    OnChain,
    #[error("ray is not generic for this chain (vertex hit or grazing edge)")]
    NonGenericRay,
    #[error("no generic ray found after {0} attempts")]
    NoGenericRay(usize),
    #[error("point is {distance:e} from the chain, below clearance {clearance:e}")]
    Clearance { distance: f64, clearance: f64 },
    #[error("angle sum {turns} is not an integer number of turns")]
    NonIntegerTurns { turns: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub dx: f64,
    pub dy: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point at angle `theta` on the circle of radius `r` about `center`.
    pub fn polar(center: Point2, r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(center.x + r * c, center.y + r * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        self.lerp(other, 0.5)
    }

    pub fn to_vec(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { dx: 0.0, dy: 0.0 };

    pub const fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    pub fn is_finite(self) -> bool {
        self.dx.is_finite() && self.dy.is_finite()
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.dx * o.dx + self.dy * o.dy
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.dx * o.dy - self.dy * o.dx
    }

    pub fn norm(self) -> f64 {
        self.dx.hypot(self.dy)
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.dy, self.dx)
    }

    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Signed angle from `self` to `o` in `(-pi, pi]`.
    pub fn signed_angle_to(self, o: Vec2) -> f64 {
        self.cross(o).atan2(self.dot(o))
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(a: [f64; 2]) -> Self {
        Point2::new(a[0], a[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.dx, v.dy]
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    fn sub(self, o: Point2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, v: Vec2) -> Point2 {
        Point2::new(self.x + v.dx, self.y + v.dy)
    }
}

impl Sub<Vec2> for Point2 {
    type Output = Point2;
    fn sub(self, v: Vec2) -> Point2 {
        Point2::new(self.x - v.dx, self.y - v.dy)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.dx + o.dx, self.dy + o.dy)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.dx += o.dx;
        self.dy += o.dy;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.dx - o.dx, self.dy - o.dy)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.dx * s, self.dy * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.dx, -self.dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn sign(self) -> i32 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }
}

/// Sign of twice the signed area of triangle `abc`, evaluated with adaptive
/// precision so the sign is exact for finite inputs.
pub fn orient(a: Point2, b: Point2, c: Point2) -> Orientation {
    let det = robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    );
    if det > 0.0 {
        Orientation::CounterClockwise
    } else if det < 0.0 {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Unoriented angle between two nonzero vectors, in `[0, pi]`.
pub fn angle_between(u: Vec2, v: Vec2) -> Result<f64, GeomError> {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Err(GeomError::ZeroVector);
    }
    Ok((u.dot(v) / (nu * nv)).clamp(-1.0, 1.0).acos())
}

/// Oriented segment from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        debug_assert!(a != b, "degenerate segment");
        Self { a, b }
    }

    pub fn dir(&self) -> Vec2 {
        self.b - self.a
    }

    pub fn length(&self) -> f64 {
        self.dir().norm()
    }

    pub fn at(&self, t: f64) -> Point2 {
        self.a.lerp(self.b, t)
    }

    /// Parameter of the orthogonal projection of `p` onto the supporting line.
    pub fn param_of(&self, p: Point2) -> f64 {
        if p == self.a {
            return 0.0;
        }
        if p == self.b {
            return 1.0;
        }
        let d = self.dir();
        (p - self.a).dot(d) / d.dot(d)
    }

    pub fn reversed(&self) -> Segment {
        Segment::new(self.b, self.a)
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        point_segment_distance(p, self.a, self.b)
    }

    /// True when `p` lies exactly on the closed segment.
    pub fn contains(&self, p: Point2) -> bool {
        orient(self.a, self.b, p) == Orientation::Collinear
            && p.x >= self.a.x.min(self.b.x)
            && p.x <= self.a.x.max(self.b.x)
            && p.y >= self.a.y.min(self.b.y)
            && p.y <= self.a.y.max(self.b.y)
    }
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntersectionKind {
    None,
    /// Single common point with its parameters on both segments.
    Point {
        point: Point2,
        t1: f64,
        t2: f64,
    },
    /// Collinear overlap of positive length, oriented along the first segment.
    Overlap(Segment),
}

/// Classifies the intersection of two closed segments.
pub fn seg_intersect(s1: &Segment, s2: &Segment) -> IntersectionKind {
    let o1 = orient(s1.a, s1.b, s2.a);
    let o2 = orient(s1.a, s1.b, s2.b);
    let o3 = orient(s2.a, s2.b, s1.a);
    let o4 = orient(s2.a, s2.b, s1.b);

    if o1 == Orientation::Collinear && o2 == Orientation::Collinear {
        return collinear_intersection(s1, s2);
    }
    if (o1.sign() * o2.sign() > 0) || (o3.sign() * o4.sign() > 0) {
        return IntersectionKind::None;
    }

    // Touching cases return the exact endpoint.
    if o1 == Orientation::Collinear {
        return IntersectionKind::Point {
            point: s2.a,
            t1: s1.param_of(s2.a),
            t2: 0.0,
        };
    }
    if o2 == Orientation::Collinear {
        return IntersectionKind::Point {
            point: s2.b,
            t1: s1.param_of(s2.b),
            t2: 1.0,
        };
    }
    if o3 == Orientation::Collinear {
        return IntersectionKind::Point {
            point: s1.a,
            t1: 0.0,
            t2: s2.param_of(s1.a),
        };
    }
    if o4 == Orientation::Collinear {
        return IntersectionKind::Point {
            point: s1.b,
            t1: 1.0,
            t2: s2.param_of(s1.b),
        };
    }

    let d1 = s1.dir();
    let d2 = s2.dir();
    let w = s2.a - s1.a;
    let denom = d1.cross(d2);
    let t1 = (w.cross(d2) / denom).clamp(0.0, 1.0);
    let t2 = (w.cross(d1) / denom).clamp(0.0, 1.0);
    IntersectionKind::Point {
        point: s1.at(t1),
        t1,
        t2,
    }
}

fn collinear_intersection(s1: &Segment, s2: &Segment) -> IntersectionKind {
    let ta = s1.param_of(s2.a);
    let tb = s1.param_of(s2.b);
    let (lo2, hi2, lo_pt, hi_pt) = if ta <= tb {
        (ta, tb, s2.a, s2.b)
    } else {
        (tb, ta, s2.b, s2.a)
    };
    let (lo, lo_point) = if lo2 > 0.0 { (lo2, lo_pt) } else { (0.0, s1.a) };
    let (hi, hi_point) = if hi2 < 1.0 { (hi2, hi_pt) } else { (1.0, s1.b) };
    if lo > hi {
        IntersectionKind::None
    } else if lo_point == hi_point || lo == hi {
        IntersectionKind::Point {
            point: lo_point,
            t1: lo,
            t2: s2.param_of(lo_point),
        }
    } else {
        IntersectionKind::Overlap(Segment::new(lo_point, hi_point))
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point2,
    pub max: Point2,
}

impl BBox {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Point2>) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut bb = BBox {
            min: first,
            max: first,
        };
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }
}

/// A closed polygonal curve; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedChain {
    vertices: Vec<Point2>,
}

impl ClosedChain {
    /// Builds a chain. Two vertices are accepted (a back-and-forth chain);
    /// polygon consumers reject that case themselves.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeomError> {
        if vertices.len() < 2 {
            return Err(GeomError::TooFewVertices {
                min: 2,
                got: vertices.len(),
            });
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(GeomError::RepeatedVertex(i, (i + 1) % n));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.edges().map(|(a, b)| Segment::new(a, b))
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(&self.vertices).expect("non-empty chain")
    }

    /// Bounding-box diagonal, used as the length scale for tolerances.
    pub fn diameter(&self) -> f64 {
        self.bbox().diagonal()
    }

    pub fn reversed(&self) -> ClosedChain {
        let mut v = self.vertices.clone();
        v.reverse();
        ClosedChain { vertices: v }
    }

    pub fn translated(&self, by: Vec2) -> ClosedChain {
        ClosedChain {
            vertices: self.vertices.iter().map(|&p| p + by).collect(),
        }
    }

    /// Shoelace signed area; positive for counterclockwise traversal.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        self.segments().any(|s| s.contains(p))
    }

    fn fingerprint(&self, p: Point2) -> u64 {
        let mut h = mix(0x6c69_6e6b_6669_7821, p.x.to_bits());
        h = mix(h, p.y.to_bits());
        for v in &self.vertices {
            h = mix(h, v.x.to_bits());
            h = mix(h, v.y.to_bits());
        }
        h
    }
}

pub fn signed_area(vertices: &[Point2]) -> f64 {
    let Some(&o) = vertices.first() else {
        return 0.0;
    };
    // Relative to the first vertex: small polygons far from the origin
    // would otherwise cancel catastrophically.
    let acc: f64 = vertices
        .windows(2)
        .map(|w| (w[0] - o).cross(w[1] - o))
        .sum();
    0.5 * acc
}

/// splitmix64-style mixing step, used for deterministic seeds.
pub(crate) fn mix(h: u64, v: u64) -> u64 {
    let mut z = h ^ v
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(h << 6)
        .wrapping_add(h >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Signed count of chain crossings of the half-line from `p` along `ray`.
///
/// Fails with [`GeomError::NonGenericRay`] when the ray passes within
/// `1e-9 * diameter` of a vertex or crosses an edge at a grazing angle; the
/// caller retries with another direction.
pub fn winding_ray(chain: &ClosedChain, p: Point2, ray: Vec2) -> Result<i64, GeomError> {
    let dir = ray.normalized().ok_or(GeomError::ZeroVector)?;
    if chain.contains_point(p) {
        return Err(GeomError::OnChain);
    }
    let eps = REL_EPS * chain.diameter().max(f64::MIN_POSITIVE);

    for &v in chain.vertices() {
        let w = v - p;
        if w.dot(dir) > -eps && dir.cross(w).abs() < eps {
            return Err(GeomError::NonGenericRay);
        }
    }

    let mut count = 0i64;
    for (a, b) in chain.edges() {
        let sa = dir.cross(a - p);
        let sb = dir.cross(b - p);
        if (sa > 0.0) == (sb > 0.0) {
            continue;
        }
        let upward = sb > sa;
        // The crossing lies ahead of p iff p is on the left of an upward edge
        // (or the right of a downward one).
        let side = orient(a, b, p);
        let ahead = if upward {
            side == Orientation::CounterClockwise
        } else {
            side == Orientation::Clockwise
        };
        if !ahead {
            continue;
        }
        let edge_dir = (b - a).normalized().ok_or(GeomError::ZeroVector)?;
        if dir.cross(edge_dir).abs() < REL_EPS {
            return Err(GeomError::NonGenericRay);
        }
        count += if upward { 1 } else { -1 };
    }
    Ok(count)
}

/// Winding number by generic ray casting, retrying over a deterministic
/// sequence of directions seeded from the point and the chain.
pub fn winding_number(chain: &ClosedChain, p: Point2) -> Result<i64, GeomError> {
    let mut rng = ChaCha8Rng::seed_from_u64(chain.fingerprint(p));
    for _ in 0..MAX_RAY_ATTEMPTS {
        let theta: f64 = rng.random_range(0.0..2.0 * PI);
        match winding_ray(chain, p, Vec2::from_angle(theta)) {
            Err(GeomError::NonGenericRay) => continue,
            other => return other,
        }
    }
    Err(GeomError::NoGenericRay(MAX_RAY_ATTEMPTS))
}

/// Winding number by summing signed vertex turns around `p`.
///
/// `clearance` defaults to `1e-9 * diameter`; a point closer than that to the
/// chain is rejected.
pub fn winding_anglesum(
    chain: &ClosedChain,
    p: Point2,
    clearance: Option<f64>,
) -> Result<i64, GeomError> {
    let clearance = clearance.unwrap_or(REL_EPS * chain.diameter());
    let distance = chain.distance_to(p);
    if distance < clearance || distance == 0.0 {
        return Err(GeomError::Clearance {
            distance,
            clearance,
        });
    }
    let total: f64 = chain
        .edges()
        .map(|(a, b)| (a - p).signed_angle_to(b - p))
        .sum();
    round_turns(total)
}

/// Rounds an accumulated angle to whole turns, rejecting non-integer sums.
pub(crate) fn round_turns(total: f64) -> Result<i64, GeomError> {
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() >= TURN_RESIDUE {
        return Err(GeomError::NonIntegerTurns { turns });
    }
    Ok(rounded as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_far_square_keeps_its_area() {
        let (x, y, h) = (1.5132584348736953, -1.3751959723448088, 1.3e-8);
        let sq = [
            Point2::new(x, y),
            Point2::new(x + h, y),
            Point2::new(x + h, y + h),
            Point2::new(x, y + h),
        ];
        let area = signed_area(&sq);
        assert!((area / (h * h) - 1.0).abs() < 1e-6, "{area}");
    }

    fn square() -> ClosedChain {
        ClosedChain::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    fn star13() -> ClosedChain {
        ClosedChain::new(
            (0..13)
                .map(|i| Point2::polar(Point2::ORIGIN, 1.0, 4.0 * PI * i as f64 / 13.0))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn orient_signs() {
        let o = Point2::ORIGIN;
        assert_eq!(
            orient(o, Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).sign(),
            1
        );
        assert_eq!(
            orient(o, Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)).sign(),
            0
        );
        assert_eq!(
            orient(o, Point2::new(0.0, 1.0), Point2::new(1.0, 0.0)).sign(),
            -1
        );
    }

    #[test]
    fn orient_is_exact_near_collinear() {
        // A naive determinant misclassifies these; the adaptive predicate
        // must agree with itself under cyclic permutation.
        let a = Point2::new(0.5, 0.5);
        let b = Point2::new(12.0, 12.0);
        let c = Point2::new(24.0, 24.0);
        for i in 0..64 {
            let p = Point2::new(0.5 + i as f64 * f64::EPSILON, 0.5);
            let s = orient(p, b, c);
            assert_eq!(s, orient(b, c, p));
            assert_eq!(s, orient(c, p, b));
        }
        assert_eq!(orient(a, b, c), Orientation::Collinear);
    }

    #[test]
    fn crossing_segments() {
        let s1 = Segment::new(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0));
        let s2 = Segment::new(Point2::new(1.0, -1.0), Point2::new(1.0, 1.0));
        match seg_intersect(&s1, &s2) {
            IntersectionKind::Point { point, t1, t2 } => {
                assert_eq!(point, Point2::new(1.0, 0.0));
                assert_eq!(t1, 0.5);
                assert_eq!(t2, 0.5);
            }
            other => panic!("expected point, got {other:?}"),
        }
    }

    #[test]
    fn parallel_segments_do_not_meet() {
        let s1 = Segment::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let s2 = Segment::new(Point2::new(0.0, 1.0), Point2::new(1.0, 1.0));
        assert_eq!(seg_intersect(&s1, &s2), IntersectionKind::None);
    }

    #[test]
    fn collinear_overlap() {
        let s1 = Segment::new(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0));
        let s2 = Segment::new(Point2::new(1.0, 0.0), Point2::new(3.0, 0.0));
        assert_eq!(
            seg_intersect(&s1, &s2),
            IntersectionKind::Overlap(Segment::new(Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)))
        );
        // Reversed second segment gives the same overlap.
        assert_eq!(
            seg_intersect(&s1, &s2.reversed()),
            IntersectionKind::Overlap(Segment::new(Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)))
        );
    }

    #[test]
    fn collinear_touch_and_shared_endpoint() {
        let s1 = Segment::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let s2 = Segment::new(Point2::new(1.0, 0.0), Point2::new(3.0, 0.0));
        assert_eq!(
            seg_intersect(&s1, &s2),
            IntersectionKind::Point {
                point: Point2::new(1.0, 0.0),
                t1: 1.0,
                t2: 0.0
            }
        );
        let s3 = Segment::new(Point2::new(1.0, 0.0), Point2::new(1.0, 5.0));
        assert_eq!(
            seg_intersect(&s1, &s3),
            IntersectionKind::Point {
                point: Point2::new(1.0, 0.0),
                t1: 1.0,
                t2: 0.0
            }
        );
        let far = Segment::new(Point2::new(4.0, 0.0), Point2::new(5.0, 0.0));
        assert_eq!(seg_intersect(&s1, &far), IntersectionKind::None);
    }

    #[test]
    fn t_junction_returns_endpoint() {
        let s1 = Segment::new(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0));
        let s2 = Segment::new(Point2::new(0.5, 0.0), Point2::new(0.5, 3.0));
        assert_eq!(
            seg_intersect(&s1, &s2),
            IntersectionKind::Point {
                point: Point2::new(0.5, 0.0),
                t1: 0.25,
                t2: 0.0
            }
        );
    }

    #[test]
    fn angles() {
        let e = 1e-15;
        let a = angle_between(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        assert!((a - PI / 2.0).abs() < e);
        assert_eq!(
            angle_between(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)).unwrap(),
            0.0
        );
        let u = Vec2::new(1.0, 0.0);
        let v = Vec2::new(-1.0, 1.0);
        let oracle = (u.cross(v).atan2(u.dot(v))).abs();
        let got = angle_between(u, v).unwrap();
        assert!((got - oracle).abs() < e);
        assert!((got - 3.0 * PI / 4.0).abs() < e);
        assert_eq!(angle_between(Vec2::ZERO, u), Err(GeomError::ZeroVector));
    }

    #[test]
    fn ray_winding_square() {
        let sq = square();
        assert_eq!(
            winding_ray(&sq, Point2::new(0.5, 0.5), Vec2::new(1.0, 0.37)),
            Ok(1)
        );
        assert_eq!(
            winding_ray(&sq, Point2::new(5.0, 5.0), Vec2::new(1.0, 0.37)),
            Ok(0)
        );
        assert_eq!(winding_number(&sq, Point2::new(5.0, 5.0)), Ok(0));
        assert_eq!(
            winding_ray(&sq, Point2::new(1.0, 0.5), Vec2::new(1.0, 0.37)),
            Err(GeomError::OnChain)
        );
        // Straight through a vertex.
        assert_eq!(
            winding_ray(&sq, Point2::new(0.5, 0.5), Vec2::new(1.0, 1.0)),
            Err(GeomError::NonGenericRay)
        );
    }

    #[test]
    fn ray_winding_star() {
        // Oracle: angle-sum winding.
        let star = star13();
        let oracle = winding_anglesum(&star, Point2::ORIGIN, None).unwrap();
        assert_eq!(oracle, 2);
        assert_eq!(winding_number(&star, Point2::ORIGIN), Ok(oracle));
    }

    #[test]
    fn anglesum_square_and_reversal() {
        let sq = square();
        assert_eq!(winding_anglesum(&sq, Point2::new(0.5, 0.5), None), Ok(1));
        assert_eq!(
            winding_anglesum(&sq.reversed(), Point2::new(0.5, 0.5), None),
            Ok(-1)
        );
        assert!(matches!(
            winding_anglesum(&sq, Point2::new(0.5, 0.0), None),
            Err(GeomError::Clearance { .. })
        ));
        assert!(matches!(
            winding_anglesum(&sq, Point2::new(0.5, 0.01), Some(0.1)),
            Err(GeomError::Clearance { .. })
        ));
    }

    #[test]
    fn anglesum_star_matches_ray_majority() {
        // Oracle: majority vote of ray crossings over 1000 random directions.
        let star = star13();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut votes = std::collections::BTreeMap::new();
        for _ in 0..1000 {
            let theta: f64 = rng.random_range(0.0..2.0 * PI);
            if let Ok(w) = winding_ray(&star, Point2::ORIGIN, Vec2::from_angle(theta)) {
                *votes.entry(w).or_insert(0usize) += 1;
            }
        }
        let (majority, _) = votes.iter().max_by_key(|(_, c)| **c).unwrap();
        assert_eq!(*majority, 2);
        assert_eq!(winding_anglesum(&star, Point2::ORIGIN, None), Ok(*majority));
    }

    #[test]
    fn chain_validation() {
        assert!(matches!(
            ClosedChain::new(vec![Point2::ORIGIN]),
            Err(GeomError::TooFewVertices { .. })
        ));
        assert_eq!(
            ClosedChain::new(vec![Point2::ORIGIN, Point2::ORIGIN, Point2::new(1.0, 0.0)]),
            Err(GeomError::RepeatedVertex(0, 1))
        );
        assert_eq!(
            ClosedChain::new(vec![Point2::ORIGIN, Point2::new(f64::NAN, 0.0)]),
            Err(GeomError::NonFinite)
        );
        assert!((square().signed_area() - 1.0).abs() < 1e-15);
    }
}
