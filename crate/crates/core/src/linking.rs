//! Linking number of a fixed point with a periodic orbit.
//!
//! The loop `c . f(c) . ... . f^{n-1}(c)` is approximated by pushing refined
//! samples of the arc `c` through the iterates of `f`. Refinement is
//! certified: a source sub-arc of length `l` is accepted for the `k`-th
//! image when `L^k * l` is at most a quarter of the distance from its image
//! endpoints to the fixed point, where `L` bounds `Lip(f)`. The true image
//! sub-arc and the chord then share a disc that misses the fixed point, so
//! the polygonal loop has the same winding number as the true one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::OrbitPolygon;
use crate::dynmap::{LipschitzCertificate, MapSpec, PeriodicOrbit};
use crate::fixpoint::residual;
use crate::geom::{
    point_segment_distance, winding_anglesum, winding_number, ClosedChain, GeomError, Point2,
};

/// Default loop clearance from the fixed point, relative to the orbit size.
pub const LOOP_CLEAR_REL: f64 = 1e-6;

const MAX_REFINE_DEPTH: usize = 60;
const MAX_LOOP_POINTS: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkingError {
    #[error("arc needs at least two points")]
    ShortArc,
    #[error("arc has a non-finite or repeated point")]
    BadArc,
    #[error("arc must run from orbit point 0 to orbit point 1")]
    ArcEndpoints,
    #[error("arc passes through or near the fixed point (distance {distance:e}, clearance {clearance:e})")]
    ArcClearance { distance: f64, clearance: f64 },
    #[error("image arc {piece} cannot be refined clear of the fixed point")]
    RefinementFailed { piece: usize },
    #[error("point is not fixed: residual {residual:e} exceeds {tolerance:e}")]
    NotFixed { residual: f64, tolerance: f64 },
    #[error("fixed point lies on the loop")]
    OnLoop,
    #[error("winding cross-check failed: angle sum {anglesum} vs ray casting {ray}")]
    CrossCheck { anglesum: i64, ray: i64 },
    #[error("winding {omega} about the orbit polygon exceeds n - 1 = {bound}")]
    WindingBound { omega: i64, bound: i64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// A polyline from `x` to `f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcChain {
    points: Vec<Point2>,
}

impl ArcChain {
    pub fn new(points: Vec<Point2>) -> Result<Self, LinkingError> {
        if points.len() < 2 {
            return Err(LinkingError::ShortArc);
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[0] == w[1]) {
            return Err(LinkingError::BadArc);
        }
        Ok(Self { points })
    }

    pub fn straight(x: Point2, fx: Point2) -> Result<Self, LinkingError> {
        Self::new(vec![x, fx])
    }

    /// Arc from `x` to `fx` that winds `turns` extra times around `center`
    /// (counterclockwise for positive `turns`) on a circle of radius
    /// `radius`, relative to the straight segment.
    ///
    /// The arc runs radially to the circle, loops, sweeps the same signed
    /// angle the straight segment subtends at `center`, and runs radially
    /// out to `fx`. `center` must not lie on `[x, fx]`.
    pub fn detour(
        x: Point2,
        fx: Point2,
        center: Point2,
        turns: i64,
        radius: f64,
    ) -> Result<Self, LinkingError> {
        use std::f64::consts::PI;
        let ax = (x - center).dy.atan2((x - center).dx);
        let sweep = (x - center).signed_angle_to(fx - center);
        let total = 2.0 * PI * turns as f64 + sweep;
        let steps = ((total.abs() / (PI / 32.0)).ceil() as usize).max(2);
        let mut points = vec![x];
        for i in 0..=steps {
            let p = Point2::polar(center, radius, ax + total * i as f64 / steps as f64);
            if points.last() != Some(&p) {
                points.push(p);
            }
        }
        if points.last() != Some(&fx) {
            points.push(fx);
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn start(&self) -> Point2 {
        self.points[0]
    }

    pub fn end(&self) -> Point2 {
        *self.points.last().expect("non-empty")
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        self.points
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Closed polygonal approximation of the loop built from an arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopChain {
    pub chain: ClosedChain,
    /// Largest distance between consecutive samples.
    pub max_gap: f64,
    /// Smallest distance from a sample to the fixed point.
    pub min_clearance: f64,
    /// Index in `chain` where the image of the arc under `f^k` starts.
    pub piece_starts: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkingOptions {
    /// Loop clearance relative to the orbit diameter.
    pub clear_rel: f64,
    /// Residual allowed for the fixed point; defaults to the orbit tolerance.
    pub fixed_tol: Option<f64>,
}

impl Default for LinkingOptions {
    fn default() -> Self {
        Self {
            clear_rel: LOOP_CLEAR_REL,
            fixed_tol: None,
        }
    }
}

/// Approximates `c . f(c) . ... . f^{n-1}(c)` by certified refinement.
pub fn build_loop(
    map: &MapSpec,
    cert: &LipschitzCertificate,
    orbit: &PeriodicOrbit,
    arc: &ArcChain,
    x0: Point2,
    opts: &LinkingOptions,
) -> Result<LoopChain, LinkingError> {
    let pts = orbit.points();
    let n = pts.len();
    let tol = orbit.tolerance().max(f64::MIN_POSITIVE);
    if arc.start().dist(pts[0]) > tol || arc.end().dist(pts[1]) > tol {
        return Err(LinkingError::ArcEndpoints);
    }
    let clearance = opts.clear_rel * orbit.diameter();
    let d = arc.distance_to(x0);
    if d < clearance {
        return Err(LinkingError::ArcClearance {
            distance: d,
            clearance,
        });
    }
    let lip = cert.map_lipschitz().max(1.0);

    let mut loop_points: Vec<Point2> = Vec::new();
    let mut piece_starts = Vec::with_capacity(n);
    let mut lip_k = 1.0;
    for (piece, &start) in pts.iter().enumerate() {
        piece_starts.push(loop_points.len());
        let image = refine_image(map, arc, piece, lip_k, x0, clearance)
            .ok_or(LinkingError::RefinementFailed { piece })?;
        let last = image.len() - 1;
        for (i, p) in image.into_iter().enumerate() {
            if i == last {
                break;
            }
            // Piece endpoints are pinned to the orbit points.
            loop_points.push(if i == 0 { start } else { p });
        }
        if loop_points.len() > MAX_LOOP_POINTS {
            return Err(LinkingError::RefinementFailed { piece });
        }
        lip_k *= lip;
    }
    loop_points.dedup();
    while loop_points.len() > 1 && loop_points.first() == loop_points.last() {
        loop_points.pop();
    }
    let m = loop_points.len();
    let max_gap = (0..m)
        .map(|i| loop_points[i].dist(loop_points[(i + 1) % m]))
        .fold(0.0, f64::max);
    let min_clearance = loop_points
        .iter()
        .map(|p| p.dist(x0))
        .fold(f64::INFINITY, f64::min);
    Ok(LoopChain {
        chain: ClosedChain::new(loop_points)?,
        max_gap,
        min_clearance,
        piece_starts,
    })
}

/// Samples of `f^k(arc)`, refined until every source sub-arc satisfies the
/// certified disc condition. Returns `None` when clearance cannot be met.
fn refine_image(
    map: &MapSpec,
    arc: &ArcChain,
    k: usize,
    lip_k: f64,
    x0: Point2,
    clearance: f64,
) -> Option<Vec<Point2>> {
    let image = |p: Point2| map.iterate(p, k);
    let mut out = Vec::new();
    for w in arc.points().windows(2) {
        // Stack of (source a, source b, image a, image b, depth), processed
        // left to right.
        let mut stack = vec![(w[0], w[1], image(w[0]), image(w[1]), 0usize)];
        if out.is_empty() {
            out.push(stack[0].2);
        }
        while let Some((a, b, ia, ib, depth)) = stack.pop() {
            let ra = ia.dist(x0);
            let rb = ib.dist(x0);
            if ra < clearance || rb < clearance {
                return None;
            }
            if lip_k * a.dist(b) <= 0.25 * ra.min(rb) {
                out.push(ib);
                continue;
            }
            if depth >= MAX_REFINE_DEPTH {
                return None;
            }
            let m = a.midpoint(b);
            let im = image(m);
            stack.push((m, b, im, ib, depth + 1));
            stack.push((a, m, ia, im, depth + 1));
        }
    }
    Some(out)
}

/// Coarsens a loop while keeping it homotopic in the plane minus `x0`: a run
/// of samples is replaced by its chord when it stays within half the
/// distance from its first sample to `x0`.
pub fn decimate(chain: &ClosedChain, x0: Point2) -> Result<ClosedChain, GeomError> {
    let v = chain.vertices();
    let m = v.len();
    let mut kept = vec![v[0]];
    let mut anchor = v[0];
    let mut radius = 0.5 * anchor.dist(x0);
    for j in 1..=m {
        let p = v[j % m];
        if anchor.dist(p) > radius {
            let prev = v[j - 1];
            if prev != anchor {
                kept.push(prev);
                anchor = prev;
                radius = 0.5 * anchor.dist(x0);
                if anchor.dist(p) <= radius {
                    continue;
                }
            }
            if j < m {
                kept.push(p);
                anchor = p;
                radius = 0.5 * anchor.dist(x0);
            }
        }
    }
    kept.dedup();
    while kept.len() > 1 && kept.first() == kept.last() {
        kept.pop();
    }
    ClosedChain::new(kept)
}

/// Winding of `chain` about `x0` by angle summation, cross-checked by ray
/// casting on a decimated copy.
pub fn checked_winding(chain: &ClosedChain, x0: Point2) -> Result<i64, LinkingError> {
    let anglesum = match winding_anglesum(chain, x0, None) {
        Ok(w) => w,
        Err(GeomError::Clearance { .. }) => return Err(LinkingError::OnLoop),
        Err(e) => return Err(e.into()),
    };
    let coarse = decimate(chain, x0)?;
    let ray = winding_number(&coarse, x0)?;
    if ray != anglesum {
        return Err(LinkingError::CrossCheck { anglesum, ray });
    }
    Ok(anglesum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopSource {
    StraightArc,
    Gamma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkingResult {
    pub omega: i64,
    pub n: usize,
    /// `omega mod n` in `0..n`.
    pub lk: i64,
    pub source: LoopSource,
}

pub fn reduce_mod(omega: i64, n: usize) -> i64 {
    omega.rem_euclid(n as i64)
}

/// Linking number of the fixed point `x0` with `orbit`, from the loop of the
/// straight arc `[x, f(x)]` or from the orbit polygon itself.
pub fn linking_number(
    x0: Point2,
    orbit: &PeriodicOrbit,
    map: &MapSpec,
    cert: &LipschitzCertificate,
    via: LoopSource,
    opts: &LinkingOptions,
) -> Result<LinkingResult, LinkingError> {
    let tolerance = opts.fixed_tol.unwrap_or(orbit.tolerance());
    let r = residual(map, x0);
    if r > tolerance {
        return Err(LinkingError::NotFixed {
            residual: r,
            tolerance,
        });
    }
    let n = orbit.period();
    let omega = match via {
        LoopSource::StraightArc => {
            let arc = ArcChain::straight(orbit.points()[0], orbit.points()[1])?;
            let lp = build_loop(map, cert, orbit, &arc, x0, opts)?;
            checked_winding(&lp.chain, x0)?
        }
        LoopSource::Gamma => {
            let chain = ClosedChain::new(orbit.points().to_vec())?;
            let clearance = opts.clear_rel * orbit.diameter();
            let d = chain.distance_to(x0);
            if d < clearance {
                return Err(LinkingError::OnLoop);
            }
            let w = checked_winding(&chain, x0)?;
            if w.abs() > n as i64 - 1 {
                return Err(LinkingError::WindingBound {
                    omega: w,
                    bound: n as i64 - 1,
                });
            }
            w
        }
    };
    Ok(LinkingResult {
        omega,
        n,
        lk: reduce_mod(omega, n),
        source: via,
    })
}

/// Winding about `x0` of the orbit polygon (kept for callers that already
/// hold one).
pub fn gamma_winding(gamma: &OrbitPolygon, x0: Point2) -> Result<i64, LinkingError> {
    checked_winding(&gamma.chain(), x0)
}

/// The closed loop `c2` followed by `c` reversed.
pub fn arc_difference_loop(c: &ArcChain, c2: &ArcChain) -> Result<ClosedChain, LinkingError> {
    let mut pts = c2.points().to_vec();
    let back = &c.points()[1..c.points().len() - 1];
    pts.extend(back.iter().rev());
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    Ok(ClosedChain::new(pts)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcIndependenceReport {
    pub n: usize,
    pub omega_first: i64,
    pub omega_second: i64,
    /// Winding of `c^{-1} c2` about the fixed point.
    pub omega_difference_loop: i64,
    pub congruent: bool,
    pub identity_holds: bool,
}

impl ArcIndependenceReport {
    pub fn passed(&self) -> bool {
        self.congruent && self.identity_holds
    }
}

/// Compares the loops of two arcs: their windings must differ by `n` times
/// the winding of `c^{-1} c2`.
pub fn arc_independence_check(
    map: &MapSpec,
    cert: &LipschitzCertificate,
    orbit: &PeriodicOrbit,
    c: &ArcChain,
    c2: &ArcChain,
    x0: Point2,
    opts: &LinkingOptions,
) -> Result<ArcIndependenceReport, LinkingError> {
    let n = orbit.period();
    let l1 = build_loop(map, cert, orbit, c, x0, opts)?;
    let l2 = build_loop(map, cert, orbit, c2, x0, opts)?;
    let w1 = checked_winding(&l1.chain, x0)?;
    let w2 = checked_winding(&l2.chain, x0)?;
    let diff_loop = arc_difference_loop(c, c2)?;
    let wd = match winding_anglesum(&diff_loop, x0, None) {
        Ok(w) => w,
        Err(GeomError::Clearance { .. }) => return Err(LinkingError::OnLoop),
        Err(e) => return Err(e.into()),
    };
    let diff = w2 - w1;
    Ok(ArcIndependenceReport {
        n,
        omega_first: w1,
        omega_second: w2,
        omega_difference_loop: wd,
        congruent: diff.rem_euclid(n as i64) == 0,
        identity_holds: diff == n as i64 * wd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynmap::validate_orbit;
    use std::f64::consts::PI;

    fn rot_orbit(k: i64, n: u64) -> (MapSpec, PeriodicOrbit) {
        let map = MapSpec::rotation_turns(Point2::ORIGIN, k, n);
        let step = 2.0 * PI * k as f64 / n as f64;
        let pts = (0..n)
            .map(|i| Point2::polar(Point2::ORIGIN, 1.0, step * i as f64))
            .collect();
        let orbit = validate_orbit(&map, pts, None).unwrap();
        (map, orbit)
    }

    #[test]
    fn rotation_example_linking() {
        for (k, n) in [(1, 6), (2, 13)] {
            let (map, orbit) = rot_orbit(k, n);
            let cert = map.lip_bound();
            for via in [LoopSource::StraightArc, LoopSource::Gamma] {
                let r = linking_number(
                    Point2::ORIGIN,
                    &orbit,
                    &map,
                    &cert,
                    via,
                    &LinkingOptions::default(),
                )
                .unwrap();
                assert_eq!(r.lk, k, "k={k} n={n} via {via:?}");
                assert_eq!(r.omega, k);
            }
        }
    }

    #[test]
    fn reduction() {
        assert_eq!(reduce_mod(0, 6), 0);
        assert_eq!(reduce_mod(-1, 6), 5);
        assert_eq!(reduce_mod(13, 13), 0);
    }

    #[test]
    fn straight_loop_is_close_to_hexagon() {
        let (map, orbit) = rot_orbit(1, 6);
        let cert = map.lip_bound();
        let arc = ArcChain::straight(orbit.points()[0], orbit.points()[1]).unwrap();
        let lp = build_loop(
            &map,
            &cert,
            &orbit,
            &arc,
            Point2::ORIGIN,
            &LinkingOptions::default(),
        )
        .unwrap();
        let hex = ClosedChain::new(orbit.points().to_vec()).unwrap();
        for &p in lp.chain.vertices() {
            assert!(hex.distance_to(p) < 1e-12);
        }
        assert_eq!(lp.piece_starts.len(), 6);
        assert!(lp.max_gap <= 0.25 * lp.min_clearance * 1.0001 + 1e-12 || lp.max_gap < 0.3);
    }

    #[test]
    fn detour_shifts_winding_by_n() {
        let (map, orbit) = rot_orbit(1, 6);
        let cert = map.lip_bound();
        let x = orbit.points()[0];
        let fx = orbit.points()[1];
        let c = ArcChain::straight(x, fx).unwrap();
        let opts = LinkingOptions::default();
        for turns in [1, 2, -1] {
            let c2 = ArcChain::detour(x, fx, Point2::ORIGIN, turns, 0.3).unwrap();
            let rep = arc_independence_check(&map, &cert, &orbit, &c, &c2, Point2::ORIGIN, &opts)
                .unwrap();
            // Oracle: the angle-sum winding of c^{-1} c2 about x0.
            let wd = winding_anglesum(&arc_difference_loop(&c, &c2).unwrap(), Point2::ORIGIN, None)
                .unwrap();
            assert_eq!(wd, turns);
            assert_eq!(rep.omega_second - rep.omega_first, 6 * turns);
            assert!(rep.passed());
        }
        let same =
            arc_independence_check(&map, &cert, &orbit, &c, &c, Point2::ORIGIN, &opts).unwrap();
        assert_eq!(same.omega_second - same.omega_first, 0);
        assert_eq!(same.omega_difference_loop, 0);
    }

    #[test]
    fn period_two_loop_with_curved_arc() {
        // Half-turn: the straight arc hits the fixed point, a bent one does not.
        let map = MapSpec::rotation(Point2::ORIGIN, PI);
        let orbit = validate_orbit(
            &map,
            vec![Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)],
            None,
        )
        .unwrap();
        let cert = map.lip_bound();
        let bent = ArcChain::new(vec![
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(-1.0, 0.0),
        ])
        .unwrap();
        let lp = build_loop(
            &map,
            &cert,
            &orbit,
            &bent,
            Point2::ORIGIN,
            &LinkingOptions::default(),
        )
        .unwrap();
        assert_eq!(checked_winding(&lp.chain, Point2::ORIGIN).unwrap(), 1);
        let straight = ArcChain::straight(Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)).unwrap();
        assert!(matches!(
            build_loop(
                &map,
                &cert,
                &orbit,
                &straight,
                Point2::ORIGIN,
                &LinkingOptions::default()
            ),
            Err(LinkingError::ArcClearance { .. })
        ));
    }

    #[test]
    fn base_point_independence() {
        let (map, orbit) = rot_orbit(2, 13);
        let cert = map.lip_bound();
        for s in 0..13 {
            let o = orbit.rotated(s);
            let r = linking_number(
                Point2::ORIGIN,
                &o,
                &map,
                &cert,
                LoopSource::StraightArc,
                &LinkingOptions::default(),
            )
            .unwrap();
            assert_eq!(r.lk, 2);
        }
    }

    #[test]
    fn not_fixed_is_rejected() {
        let (map, orbit) = rot_orbit(1, 6);
        let cert = map.lip_bound();
        assert!(matches!(
            linking_number(
                Point2::new(0.1, 0.0),
                &orbit,
                &map,
                &cert,
                LoopSource::Gamma,
                &LinkingOptions::default()
            ),
            Err(LinkingError::NotFixed { .. })
        ));
    }

    #[test]
    fn decimation_preserves_winding() {
        let pts: Vec<Point2> = (0..5000)
            .map(|i| {
                Point2::polar(
                    Point2::ORIGIN,
                    1.0 + 0.2 * (i as f64 * 0.01).sin(),
                    4.0 * PI * i as f64 / 5000.0,
                )
            })
            .collect();
        let chain = ClosedChain::new(pts).unwrap();
        let coarse = decimate(&chain, Point2::new(0.05, 0.02)).unwrap();
        assert!(coarse.len() < 200, "{}", coarse.len());
        assert_eq!(
            winding_number(&coarse, Point2::new(0.05, 0.02)).unwrap(),
            winding_anglesum(&chain, Point2::new(0.05, 0.02), None).unwrap()
        );
    }
}
