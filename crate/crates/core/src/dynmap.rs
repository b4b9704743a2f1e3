//! Certified plane maps.
//!
//! Every [`MapSpec`] is an orientation-preserving homeomorphism built from a
//! small set of families whose displacement field `d = f - Id` has an
//! analytic Lipschitz bound. The certified stages only accept maps
//! whose certified bound is at most one.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{angle_between, BBox, Point2, Vec2};

/// Default relative tolerance for orbit validation.
pub const ORBIT_REL_TOL: f64 = 1e-9;

/// Slack allowed when comparing a certificate against the unit bound.
pub const CERT_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("bump radius must be positive, got {0}")]
    BumpRadius(f64),
    #[error("pin radius must be positive, got {0}")]
    PinRadius(f64),
    #[error("non-finite map parameter")]
    NonFinite,
    #[error("empty composition")]
    EmptyComposition,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("an orbit needs at least two points, got {0}")]
    TooShort(usize),
    #[error("non-finite orbit point")]
    NonFinite,
    #[error("orbit points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("points return to the start after {period} steps; period is not minimal")]
    NonMinimal { period: usize },
    #[error("orbit residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentCheckError {
    #[error("certified Lip(f - Id) = {k} exceeds 1")]
    Uncertified { k: f64 },
    #[error("base point is fixed, the segment [x, f(x)] is degenerate")]
    FixedBasePoint,
    #[error("at least one sample is required")]
    NoSamples,
}

/// A compactly supported perturbation: `displacement` scaled by a tent
/// profile of the given radius about `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Point2,
    pub radius: f64,
    pub displacement: Vec2,
}

impl Bump {
    pub fn new(center: Point2, radius: f64, displacement: Vec2) -> Result<Self, MapError> {
        let b = Self {
            center,
            radius,
            displacement,
        };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<(), MapError> {
        if !(self.center.is_finite() && self.displacement.is_finite() && self.radius.is_finite()) {
            return Err(MapError::NonFinite);
        }
        if self.radius <= 0.0 {
            return Err(MapError::BumpRadius(self.radius));
        }
        Ok(())
    }

    fn value(&self, p: Point2, pins: &[Point2], pin_radius: f64) -> Vec2 {
        let tent = 1.0 - p.dist(self.center) / self.radius;
        if tent <= 0.0 {
            return Vec2::ZERO;
        }
        let damp: f64 = pins
            .iter()
            .map(|&q| (p.dist(q) / pin_radius).min(1.0))
            .product();
        self.displacement * (tent * damp)
    }

    /// Pins whose damping disc reaches the support; the others are
    /// identically one wherever the tent is nonzero.
    fn active_pins(&self, pins: &[Point2], pin_radius: f64) -> usize {
        pins.iter()
            .filter(|q| q.dist(self.center) < self.radius + pin_radius)
            .count()
    }

    /// `|displacement| * (1/radius + sum over active pins of 1/pin_radius)`.
    pub fn lipschitz(&self, pins: &[Point2], pin_radius: f64) -> f64 {
        let active = self.active_pins(pins, pin_radius) as f64;
        self.displacement.norm() * (1.0 / self.radius + active / pin_radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSpec {
    /// Rotation by `angle` radians about `center`.
    Rotation {
        center: Point2,
        angle: f64,
    },
    Translation {
        v: Vec2,
    },
    /// `base` plus bumps damped to vanish at every pin.
    Pinned {
        base: Box<MapSpec>,
        bumps: Vec<Bump>,
        #[serde(default)]
        pins: Vec<Point2>,
        pin_radius: f64,
    },
    /// Applied left to right: the first entry acts first.
    Composition(Vec<MapSpec>),
}

/// Normalizes an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

impl MapSpec {
    pub fn rotation(center: Point2, angle: f64) -> Self {
        MapSpec::Rotation {
            center,
            angle: normalize_angle(angle),
        }
    }

    /// Rotation by `2 pi k / n` about `center`.
    pub fn rotation_turns(center: Point2, k: i64, n: u64) -> Self {
        Self::rotation(center, 2.0 * PI * k as f64 / n as f64)
    }

    pub fn translation(v: Vec2) -> Self {
        MapSpec::Translation { v }
    }

    pub fn identity() -> Self {
        MapSpec::Translation { v: Vec2::ZERO }
    }

    pub fn pinned(
        base: MapSpec,
        bumps: Vec<Bump>,
        pins: Vec<Point2>,
        pin_radius: f64,
    ) -> Result<Self, MapError> {
        let m = MapSpec::Pinned {
            base: Box::new(base),
            bumps,
            pins,
            pin_radius,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn compose(maps: Vec<MapSpec>) -> Result<Self, MapError> {
        let m = MapSpec::Composition(maps);
        m.validate()?;
        Ok(m)
    }

    /// Structural checks for values that bypassed the constructors (e.g.
    /// deserialized ones).
    pub fn validate(&self) -> Result<(), MapError> {
        match self {
            MapSpec::Rotation { center, angle } => {
                if center.is_finite() && angle.is_finite() {
                    Ok(())
                } else {
                    Err(MapError::NonFinite)
                }
            }
            MapSpec::Translation { v } => {
                if v.is_finite() {
                    Ok(())
                } else {
                    Err(MapError::NonFinite)
                }
            }
            MapSpec::Pinned {
                base,
                bumps,
                pins,
                pin_radius,
            } => {
                base.validate()?;
                if !pin_radius.is_finite() || *pin_radius <= 0.0 {
                    return Err(MapError::PinRadius(*pin_radius));
                }
                if pins.iter().any(|p| !p.is_finite()) {
                    return Err(MapError::NonFinite);
                }
                bumps.iter().try_for_each(Bump::validate)
            }
            MapSpec::Composition(parts) => {
                if parts.is_empty() {
                    return Err(MapError::EmptyComposition);
                }
                parts.iter().try_for_each(MapSpec::validate)
            }
        }
    }

    /// Short family name for reports.
    pub fn family(&self) -> String {
        match self {
            MapSpec::Rotation { .. } => "rotation".into(),
            MapSpec::Translation { .. } => "translation".into(),
            MapSpec::Pinned { base, bumps, .. } => {
                format!("pinned({} + {} bump(s))", base.family(), bumps.len())
            }
            MapSpec::Composition(parts) => {
                let names: Vec<_> = parts.iter().map(MapSpec::family).collect();
                format!("composition[{}]", names.join(", "))
            }
        }
    }

    pub fn eval(&self, p: Point2) -> Point2 {
        match self {
            MapSpec::Rotation { center, angle } => {
                let (s, c) = angle.sin_cos();
                let w = p - *center;
                Point2::new(
                    center.x + c * w.dx - s * w.dy,
                    center.y + s * w.dx + c * w.dy,
                )
            }
            MapSpec::Translation { v } => p + *v,
            MapSpec::Pinned {
                base,
                bumps,
                pins,
                pin_radius,
            } => {
                let mut q = base.eval(p);
                for b in bumps {
                    q = q + b.value(p, pins, *pin_radius);
                }
                q
            }
            MapSpec::Composition(parts) => parts.iter().fold(p, |q, m| m.eval(q)),
        }
    }

    /// `f^k(p)`.
    pub fn iterate(&self, p: Point2, k: usize) -> Point2 {
        (0..k).fold(p, |q, _| self.eval(q))
    }

    pub fn displacement(&self, p: Point2) -> Vec2 {
        self.eval(p) - p
    }

    /// Inverse map, available for the rigid families.
    pub fn inverse(&self) -> Option<MapSpec> {
        match self {
            MapSpec::Rotation { center, angle } => Some(MapSpec::rotation(*center, -angle)),
            MapSpec::Translation { v } => Some(MapSpec::translation(-*v)),
            MapSpec::Pinned { .. } => None,
            MapSpec::Composition(parts) => parts
                .iter()
                .rev()
                .map(MapSpec::inverse)
                .collect::<Option<Vec<_>>>()
                .map(MapSpec::Composition),
        }
    }

    /// Analytic upper bound on `Lip(f - Id)`.
    pub fn lip_bound(&self) -> LipschitzCertificate {
        let mut terms = Vec::new();
        let (k, lip_map) = self.bounds(&mut terms, "");
        LipschitzCertificate { k, lip_map, terms }
    }

    /// Returns `(bound on Lip(f - Id), bound on Lip(f))`.
    fn bounds(&self, terms: &mut Vec<CertificateTerm>, path: &str) -> (f64, f64) {
        match self {
            MapSpec::Rotation { angle, .. } => {
                let k = 2.0 * (angle / 2.0).sin().abs();
                terms.push(CertificateTerm::new(path, "rotation", k));
                (k, 1.0)
            }
            MapSpec::Translation { .. } => {
                terms.push(CertificateTerm::new(path, "translation", 0.0));
                (0.0, 1.0)
            }
            MapSpec::Pinned {
                base,
                bumps,
                pins,
                pin_radius,
            } => {
                let (kb, lb) = base.bounds(terms, &format!("{path}base/"));
                let mut k = kb;
                for (i, b) in bumps.iter().enumerate() {
                    let kk = b.lipschitz(pins, *pin_radius);
                    terms.push(CertificateTerm::new(
                        &format!("{path}bump[{i}]/"),
                        "bump",
                        kk,
                    ));
                    k += kk;
                }
                (k, lb + (k - kb))
            }
            MapSpec::Composition(parts) => {
                // (g o h) - Id = (g - Id) o h + (h - Id)
                let mut k = 0.0;
                let mut lip = 1.0;
                for (i, m) in parts.iter().enumerate() {
                    let (kn, ln) = m.bounds(terms, &format!("{path}[{i}]/"));
                    k = kn * (1.0 + k) + k;
                    lip *= ln;
                }
                (k, lip.min(1.0 + k))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub component: String,
    pub kind: String,
    pub k: f64,
}

impl CertificateTerm {
    fn new(path: &str, kind: &str, k: f64) -> Self {
        let component = if path.is_empty() {
            kind.to_string()
        } else {
            format!("{path}{kind}")
        };
        Self {
            component,
            kind: kind.into(),
            k,
        }
    }
}

/// Upper bounds on `Lip(f - Id)` (`k`) and on `Lip(f)` (`lip_map`), with
/// the per-component terms that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCertificate {
    pub k: f64,
    pub lip_map: f64,
    pub terms: Vec<CertificateTerm>,
}

impl LipschitzCertificate {
    pub fn is_contracting(&self) -> bool {
        self.k <= 1.0 + CERT_SLACK
    }

    /// Bound on `Lip(f)` used for image-arc refinement.
    pub fn map_lipschitz(&self) -> f64 {
        self.lip_map.min(1.0 + self.k)
    }

    pub fn breakdown(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{} k={:.6}", t.component, t.k))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// A validated periodic orbit `x, f(x), ..., f^{n-1}(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    points: Vec<Point2>,
    residual: f64,
    tolerance: f64,
}

impl PeriodicOrbit {
    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn period(&self) -> usize {
        self.points.len()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Absolute tolerance the orbit was validated against.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn diameter(&self) -> f64 {
        BBox::of_points(&self.points).map_or(0.0, |b| b.diagonal())
    }

    /// The same orbit listed from `points[start]`.
    pub fn rotated(&self, start: usize) -> PeriodicOrbit {
        let mut points = self.points.clone();
        points.rotate_left(start % self.points.len());
        PeriodicOrbit { points, ..*self }
    }
}

/// Checks that `points` is a minimal periodic orbit of `map`.
///
/// `rel_tol` scales with the orbit's bounding-box diagonal; the default is
/// [`ORBIT_REL_TOL`].
pub fn validate_orbit(
    map: &MapSpec,
    points: Vec<Point2>,
    rel_tol: Option<f64>,
) -> Result<PeriodicOrbit, OrbitError> {
    let n = points.len();
    if n < 2 {
        return Err(OrbitError::TooShort(n));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(OrbitError::NonFinite);
    }
    let diameter = BBox::of_points(&points).map_or(0.0, |b| b.diagonal());
    let tolerance = rel_tol.unwrap_or(ORBIT_REL_TOL) * diameter;
    for i in 0..n {
        for j in i + 1..n {
            if points[i].dist(points[j]) <= 10.0 * tolerance {
                return Err(OrbitError::Duplicate(i, j));
            }
        }
    }
    let residual = (0..n)
        .map(|i| map.eval(points[i]).dist(points[(i + 1) % n]))
        .fold(0.0, f64::max);
    if residual > tolerance {
        let x = points[0];
        let mut q = x;
        for d in 1..n {
            q = map.eval(q);
            if q.dist(x) <= tolerance {
                return Err(OrbitError::NonMinimal { period: d });
            }
        }
        return Err(OrbitError::Residual {
            residual,
            tolerance,
        });
    }
    Ok(PeriodicOrbit {
        points,
        residual,
        tolerance,
    })
}

/// Whether segment checks refuse uncertified maps or just report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    #[default]
    Certified,
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSample {
    pub t: f64,
    pub y: Point2,
    pub value: f64,
    pub bound: f64,
}

/// Outcome of sampling `[x, f(x)]` for the fixed-point-free property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub x: Point2,
    pub k: f64,
    pub d_norm_x: f64,
    /// Smallest `|d(y)|` seen and the certified lower bound at that sample.
    pub min_norm: f64,
    pub min_norm_bound: f64,
    pub violations: Vec<SegmentSample>,
}

impl DisplacementReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Outcome of sampling `[x, f(x)]` for the acute-angle property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    pub x: Point2,
    pub k: f64,
    pub max_angle: f64,
    pub violations: Vec<SegmentSample>,
}

impl AngleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn segment_preconditions(
    map: &MapSpec,
    x: Point2,
    samples: usize,
    mode: CheckMode,
) -> Result<(f64, Vec2), SegmentCheckError> {
    if samples == 0 {
        return Err(SegmentCheckError::NoSamples);
    }
    let cert = map.lip_bound();
    if mode == CheckMode::Certified && !cert.is_contracting() {
        return Err(SegmentCheckError::Uncertified { k: cert.k });
    }
    let dx = map.displacement(x);
    if dx.norm() == 0.0 {
        return Err(SegmentCheckError::FixedBasePoint);
    }
    Ok((cert.k, dx))
}

/// Sample parameters in `[0, 1)`: the endpoint `f(x)` is excluded because
/// the strict bound degenerates there when `k = 1`.
fn sample_params(samples: usize) -> impl Iterator<Item = f64> {
    (0..samples).map(move |i| i as f64 / samples as f64)
}

/// Along `[x, f(x)]`, checks `|d(y)| >= |d(x)| - k |x - y| > 0`.
pub fn check_segment_displacement(
    map: &MapSpec,
    x: Point2,
    samples: usize,
    mode: CheckMode,
) -> Result<DisplacementReport, SegmentCheckError> {
    let (k, dx) = segment_preconditions(map, x, samples, mode)?;
    let fx = x + dx;
    let dnx = dx.norm();
    let slack = 1e-12 * (1.0 + dnx);
    let mut report = DisplacementReport {
        x,
        k,
        d_norm_x: dnx,
        min_norm: f64::INFINITY,
        min_norm_bound: f64::NAN,
        violations: Vec::new(),
    };
    for t in sample_params(samples) {
        let y = x.lerp(fx, t);
        let value = map.displacement(y).norm();
        let bound = dnx - k * x.dist(y);
        if value < report.min_norm {
            report.min_norm = value;
            report.min_norm_bound = bound;
        }
        if bound <= 0.0 || value <= 0.0 || value < bound - slack {
            report.violations.push(SegmentSample { t, y, value, bound });
        }
    }
    Ok(report)
}

/// Along `[x, f(x)]`, checks `<d(x), d(y)> > 0`.
pub fn check_segment_angle(
    map: &MapSpec,
    x: Point2,
    samples: usize,
    mode: CheckMode,
) -> Result<AngleReport, SegmentCheckError> {
    let (k, dx) = segment_preconditions(map, x, samples, mode)?;
    let fx = x + dx;
    let mut report = AngleReport {
        x,
        k,
        max_angle: 0.0,
        violations: Vec::new(),
    };
    for t in sample_params(samples) {
        let y = x.lerp(fx, t);
        let dy = map.displacement(y);
        let dot = dx.dot(dy);
        match angle_between(dx, dy) {
            Ok(a) => report.max_angle = report.max_angle.max(a),
            Err(_) => report.max_angle = report.max_angle.max(PI),
        }
        if dot <= 0.0 {
            report.violations.push(SegmentSample {
                t,
                y,
                value: dot,
                bound: 0.0,
            });
        }
    }
    Ok(report)
}
