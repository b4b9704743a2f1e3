//! Fixed-point isolation by degree bisection.
//!
//! Starting from a face of nonzero index, the current region is split into
//! four quadrants through the centre of its bounding box, each quadrant is
//! clipped against the region, and the search descends into a child whose
//! contour carries nonzero displacement winding. Clipping a box against a
//! box gives a box, so once the region leaves the face boundary the search
//! runs on plain boxes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::dynmap::{LipschitzCertificate, MapSpec};
use crate::geom::{mix, signed_area, BBox, ClosedChain, Point2};
use crate::index::{contour_degree, DegreeError, DegreeOptions, FaceIndex};

/// Relative clearance of `|d|` on subdivision contours.
pub const CONTOUR_CLEARANCE_REL: f64 = 1e-9;

/// Retries with a shifted split point when a contour meets a zero.
pub const MAX_JITTER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixpointError {
    #[error("certified Lip(f - Id) = {k} exceeds 1")]
    Uncertified { k: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("face {face} has index {index}; a positive index is required")]
    NonPositiveIndex { face: usize, index: i64 },
    #[error("region boundary has zero displacement degree")]
    ZeroDegree,
    #[error("face boundary degree {degree} differs from the recorded index {index}")]
    IndexMismatch { degree: i64, index: i64 },
    #[error("subdivision contour meets a zero after {0} jittered splits")]
    JitterExhausted(usize),
    #[error("degree not conserved: parent {parent}, children {children:?}")]
    DegreeConservation { parent: i64, children: [i64; 4] },
    #[error("residual {residual:e} exceeds the bound {bound:e}")]
    ResidualBound { residual: f64, bound: f64 },
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

/// One bisection step: the parent degree and the degrees of the four
/// quadrants `[SW, SE, NW, NE]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdivisionStep {
    pub depth: usize,
    pub parent_degree: i64,
    pub child_degrees: [i64; 4],
    pub chosen: usize,
    pub jitter_attempts: usize,
}

impl SubdivisionStep {
    pub fn is_additive(&self) -> bool {
        self.child_degrees.iter().sum::<i64>() == self.parent_degree
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub location: Point2,
    pub residual: f64,
    /// Half the bounding-box diagonal of the final region.
    pub box_radius: f64,
    /// Degree of the final region's contour (nonzero).
    pub degree: i64,
    /// Some subdivision had more than one child of nonzero degree.
    pub multiple_fixed_points: bool,
    pub steps: Vec<SubdivisionStep>,
}

/// `|f(p) - p|`.
pub fn residual(map: &MapSpec, p: Point2) -> f64 {
    map.displacement(p).norm()
}

/// Winding of the displacement field along `contour`, i.e. the degree of
/// `f - Id` on the region it bounds.
pub fn displacement_winding(
    map: &MapSpec,
    contour: &ClosedChain,
    cert: &LipschitzCertificate,
) -> Result<i64, DegreeError> {
    let opts = DegreeOptions::for_scale(contour.diameter());
    contour_degree(map, cert.k, contour.vertices(), &opts)
}

/// Finds a fixed point inside a positive-index face to within `tol`.
pub fn locate_fixed_point(
    map: &MapSpec,
    cert: &LipschitzCertificate,
    arr: &Arrangement,
    face: &FaceIndex,
    tol: f64,
) -> Result<FixedPointResult, FixpointError> {
    if !cert.is_contracting() {
        return Err(FixpointError::Uncertified { k: cert.k });
    }
    if face.comb_index <= 0 {
        return Err(FixpointError::NonPositiveIndex {
            face: face.face,
            index: face.comb_index,
        });
    }
    let region = arr.face_polygon(face.face);
    let result = isolate_zero(map, cert, region, tol)?;
    let root = result
        .steps
        .first()
        .map_or(result.degree, |s| s.parent_degree);
    if root != face.num_index {
        return Err(FixpointError::IndexMismatch {
            degree: root,
            index: face.num_index,
        });
    }
    Ok(result)
}

/// Degree bisection on an arbitrary counterclockwise polygonal region.
pub fn isolate_zero(
    map: &MapSpec,
    cert: &LipschitzCertificate,
    region: Vec<Point2>,
    tol: f64,
) -> Result<FixedPointResult, FixpointError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(FixpointError::BadTolerance(tol));
    }
    let k = cert.k;
    let mut region = region;
    let mut bbox = BBox::of_points(&region).ok_or(DegreeError::EmptyContour)?;
    let mut degree = region_degree(map, k, &region, bbox.diagonal())?;
    if degree == 0 {
        return Err(FixpointError::ZeroDegree);
    }
    let mut steps = Vec::new();
    let mut multiple = false;

    while bbox.diagonal() >= tol {
        let (children, attempts) = split(map, k, &region, &bbox)?;
        let degrees = [children[0].1, children[1].1, children[2].1, children[3].1];
        if degrees.iter().sum::<i64>() != degree {
            return Err(FixpointError::DegreeConservation {
                parent: degree,
                children: degrees,
            });
        }
        if degrees.iter().filter(|&&d| d != 0).count() > 1 {
            multiple = true;
        }
        // Largest |degree|, lowest quadrant on ties.
        let chosen = (0..4)
            .fold(None::<usize>, |best, i| match best {
                Some(b) if degrees[b].abs() >= degrees[i].abs() => Some(b),
                _ if degrees[i] != 0 => Some(i),
                _ => best,
            })
            .expect("nonzero parent degree implies a nonzero child");
        steps.push(SubdivisionStep {
            depth: steps.len(),
            parent_degree: degree,
            child_degrees: degrees,
            chosen,
            jitter_attempts: attempts,
        });
        let (poly, d) = children.into_iter().nth(chosen).expect("four children");
        region = poly;
        degree = d;
        bbox = BBox::of_points(&region).expect("non-empty child");
    }

    let location = bbox.center();
    let box_radius = 0.5 * bbox.diagonal();
    let residual = residual(map, location);
    let bound = 2.0 * (1.0 + k) * box_radius;
    if residual > bound {
        return Err(FixpointError::ResidualBound { residual, bound });
    }
    Ok(FixedPointResult {
        location,
        residual,
        box_radius,
        degree,
        multiple_fixed_points: multiple,
        steps,
    })
}

fn region_degree(map: &MapSpec, k: f64, poly: &[Point2], scale: f64) -> Result<i64, DegreeError> {
    if poly.len() < 3 || signed_area(poly).abs() == 0.0 {
        return Ok(0);
    }
    let opts = DegreeOptions {
        zero_clearance: CONTOUR_CLEARANCE_REL * scale,
        ..DegreeOptions::for_scale(scale)
    };
    contour_degree(map, k, poly, &opts)
}

type Child = (Vec<Point2>, i64);

/// Splits `region` into four clipped quadrants, shifting the split point
/// deterministically when a contour passes through a zero of `d`.
fn split(
    map: &MapSpec,
    k: f64,
    region: &[Point2],
    bbox: &BBox,
) -> Result<([Child; 4], usize), FixpointError> {
    let scale = bbox.diagonal();
    for attempt in 0..=MAX_JITTER {
        let (jx, jy) = jitter(bbox, attempt);
        let c = bbox.center();
        let sx = c.x + jx * bbox.width();
        let sy = c.y + jy * bbox.height();
        let quadrants = [
            (bbox.min.x, sx, bbox.min.y, sy),
            (sx, bbox.max.x, bbox.min.y, sy),
            (bbox.min.x, sx, sy, bbox.max.y),
            (sx, bbox.max.x, sy, bbox.max.y),
        ];
        let mut children: Vec<Child> = Vec::with_capacity(4);
        let mut hit_zero = false;
        for &(x0, x1, y0, y1) in &quadrants {
            let poly = clip_to_box(region, x0, x1, y0, y1);
            match region_degree(map, k, &poly, scale) {
                Ok(d) => children.push((poly, d)),
                Err(DegreeError::ZeroOnContour { .. }) => {
                    hit_zero = true;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if !hit_zero {
            let arr: [Child; 4] = children.try_into().expect("four quadrants");
            return Ok((arr, attempt));
        }
    }
    Err(FixpointError::JitterExhausted(MAX_JITTER))
}

/// Relative split offsets in `[-0.2, 0.2]`, zero on the first attempt.
fn jitter(bbox: &BBox, attempt: usize) -> (f64, f64) {
    if attempt == 0 {
        return (0.0, 0.0);
    }
    let mut h = mix(attempt as u64, bbox.min.x.to_bits());
    h = mix(h, bbox.min.y.to_bits());
    h = mix(h, bbox.max.x.to_bits());
    h = mix(h, bbox.max.y.to_bits());
    let u = (h >> 11) as f64 / (1u64 << 53) as f64;
    let v = (mix(h, 0x5eed) >> 11) as f64 / (1u64 << 53) as f64;
    (0.4 * u - 0.2, 0.4 * v - 0.2)
}

/// Sutherland-Hodgman clipping of a polygon against an axis-aligned box.
/// Concave inputs may yield zero-width bridges along the box boundary; they
/// are traversed in both directions and contribute nothing to the degree.
pub fn clip_to_box(poly: &[Point2], x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<Point2> {
    let mut out = poly.to_vec();
    let planes: [(usize, f64, bool); 4] =
        [(0, x0, true), (0, x1, false), (1, y0, true), (1, y1, false)];
    for &(axis, value, keep_above) in &planes {
        if out.is_empty() {
            break;
        }
        let coord = |p: &Point2| if axis == 0 { p.x } else { p.y };
        let inside = |p: &Point2| {
            if keep_above {
                coord(p) >= value
            } else {
                coord(p) <= value
            }
        };
        let input = std::mem::take(&mut out);
        let m = input.len();
        for i in 0..m {
            let cur = input[i];
            let prev = input[(i + m - 1) % m];
            let (ci, pi) = (inside(&cur), inside(&prev));
            if ci != pi {
                let t = (value - coord(&prev)) / (coord(&cur) - coord(&prev));
                let mut p = prev.lerp(cur, t);
                if axis == 0 {
                    p.x = value;
                } else {
                    p.y = value;
                }
                out.push(p);
            }
            if ci {
                out.push(cur);
            }
        }
    }
    out.dedup();
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}
