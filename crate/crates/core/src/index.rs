//! Face indices: the combinatorial count `1 - p` and the winding of the
//! displacement field along the face boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::dynmap::{LipschitzCertificate, MapSpec};
use crate::geom::{BBox, Point2};

/// Allowed distance of the accumulated displacement angle from whole turns.
pub const INDEX_ROUNDING: f64 = 1e-3;

/// Minimum samples per contour edge; also the whole rule when `k = 0`.
pub const MIN_EDGE_SAMPLES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegreeError {
    #[error("displacement {norm:e} at {at} is below clearance {clearance:e}: fixed point on or near the contour")]
    ZeroOnContour {
        at: Point2,
        norm: f64,
        clearance: f64,
    },
    #[error("displacement angle sum {turns} is not an integer number of turns")]
    NonInteger { turns: f64 },
    #[error("contour needs more than {0} certified steps")]
    TooManySteps(usize),
    #[error("contour has fewer than 2 vertices")]
    EmptyContour,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("certified Lip(f - Id) = {k} exceeds 1")]
    Uncertified { k: f64 },
    #[error("face {0} is unbounded")]
    UnboundedFace(usize),
    #[error("face {face}: odd number {count} of orientation changes")]
    OddChanges { face: usize, count: usize },
    #[error("face {face}: {source}")]
    Degree { face: usize, source: DegreeError },
    #[error("face {} index mismatch: combinatorial {} vs numerical {}", .0.face, .0.comb_index, .0.num_index)]
    Mismatch(Box<FaceDump>),
    #[error("no bounded face")]
    NoBoundedFace,
    #[error("face {face} maximises |omega| = {omega} but has index {comb_index} <= 0")]
    IndexViolation {
        face: usize,
        omega: i64,
        comb_index: i64,
    },
    #[error("windings have not been assigned to the arrangement")]
    MissingWindings,
}

/// Diagnostic dump for a face whose two indices disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceDump {
    pub face: usize,
    pub polygon: Vec<Point2>,
    pub agrees: Vec<bool>,
    pub comb_index: i64,
    pub num_index: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeOptions {
    /// Absolute lower bound on `|d|` along the contour.
    pub zero_clearance: f64,
    /// Multiplier on the certified step; values below one refine.
    pub step_scale: f64,
    pub max_steps: usize,
}

impl DegreeOptions {
    pub fn for_scale(diameter: f64) -> Self {
        Self {
            zero_clearance: 1e-10 * diameter,
            step_scale: 1.0,
            max_steps: 1_000_000,
        }
    }
}

/// Winding number of the displacement field along a closed polygonal contour.
///
/// Each edge is walked with steps `h <= |d(y)| / (2k)`, so between samples
/// `d` stays in a disc of radius `|d(y)|/2` around `d(y)` and turns by less
/// than `pi/6`; every sampled increment is therefore the true continuous
/// increment. At least [`MIN_EDGE_SAMPLES`] steps are taken per edge.
pub fn contour_degree(
    map: &MapSpec,
    k: f64,
    contour: &[Point2],
    opts: &DegreeOptions,
) -> Result<i64, DegreeError> {
    let m = contour.len();
    if m < 2 {
        return Err(DegreeError::EmptyContour);
    }
    let mut total = 0.0;
    let mut steps = 0usize;
    let check = |y: Point2, d: crate::geom::Vec2| -> Result<f64, DegreeError> {
        let norm = d.norm();
        if norm.is_nan() || norm < opts.zero_clearance || norm == 0.0 {
            return Err(DegreeError::ZeroOnContour {
                at: y,
                norm,
                clearance: opts.zero_clearance,
            });
        }
        Ok(norm)
    };
    for i in 0..m {
        let a = contour[i];
        let b = contour[(i + 1) % m];
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        let max_step = len / MIN_EDGE_SAMPLES as f64;
        let mut s = 0.0;
        let mut d = map.displacement(a);
        let mut norm = check(a, d)?;
        while s < len {
            let certified = if k > 0.0 {
                norm / (2.0 * k)
            } else {
                f64::INFINITY
            };
            let h = (certified * opts.step_scale).min(max_step);
            let (ny, ns) = if s + h >= len {
                (b, len)
            } else {
                (a.lerp(b, (s + h) / len), s + h)
            };
            let nd = map.displacement(ny);
            let nnorm = check(ny, nd)?;
            total += d.signed_angle_to(nd);
            s = ns;
            d = nd;
            norm = nnorm;
            steps += 1;
            if steps > opts.max_steps {
                return Err(DegreeError::TooManySteps(opts.max_steps));
            }
        }
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() >= INDEX_ROUNDING {
        return Err(DegreeError::NonInteger { turns });
    }
    Ok(rounded as i64)
}

/// Index data for one bounded face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceIndex {
    pub face: usize,
    pub orientation_changes: usize,
    pub comb_index: i64,
    pub num_index: i64,
    pub agreement: bool,
}

/// Number of boundary vertices where the polygon direction flips (`2p`).
pub fn orientation_changes(arr: &Arrangement, face: usize) -> Result<usize, IndexError> {
    let f = &arr.faces[face];
    if !f.bounded {
        return Err(IndexError::UnboundedFace(face));
    }
    let flags: Vec<bool> = f
        .boundary
        .iter()
        .map(|&h| arr.half_edges[h].agrees)
        .collect();
    let m = flags.len();
    let count = (0..m).filter(|&i| flags[i] != flags[(i + 1) % m]).count();
    if count % 2 != 0 {
        return Err(IndexError::OddChanges { face, count });
    }
    Ok(count)
}

/// Arrangement vertices on the boundary of `face` where the direction flips.
pub fn orientation_change_vertices(arr: &Arrangement, face: usize) -> Vec<usize> {
    let b = &arr.faces[face].boundary;
    let m = b.len();
    (0..m)
        .filter(|&i| arr.half_edges[b[i]].agrees != arr.half_edges[b[(i + 1) % m]].agrees)
        .map(|i| arr.half_edges[b[(i + 1) % m]].origin)
        .collect()
}

/// `1 - p` from `2p` orientation changes.
pub fn comb_index(orientation_changes: usize) -> i64 {
    1 - (orientation_changes / 2) as i64
}

/// Options for the numerical index.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IndexOptions {
    /// Skip the `k <= 1` gate (informational runs).
    pub allow_uncertified: bool,
    /// Multiplier on the certified step (see [`DegreeOptions::step_scale`]).
    pub step_scale: Option<f64>,
}

/// Winding of `f(y) - y` along the counterclockwise boundary of `face`.
pub fn num_index(
    map: &MapSpec,
    arr: &Arrangement,
    face: usize,
    cert: &LipschitzCertificate,
    opts: &IndexOptions,
) -> Result<i64, IndexError> {
    if !opts.allow_uncertified && !cert.is_contracting() {
        return Err(IndexError::Uncertified { k: cert.k });
    }
    if !arr.faces[face].bounded {
        return Err(IndexError::UnboundedFace(face));
    }
    let poly = arr.face_polygon(face);
    let diameter = BBox::of_points(&poly).map_or(0.0, |b| b.diagonal());
    let mut dopts = DegreeOptions::for_scale(diameter);
    if let Some(s) = opts.step_scale {
        dopts.step_scale = s;
    }
    contour_degree(map, cert.k, &poly, &dopts).map_err(|source| IndexError::Degree { face, source })
}

/// Both indices for every bounded face.
///
/// With `strict`, the first disagreement aborts with a [`FaceDump`];
/// otherwise disagreements are recorded in [`FaceIndex::agreement`].
pub fn compute_indices(
    map: &MapSpec,
    arr: &Arrangement,
    cert: &LipschitzCertificate,
    opts: &IndexOptions,
    strict: bool,
) -> Result<Vec<FaceIndex>, IndexError> {
    let mut out = Vec::new();
    for face in arr.bounded_faces() {
        let changes = orientation_changes(arr, face.id)?;
        let comb = comb_index(changes);
        let num = num_index(map, arr, face.id, cert, opts)?;
        if strict && comb != num {
            return Err(IndexError::Mismatch(Box::new(FaceDump {
                face: face.id,
                polygon: arr.face_polygon(face.id),
                agrees: face
                    .boundary
                    .iter()
                    .map(|&h| arr.half_edges[h].agrees)
                    .collect(),
                comb_index: comb,
                num_index: num,
            })));
        }
        out.push(FaceIndex {
            face: face.id,
            orientation_changes: changes,
            comb_index: comb,
            num_index: num,
            agreement: comb == num,
        });
    }
    Ok(out)
}

/// The bounded face of largest `|omega|` (smallest id on ties), which must
/// have positive index.
pub fn positive_index_face(arr: &Arrangement, indices: &[FaceIndex]) -> Result<usize, IndexError> {
    if !arr.windings_assigned {
        return Err(IndexError::MissingWindings);
    }
    let best = arr
        .bounded_faces()
        .fold(None::<(i64, usize)>, |acc, f| match acc {
            Some((w, _)) if w >= f.omega.abs() => acc,
            _ => Some((f.omega.abs(), f.id)),
        })
        .ok_or(IndexError::NoBoundedFace)?;
    let face = best.1;
    let comb = indices
        .iter()
        .find(|fi| fi.face == face)
        .map(|fi| fi.comb_index)
        .ok_or(IndexError::UnboundedFace(face))?;
    if comb <= 0 {
        return Err(IndexError::IndexViolation {
            face,
            omega: arr.faces[face].omega,
            comb_index: comb,
        });
    }
    Ok(face)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::analyze_polygon;
    use crate::dynmap::{validate_orbit, MapSpec, PeriodicOrbit};
    use crate::geom::Vec2;

    fn setup(k: i64, n: u64) -> (MapSpec, PeriodicOrbit) {
        let map = MapSpec::rotation_turns(Point2::ORIGIN, k, n);
        let step = 2.0 * PI * k as f64 / n as f64;
        let pts = (0..n)
            .map(|i| Point2::polar(Point2::ORIGIN, 1.0, step * i as f64))
            .collect();
        let orbit = validate_orbit(&map, pts, None).unwrap();
        (map, orbit)
    }

    /// Oracle: uniform sampling with `per_edge` points per contour edge.
    fn dense_degree(map: &MapSpec, contour: &[Point2], per_edge: usize) -> i64 {
        let m = contour.len();
        let mut total = 0.0;
        let mut prev = map.displacement(contour[0]);
        for i in 0..m {
            let a = contour[i];
            let b = contour[(i + 1) % m];
            for j in 1..=per_edge {
                let d = map.displacement(a.lerp(b, j as f64 / per_edge as f64));
                total += prev.signed_angle_to(d);
                prev = d;
            }
        }
        (total / (2.0 * PI)).round() as i64
    }

    #[test]
    fn comb_formula() {
        assert_eq!(comb_index(0), 1);
        assert_eq!(comb_index(2), 0);
        assert_eq!(comb_index(4), -1);
    }

    #[test]
    fn hexagon_indices() {
        let (map, orbit) = setup(1, 6);
        let (_, arr) = analyze_polygon(&orbit).unwrap();
        let cert = map.lip_bound();
        let idx = compute_indices(&map, &arr, &cert, &IndexOptions::default(), true).unwrap();
        assert_eq!(idx.len(), 1);
        assert_eq!(idx[0].orientation_changes, 0);
        assert_eq!(idx[0].num_index, 1);
        let face = idx[0].face;
        assert_eq!(dense_degree(&map, &arr.face_polygon(face), 10_000), 1);
        assert_eq!(positive_index_face(&arr, &idx).unwrap(), face);
    }

    #[test]
    fn star_indices() {
        let (map, orbit) = setup(2, 13);
        let (_, arr) = analyze_polygon(&orbit).unwrap();
        let cert = map.lip_bound();
        let idx = compute_indices(&map, &arr, &cert, &IndexOptions::default(), true).unwrap();
        assert_eq!(idx.len(), 14);
        for fi in &idx {
            let omega = arr.faces[fi.face].omega;
            if omega == 2 {
                assert_eq!(fi.orientation_changes, 0);
                assert_eq!(fi.num_index, 1);
                assert_eq!(dense_degree(&map, &arr.face_polygon(fi.face), 10_000), 1);
            } else {
                // Point faces contain no zero of d; the oracle fixes 2p = 2.
                assert_eq!(
                    fi.num_index,
                    dense_degree(&map, &arr.face_polygon(fi.face), 2_000)
                );
                assert_eq!(fi.orientation_changes, 2);
            }
            assert!(fi.agreement);
        }
        let chosen = positive_index_face(&arr, &idx).unwrap();
        assert_eq!(arr.faces[chosen].omega, 2);
    }

    #[test]
    fn translation_has_zero_index() {
        let (_, orbit) = setup(1, 6);
        let (_, arr) = analyze_polygon(&orbit).unwrap();
        let t = MapSpec::translation(Vec2::new(0.3, -0.1));
        let face = arr.bounded_faces().next().unwrap().id;
        let n = num_index(&t, &arr, face, &t.lip_bound(), &IndexOptions::default()).unwrap();
        assert_eq!(n, 0);
    }

    #[test]
    fn refinement_does_not_change_index() {
        let (map, orbit) = setup(2, 13);
        let (_, arr) = analyze_polygon(&orbit).unwrap();
        let cert = map.lip_bound();
        let fine = IndexOptions {
            step_scale: Some(0.5),
            ..Default::default()
        };
        for f in arr.bounded_faces() {
            let a = num_index(&map, &arr, f.id, &cert, &IndexOptions::default()).unwrap();
            let b = num_index(&map, &arr, f.id, &cert, &fine).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn gates_and_errors() {
        let (_, orbit) = setup(1, 6);
        let (_, arr) = analyze_polygon(&orbit).unwrap();
        let half = MapSpec::rotation(Point2::ORIGIN, PI);
        let face = arr.bounded_faces().next().unwrap().id;
        assert!(matches!(
            num_index(
                &half,
                &arr,
                face,
                &half.lip_bound(),
                &IndexOptions::default()
            ),
            Err(IndexError::Uncertified { .. })
        ));
        assert!(matches!(
            orientation_changes(&arr, arr.unbounded),
            Err(IndexError::UnboundedFace(_))
        ));

        // A rotation about a hexagon vertex has its fixed point on the boundary.
        let on_boundary = MapSpec::rotation(orbit.points()[0], 0.5);
        let err = num_index(
            &on_boundary,
            &arr,
            face,
            &on_boundary.lip_bound(),
            &IndexOptions::default(),
        );
        assert!(matches!(
            err,
            Err(IndexError::Degree {
                source: DegreeError::ZeroOnContour { .. },
                ..
            })
        ));
    }

    #[test]
    fn tie_break_picks_smallest_id() {
        let (map, orbit) = setup(1, 6);
        let (_, mut arr) = analyze_polygon(&orbit).unwrap();
        let cert = map.lip_bound();
        let mut idx = compute_indices(&map, &arr, &cert, &IndexOptions::default(), true).unwrap();
        // Duplicate the single bounded face under a larger id.
        let mut extra = arr.faces[idx[0].face].clone();
        extra.id = arr.faces.len();
        arr.faces.push(extra);
        let mut fi = idx[0].clone();
        fi.face = arr.faces.len() - 1;
        idx.push(fi);
        assert_eq!(positive_index_face(&arr, &idx).unwrap(), idx[0].face);
    }

    #[test]
    fn zero_index_maximiser_is_reported() {
        let (map, orbit) = setup(1, 6);
        let (_, arr) = analyze_polygon(&orbit).unwrap();
        let cert = map.lip_bound();
        let mut idx = compute_indices(&map, &arr, &cert, &IndexOptions::default(), true).unwrap();
        idx[0].comb_index = 0;
        assert!(matches!(
            positive_index_face(&arr, &idx),
            Err(IndexError::IndexViolation { .. })
        ));
    }
}
