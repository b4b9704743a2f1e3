//! The orbit polygon and the planar subdivision it induces.
//!
//! The arrangement is a half-edge structure over the orbit points plus all
//! pairwise segment intersections. Each half-edge remembers which polygon
//! segment it lies on and whether it runs with or against the polygon's
//! orientation; that flag drives both the winding propagation and the
//! orientation-change count used for face indices.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynmap::PeriodicOrbit;
use crate::geom::{
    point_segment_distance, seg_intersect, signed_area, winding_anglesum, winding_number, BBox,
    ClosedChain, GeomError, IntersectionKind, Point2, Segment, Vec2,
};

/// Relative snapping distance for intersection vertices.
pub const SNAP_REL: f64 = 1e-9;

/// Required interior clearance of face sample points, relative to the face.
pub const SAMPLE_CLEARANCE_REL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArrangementError {
    #[error("orbit polygon needs at least 2 segments")]
    TooFewSegments,
    #[error("consecutive orbit points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("segments {0} and {1} overlap collinearly; perturb the orbit")]
    Overlap(usize, usize),
    #[error("orbit points {0} and {1} merge under snapping; perturb the orbit")]
    SnapCollision(usize, usize),
    #[error("segment {0} revisits a vertex after snapping; perturb the orbit")]
    SnapTopology(usize),
    #[error("the orbit polygon bounds no face (all points collinear?)")]
    NoBoundedFace,
    #[error("face {face} is a sliver with no interior point at the required clearance")]
    Sliver { face: usize },
    #[error("expected exactly one unbounded face, found {0}")]
    UnboundedFaces(usize),
    #[error("Euler relation violated: V={v} E={e} F={f}")]
    Euler { v: usize, e: usize, f: usize },
    #[error("face {face}: ray winding {ray} disagrees with propagated winding {propagated}")]
    WindingMismatch {
        face: usize,
        ray: i64,
        propagated: i64,
    },
    #[error("winding propagation is inconsistent at face {0}")]
    PropagationConflict(usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl ArrangementError {
    /// Input degeneracies the caller can fix by perturbing the orbit, as
    /// opposed to internal consistency failures.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            ArrangementError::TooFewSegments
                | ArrangementError::CoincidentPoints(..)
                | ArrangementError::Overlap(..)
                | ArrangementError::SnapCollision(..)
                | ArrangementError::SnapTopology(..)
                | ArrangementError::NoBoundedFace
                | ArrangementError::Sliver { .. }
        )
    }
}

/// The closed polygon through the orbit points in dynamical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPolygon {
    points: Vec<Point2>,
}

impl OrbitPolygon {
    /// Any closed polygon with distinct consecutive vertices, in order.
    pub fn from_points(points: Vec<Point2>) -> Result<Self, ArrangementError> {
        let n = points.len();
        if n < 2 {
            return Err(ArrangementError::TooFewSegments);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite.into());
        }
        for i in 0..n {
            if points[i] == points[(i + 1) % n] {
                return Err(ArrangementError::CoincidentPoints(i, (i + 1) % n));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Segment `i` runs from `points[i]` to `points[i + 1 mod n]`.
    pub fn segment(&self, i: usize) -> Segment {
        let n = self.points.len();
        Segment::new(self.points[i], self.points[(i + 1) % n])
    }

    pub fn segments(&self) -> Vec<Segment> {
        (0..self.points.len()).map(|i| self.segment(i)).collect()
    }

    pub fn chain(&self) -> ClosedChain {
        ClosedChain::new(self.points.clone()).expect("validated polygon")
    }

    pub fn diameter(&self) -> f64 {
        BBox::of_points(&self.points).map_or(0.0, |b| b.diagonal())
    }
}

pub fn build_gamma(orbit: &PeriodicOrbit) -> Result<OrbitPolygon, ArrangementError> {
    OrbitPolygon::from_points(orbit.points().to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdge {
    pub origin: usize,
    pub twin: usize,
    pub next: usize,
    pub face: usize,
    /// Index of the polygon segment this edge lies on.
    pub segment: usize,
    /// True when the half-edge runs in the polygon's direction.
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub id: usize,
    pub bounded: bool,
    /// Half-edge cycle with the face on its left: counterclockwise for
    /// bounded faces. The polygon is connected, so one cycle per face.
    pub boundary: Vec<usize>,
    pub omega: i64,
    pub sample_point: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrangement {
    pub vertices: Vec<Point2>,
    pub half_edges: Vec<HalfEdge>,
    pub faces: Vec<Face>,
    pub unbounded: usize,
    /// Set once [`face_windings`] has filled in `Face::omega`.
    pub windings_assigned: bool,
    /// Vertices that are segment crossings rather than orbit points.
    pub crossing_vertices: Vec<usize>,
}

impl Arrangement {
    pub fn num_edges(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn bounded_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.bounded)
    }

    pub fn destination(&self, h: usize) -> usize {
        self.half_edges[self.half_edges[h].twin].origin
    }

    /// Vertex positions along the face boundary, in cycle order.
    pub fn face_polygon(&self, face: usize) -> Vec<Point2> {
        self.faces[face]
            .boundary
            .iter()
            .map(|&h| self.vertices[self.half_edges[h].origin])
            .collect()
    }

    pub fn face_area(&self, face: usize) -> f64 {
        signed_area(&self.face_polygon(face))
    }

    pub fn face_diameter(&self, face: usize) -> f64 {
        BBox::of_points(&self.face_polygon(face)).map_or(0.0, |b| b.diagonal())
    }

    /// The face across half-edge `h` from the face on its left.
    pub fn neighbour(&self, h: usize) -> usize {
        self.half_edges[self.half_edges[h].twin].face
    }
}

struct VertexSnapper {
    eps: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point2>,
}

impl VertexSnapper {
    fn new(eps: f64) -> Self {
        Self {
            eps,
            cells: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn cell(&self, p: Point2) -> (i64, i64) {
        (
            (p.x / self.eps).floor() as i64,
            (p.y / self.eps).floor() as i64,
        )
    }

    fn find(&self, p: Point2) -> Option<usize> {
        let (cx, cy) = self.cell(p);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        let d = self.points[id].dist(p);
                        if d <= self.eps && best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        best.map(|(_, id)| id)
    }

    fn insert_new(&mut self, p: Point2) -> usize {
        let id = self.points.len();
        self.points.push(p);
        let c = self.cell(p);
        self.cells.entry(c).or_default().push(id);
        id
    }

    fn insert(&mut self, p: Point2) -> usize {
        self.find(p).unwrap_or_else(|| self.insert_new(p))
    }
}

/// Builds the half-edge subdivision of the plane induced by `gamma`, with a
/// sample point inside every face. Windings are filled by [`face_windings`].
pub fn build_arrangement(gamma: &OrbitPolygon) -> Result<Arrangement, ArrangementError> {
    let n = gamma.len();
    if n < 2 {
        return Err(ArrangementError::TooFewSegments);
    }
    let segments = gamma.segments();
    let eps = SNAP_REL * gamma.diameter();
    let mut snapper = VertexSnapper::new(eps);

    for (i, &p) in gamma.points().iter().enumerate() {
        if let Some(j) = snapper.find(p) {
            return Err(ArrangementError::SnapCollision(j, i));
        }
        snapper.insert_new(p);
    }

    // Per-segment list of (parameter, vertex).
    let mut on_segment: Vec<Vec<(f64, usize)>> =
        (0..n).map(|i| vec![(0.0, i), (1.0, (i + 1) % n)]).collect();
    let mut crossing_vertices = Vec::new();

    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            match seg_intersect(&segments[i], &segments[j]) {
                IntersectionKind::None => {}
                IntersectionKind::Overlap(_) => return Err(ArrangementError::Overlap(i, j)),
                IntersectionKind::Point { point, t1, t2 } => {
                    let shared = if j == i + 1 {
                        Some(j)
                    } else if i == 0 && j == n - 1 {
                        Some(0)
                    } else {
                        None
                    };
                    if adjacent && shared.is_some_and(|v| gamma.points()[v] == point) {
                        continue;
                    }
                    let before = snapper.points.len();
                    let v = snapper.insert(point);
                    if v >= before {
                        crossing_vertices.push(v);
                    }
                    on_segment[i].push((t1, v));
                    on_segment[j].push((t2, v));
                }
            }
        }
    }

    // Split segments into edges.
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (s, list) in on_segment.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        list.dedup_by_key(|e| e.1);
        let mut visited = std::collections::HashSet::new();
        for &(_, v) in list.iter() {
            if !visited.insert(v) {
                return Err(ArrangementError::SnapTopology(s));
            }
        }
        for w in list.windows(2) {
            let (u, v) = (w[0].1, w[1].1);
            let key = (u.min(v), u.max(v));
            if let Some(&other) = seen.get(&key) {
                return Err(ArrangementError::Overlap(other.min(s), other.max(s)));
            }
            seen.insert(key, s);
            edges.push((u, v, s));
        }
    }

    let vertices = snapper.points;
    let mut half_edges = Vec::with_capacity(2 * edges.len());
    for (e, &(u, v, s)) in edges.iter().enumerate() {
        half_edges.push(HalfEdge {
            origin: u,
            twin: 2 * e + 1,
            next: usize::MAX,
            face: usize::MAX,
            segment: s,
            agrees: true,
        });
        half_edges.push(HalfEdge {
            origin: v,
            twin: 2 * e,
            next: usize::MAX,
            face: usize::MAX,
            segment: s,
            agrees: false,
        });
    }

    // Outgoing half-edges around each vertex, counterclockwise by angle.
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (h, he) in half_edges.iter().enumerate() {
        outgoing[he.origin].push(h);
    }
    let direction = |h: usize| -> Vec2 {
        let he = &half_edges[h];
        vertices[half_edges[he.twin].origin] - vertices[he.origin]
    };
    let mut position = vec![0usize; half_edges.len()];
    for list in outgoing.iter_mut() {
        list.sort_by(|&a, &b| {
            let da = direction(a);
            let db = direction(b);
            da.dy.atan2(da.dx).total_cmp(&db.dy.atan2(db.dx))
        });
        for (i, &h) in list.iter().enumerate() {
            position[h] = i;
        }
    }
    // next(h) is the clockwise neighbour of twin(h) around h's destination,
    // which keeps the traced face on the left of h.
    for h in 0..half_edges.len() {
        let t = half_edges[h].twin;
        let v = half_edges[t].origin;
        let list = &outgoing[v];
        let i = position[t];
        half_edges[h].next = list[(i + list.len() - 1) % list.len()];
    }

    // Trace face cycles.
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..half_edges.len() {
        if half_edges[start].face != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut cycle = Vec::new();
        let mut h = start;
        loop {
            half_edges[h].face = id;
            cycle.push(h);
            h = half_edges[h].next;
            if h == start {
                break;
            }
        }
        cycles.push(cycle);
    }

    let areas: Vec<f64> = cycles
        .iter()
        .map(|c| {
            signed_area(
                &c.iter()
                    .map(|&h| vertices[half_edges[h].origin])
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let unbounded: Vec<usize> = (0..cycles.len()).filter(|&i| areas[i] <= 0.0).collect();
    if cycles.len() == 1 || areas.iter().all(|&a| a <= 0.0) {
        return Err(ArrangementError::NoBoundedFace);
    }
    if unbounded.len() != 1 {
        return Err(ArrangementError::UnboundedFaces(unbounded.len()));
    }
    let unbounded = unbounded[0];

    let (v, e, f) = (vertices.len(), edges.len(), cycles.len());
    if v as i64 - e as i64 + f as i64 != 2 {
        return Err(ArrangementError::Euler { v, e, f });
    }

    let bbox = BBox::of_points(&vertices).expect("non-empty");
    let outside = Point2::new(
        bbox.max.x + bbox.diagonal(),
        bbox.max.y + 0.618 * bbox.diagonal(),
    );
    let faces = cycles
        .into_iter()
        .enumerate()
        .map(|(id, boundary)| Face {
            id,
            bounded: id != unbounded,
            boundary,
            omega: 0,
            sample_point: outside,
        })
        .collect();

    let mut arr = Arrangement {
        vertices,
        half_edges,
        faces,
        unbounded,
        windings_assigned: false,
        crossing_vertices,
    };
    for id in 0..arr.faces.len() {
        if arr.faces[id].bounded {
            arr.faces[id].sample_point = sample_interior(&arr, id)?;
        }
    }
    Ok(arr)
}

/// A deterministic point strictly inside a bounded face.
///
/// Candidates are offsets of edge midpoints along the inward normal, halfway
/// to the first boundary hit; the candidate with the best clearance wins.
/// The required clearance starts at `1e-6 * face diameter` and is relaxed by
/// 10x up to three times.
pub fn sample_interior(arr: &Arrangement, face: usize) -> Result<Point2, ArrangementError> {
    let poly = arr.face_polygon(face);
    let m = poly.len();
    let diameter = BBox::of_points(&poly).map_or(0.0, |b| b.diagonal());
    if !arr.faces[face].bounded || m < 3 || diameter == 0.0 || signed_area(&poly) <= 0.0 {
        return Err(ArrangementError::Sliver { face });
    }
    let chain = ClosedChain::new(poly.clone()).map_err(|_| ArrangementError::Sliver { face })?;

    let mut best: Option<(f64, Point2)> = None;
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let Some(inward) = (b - a).perp().normalized() else {
            continue;
        };
        let mid = a.midpoint(b);
        let mut hit = f64::INFINITY;
        for j in 0..m {
            if j == i {
                continue;
            }
            if let Some(t) = ray_hit(mid, inward, poly[j], poly[(j + 1) % m]) {
                hit = hit.min(t);
            }
        }
        if !hit.is_finite() || hit <= 0.0 {
            continue;
        }
        let candidate = mid + inward * (0.5 * hit);
        let clearance = (0..m)
            .map(|j| point_segment_distance(candidate, poly[j], poly[(j + 1) % m]))
            .fold(f64::INFINITY, f64::min);
        if best.is_none_or(|(c, _)| clearance > c)
            && winding_anglesum(&chain, candidate, Some(0.0)) == Ok(1)
        {
            best = Some((clearance, candidate));
        }
    }

    let mut required = SAMPLE_CLEARANCE_REL * diameter;
    for _ in 0..4 {
        if let Some((c, p)) = best {
            if c >= required {
                return Ok(p);
            }
        }
        required /= 10.0;
    }
    Err(ArrangementError::Sliver { face })
}

/// Distance along the ray `origin + t * dir` (t > 0) to segment `[a, b]`.
fn ray_hit(origin: Point2, dir: Vec2, a: Point2, b: Point2) -> Option<f64> {
    let e = b - a;
    let denom = dir.cross(e);
    if denom == 0.0 {
        return None;
    }
    let w = a - origin;
    let t = w.cross(e) / denom;
    let s = w.cross(dir) / denom;
    (t > 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
}

/// Assigns `omega` to every face two ways and cross-checks them: ray-cast
/// winding at the sample point, and propagation outward from the unbounded
/// face (crossing the polygon from its right to its left adds one).
pub fn face_windings(
    mut arr: Arrangement,
    gamma: &OrbitPolygon,
) -> Result<Arrangement, ArrangementError> {
    let propagated = propagate_windings(&arr)?;
    let chain = gamma.chain();
    for face in arr.faces.iter_mut() {
        let ray = if face.bounded {
            winding_number(&chain, face.sample_point)?
        } else {
            0
        };
        let prop = propagated[face.id];
        if ray != prop {
            return Err(ArrangementError::WindingMismatch {
                face: face.id,
                ray,
                propagated: prop,
            });
        }
        face.omega = ray;
    }
    arr.windings_assigned = true;
    Ok(arr)
}

fn propagate_windings(arr: &Arrangement) -> Result<Vec<i64>, ArrangementError> {
    let mut omega: Vec<Option<i64>> = vec![None; arr.faces.len()];
    omega[arr.unbounded] = Some(0);
    let mut queue = VecDeque::from([arr.unbounded]);
    while let Some(f) = queue.pop_front() {
        let w = omega[f].expect("queued faces are assigned");
        for &h in &arr.faces[f].boundary {
            // The face on the left of h sits on the polygon's left iff h agrees.
            let step = if arr.half_edges[h].agrees { 1 } else { -1 };
            let g = arr.neighbour(h);
            let wg = w - step;
            match omega[g] {
                None => {
                    omega[g] = Some(wg);
                    queue.push_back(g);
                }
                Some(existing) if existing != wg => {
                    return Err(ArrangementError::PropagationConflict(g));
                }
                Some(_) => {}
            }
        }
    }
    omega
        .into_iter()
        .enumerate()
        .map(|(i, w)| w.ok_or(ArrangementError::PropagationConflict(i)))
        .collect()
}

/// Convenience: polygon, subdivision and windings in one call.
pub fn analyze_polygon(
    orbit: &PeriodicOrbit,
) -> Result<(OrbitPolygon, Arrangement), ArrangementError> {
    let gamma = build_gamma(orbit)?;
    let arr = build_arrangement(&gamma)?;
    let arr = face_windings(arr, &gamma)?;
    Ok((gamma, arr))
}
