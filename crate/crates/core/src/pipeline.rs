//! The full analysis: orbit polygon, faces, indices, fixed point, linking.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{analyze_polygon, Arrangement, OrbitPolygon};
use crate::dynmap::{CertificateTerm, LipschitzCertificate};
use crate::fixpoint::{locate_fixed_point, FixedPointResult, FixpointError};
use crate::geom::Point2;
use crate::index::{
    comb_index, compute_indices, num_index, orientation_changes, positive_index_face, FaceIndex,
    IndexError, IndexOptions,
};
use crate::input::{InputError, Problem};
use crate::linking::{linking_number, LinkingOptions, LinkingResult, LoopSource};

/// Process exit status contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Pass,
    InputError,
    Degenerate,
    Falsified,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::InputError => 2,
            ExitStatus::Degenerate => 3,
            ExitStatus::Falsified => 4,
        }
    }
}

/// Failures that happen before any report can be produced.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("map is not certified: Lip(f - Id) <= {k} > 1 (pass --allow-uncertified to run informationally)\n{breakdown}")]
    Uncertified { k: f64, breakdown: String },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
}

impl RunError {
    pub fn status(&self) -> ExitStatus {
        ExitStatus::InputError
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyzeOptions {
    /// Overrides the input's fixed-point tolerance.
    pub tol: Option<f64>,
    pub allow_uncertified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<serde_json::Value>,
}

/// Everything computed for one problem, kept for rendering and reporting.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub cert: LipschitzCertificate,
    pub certified: bool,
    pub tol: f64,
    pub gamma: Option<OrbitPolygon>,
    pub arrangement: Option<Arrangement>,
    /// One row per face; `num_index` is absent when it could not be
    /// evaluated in informational mode.
    pub face_rows: Vec<FaceRow>,
    pub indices: Vec<FaceIndex>,
    pub chosen_face: Option<usize>,
    pub fixed_point: Option<FixedPointResult>,
    pub linking_straight: Option<LinkingResult>,
    pub linking_gamma: Option<LinkingResult>,
    pub checks: Vec<Check>,
    pub failure: Option<Failure>,
    pub status: ExitStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRow {
    pub id: usize,
    pub bounded: bool,
    pub omega: i64,
    pub orientation_changes: Option<usize>,
    pub comb_index: Option<i64>,
    pub num_index: Option<i64>,
    pub area: f64,
}

type StageResult = Result<(), (ExitStatus, Failure)>;

fn fail(status: ExitStatus, stage: &str, message: impl fmt::Display) -> (ExitStatus, Failure) {
    (
        status,
        Failure {
            stage: stage.into(),
            message: message.to_string(),
            dump: None,
        },
    )
}

/// Runs the pipeline. Errors are input problems; everything after input
/// validation is recorded in the returned [`Analysis`].
pub fn analyze(problem: &Problem, opts: &AnalyzeOptions) -> Result<Analysis, RunError> {
    let tol = opts.tol.unwrap_or(problem.options.tol);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(RunError::BadTolerance(tol));
    }
    let cert = problem.certificate();
    let certified = cert.is_contracting();
    if !certified && !opts.allow_uncertified {
        return Err(RunError::Uncertified {
            k: cert.k,
            breakdown: cert.breakdown(),
        });
    }
    let mut a = Analysis {
        cert,
        certified,
        tol,
        gamma: None,
        arrangement: None,
        face_rows: Vec::new(),
        indices: Vec::new(),
        chosen_face: None,
        fixed_point: None,
        linking_straight: None,
        linking_gamma: None,
        checks: Vec::new(),
        failure: None,
        status: ExitStatus::Pass,
    };
    if let Err((status, failure)) = a.run(problem) {
        a.status = status;
        a.failure = Some(failure);
    } else if a.checks.iter().any(|c| !c.passed) {
        a.status = ExitStatus::Falsified;
    }
    Ok(a)
}

impl Analysis {
    fn run(&mut self, problem: &Problem) -> StageResult {
        let map = &problem.map;
        let (gamma, arr) = analyze_polygon(&problem.orbit).map_err(|e| {
            let status = if e.is_degeneracy() {
                ExitStatus::Degenerate
            } else {
                ExitStatus::Falsified
            };
            fail(status, "arrangement", e)
        })?;
        let v = arr.vertices.len();
        let e = arr.num_edges();
        let f = arr.faces.len();
        self.checks.push(Check::new(
            "euler",
            v + f == e + 2,
            format!(
                "V={v} E={e} F={f}, {} crossings",
                arr.crossing_vertices.len()
            ),
        ));
        self.gamma = Some(gamma);

        let iopts = IndexOptions {
            allow_uncertified: !self.certified,
            step_scale: problem.options.step_scale,
        };
        if self.certified {
            let indices = compute_indices(map, &arr, &self.cert, &iopts, false)
                .map_err(|e| fail(ExitStatus::Falsified, "indices", e))?;
            self.face_rows = face_rows(&arr, |id| {
                let fi = indices.iter().find(|fi| fi.face == id);
                (
                    fi.map(|x| x.orientation_changes),
                    fi.map(|x| x.comb_index),
                    fi.map(|x| x.num_index),
                )
            });
            let bad: Vec<_> = indices.iter().filter(|fi| !fi.agreement).collect();
            self.checks.push(Check::new(
                "index_agreement",
                bad.is_empty(),
                format!(
                    "{} bounded faces, {} disagreements",
                    indices.len(),
                    bad.len()
                ),
            ));
            if !bad.is_empty() {
                let dump = serde_json::json!(bad
                    .iter()
                    .map(|fi| serde_json::json!({
                        "face": fi.face,
                        "polygon": arr.face_polygon(fi.face),
                        "comb_index": fi.comb_index,
                        "num_index": fi.num_index,
                    }))
                    .collect::<Vec<_>>());
                self.arrangement = Some(arr);
                let (s, mut f) = fail(
                    ExitStatus::Falsified,
                    "indices",
                    "combinatorial and numerical indices disagree",
                );
                f.dump = Some(dump);
                return Err((s, f));
            }
            self.indices = indices;
        } else {
            self.face_rows = face_rows(&arr, |id| {
                let changes = orientation_changes(&arr, id).ok();
                let num = num_index(map, &arr, id, &self.cert, &iopts).ok();
                (changes, changes.map(comb_index), num)
            });
            self.checks.push(Check::new(
                "certified_assertions",
                true,
                format!("skipped: certificate k = {} > 1", self.cert.k),
            ));
            self.arrangement = Some(arr);
            return Ok(());
        }

        let chosen = positive_index_face(&arr, &self.indices).map_err(|e| {
            let mut f = fail(ExitStatus::Falsified, "positive_index_face", &e);
            if let IndexError::IndexViolation { face, .. } = e {
                f.1.dump = Some(serde_json::json!({ "polygon": arr.face_polygon(face) }));
            }
            f
        })?;
        self.chosen_face = Some(chosen);
        let fi = self
            .indices
            .iter()
            .find(|fi| fi.face == chosen)
            .expect("bounded face")
            .clone();
        self.checks.push(Check::new(
            "positive_index",
            fi.comb_index >= 1,
            format!(
                "face {chosen}: omega = {}, index = {}",
                arr.faces[chosen].omega, fi.comb_index
            ),
        ));

        let fp = locate_fixed_point(map, &self.cert, &arr, &fi, self.tol).map_err(|e| {
            let status = match e {
                FixpointError::JitterExhausted(_) => ExitStatus::Degenerate,
                _ => ExitStatus::Falsified,
            };
            fail(status, "fixed_point", e)
        })?;
        self.arrangement = Some(arr);
        let additive = fp.steps.iter().filter(|s| s.is_additive()).count();
        self.checks.push(Check::new(
            "degree_additivity",
            additive == fp.steps.len(),
            format!(
                "{additive}/{} subdivision steps conserve degree",
                fp.steps.len()
            ),
        ));
        let bound = 2.0 * (1.0 + self.cert.k) * self.tol;
        self.checks.push(Check::new(
            "residual_bound",
            fp.residual <= bound,
            format!("residual {:e} <= 2(1+k) tol = {:e}", fp.residual, bound),
        ));
        let x0 = fp.location;
        self.fixed_point = Some(fp);

        let lopts = LinkingOptions {
            clear_rel: problem.options.loop_clear_rel,
            fixed_tol: Some(
                problem
                    .options
                    .fixed_tol
                    .unwrap_or(problem.orbit.tolerance().max(bound)),
            ),
        };
        let straight = linking_number(
            x0,
            &problem.orbit,
            map,
            &self.cert,
            LoopSource::StraightArc,
            &lopts,
        )
        .map_err(|e| fail(ExitStatus::Falsified, "linking_straight_arc", e))?;
        let gamma = linking_number(
            x0,
            &problem.orbit,
            map,
            &self.cert,
            LoopSource::Gamma,
            &lopts,
        )
        .map_err(|e| fail(ExitStatus::Falsified, "linking_gamma", e))?;
        let n = problem.orbit.period() as i64;
        self.checks.push(Check::new(
            "loop_agreement",
            straight.omega == gamma.omega,
            format!(
                "omega(straight arc loop) = {}, omega(orbit polygon) = {}",
                straight.omega, gamma.omega
            ),
        ));
        self.checks.push(Check::new(
            "gamma_winding_bound",
            gamma.omega.abs() < n,
            format!("|{}| <= n - 1 = {}", gamma.omega, n - 1),
        ));
        self.checks.push(Check::new(
            "linking_nonzero",
            straight.lk != 0,
            format!("lk = {}", straight.lk),
        ));
        self.linking_straight = Some(straight);
        self.linking_gamma = Some(gamma);
        Ok(())
    }

    pub fn report(&self, problem: &Problem, timing_ms: Option<f64>) -> RunReport {
        let arrangement = self.arrangement.as_ref().map(|arr| ArrangementSummary {
            vertices: arr.vertices.len(),
            edges: arr.num_edges(),
            faces: arr.faces.len(),
            crossings: arr.crossing_vertices.len(),
        });
        RunReport {
            map: MapSummary {
                family: problem.map.family(),
                k: self.cert.k,
                lip_map: self.cert.lip_map,
                certified: self.certified,
                terms: self.cert.terms.clone(),
            },
            orbit: OrbitSummary {
                n: problem.orbit.period(),
                residual: problem.orbit.residual(),
                tolerance: problem.orbit.tolerance(),
                diameter: problem.orbit.diameter(),
            },
            tol: self.tol,
            arrangement,
            faces: self.face_rows.clone(),
            chosen_face: self.chosen_face,
            fixed_point: self.fixed_point.as_ref().map(|fp| FixedPointSummary {
                location: fp.location,
                residual: fp.residual,
                box_radius: fp.box_radius,
                degree: fp.degree,
                steps: fp.steps.len(),
                multiple_fixed_points: fp.multiple_fixed_points,
            }),
            linking: match (&self.linking_straight, &self.linking_gamma) {
                (Some(s), Some(g)) => Some(LinkingSummary {
                    n: s.n,
                    omega_straight_arc: s.omega,
                    omega_gamma: g.omega,
                    lk: s.lk,
                }),
                _ => None,
            },
            checks: self.checks.clone(),
            status: self.status,
            exit_code: self.status.code(),
            failure: self.failure.clone(),
            timing_ms,
        }
    }
}

type RowIndex = (Option<usize>, Option<i64>, Option<i64>);

fn face_rows(arr: &Arrangement, mut index: impl FnMut(usize) -> RowIndex) -> Vec<FaceRow> {
    arr.faces
        .iter()
        .map(|f| {
            let (changes, comb, num) = if f.bounded {
                index(f.id)
            } else {
                (None, None, None)
            };
            FaceRow {
                id: f.id,
                bounded: f.bounded,
                omega: f.omega,
                orientation_changes: changes,
                comb_index: comb,
                num_index: num,
                area: if f.bounded { arr.face_area(f.id) } else { 0.0 },
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub family: String,
    pub k: f64,
    pub lip_map: f64,
    pub certified: bool,
    pub terms: Vec<CertificateTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub n: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrangementSummary {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub crossings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSummary {
    pub location: Point2,
    pub residual: f64,
    pub box_radius: f64,
    pub degree: i64,
    pub steps: usize,
    pub multiple_fixed_points: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkingSummary {
    pub n: usize,
    pub omega_straight_arc: i64,
    pub omega_gamma: i64,
    pub lk: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub map: MapSummary,
    pub orbit: OrbitSummary,
    pub tol: f64,
    pub arrangement: Option<ArrangementSummary>,
    pub faces: Vec<FaceRow>,
    pub chosen_face: Option<usize>,
    pub fixed_point: Option<FixedPointSummary>,
    pub linking: Option<LinkingSummary>,
    pub checks: Vec<Check>,
    pub status: ExitStatus,
    pub exit_code: i32,
    pub failure: Option<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".into(), |x| x.to_string())
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map: {}", self.map.family)?;
        writeln!(
            f,
            "  Lip(f - Id) <= {:.6} ({}), Lip(f) <= {:.6}",
            self.map.k,
            if self.map.certified {
                "certified"
            } else {
                "UNCERTIFIED"
            },
            self.map.lip_map
        )?;
        for t in &self.map.terms {
            writeln!(f, "    {:<24} {:<12} {:.6}", t.component, t.kind, t.k)?;
        }
        writeln!(
            f,
            "orbit: n = {}, residual = {:e}",
            self.orbit.n, self.orbit.residual
        )?;
        if let Some(a) = &self.arrangement {
            writeln!(
                f,
                "arrangement: V = {}, E = {}, F = {}, crossings = {}",
                a.vertices, a.edges, a.faces, a.crossings
            )?;
            writeln!(
                f,
                "  {:>4} {:>7} {:>6} {:>4} {:>5} {:>5} {:>12}",
                "face", "bounded", "omega", "2p", "comb", "num", "area"
            )?;
            for r in &self.faces {
                writeln!(
                    f,
                    "  {:>4} {:>7} {:>6} {:>4} {:>5} {:>5} {:>12.6}",
                    r.id,
                    r.bounded,
                    r.omega,
                    opt(&r.orientation_changes),
                    opt(&r.comb_index),
                    opt(&r.num_index),
                    r.area
                )?;
            }
        }
        if let Some(c) = self.chosen_face {
            writeln!(f, "chosen face: {c}")?;
        }
        if let Some(p) = &self.fixed_point {
            writeln!(
                f,
                "fixed point: ({:.12}, {:.12}), residual = {:e}, degree = {}, {} steps",
                p.location.x, p.location.y, p.residual, p.degree, p.steps
            )?;
        }
        if let Some(l) = &self.linking {
            writeln!(
                f,
                "linking: omega = {} (arc loop), {} (orbit polygon), lk = {} mod {}",
                l.omega_straight_arc, l.omega_gamma, l.lk, l.n
            )?;
        }
        writeln!(f, "checks:")?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        if let Some(fl) = &self.failure {
            writeln!(f, "failure at {}: {}", fl.stage, fl.message)?;
        }
        if let Some(t) = self.timing_ms {
            writeln!(f, "time: {t:.1} ms")?;
        }
        write!(f, "status: {:?} (exit {})", self.status, self.exit_code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::rotation_problem;
    use crate::dynmap::MapSpec;
    use crate::input::Options;

    #[test]
    fn hexagon_passes() {
        let p = rotation_problem(1, 6, Point2::ORIGIN, 1.0, 0.0);
        let a = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(a.status, ExitStatus::Pass, "{:?}", a.failure);
        let r = a.report(&p, None);
        assert_eq!(r.linking.as_ref().unwrap().lk, 1);
        assert_eq!(r.faces.len(), 2);
        assert!(r.fixed_point.unwrap().location.dist(Point2::ORIGIN) < 1e-8);
    }

    #[test]
    fn star_passes() {
        let p = rotation_problem(2, 13, Point2::ORIGIN, 1.0, 0.0);
        let a = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(a.status, ExitStatus::Pass, "{:?}", a.failure);
        assert_eq!(a.linking_straight.unwrap().lk, 2);
        assert_eq!(a.face_rows.iter().filter(|r| r.bounded).count(), 14);
    }

    #[test]
    fn uncertified_gate() {
        let half = MapSpec::rotation(Point2::ORIGIN, std::f64::consts::PI);
        let p = Problem::new(
            half,
            vec![Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)],
            Options::default(),
        )
        .unwrap();
        let err = analyze(&p, &AnalyzeOptions::default()).unwrap_err();
        assert!(matches!(err, RunError::Uncertified { .. }));
        assert_eq!(err.status().code(), 2);
        let a = analyze(
            &p,
            &AnalyzeOptions {
                allow_uncertified: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a.status, ExitStatus::Degenerate);
    }
}
