//! Randomized property suites over one problem.
//!
//! Everything is driven by a seeded ChaCha8 stream and the report carries no
//! timing, so a `(problem, seed, trials)` triple always yields the same bytes.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynmap::{
    check_segment_angle, check_segment_displacement, CheckMode, SegmentCheckError,
};
use crate::geom::{BBox, Point2};
use crate::input::Problem;
use crate::linking::{
    arc_independence_check, linking_number, ArcChain, LinkingOptions, LinkingResult, LoopSource,
};
use crate::pipeline::{analyze, AnalyzeOptions, ExitStatus, RunError};

/// Samples per segment `[x, f(x)]`.
pub const SEGMENT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    pub allow_uncertified: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            allow_uncertified: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteOutcome {
    Pass,
    Fail,
    /// Failures are reported but do not affect the exit status.
    Informational,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub outcome: SuiteOutcome,
    pub trials: usize,
    pub failures: usize,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
}

impl SuiteResult {
    fn skipped(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            outcome: SuiteOutcome::Skipped,
            trials: 0,
            failures: 0,
            detail: detail.into(),
            counterexample: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.outcome == SuiteOutcome::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub family: String,
    pub k: f64,
    pub certified: bool,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Point2>,
    pub suites: Vec<SuiteResult>,
    pub status: ExitStatus,
    pub exit_code: i32,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "map: {} (k = {:.6}, {})",
            self.family,
            self.k,
            if self.certified {
                "certified"
            } else {
                "uncertified"
            }
        )?;
        writeln!(
            f,
            "orbit: n = {}; seed = {}, trials = {}",
            self.n, self.seed, self.trials
        )?;
        if let Some(p) = self.fixed_point {
            writeln!(f, "fixed point: ({:.12}, {:.12})", p.x, p.y)?;
        }
        for s in &self.suites {
            let tag = match s.outcome {
                SuiteOutcome::Pass => "pass",
                SuiteOutcome::Fail => "FAIL",
                SuiteOutcome::Informational => "info",
                SuiteOutcome::Skipped => "skip",
            };
            writeln!(
                f,
                "  [{tag}] {}: {} ({} trials, {} failures)",
                s.name, s.detail, s.trials, s.failures
            )?;
            if let Some(c) = &s.counterexample {
                writeln!(f, "         counterexample: {c}")?;
            }
        }
        write!(f, "status: {:?} (exit {})", self.status, self.exit_code)
    }
}

pub fn verify(problem: &Problem, opts: &VerifyOptions) -> Result<VerifyReport, RunError> {
    let analysis = analyze(
        problem,
        &AnalyzeOptions {
            tol: None,
            allow_uncertified: opts.allow_uncertified,
        },
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut suites = segment_suites(problem, analysis.certified, opts.trials, &mut rng);

    let mut status = ExitStatus::Pass;
    let x0 = analysis.fixed_point.as_ref().map(|fp| fp.location);
    let names = ["arc_independence", "loop_agreement", "index_agreement"];
    if !analysis.certified {
        for name in names {
            suites.push(SuiteResult::skipped(name, "map is uncertified"));
        }
    } else if analysis.status != ExitStatus::Pass || x0.is_none() {
        let why = analysis.failure.as_ref().map_or_else(
            || "pipeline checks failed".to_string(),
            |f| format!("{}: {}", f.stage, f.message),
        );
        for name in names {
            suites.push(SuiteResult::skipped(
                name,
                format!("pipeline did not complete ({why})"),
            ));
        }
        status = analysis.status;
    } else {
        let x0 = x0.expect("checked");
        let lopts = LinkingOptions {
            clear_rel: problem.options.loop_clear_rel,
            fixed_tol: Some(
                problem.options.fixed_tol.unwrap_or(
                    problem
                        .orbit
                        .tolerance()
                        .max(2.0 * (1.0 + analysis.cert.k) * analysis.tol),
                ),
            ),
        };
        suites.push(arc_suite(
            problem,
            &analysis.cert,
            x0,
            &lopts,
            opts.trials,
            &mut rng,
        ));
        suites.push(loop_suite(problem, &analysis.cert, x0, &lopts));
        let bad: Vec<_> = analysis.indices.iter().filter(|fi| !fi.agreement).collect();
        suites.push(SuiteResult {
            name: "index_agreement".into(),
            outcome: if bad.is_empty() {
                SuiteOutcome::Pass
            } else {
                SuiteOutcome::Fail
            },
            trials: analysis.indices.len(),
            failures: bad.len(),
            detail: "combinatorial index equals numerical index on every bounded face".into(),
            counterexample: bad.first().map(|fi| serde_json::json!(fi)),
        });
    }
    if status == ExitStatus::Pass && suites.iter().any(SuiteResult::failed) {
        status = ExitStatus::Falsified;
    }
    Ok(VerifyReport {
        seed: opts.seed,
        trials: opts.trials,
        family: problem.map.family(),
        k: analysis.cert.k,
        certified: analysis.certified,
        n: problem.orbit.period(),
        fixed_point: x0,
        suites,
        status,
        exit_code: status.code(),
    })
}

fn sample_box(problem: &Problem) -> BBox {
    let b = BBox::of_points(problem.orbit.points()).expect("non-empty orbit");
    let pad = 0.25 * b.diagonal();
    BBox {
        min: Point2::new(b.min.x - pad, b.min.y - pad),
        max: Point2::new(b.max.x + pad, b.max.y + pad),
    }
}

fn random_point(rng: &mut ChaCha8Rng, b: &BBox) -> Point2 {
    Point2::new(
        rng.random_range(b.min.x..=b.max.x),
        rng.random_range(b.min.y..=b.max.y),
    )
}

/// Segment checks from the orbit points and `trials` random base points.
fn segment_suites(
    problem: &Problem,
    certified: bool,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<SuiteResult> {
    let mode = if certified {
        CheckMode::Certified
    } else {
        CheckMode::Informational
    };
    let b = sample_box(problem);
    let mut bases: Vec<Point2> = problem.orbit.points().to_vec();
    bases.extend((0..trials).map(|_| random_point(rng, &b)));

    let mut l2 = (0usize, 0usize, None::<serde_json::Value>);
    let mut l4 = (0usize, 0usize, None::<serde_json::Value>);
    let mut skipped = 0;
    for &x in &bases {
        match check_segment_displacement(&problem.map, x, SEGMENT_SAMPLES, mode) {
            Ok(r) => {
                l2.0 += 1;
                if !r.passed() {
                    l2.1 += 1;
                    l2.2.get_or_insert_with(
                        || serde_json::json!({ "x": x, "sample": r.violations[0] }),
                    );
                }
            }
            Err(SegmentCheckError::FixedBasePoint) => skipped += 1,
            Err(e) => unreachable!("gate already applied: {e}"),
        }
        if let Ok(r) = check_segment_angle(&problem.map, x, SEGMENT_SAMPLES, mode) {
            l4.0 += 1;
            if !r.passed() {
                l4.1 += 1;
                l4.2.get_or_insert_with(
                    || serde_json::json!({ "x": x, "sample": r.violations[0] }),
                );
            }
        }
    }
    let outcome = |fails: usize| match (certified, fails) {
        (false, _) => SuiteOutcome::Informational,
        (true, 0) => SuiteOutcome::Pass,
        (true, _) => SuiteOutcome::Fail,
    };
    let extra = if skipped > 0 {
        format!(", {skipped} fixed base points skipped")
    } else {
        String::new()
    };
    vec![
        SuiteResult {
            name: "segment_displacement_bound".into(),
            outcome: outcome(l2.1),
            trials: l2.0,
            failures: l2.1,
            detail: format!(
                "|d(y)| >= |d(x)| - k|x - y| > 0 at {SEGMENT_SAMPLES} samples per segment{extra}"
            ),
            counterexample: l2.2,
        },
        SuiteResult {
            name: "segment_angle_bound".into(),
            outcome: outcome(l4.1),
            trials: l4.0,
            failures: l4.1,
            detail: format!("<d(x), d(y)> > 0 at {SEGMENT_SAMPLES} samples per segment{extra}"),
            counterexample: l4.2,
        },
    ]
}

/// A random arc from `x` to `fx` kept at least `clear` away from `x0`:
/// a straight segment, a detour around `x0`, or a random polyline.
pub fn random_arc(rng: &mut ChaCha8Rng, x: Point2, fx: Point2, x0: Point2, clear: f64) -> ArcChain {
    let scale = x.dist(x0).max(fx.dist(x0));
    for _ in 0..64 {
        let arc = match rng.random_range(0..3u8) {
            0 => ArcChain::straight(x, fx),
            1 => {
                let turns = rng.random_range(-2..=2i64);
                let radius = scale * rng.random_range(0.2..1.5);
                ArcChain::detour(x, fx, x0, turns, radius)
            }
            _ => {
                let m = rng.random_range(1..=4usize);
                let mut pts = vec![x];
                for _ in 0..m {
                    let r = scale * rng.random_range(0.2..1.5);
                    pts.push(Point2::polar(x0, r, rng.random_range(0.0..2.0 * PI)));
                }
                pts.push(fx);
                ArcChain::new(pts)
            }
        };
        if let Ok(a) = arc {
            if a.distance_to(x0) >= clear {
                return a;
            }
        }
    }
    ArcChain::straight(x, fx).expect("distinct orbit points")
}

fn arc_suite(
    problem: &Problem,
    cert: &crate::dynmap::LipschitzCertificate,
    x0: Point2,
    lopts: &LinkingOptions,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> SuiteResult {
    let pts = problem.orbit.points();
    let (x, fx) = (pts[0], pts[1]);
    let clear = 0.05 * x.dist(x0).min(fx.dist(x0));
    let n = problem.orbit.period() as i64;
    let mut failures = 0;
    let mut counterexample = None;
    let mut multiples = BTreeSet::new();
    for _ in 0..trials {
        let c = random_arc(rng, x, fx, x0, clear);
        let c2 = random_arc(rng, x, fx, x0, clear);
        match arc_independence_check(&problem.map, cert, &problem.orbit, &c, &c2, x0, lopts) {
            Ok(r) if r.passed() => {
                multiples.insert((r.omega_second - r.omega_first) / n);
            }
            res => {
                failures += 1;
                counterexample.get_or_insert_with(|| {
                    serde_json::json!({
                        "c": c.points(),
                        "c2": c2.points(),
                        "result": match res {
                            Ok(r) => serde_json::json!(r),
                            Err(e) => serde_json::json!(e.to_string()),
                        },
                    })
                });
            }
        }
    }
    let observed: Vec<String> = multiples.iter().map(|m| m.to_string()).collect();
    SuiteResult {
        name: "arc_independence".into(),
        outcome: if failures == 0 { SuiteOutcome::Pass } else { SuiteOutcome::Fail },
        trials,
        failures,
        detail: format!(
            "winding differences equal n * winding of the difference loop; multiples of n seen: {{{}}}",
            observed.join(", ")
        ),
        counterexample,
    }
}

/// Straight-arc loop from every orbit point against the orbit polygon.
fn loop_suite(
    problem: &Problem,
    cert: &crate::dynmap::LipschitzCertificate,
    x0: Point2,
    lopts: &LinkingOptions,
) -> SuiteResult {
    let n = problem.orbit.period();
    let gamma = linking_number(
        x0,
        &problem.orbit,
        &problem.map,
        cert,
        LoopSource::Gamma,
        lopts,
    );
    let mut failures = 0;
    let mut counterexample = None;
    let mut lks = BTreeSet::new();
    for s in 0..n {
        let orbit = problem.orbit.rotated(s);
        let straight = linking_number(
            x0,
            &orbit,
            &problem.map,
            cert,
            LoopSource::StraightArc,
            lopts,
        );
        let ok = match (&straight, &gamma) {
            (Ok(a), Ok(g)) => a.omega == g.omega && g.omega.abs() < n as i64,
            _ => false,
        };
        if let Ok(a) = &straight {
            lks.insert(a.lk);
        }
        if !ok {
            failures += 1;
            counterexample.get_or_insert_with(|| {
                let show = |r: &Result<LinkingResult, _>| match r {
                    Ok(v) => serde_json::json!(v),
                    Err(e) => serde_json::json!(format!("{e}")),
                };
                serde_json::json!({ "base_index": s, "straight": show(&straight), "gamma": show(&gamma) })
            });
        }
    }
    let lk: Vec<String> = lks.iter().map(|v| v.to_string()).collect();
    SuiteResult {
        name: "loop_agreement".into(),
        outcome: if failures == 0 { SuiteOutcome::Pass } else { SuiteOutcome::Fail },
        trials: n,
        failures,
        detail: format!(
            "straight-arc loop from each orbit point winds like the orbit polygon; lk values seen: {{{}}}",
            lk.join(", ")
        ),
        counterexample,
    }
}
