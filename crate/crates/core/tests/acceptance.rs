//! One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linkfix::corpus::{certified_corpus, rotation_problem, CorpusEntry};
use linkfix::dynmap::MapSpec;
use linkfix::geom::{winding_anglesum, winding_number, ClosedChain, Point2};
use linkfix::input::{Options, Problem};
use linkfix::pipeline::{analyze, Analysis, AnalyzeOptions, ExitStatus};
use linkfix::verify::{verify, SuiteOutcome, VerifyOptions, VerifyReport};

const FIXED_POINT_TOL: f64 = 1e-8;
const ORIGIN_DISTANCE: f64 = 1e-8;
const RUNTIME_LIMIT_S: f64 = 1.0;
const TRIALS: usize = 100;
const WINDING_PAIRS: usize = 1000;
const WINDING_CLEARANCE: f64 = 1e-6;

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(results: &mut Vec<bool>, id: usize, title: &str, o: Outcome) {
    println!(
        "{} criterion {id}: {title}: {}",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail
    );
    results.push(o.passed);
}

fn run(p: &Problem) -> Analysis {
    analyze(
        p,
        &AnalyzeOptions {
            tol: Some(FIXED_POINT_TOL),
            allow_uncertified: false,
        },
    )
    .expect("certified input")
}

fn rotation_example() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (k, n) in [(1i64, 6u64), (2, 13)] {
        let p = rotation_problem(k, n, Point2::ORIGIN, 1.0, 0.0);
        let start = Instant::now();
        let a = run(&p);
        let secs = start.elapsed().as_secs_f64();
        let lk = a.linking_straight.as_ref().map(|l| l.lk);
        let dist = a
            .fixed_point
            .as_ref()
            .map_or(f64::INFINITY, |f| f.location.dist(Point2::ORIGIN));
        ok &= a.status == ExitStatus::Pass
            && lk == Some(k)
            && dist <= ORIGIN_DISTANCE
            && secs < RUNTIME_LIMIT_S;
        notes.push(format!(
            "(k={k}, n={n}) lk={lk:?} |x0|={dist:.1e} t={secs:.3}s"
        ));
    }
    Outcome {
        passed: ok,
        detail: format!(
            "{} [|x0| <= {ORIGIN_DISTANCE:e}, t < {RUNTIME_LIMIT_S}s]",
            notes.join("; ")
        ),
    }
}

fn index_equivalence(runs: &[(CorpusEntry, Analysis)]) -> Outcome {
    let faces: usize = runs.iter().map(|(_, a)| a.indices.len()).sum();
    let bad: Vec<String> = runs
        .iter()
        .flat_map(|(e, a)| {
            let complete = a.indices.len() == a.face_rows.iter().filter(|r| r.bounded).count();
            a.indices
                .iter()
                .filter(|fi| fi.comb_index != fi.num_index)
                .map(|fi| format!("{}#{}", e.name, fi.face))
                .chain((!complete).then(|| format!("{} (indices missing)", e.name)))
                .collect::<Vec<_>>()
        })
        .collect();
    Outcome {
        passed: runs.len() >= 50 && faces > 0 && bad.is_empty(),
        detail: format!(
            "{} maps, {faces} bounded faces, {} exceptions {:?}",
            runs.len(),
            bad.len(),
            bad
        ),
    }
}

fn positive_face(runs: &[(CorpusEntry, Analysis)]) -> Outcome {
    let mut bad = Vec::new();
    let mut lk_matches = 0;
    for (e, a) in runs {
        let chosen_ok = a
            .chosen_face
            .and_then(|c| a.indices.iter().find(|fi| fi.face == c))
            .is_some_and(|fi| fi.comb_index >= 1);
        let bound = 2.0 * (1.0 + a.cert.k) * FIXED_POINT_TOL;
        let residual_ok = a.fixed_point.as_ref().is_some_and(|f| f.residual <= bound);
        let lk = a.linking_straight.as_ref().map(|l| l.lk);
        if !(chosen_ok && residual_ok && lk.is_some_and(|v| v != 0)) {
            bad.push(e.name.clone());
        }
        if lk == Some(e.k) {
            lk_matches += 1;
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: format!(
            "{} maps, {} exceptions {:?}; lk equals the rotation numerator on {lk_matches} [tol = {FIXED_POINT_TOL:e}]",
            runs.len(),
            bad.len(),
            bad
        ),
    }
}

fn suite_outcome(
    reports: &[(String, VerifyReport)],
    names: &[&str],
) -> (usize, usize, Vec<String>) {
    let mut trials = 0;
    let mut failures = 0;
    let mut bad = Vec::new();
    for (name, r) in reports {
        for s in r.suites.iter().filter(|s| names.contains(&s.name.as_str())) {
            trials += s.trials;
            failures += s.failures;
            if s.outcome != SuiteOutcome::Pass {
                bad.push(format!("{name}:{}", s.name));
            }
        }
    }
    (trials, failures, bad)
}

fn arc_independence(reports: &[(String, VerifyReport)]) -> Outcome {
    let (trials, failures, bad) = suite_outcome(reports, &["arc_independence"]);
    Outcome {
        passed: bad.is_empty() && trials == TRIALS * reports.len(),
        detail: format!("{trials} arc pairs ({TRIALS} per map), {failures} failures {bad:?}"),
    }
}

fn loop_agreement(reports: &[(String, VerifyReport)]) -> Outcome {
    let (trials, failures, bad) = suite_outcome(reports, &["loop_agreement"]);
    Outcome {
        passed: bad.is_empty() && trials > 0,
        detail: format!(
            "{trials} base points over {} maps, {failures} failures {bad:?}",
            reports.len()
        ),
    }
}

fn segment_bounds(reports: &[(String, VerifyReport)]) -> Outcome {
    let (trials, failures, bad) = suite_outcome(
        reports,
        &["segment_displacement_bound", "segment_angle_bound"],
    );
    let half = Problem::new(
        MapSpec::rotation(Point2::ORIGIN, PI),
        vec![Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)],
        Options::default(),
    )
    .expect("half-turn orbit");
    let control = verify(
        &half,
        &VerifyOptions {
            seed: 42,
            trials: 10,
            allow_uncertified: true,
        },
    )
    .expect("informational");
    let teeth = control
        .suites
        .iter()
        .find(|s| s.name == "segment_displacement_bound")
        .is_some_and(|s| s.outcome == SuiteOutcome::Informational && s.failures > 0)
        && control.exit_code != 4;
    Outcome {
        passed: bad.is_empty() && trials > 0 && teeth,
        detail: format!(
            "{trials} segments x 100 samples, {failures} failures {bad:?}; half-turn control flags violations: {teeth}"
        ),
    }
}

fn random_polygon_point(rng: &mut ChaCha8Rng) -> (ClosedChain, Point2) {
    loop {
        let m = rng.random_range(3..=12usize);
        let pts: Vec<Point2> = (0..m)
            .map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let Ok(chain) = ClosedChain::new(pts) else {
            continue;
        };
        let p = Point2::new(rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2));
        if chain.distance_to(p) >= WINDING_CLEARANCE {
            return (chain, p);
        }
    }
}

fn winding_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut disagreements = 0;
    let mut nonzero = 0;
    for _ in 0..WINDING_PAIRS {
        let (chain, p) = random_polygon_point(&mut rng);
        let ray = winding_number(&chain, p);
        let sum = winding_anglesum(&chain, p, None);
        match (ray, sum) {
            (Ok(a), Ok(b)) if a == b => nonzero += usize::from(a != 0),
            _ => disagreements += 1,
        }
    }
    Outcome {
        passed: disagreements == 0,
        detail: format!(
            "{WINDING_PAIRS} pairs, {disagreements} disagreements, {nonzero} with nonzero winding [clearance {WINDING_CLEARANCE:e}]"
        ),
    }
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_linkfix");
    let dir = env!("CARGO_MANIFEST_DIR");
    let mut notes = Vec::new();
    let mut ok = true;
    for input in ["star13.json", "perturbed.json"] {
        let path = format!("{dir}/inputs/{input}");
        let once = || {
            Command::new(bin)
                .args(["verify", &path, "--seed", "42"])
                .env_remove("LINKFIX_SEED")
                .output()
                .expect("run linkfix")
        };
        let (a, b) = (once(), once());
        let same = a.stdout == b.stdout && !a.stdout.is_empty() && a.status.code() == Some(0);
        ok &= same;
        notes.push(format!(
            "{input}: {} bytes, identical={same}",
            a.stdout.len()
        ));
    }
    Outcome {
        passed: ok,
        detail: notes.join("; "),
    }
}

fn additivity(runs: &[(CorpusEntry, Analysis)]) -> Outcome {
    let mut steps = 0;
    let mut bad = Vec::new();
    for (e, a) in runs {
        match &a.fixed_point {
            Some(fp) => {
                steps += fp.steps.len();
                if let Some(s) = fp.steps.iter().find(|s| !s.is_additive()) {
                    bad.push(format!("{} depth {}", e.name, s.depth));
                }
            }
            None => bad.push(format!("{} (no fixed point)", e.name)),
        }
    }
    Outcome {
        passed: bad.is_empty() && steps > 0,
        detail: format!(
            "{steps} subdivision steps, {} violations {bad:?}",
            bad.len()
        ),
    }
}

fn main() {
    let start = Instant::now();
    let mut results = Vec::new();
    report(&mut results, 1, "rotation example", rotation_example());

    let runs: Vec<(CorpusEntry, Analysis)> = certified_corpus()
        .into_iter()
        .map(|e| {
            let a = run(&e.problem);
            (e, a)
        })
        .collect();
    report(
        &mut results,
        2,
        "combinatorial index equals numerical index",
        index_equivalence(&runs),
    );
    report(
        &mut results,
        3,
        "positive-index face, fixed point and nonzero linking",
        positive_face(&runs),
    );

    let reports: Vec<(String, VerifyReport)> = runs
        .iter()
        .map(|(e, _)| {
            let r = verify(
                &e.problem,
                &VerifyOptions {
                    seed: 42,
                    trials: TRIALS,
                    allow_uncertified: false,
                },
            )
            .expect("certified input");
            (e.name.clone(), r)
        })
        .collect();
    report(
        &mut results,
        4,
        "arc independence",
        arc_independence(&reports),
    );
    report(
        &mut results,
        5,
        "straight-arc loop agrees with orbit polygon",
        loop_agreement(&reports),
    );
    report(
        &mut results,
        6,
        "segment displacement and angle bounds",
        segment_bounds(&reports),
    );
    report(
        &mut results,
        7,
        "ray casting agrees with angle summation",
        winding_oracles(),
    );
    report(&mut results, 8, "verify is deterministic", determinism());
    report(&mut results, 9, "degree additivity", additivity(&runs));

    let passed = results.iter().filter(|&&p| p).count();
    println!(
        "{passed}/{} criteria passed in {:.1}s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if passed != results.len() {
        std::process::exit(1);
    }
}
