//! Built-in certified maps with known periodic orbits.
//!
//! Every entry has `Lip(f - Id) <= 1` by its analytic certificate: rigid
//! rotations by `2 pi k / n` with `k / n <= 1/6`, the same rotations
//! conjugated by translations, and pinned perturbations that spend part of
//! the remaining slack while fixing the orbit pointwise.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynmap::{Bump, MapSpec};
use crate::geom::{Point2, Vec2};
use crate::input::{Generator, Options, Problem};

/// `(k, n)` pairs with `gcd = 1` and `2 sin(pi k / n) <= 1`.
pub const ROTATION_PAIRS: &[(i64, u64)] = &[
    (1, 6),
    (1, 7),
    (1, 8),
    (1, 9),
    (1, 10),
    (1, 11),
    (1, 12),
    (1, 15),
    (1, 20),
    (2, 13),
    (2, 15),
    (2, 17),
    (2, 19),
    (2, 21),
    (3, 19),
    (3, 20),
    (3, 22),
    (4, 27),
];

const CORPUS_SEED: u64 = 0x11f_c0de;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    /// Rotation number numerator: the expected linking number.
    pub k: i64,
    pub problem: Problem,
}

pub fn rotation_problem(k: i64, n: u64, center: Point2, radius: f64, phase: f64) -> Problem {
    let map = MapSpec::rotation_turns(center, k, n);
    let points = Generator::RotationOrbit {
        k,
        n,
        radius,
        center,
        phase,
    }
    .points()
    .expect("valid pair");
    Problem::new(map, points, Options::default()).expect("rotation orbit")
}

/// The standard corpus (deterministic).
pub fn certified_corpus() -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::new();
    for &(k, n) in ROTATION_PAIRS {
        out.push(CorpusEntry {
            name: format!("rot_{k}_{n}"),
            k,
            problem: rotation_problem(k, n, Point2::ORIGIN, 1.0, 0.0),
        });

        let center = Point2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let radius = rng.random_range(0.2..5.0);
        let phase = rng.random_range(0.0..2.0 * PI);
        out.push(CorpusEntry {
            name: format!("rot_{k}_{n}_shifted"),
            k,
            problem: rotation_problem(k, n, center, radius, phase),
        });

        out.push(conjugated(k, n, &mut rng));

        if let Some(e) = pinned(k, n, &mut rng) {
            out.push(e);
        }
    }
    out
}

/// `T(-c) . R(origin) . T(c)` written as a composition: a rotation about
/// `-c` that the certificate sees as three factors.
fn conjugated(k: i64, n: u64, rng: &mut ChaCha8Rng) -> CorpusEntry {
    let c = Vec2 {
        dx: rng.random_range(-2.0..2.0),
        dy: rng.random_range(-2.0..2.0),
    };
    let map = MapSpec::compose(vec![
        MapSpec::translation(c),
        MapSpec::rotation_turns(Point2::ORIGIN, k, n),
        MapSpec::translation(-c),
    ])
    .expect("non-empty");
    let center = Point2::ORIGIN - c;
    let radius = rng.random_range(0.5..2.0);
    let phase = rng.random_range(0.0..2.0 * PI);
    let points = Generator::RotationOrbit {
        k,
        n,
        radius,
        center,
        phase,
    }
    .points()
    .expect("valid pair");
    CorpusEntry {
        name: format!("conj_{k}_{n}"),
        k,
        problem: Problem::new(map, points, Options::default()).expect("conjugated orbit"),
    }
}

/// Rotation plus one or two bumps using at most 80% of the slack
/// `1 - 2 sin(pi k / n)`, and little enough that `Lip(f)^(n-1) <= 8` keeps
/// loop refinement cheap. `None` when there is too little slack.
fn pinned(k: i64, n: u64, rng: &mut ChaCha8Rng) -> Option<CorpusEntry> {
    let base = MapSpec::rotation_turns(Point2::ORIGIN, k, n);
    let slack = 1.0 - base.lip_bound().k;
    if slack < 0.1 {
        return None;
    }
    let points = Generator::RotationOrbit {
        k,
        n,
        radius: 1.0,
        center: Point2::ORIGIN,
        phase: 0.0,
    }
    .points()
    .expect("valid pair");
    let pin_radius = 0.25;
    let count = rng.random_range(1..=2usize);
    let total = (0.8 * slack).min(8f64.powf(1.0 / (n - 1) as f64) - 1.0);
    let budget = total / count as f64;
    let mut bumps = Vec::new();
    for _ in 0..count {
        let center = Point2::polar(
            Point2::ORIGIN,
            rng.random_range(0.0..0.7),
            rng.random_range(0.0..2.0 * PI),
        );
        let radius = rng.random_range(0.2..0.6);
        let dir = Vec2::from_angle(rng.random_range(0.0..2.0 * PI));
        let unit = Bump::new(center, radius, dir).ok()?;
        let per_unit = unit.lipschitz(&points, pin_radius);
        let magnitude = budget / per_unit * rng.random_range(0.5..1.0);
        bumps.push(Bump::new(center, radius, dir * magnitude).ok()?);
    }
    let map = MapSpec::pinned(base, bumps, points.clone(), pin_radius).ok()?;
    debug_assert!(map.lip_bound().is_contracting());
    Some(CorpusEntry {
        name: format!("pinned_{k}_{n}"),
        k,
        problem: Problem::new(map, points, Options::default()).ok()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::gcd;

    #[test]
    fn corpus_is_certified_and_large() {
        let c = certified_corpus();
        assert!(c.len() >= 50, "{}", c.len());
        for e in &c {
            let cert = e.problem.certificate();
            assert!(cert.is_contracting(), "{} k={}", e.name, cert.k);
            assert!(e.problem.orbit.residual() <= e.problem.orbit.tolerance());
        }
        for &(k, n) in ROTATION_PAIRS {
            assert_eq!(gcd(k as u64, n), 1);
            assert!(2.0 * (PI * k as f64 / n as f64).sin() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(certified_corpus(), certified_corpus());
    }
}
