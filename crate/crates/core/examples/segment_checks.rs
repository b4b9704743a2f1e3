//! The segment [x, f(x)] avoids fixed points when Lip(f - Id) <= 1, and
//! fails to when the hypothesis is dropped.
//!
//!     cargo run --example segment_checks

use std::f64::consts::PI;

use linkfix::dynmap::{check_segment_angle, check_segment_displacement, CheckMode, MapSpec};
use linkfix::geom::Point2;

fn main() {
    let x = Point2::new(1.0, 0.3);
    let rot = MapSpec::rotation_turns(Point2::ORIGIN, 1, 6);
    let r2 = check_segment_displacement(&rot, x, 100, CheckMode::Certified).unwrap();
    let r4 = check_segment_angle(&rot, x, 100, CheckMode::Certified).unwrap();
    println!(
        "rotation 2pi/6: min |d| = {:.4} (bound {:.4}), max angle {:.4} rad, passed {} / {}",
        r2.min_norm,
        r2.min_norm_bound,
        r4.max_angle,
        r2.passed(),
        r4.passed()
    );

    let half = MapSpec::rotation(Point2::ORIGIN, PI);
    println!(
        "half turn, certified mode: {}",
        check_segment_displacement(&half, x, 100, CheckMode::Certified).unwrap_err()
    );
    let r2 = check_segment_displacement(&half, x, 100, CheckMode::Informational).unwrap();
    let v = &r2.violations[0];
    println!(
        "half turn, informational: {} violations, first at t = {} with |d| = {:.1e}",
        r2.violations.len(),
        v.t,
        v.value
    );
}
