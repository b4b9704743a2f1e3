//! Linking number of the centre of a rotation with its orbits.
//!
//!     cargo run --example rotation_linking

use linkfix::corpus::rotation_problem;
use linkfix::geom::Point2;
use linkfix::pipeline::{analyze, AnalyzeOptions};

fn main() {
    for (k, n) in [(1, 6), (2, 13), (3, 20)] {
        let problem = rotation_problem(k, n, Point2::ORIGIN, 1.0, 0.0);
        let a = analyze(&problem, &AnalyzeOptions::default()).expect("certified rotation");
        let fp = a.fixed_point.as_ref().expect("fixed point");
        let lk = a.linking_straight.as_ref().expect("linking");
        println!(
            "rotation by 2pi*{k}/{n}: fixed point ({:+.1e}, {:+.1e}), omega = {}, lk = {} (status {:?})",
            fp.location.x, fp.location.y, lk.omega, lk.lk, a.status
        );
    }
}
