//! Loops built from different arcs differ by multiples of the period.
//!
//!     cargo run --example arc_independence

use linkfix::corpus::rotation_problem;
use linkfix::geom::Point2;
use linkfix::linking::{arc_independence_check, build_loop, ArcChain, LinkingOptions};

fn main() {
    let problem = rotation_problem(1, 6, Point2::ORIGIN, 1.0, 0.0);
    let cert = problem.certificate();
    let opts = LinkingOptions::default();
    let (x, fx) = (problem.orbit.points()[0], problem.orbit.points()[1]);
    let straight = ArcChain::straight(x, fx).unwrap();
    let lp = build_loop(
        &problem.map,
        &cert,
        &problem.orbit,
        &straight,
        Point2::ORIGIN,
        &opts,
    )
    .unwrap();
    println!(
        "straight-arc loop: {} samples, max gap {:.3}",
        lp.chain.len(),
        lp.max_gap
    );
    for turns in [-2, -1, 0, 1, 2] {
        let detour = ArcChain::detour(x, fx, Point2::ORIGIN, turns, 0.4).unwrap();
        let r = arc_independence_check(
            &problem.map,
            &cert,
            &problem.orbit,
            &straight,
            &detour,
            Point2::ORIGIN,
            &opts,
        )
        .unwrap();
        println!(
            "detour with {turns:+} turns: omega {} vs {}, difference loop winds {}, holds: {}",
            r.omega_first,
            r.omega_second,
            r.omega_difference_loop,
            r.passed()
        );
    }
}
