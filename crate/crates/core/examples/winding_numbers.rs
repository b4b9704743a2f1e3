//! Two winding-number algorithms on a self-intersecting polygon.
//!
//!     cargo run --example winding_numbers

use std::f64::consts::PI;

use linkfix::geom::{winding_anglesum, winding_number, ClosedChain, Point2};

fn main() {
    // The {13/2} star traced by a rotation orbit.
    let star: Vec<Point2> = (0..13)
        .map(|i| Point2::polar(Point2::ORIGIN, 1.0, 4.0 * PI * i as f64 / 13.0))
        .collect();
    let chain = ClosedChain::new(star).unwrap();
    for p in [
        Point2::ORIGIN,
        Point2::new(0.9, 0.0),
        Point2::new(0.93, 0.1),
        Point2::new(2.0, 0.0),
    ] {
        println!(
            "({:+.2}, {:+.2}): ray casting {}, angle sum {}",
            p.x,
            p.y,
            winding_number(&chain, p).unwrap(),
            winding_anglesum(&chain, p, None).unwrap()
        );
    }
    let on = chain.vertices()[0].midpoint(chain.vertices()[1]);
    println!(
        "point on the curve: {:?}",
        winding_anglesum(&chain, on, None).unwrap_err()
    );
}
