//! Building maps and reading their Lipschitz certificates.
//!
//!     cargo run --example certified_maps

use std::f64::consts::PI;

use linkfix::dynmap::{validate_orbit, Bump, MapSpec};
use linkfix::geom::{Point2, Vec2};

fn show(name: &str, map: &MapSpec) {
    let cert = map.lip_bound();
    println!("{name}: {}", map.family());
    println!(
        "  Lip(f - Id) <= {:.4}, Lip(f) <= {:.4}, certified: {}",
        cert.k,
        cert.map_lipschitz(),
        cert.is_contracting()
    );
    println!("  {}", cert.breakdown());
}

fn main() {
    let rot = MapSpec::rotation_turns(Point2::ORIGIN, 1, 7);
    show("rotation 2pi/7", &rot);

    let orbit: Vec<Point2> = (0..7)
        .map(|i| Point2::polar(Point2::ORIGIN, 1.0, 2.0 * PI * i as f64 / 7.0))
        .collect();
    let bump = Bump::new(
        Point2::new(0.1, 0.05),
        0.4,
        Vec2 {
            dx: 0.02,
            dy: -0.01,
        },
    )
    .unwrap();
    let pinned = MapSpec::pinned(rot.clone(), vec![bump], orbit.clone(), 0.3).unwrap();
    show("pinned perturbation", &pinned);
    let o = validate_orbit(&pinned, orbit, None).expect("pins keep the orbit");
    println!(
        "  orbit still periodic: n = {}, residual = {:e}",
        o.period(),
        o.residual()
    );

    let c = Vec2 { dx: 1.0, dy: -2.0 };
    let conj =
        MapSpec::compose(vec![MapSpec::translation(c), rot, MapSpec::translation(-c)]).unwrap();
    show("conjugated rotation", &conj);

    let bad = MapSpec::compose(vec![
        MapSpec::rotation(Point2::ORIGIN, 2.0 * PI / 3.0),
        MapSpec::rotation(Point2::ORIGIN, -PI / 3.0),
    ])
    .unwrap();
    show("composition that the certificate cannot certify", &bad);
}
