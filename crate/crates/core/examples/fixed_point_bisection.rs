//! Degree bisection inside a positive-index face of a perturbed rotation.
//!
//!     cargo run --example fixed_point_bisection

use linkfix::arrangement::analyze_polygon;
use linkfix::fixpoint::locate_fixed_point;
use linkfix::index::{compute_indices, positive_index_face, IndexOptions};
use linkfix::input::Problem;

fn main() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("inputs/perturbed.json");
    let problem = Problem::load(&path).expect("readable input");
    let cert = problem.certificate();
    let (_, arr) = analyze_polygon(&problem.orbit).expect("general position");
    let indices =
        compute_indices(&problem.map, &arr, &cert, &IndexOptions::default(), true).unwrap();
    let face = positive_index_face(&arr, &indices).unwrap();
    let fi = indices.iter().find(|fi| fi.face == face).unwrap();
    let fp = locate_fixed_point(&problem.map, &cert, &arr, fi, 1e-10).expect("fixed point");
    for s in fp.steps.iter().take(6) {
        println!(
            "depth {:>2}: degree {} -> {:?}, chosen quadrant {}",
            s.depth, s.parent_degree, s.child_degrees, s.chosen
        );
    }
    println!("... {} steps in total", fp.steps.len());
    println!(
        "fixed point ({:.12}, {:.12}), residual {:.2e}, box radius {:.2e}",
        fp.location.x, fp.location.y, fp.residual, fp.box_radius
    );
}
