//! Faces of a self-intersecting orbit polygon and their winding numbers.
//!
//!     cargo run --example star_arrangement

use linkfix::arrangement::analyze_polygon;
use linkfix::corpus::rotation_problem;
use linkfix::geom::Point2;

fn main() {
    let problem = rotation_problem(2, 13, Point2::ORIGIN, 1.0, 0.0);
    let (gamma, arr) = analyze_polygon(&problem.orbit).expect("general position");
    println!(
        "orbit polygon with {} segments: V = {}, E = {}, F = {}, {} crossings",
        gamma.len(),
        arr.vertices.len(),
        arr.num_edges(),
        arr.faces.len(),
        arr.crossing_vertices.len()
    );
    for f in arr.bounded_faces() {
        println!(
            "face {:>2}: omega = {}, {} sides, area {:.5}, sample ({:+.3}, {:+.3})",
            f.id,
            f.omega,
            f.boundary.len(),
            arr.face_area(f.id),
            f.sample_point.x,
            f.sample_point.y
        );
    }
}
