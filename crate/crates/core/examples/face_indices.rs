//! Combinatorial and numerical indices of every face.
//!
//!     cargo run --example face_indices [input.json]

use std::path::PathBuf;

use linkfix::arrangement::analyze_polygon;
use linkfix::index::{compute_indices, positive_index_face, IndexOptions};
use linkfix::input::Problem;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("inputs/star13.json"));
    let problem = Problem::load(&path).expect("readable input");
    let cert = problem.certificate();
    let (_, arr) = analyze_polygon(&problem.orbit).expect("general position");
    let indices = compute_indices(&problem.map, &arr, &cert, &IndexOptions::default(), true)
        .expect("indices agree");
    println!(
        "{:>4} {:>6} {:>4} {:>5} {:>5}",
        "face", "omega", "2p", "comb", "num"
    );
    for fi in &indices {
        println!(
            "{:>4} {:>6} {:>4} {:>5} {:>5}",
            fi.face, arr.faces[fi.face].omega, fi.orientation_changes, fi.comb_index, fi.num_index
        );
    }
    let best = positive_index_face(&arr, &indices).expect("positive index");
    println!("largest |omega| face: {best}");
}
