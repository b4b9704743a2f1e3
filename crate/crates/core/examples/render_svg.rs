//! Writes an SVG diagram of an analysis.
//!
//!     cargo run --example render_svg [input.json] [out.svg]

use std::path::PathBuf;

use linkfix::input::Problem;
use linkfix::pipeline::{analyze, AnalyzeOptions};
use linkfix::render::render_svg;

fn main() {
    let mut args = std::env::args().skip(1);
    let input = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("inputs/star13.json"));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("linkfix.svg"));
    let problem = Problem::load(&input).expect("readable input");
    let analysis = analyze(&problem, &AnalyzeOptions::default()).expect("certified input");
    let svg = render_svg(&problem, &analysis).expect("arrangement");
    std::fs::write(&out, svg).expect("writable output");
    println!("wrote {}", out.display());
}
