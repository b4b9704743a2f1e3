//! Runs the full pipeline over the built-in certified corpus.
//!
//!     cargo run --release --example corpus_sweep

use linkfix::corpus::certified_corpus;
use linkfix::pipeline::{analyze, AnalyzeOptions, ExitStatus};

fn main() {
    let corpus = certified_corpus();
    let mut passed = 0;
    for e in &corpus {
        let a = analyze(&e.problem, &AnalyzeOptions::default()).expect("certified");
        let lk = a.linking_straight.as_ref().map(|l| l.lk);
        let faces = a.indices.len();
        println!(
            "{:<20} k = {:.3}  faces {:>3}  lk = {:?}  {:?}",
            e.name, a.cert.k, faces, lk, a.status
        );
        passed += usize::from(a.status == ExitStatus::Pass);
    }
    println!("{passed}/{} pass", corpus.len());
}
