//! Parses the long coordination sentence with the sample grammar and prints
//! each reading's solved form.
//!
//! Run with `cargo run --example worked_example`.

use cclg::chart::{tokenize, Chart, ParseOptions};
use cclg::corpus;
use cclg::grammar::{Category, Grammar};

fn main() {
    let g = Grammar::parse(corpus::SAMPLE).expect("sample grammar loads");
    let sentence = "a man said that john read a book and mary died";
    let opts = ParseOptions::default();
    let mut chart = Chart::parse(&g, &tokenize(sentence), &opts).expect("all words known");
    let readings = chart
        .readings(&g, &Category::base("s"), &opts)
        .expect("solver finishes");

    println!("{sentence}");
    println!("{} edges, {} readings\n", chart.len(), readings.len());
    for (i, r) in readings.iter().enumerate() {
        println!("reading {}: {}", i + 1, r.derivation);
        if !r.duplicates.is_empty() {
            println!("  (same semantics from edges {:?})", r.duplicates);
        }
        for line in r.model().to_string().lines() {
            println!("  {line}");
        }
        println!("  residue: {}\n", r.state.residue);
    }
}
