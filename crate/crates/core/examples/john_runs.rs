//! The smallest end-to-end run: a two-word grammar, one sentence, one
//! reading.
//!
//! Run with `cargo run --example john_runs`.

use cclg::chart::{tokenize, Chart, ParseOptions};
use cclg::corpus;
use cclg::grammar::{Category, Grammar};
use cclg::typing::type_of;

fn main() {
    let g = Grammar::parse(corpus::TOY).expect("toy grammar loads");
    for e in &g.lexicon {
        println!("{:<5} {:<4} {}", e.word, e.cat.to_string(), e.sem);
    }

    let opts = ParseOptions::default();
    let mut chart = Chart::parse(&g, &tokenize("John runs"), &opts).expect("known words");
    let readings = chart
        .readings(&g, &Category::base("s"), &opts)
        .expect("solver finishes");
    let r = &readings[0];
    println!("\n{}", r.derivation);
    println!("{} : {}", r.term, type_of(&r.term).expect("well typed"));
    print!("{}", r.model());
}
