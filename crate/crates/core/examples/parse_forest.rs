//! Writes the chart for a sentence as Graphviz DOT on stdout, with per-span
//! edge counts on stderr. Pass a sentence as arguments to override the
//! default.
//!
//! Run with `cargo run --example parse_forest | dot -Tsvg > chart.svg`.

use cclg::chart::{parse_sentence, tokenize};
use cclg::corpus;
use cclg::grammar::Grammar;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let sentence = if args.is_empty() {
        "john and mary died".to_string()
    } else {
        args.join(" ")
    };
    let g = Grammar::parse(corpus::SAMPLE).expect("sample grammar loads");
    let chart = match parse_sentence(&g, &tokenize(&sentence)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    for ((b, e), n) in chart.span_counts() {
        eprintln!("{b}-{e}: {n}");
    }
    print!("{}", chart.to_dot(&g));
}
