//! Infers types for lexical semantics and checks them against category
//! types, the same way grammar loading does.
//!
//! Run with `cargo run --example type_inference`.

use cclg::corpus;
use cclg::grammar::{parse_category, parse_expr, Grammar};
use cclg::typing::{check_entry, infer_type};

fn main() {
    let g = Grammar::parse(corpus::SAMPLE).expect("sample grammar loads");

    let cases = [
        (
            "np",
            "\\P.\\s. s.quant=exists_one & s.arg.arg1=bill & P s.arg s.pred",
        ),
        ("iv", "\\s.\\p. p.reln=sleep & p.arg1=s"),
        // one binder short: nouns take the individual and the description
        ("n", "\\x. x.reln=dog"),
        ("pp/s", "\\s.s"),
    ];
    for (cat, src) in cases {
        let inferred = infer_type(&parse_expr(src).expect("parses"))
            .and_then(|i| i.ty())
            .expect("typeable");
        let required = g
            .upsilon(&parse_category(cat).expect("category"))
            .expect("declared");
        match check_entry(&inferred, &required) {
            Ok(ty) => println!("ok    {cat:<5} {ty}"),
            Err(e) => println!("error {cat:<5} inferred {inferred}: {e}"),
        }
    }

    let bad = parse_expr("\\x. x x").expect("parses");
    println!(
        "\n\\x. x x: {}",
        infer_type(&bad)
            .map(|_| "typed?".to_string())
            .unwrap_or_else(|e| e.to_string())
    );
}
