//! Elaborates a few untyped expressions and prints their normal forms:
//! plain redexes, a higher-order argument, and connectives at function type.
//!
//! Run with `cargo run --example beta_normalize`.

use cclg::grammar::parse_expr;
use cclg::terms::{beta_normalize, canonical_names};
use cclg::typing::infer_type;

const EXAMPLES: &[&str] = &[
    "(\\x. x.f=a) y.g",
    "(\\P.\\s. P s.arg & s.reln=not) (\\t. t.quant=all)",
    "\\s. ((\\x. x.f=a) & (\\x. x.g=b)) s",
    "\\s. ~(\\x. x=a | x.f=b) s",
    "(\\R.\\x.\\y. R y x) (\\u.\\v. u.arg1=v)",
];

fn main() {
    for src in EXAMPLES {
        let e = parse_expr(src).expect("parses");
        let (ty, t) = infer_type(&e).and_then(|i| i.finish()).expect("well typed");
        let nf = beta_normalize(&t).expect("normalizes");
        println!("{src}\n  : {ty}\n  = {}\n", canonical_names(&nf));
    }
}
