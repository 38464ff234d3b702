//! Solves feature constraints directly: the deterministic part becomes a
//! solved form, the rest stays as a residue whose minimal models are listed.
//!
//! Run with `cargo run --example solve_constraints`.

use cclg::grammar::parse_expr;
use cclg::render::render_avm;
use cclg::solver::{minimal_models, solve, Mode};
use cclg::terms::strip_lambda_prefix;
use cclg::typing::infer_type;

const EXAMPLES: &[&str] = &[
    "\\x.\\y. x.agr=y.agr & y.agr.pers=p3 & (x.agr.nb=sg | x.agr.nb=pl) & y.agr.nb\\=pl",
    "\\x.\\y. (x=a | x=b) & (y=a | y=b) & x\\=y",
    "\\x. (x.f=a | x.g=a) & (x.f=b | x.g=b) & x.f=x.g",
];

fn main() {
    for src in EXAMPLES {
        let e = parse_expr(src).expect("parses");
        let (_, t) = infer_type(&e).and_then(|i| i.finish()).expect("well typed");
        let (_, body) = strip_lambda_prefix(&t);
        println!("{body}");
        for mode in [Mode::Polynomial, Mode::Complete] {
            let st = solve(&body, mode).expect("solver finishes");
            match &st.model {
                None => println!("  {mode:?}: unsatisfiable"),
                Some(m) => {
                    println!("  {mode:?}: residue {}", st.residue);
                    for line in render_avm(m).to_string().lines() {
                        println!("    {line}");
                    }
                }
            }
        }
        let ms = minimal_models(&body).expect("small enough");
        println!("  {} minimal model(s)", ms.len());
        for m in ms {
            println!("    {}", m.to_string().trim_end().replace('\n', ", "));
        }
        println!();
    }
}
