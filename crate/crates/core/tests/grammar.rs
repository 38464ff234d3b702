//! Loading grammars: the shipped ones and small broken ones.

use cclg::corpus;
use cclg::grammar::{parse_category, Grammar, GrammarError};
use cclg::terms::Type;

#[test]
fn sample_grammar_entries_have_their_category_types() {
    let g = Grammar::parse(corpus::SAMPLE).unwrap();
    assert_eq!(g.lexicon.len(), 16);
    assert_eq!(g.lexicon.iter().filter(|e| e.word == "and").count(), 4);
    assert!(g.warnings.is_empty(), "{:?}", g.warnings);
    for e in &g.lexicon {
        assert_eq!(g.upsilon(&e.cat).unwrap(), e.ty, "{} : {}", e.word, e.cat);
    }
}

#[test]
fn category_types_follow_the_aliases() {
    let g = Grammar::parse(corpus::SAMPLE).unwrap();
    let s = Type::fs_arrow(Type::Bool);
    let iv = Type::fs_arrow(s.clone());
    let np = Type::arrow(iv.clone(), s.clone());
    assert_eq!(g.upsilon(&parse_category("np").unwrap()).unwrap(), np);
    assert_eq!(
        g.upsilon(&parse_category("tv").unwrap()).unwrap(),
        Type::arrow(np.clone(), iv.clone())
    );
    // the raised object position used by the coordination of subjects
    let raised = parse_category("(s/np)/(iv/np)").unwrap();
    let iv_np = Type::arrow(np.clone(), iv);
    assert_eq!(
        g.upsilon(&raised).unwrap(),
        Type::arrow(iv_np, Type::arrow(np, s))
    );
}

#[test]
fn the_uncorrected_lexicon_fails_at_the_unclosed_parenthesis() {
    let err = Grammar::parse(corpus::SAMPLE_UNCORRECTED).unwrap_err();
    assert!(matches!(err, GrammarError::Syntax { .. }), "{err}");
    assert_eq!((err.pos().line, err.pos().col), (40, 61), "{err}");
}

#[test]
fn a_common_noun_without_its_individual_binder_is_rejected() {
    let src = corpus::SAMPLE.replace("let CN(W,AGR) = \\x.\\s.", "let CN(W,AGR) = \\s.");
    let err = Grammar::parse(&src).unwrap_err();
    assert!(matches!(err, GrammarError::EntryType { .. }), "{err}");
    assert!(err.to_string().contains("book"), "{err}");
}

#[test]
fn broken_declarations() {
    let cases = [
        (
            "Base_Categories s = fs->bool, s = fs->bool;",
            "declared twice",
        ),
        ("Base_Categories s = fs->bool, a = b, b = a;", "itself"),
        ("Base_Categories s = fs;", "bare fs"),
        (
            "Base_Categories s = fs->bool; lex x, t, \\s. s=a;",
            "undeclared",
        ),
        (
            "Base_Categories s = fs->bool; lex x, s, M(a);",
            "undefined macro",
        ),
        (
            "Base_Categories s = fs->bool; let M(A,B) = \\s. s=A; lex x, s, M(a);",
            "expects 2",
        ),
        (
            "Base_Categories s = fs->bool; lex x, s, \\s. s;",
            "requires",
        ),
    ];
    for (src, needle) in cases {
        let err = Grammar::parse(src).expect_err(src).to_string();
        assert!(err.contains(needle), "{src}\n  gave: {err}");
    }
}

#[test]
fn toy_grammar() {
    let g = Grammar::parse(corpus::TOY).unwrap();
    assert!(g.has_word("john") && g.has_word("runs"));
    assert!(!g.has_word("mary"));
    let runs = g.entries_for("runs").next().unwrap();
    assert_eq!(runs.ty, Type::fs_predicate(2));
}
