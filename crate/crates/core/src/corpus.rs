//! Grammars shipped with the crate.

/// English fragment with determiners, proper nouns, verbs of four
/// subcategorizations, a raising rule and coordination.
pub const SAMPLE: &str = include_str!("../grammars/english.cclg");

/// The same fragment before three corrections: it stops at a syntax error in
/// the ditransitive macro.
pub const SAMPLE_UNCORRECTED: &str = include_str!("../grammars/english_unrepaired.cclg");

/// Two entries, enough for "john runs".
pub const TOY: &str = include_str!("../grammars/toy.cclg");

/// Sentences the sample grammar covers, used by tests and examples.
pub const SAMPLE_SENTENCES: &[&str] = &[
    "john died",
    "mary died",
    "john read a book",
    "every man loves mary",
    "john gave mary a book",
    "john and mary died",
    "john read a book and mary died",
    "a man said that john read a book and mary died",
];
