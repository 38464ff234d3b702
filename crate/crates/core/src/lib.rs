//! Constraint categorial grammar.
//!
//! Lexical semantics are typed λ-terms over feature descriptions
//! ([`terms`], [`typing`]). A chart parser ([`chart`]) combines them by
//! application, and a rewriting solver ([`solver`]) splits each result into a
//! solved form and a residue of the constraints it could not decide.
//! Grammars are loaded from text by [`grammar`]; [`corpus`] ships a sample
//! English fragment.

pub mod chart;
pub mod cli;
pub mod corpus;
pub mod grammar;
pub mod render;
pub mod solver;
pub mod terms;
pub mod typing;
