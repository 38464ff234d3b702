//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

use cclg::terms::{FsRef, PathRef, Term, Type};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const VARS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
const FEATURES: [&str; 3] = ["f", "g", "h"];
const ATOMS: [&str; 3] = ["a", "b", "c"];

/// Signature of one generated formula.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub vars: usize,
    pub features: usize,
    pub atoms: usize,
    pub depth: usize,
    /// chance that a literal is negated
    pub negation: f64,
}

impl Shape {
    pub fn random(rng: &mut ChaCha8Rng) -> Shape {
        Shape {
            vars: rng.gen_range(1..=6),
            features: rng.gen_range(1..=3),
            atoms: rng.gen_range(1..=3),
            depth: rng.gen_range(1..=4),
            negation: 0.2,
        }
    }
}

fn path(rng: &mut ChaCha8Rng, s: &Shape) -> PathRef {
    let base = VARS[rng.gen_range(0..s.vars)];
    let len = rng.gen_range(0..=2);
    let feats = (0..len)
        .map(|_| FEATURES[rng.gen_range(0..s.features)].to_string())
        .collect();
    PathRef::new(FsRef::var(base), feats)
}

fn literal(rng: &mut ChaCha8Rng, s: &Shape) -> Term {
    let lhs = path(rng, s);
    let rhs = if rng.gen_bool(0.6) {
        PathRef::atom(ATOMS[rng.gen_range(0..s.atoms)])
    } else {
        path(rng, s)
    };
    if rng.gen_bool(s.negation) {
        Term::neq(lhs, rhs)
    } else {
        Term::eq(lhs, rhs)
    }
}

/// A first-order formula: conjunctions and disjunctions over equations,
/// negation only on equations, connective depth at most `shape.depth`.
pub fn formula(rng: &mut ChaCha8Rng, s: &Shape) -> Term {
    fn go(rng: &mut ChaCha8Rng, s: &Shape, depth: usize) -> Term {
        if depth == 0 || rng.gen_bool(0.2) {
            return literal(rng, s);
        }
        let l = go(rng, s, depth - 1);
        let r = go(rng, s, depth - 1);
        if rng.gen_bool(0.5) {
            Term::and(l, r)
        } else {
            Term::or(l, r)
        }
    }
    go(rng, s, s.depth)
}

/// The fixed test corpus: `n` formulas from `seed`.
pub fn corpus(seed: u64, n: usize) -> Vec<Term> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let s = Shape::random(&mut r);
            formula(&mut r, &s)
        })
        .collect()
}

/// Random closed term of type `fs -> bool` over features `f`, `g` and atoms
/// `a`, `b`, with β-redexes at higher types, lifted connectives and typed
/// binders. Paths in the generated text have length at most one.
pub fn higher_order(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    let mut g = HoGen { fresh: 0 };
    g.term(
        rng,
        &Type::fs_arrow(Type::Bool),
        &mut Vec::new(),
        &mut Vec::new(),
        depth,
    )
}

struct HoGen {
    fresh: usize,
}

impl HoGen {
    fn name(&mut self, stem: &str) -> String {
        self.fresh += 1;
        format!("{stem}{}", self.fresh)
    }

    fn fs_ref(&self, rng: &mut ChaCha8Rng, fs: &[String]) -> PathRef {
        if fs.is_empty() || rng.gen_bool(0.25) {
            return PathRef::atom(["a", "b"][rng.gen_range(0..2)]);
        }
        let base = fs.choose(rng).expect("nonempty").clone();
        let feats = if rng.gen_bool(0.5) {
            vec![["f", "g"][rng.gen_range(0..2)].to_string()]
        } else {
            Vec::new()
        };
        PathRef::new(FsRef::var(base), feats)
    }

    fn term(
        &mut self,
        rng: &mut ChaCha8Rng,
        ty: &Type,
        fs: &mut Vec<String>,
        typed: &mut Vec<(String, Type)>,
        depth: usize,
    ) -> Term {
        let vars: Vec<String> = typed
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(n, _)| n.clone())
            .collect();
        if !vars.is_empty() && rng.gen_bool(0.25) {
            return Term::var(vars.choose(rng).expect("nonempty").clone(), ty.clone());
        }
        let leaf = depth == 0;
        match ty {
            Type::Bool => {
                let pick = if leaf {
                    rng.gen_range(0..2)
                } else {
                    rng.gen_range(0..8)
                };
                match pick {
                    0 | 1 => {
                        if rng.gen_bool(0.05) {
                            return Term::truth(rng.gen_bool(0.5));
                        }
                        let l = self.fs_ref(rng, fs);
                        let r = self.fs_ref(rng, fs);
                        if rng.gen_bool(0.2) {
                            Term::neq(l, r)
                        } else {
                            Term::eq(l, r)
                        }
                    }
                    2 | 3 => {
                        let l = self.term(rng, ty, fs, typed, depth - 1);
                        let r = self.term(rng, ty, fs, typed, depth - 1);
                        if rng.gen_bool(0.5) {
                            Term::and(l, r)
                        } else {
                            Term::or(l, r)
                        }
                    }
                    4 => Term::not(self.term(rng, ty, fs, typed, depth - 1)),
                    5 | 6 => {
                        // (fs -> bool) applied to a reference
                        let f = self.term(rng, &Type::fs_arrow(Type::Bool), fs, typed, depth - 1);
                        Term::apply_fs(f, self.fs_ref(rng, fs))
                    }
                    _ => {
                        // ((fs -> bool) -> bool) applied to a predicate
                        let pred = Type::fs_arrow(Type::Bool);
                        let f = self.term(
                            rng,
                            &Type::arrow(pred.clone(), Type::Bool),
                            fs,
                            typed,
                            depth - 1,
                        );
                        let a = self.term(rng, &pred, fs, typed, depth - 1);
                        Term::apply(f, a)
                    }
                }
            }
            Type::FsArrow { result } => {
                if leaf && rng.gen_bool(0.2) {
                    return Term::constant(rng.gen_bool(0.5), ty.clone());
                }
                if !leaf && rng.gen_bool(0.2) {
                    let l = self.term(rng, ty, fs, typed, depth - 1);
                    let r = self.term(rng, ty, fs, typed, depth - 1);
                    return if rng.gen_bool(0.5) {
                        Term::and(l, r)
                    } else {
                        Term::or(l, r)
                    };
                }
                let x = self.name("x");
                fs.push(x.clone());
                let body = self.term(rng, result, fs, typed, depth.saturating_sub(1));
                fs.pop();
                Term::lam_fs(x, body)
            }
            Type::Arrow { arg, result } => {
                let p = self.name("P");
                typed.push((p.clone(), (**arg).clone()));
                let body = self.term(rng, result, fs, typed, depth.saturating_sub(1));
                typed.pop();
                Term::lam_typed(p, (**arg).clone(), body)
            }
            Type::Meta { .. } => unreachable!("generator never asks for unknown types"),
        }
    }
}
