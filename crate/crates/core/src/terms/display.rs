use std::collections::BTreeSet;
use std::fmt;

use super::subst::free_vars;
use super::{FsRef, PathRef, Term};

// precedence levels, loosest first
const LAM: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;
const APP: u8 = 4;
const ATOM: u8 = 5;

fn level(t: &Term) -> u8 {
    match t {
        Term::LamFs { .. } | Term::LamTyped { .. } => LAM,
        Term::Or { .. } => OR,
        Term::And { .. } => AND,
        Term::Not { .. } => NOT,
        Term::Apply { .. } | Term::ApplyFs { .. } => APP,
        Term::Const { .. } | Term::Var { .. } | Term::Eq { .. } => ATOM,
    }
}

fn write_at(t: &Term, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(t) < min {
        write!(f, "(")?;
        write_term(t, f)?;
        write!(f, ")")
    } else {
        write_term(t, f)
    }
}

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Const { value, .. } => write!(f, "{value}"),
        Term::Var { name, .. } => write!(f, "{name}"),
        Term::Eq { lhs, rhs, positive } => {
            write!(f, "{lhs}{}{rhs}", if *positive { "=" } else { "\\=" })
        }
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            write!(f, "\\{binder}. ")?;
            write_term(body, f)
        }
        Term::Or { left, right } => {
            write_at(left, AND, f)?;
            write!(f, " | ")?;
            write_at(right, OR, f)
        }
        Term::And { left, right } => {
            write_at(left, NOT, f)?;
            write!(f, " & ")?;
            write_at(right, AND, f)
        }
        Term::Not { body } => {
            write!(f, "~")?;
            write_at(body, NOT, f)
        }
        Term::ApplyFs { fun, arg } => {
            write_at(fun, APP, f)?;
            write!(f, " {arg}")
        }
        Term::Apply { fun, arg } => {
            write_at(fun, APP, f)?;
            write!(f, " ")?;
            write_at(arg, ATOM, f)
        }
    }
}

/// Grammar-language syntax: `\x.` for λ, `&`, `|`, `~`, `=`, `\=`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f)
    }
}

/// Renames every binder to `x_1, x_2, …` in order of appearance, skipping
/// names that occur free or as atoms.
pub fn canonical_names(t: &Term) -> Term {
    let fv = free_vars(t);
    let mut taken: BTreeSet<String> = fv.fs.into_iter().chain(fv.typed).collect();
    taken.extend(t.atoms());
    let mut counter = 0usize;
    canon(t, &taken, &mut counter, &mut Vec::new())
}

fn canon_ref(r: &PathRef, env: &[(String, String)]) -> PathRef {
    match &r.base {
        FsRef::Var { name } => match env.iter().rev().find(|(old, _)| old == name) {
            Some((_, new)) => PathRef::new(FsRef::var(new.clone()), r.path.clone()),
            None => r.clone(),
        },
        FsRef::Atom { .. } => r.clone(),
    }
}

fn canon(
    t: &Term,
    taken: &BTreeSet<String>,
    counter: &mut usize,
    env: &mut Vec<(String, String)>,
) -> Term {
    match t {
        Term::Const { .. } => t.clone(),
        Term::Var { name, ty } => match env.iter().rev().find(|(old, _)| old == name) {
            Some((_, new)) => Term::var(new.clone(), ty.clone()),
            None => t.clone(),
        },
        Term::Eq { lhs, rhs, positive } => Term::Eq {
            lhs: canon_ref(lhs, env),
            rhs: canon_ref(rhs, env),
            positive: *positive,
        },
        Term::And { left, right } => {
            let l = canon(left, taken, counter, env);
            Term::and(l, canon(right, taken, counter, env))
        }
        Term::Or { left, right } => {
            let l = canon(left, taken, counter, env);
            Term::or(l, canon(right, taken, counter, env))
        }
        Term::Not { body } => Term::not(canon(body, taken, counter, env)),
        Term::ApplyFs { fun, arg } => {
            Term::apply_fs(canon(fun, taken, counter, env), canon_ref(arg, env))
        }
        Term::Apply { fun, arg } => {
            let f = canon(fun, taken, counter, env);
            Term::apply(f, canon(arg, taken, counter, env))
        }
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            let name = loop {
                *counter += 1;
                let candidate = format!("x_{counter}");
                if !taken.contains(&candidate) {
                    break candidate;
                }
            };
            env.push((binder.clone(), name.clone()));
            let body = canon(body, taken, counter, env);
            env.pop();
            match t {
                Term::LamTyped { ty, .. } => Term::lam_typed(name, ty.clone(), body),
                _ => Term::lam_fs(name, body),
            }
        }
    }
}
