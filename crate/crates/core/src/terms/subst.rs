use std::collections::BTreeSet;

use super::{fresh_name, FsRef, PathRef, Term, TermError};

/// Free variables of a term, split by kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub fs: BTreeSet<String>,
    pub typed: BTreeSet<String>,
}

impl FreeVars {
    pub fn is_empty(&self) -> bool {
        self.fs.is_empty() && self.typed.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.fs.contains(name) || self.typed.contains(name)
    }
}

pub fn free_vars(t: &Term) -> FreeVars {
    let mut out = FreeVars::default();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut FreeVars) {
    let fs_ref = |r: &PathRef, bound: &Vec<&str>, out: &mut FreeVars| {
        if let FsRef::Var { name } = &r.base {
            if !bound.contains(&name.as_str()) {
                out.fs.insert(name.clone());
            }
        }
    };
    match t {
        Term::Const { .. } => {}
        Term::Var { name, .. } => {
            if !bound.contains(&name.as_str()) {
                out.typed.insert(name.clone());
            }
        }
        Term::Eq { lhs, rhs, .. } => {
            fs_ref(lhs, bound, out);
            fs_ref(rhs, bound, out);
        }
        Term::And { left, right } | Term::Or { left, right } => {
            collect_free(left, bound, out);
            collect_free(right, bound, out);
        }
        Term::Apply { fun, arg } => {
            collect_free(fun, bound, out);
            collect_free(arg, bound, out);
        }
        Term::Not { body } => collect_free(body, bound, out),
        Term::ApplyFs { fun, arg } => {
            collect_free(fun, bound, out);
            fs_ref(arg, bound, out);
        }
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            bound.push(binder);
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

/// Whether `name` occurs free in `t`, as either kind of variable.
pub(crate) fn occurs_free(t: &Term, name: &str) -> bool {
    match t {
        Term::Const { .. } => false,
        Term::Var { name: n, .. } => n == name,
        Term::Eq { lhs, rhs, .. } => lhs.var_name() == Some(name) || rhs.var_name() == Some(name),
        Term::And { left, right } | Term::Or { left, right } => {
            occurs_free(left, name) || occurs_free(right, name)
        }
        Term::Apply { fun, arg } => occurs_free(fun, name) || occurs_free(arg, name),
        Term::Not { body } => occurs_free(body, name),
        Term::ApplyFs { fun, arg } => arg.var_name() == Some(name) || occurs_free(fun, name),
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            binder != name && occurs_free(body, name)
        }
    }
}

/// What a variable is replaced by.
#[derive(Debug, Clone, PartialEq)]
pub enum Replacement {
    /// An atom, an fs-variable, or a `base.path` reference (for fs-variables).
    Fs(PathRef),
    /// A description of the variable's type (for typed variables).
    Term(Term),
}

/// Capture-avoiding substitution `t[r/var]`.
pub fn substitute(t: &Term, var: &str, r: &Replacement) -> Result<Term, TermError> {
    let fv = free_vars(t);
    match r {
        Replacement::Fs(p) => {
            if fv.typed.contains(var) {
                return Err(TermError::KindMismatch {
                    var: var.to_string(),
                    kind: "typed",
                    replacement: "a feature-structure reference",
                });
            }
            Ok(subst_fs(t, var, p))
        }
        Replacement::Term(e) => {
            if fv.fs.contains(var) {
                return Err(TermError::KindMismatch {
                    var: var.to_string(),
                    kind: "feature-structure",
                    replacement: "a description",
                });
            }
            if let (Some(expected), Some(found)) = (var_type(t, var), e.ty()) {
                if expected != found {
                    return Err(TermError::TypeMismatch {
                        var: var.to_string(),
                        expected,
                        found,
                    });
                }
            }
            Ok(subst_term(t, var, e))
        }
    }
}

fn var_type(t: &Term, var: &str) -> Option<super::Type> {
    match t {
        Term::Var { name, ty } if name == var => Some(ty.clone()),
        Term::Const { .. } | Term::Var { .. } | Term::Eq { .. } => None,
        Term::And { left, right }
        | Term::Or { left, right }
        | Term::Apply {
            fun: left,
            arg: right,
        } => var_type(left, var).or_else(|| var_type(right, var)),
        Term::Not { body } => var_type(body, var),
        Term::ApplyFs { fun, .. } => var_type(fun, var),
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            if binder == var {
                None
            } else {
                var_type(body, var)
            }
        }
    }
}

fn subst_ref(r: &PathRef, var: &str, p: &PathRef) -> PathRef {
    match &r.base {
        FsRef::Var { name } if name == var => p.extend(&r.path),
        _ => r.clone(),
    }
}

/// Replaces the fs-variable `var` by `p`; `var.q` becomes `p·q`.
pub(crate) fn subst_fs(t: &Term, var: &str, p: &PathRef) -> Term {
    match t {
        Term::Const { .. } | Term::Var { .. } => t.clone(),
        Term::Eq { lhs, rhs, positive } => Term::Eq {
            lhs: subst_ref(lhs, var, p),
            rhs: subst_ref(rhs, var, p),
            positive: *positive,
        },
        Term::And { left, right } => Term::and(subst_fs(left, var, p), subst_fs(right, var, p)),
        Term::Or { left, right } => Term::or(subst_fs(left, var, p), subst_fs(right, var, p)),
        Term::Not { body } => Term::not(subst_fs(body, var, p)),
        Term::Apply { fun, arg } => Term::apply(subst_fs(fun, var, p), subst_fs(arg, var, p)),
        Term::ApplyFs { fun, arg } => Term::apply_fs(subst_fs(fun, var, p), subst_ref(arg, var, p)),
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            if binder == var || !occurs_free(body, var) {
                return t.clone();
            }
            let captured = p.var_name() == Some(binder.as_str());
            let (binder, body) = if captured {
                let fresh = fresh_name(binder);
                let renamed = rename(body, binder, &fresh);
                (fresh, renamed)
            } else {
                (binder.clone(), (**body).clone())
            };
            rebuild_binder(t, binder, subst_fs(&body, var, p))
        }
    }
}

/// Replaces the typed variable `var` by the description `e`.
pub(crate) fn subst_term(t: &Term, var: &str, e: &Term) -> Term {
    match t {
        Term::Var { name, .. } if name == var => e.clone(),
        Term::Const { .. } | Term::Var { .. } | Term::Eq { .. } => t.clone(),
        Term::And { left, right } => Term::and(subst_term(left, var, e), subst_term(right, var, e)),
        Term::Or { left, right } => Term::or(subst_term(left, var, e), subst_term(right, var, e)),
        Term::Not { body } => Term::not(subst_term(body, var, e)),
        Term::Apply { fun, arg } => Term::apply(subst_term(fun, var, e), subst_term(arg, var, e)),
        Term::ApplyFs { fun, arg } => Term::apply_fs(subst_term(fun, var, e), arg.clone()),
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            if binder == var || !occurs_free(body, var) {
                return t.clone();
            }
            let (binder, body) = if occurs_free(e, binder) {
                let fresh = fresh_name(binder);
                let renamed = rename(body, binder, &fresh);
                (fresh, renamed)
            } else {
                (binder.clone(), (**body).clone())
            };
            rebuild_binder(t, binder, subst_term(&body, var, e))
        }
    }
}

fn rebuild_binder(original: &Term, binder: String, body: Term) -> Term {
    match original {
        Term::LamTyped { ty, .. } => Term::lam_typed(binder, ty.clone(), body),
        _ => Term::lam_fs(binder, body),
    }
}

/// Renames free occurrences of `from` (of either kind) to the fresh name `to`.
pub(crate) fn rename(t: &Term, from: &str, to: &str) -> Term {
    let ren = |r: &PathRef| match &r.base {
        FsRef::Var { name } if name == from => PathRef::new(FsRef::var(to), r.path.clone()),
        _ => r.clone(),
    };
    match t {
        Term::Var { name, ty } if name == from => Term::var(to, ty.clone()),
        Term::Const { .. } | Term::Var { .. } => t.clone(),
        Term::Eq { lhs, rhs, positive } => Term::Eq {
            lhs: ren(lhs),
            rhs: ren(rhs),
            positive: *positive,
        },
        Term::And { left, right } => Term::and(rename(left, from, to), rename(right, from, to)),
        Term::Or { left, right } => Term::or(rename(left, from, to), rename(right, from, to)),
        Term::Not { body } => Term::not(rename(body, from, to)),
        Term::Apply { fun, arg } => Term::apply(rename(fun, from, to), rename(arg, from, to)),
        Term::ApplyFs { fun, arg } => Term::apply_fs(rename(fun, from, to), ren(arg)),
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            if binder == from {
                t.clone()
            } else {
                rebuild_binder(t, binder.clone(), rename(body, from, to))
            }
        }
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    alpha(a, b, &mut Vec::new())
}

fn lookup(env: &[(&str, &str)], a: &str, b: &str) -> bool {
    for (x, y) in env.iter().rev() {
        if *x == a || *y == b {
            return *x == a && *y == b;
        }
    }
    a == b
}

fn alpha_ref(a: &PathRef, b: &PathRef, env: &[(&str, &str)]) -> bool {
    if a.path != b.path {
        return false;
    }
    match (&a.base, &b.base) {
        (FsRef::Atom { name: x }, FsRef::Atom { name: y }) => x == y,
        (FsRef::Var { name: x }, FsRef::Var { name: y }) => lookup(env, x, y),
        _ => false,
    }
}

fn alpha<'a>(a: &'a Term, b: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
    match (a, b) {
        (Term::Const { value: v1, ty: t1 }, Term::Const { value: v2, ty: t2 }) => {
            v1 == v2 && t1 == t2
        }
        (Term::Var { name: x, ty: t1 }, Term::Var { name: y, ty: t2 }) => {
            t1 == t2 && lookup(env, x, y)
        }
        (
            Term::Eq {
                lhs: l1,
                rhs: r1,
                positive: p1,
            },
            Term::Eq {
                lhs: l2,
                rhs: r2,
                positive: p2,
            },
        ) => p1 == p2 && alpha_ref(l1, l2, env) && alpha_ref(r1, r2, env),
        (
            Term::And {
                left: l1,
                right: r1,
            },
            Term::And {
                left: l2,
                right: r2,
            },
        )
        | (
            Term::Or {
                left: l1,
                right: r1,
            },
            Term::Or {
                left: l2,
                right: r2,
            },
        )
        | (Term::Apply { fun: l1, arg: r1 }, Term::Apply { fun: l2, arg: r2 }) => {
            alpha(l1, l2, env) && alpha(r1, r2, env)
        }
        (Term::Not { body: b1 }, Term::Not { body: b2 }) => alpha(b1, b2, env),
        (Term::ApplyFs { fun: f1, arg: a1 }, Term::ApplyFs { fun: f2, arg: a2 }) => {
            alpha_ref(a1, a2, env) && alpha(f1, f2, env)
        }
        (
            Term::LamFs {
                binder: x,
                body: b1,
            },
            Term::LamFs {
                binder: y,
                body: b2,
            },
        ) => {
            env.push((x, y));
            let ok = alpha(b1, b2, env);
            env.pop();
            ok
        }
        (
            Term::LamTyped {
                binder: x,
                ty: t1,
                body: b1,
            },
            Term::LamTyped {
                binder: y,
                ty: t2,
                body: b2,
            },
        ) => {
            if t1 != t2 {
                return false;
            }
            env.push((x, y));
            let ok = alpha(b1, b2, env);
            env.pop();
            ok
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::Type;

    fn eq(l: &str, r: PathRef) -> Term {
        Term::eq(PathRef::var_path(l), r)
    }

    fn runs_open() -> Term {
        Term::lam_fs(
            "s",
            Term::and(
                eq("s.reln", PathRef::atom("run")),
                eq("s.arg1", PathRef::var("x")),
            ),
        )
    }

    #[test]
    fn closed_john_runs_has_no_free_vars() {
        let t = Term::lam_fs(
            "s",
            Term::and(
                eq("s.reln", PathRef::atom("run")),
                eq("s.arg1", PathRef::atom("john")),
            ),
        );
        assert!(free_vars(&t).is_empty());
        assert!(free_vars(&Term::truth(true)).is_empty());
    }

    #[test]
    fn unbound_fs_var_is_free() {
        let t = Term::lam_fs(
            "X",
            Term::and(
                eq("X.pers", PathRef::atom("p3")),
                eq("y.nb", PathRef::atom("sg")),
            ),
        );
        let fv = free_vars(&t);
        assert_eq!(fv.fs.into_iter().collect::<Vec<_>>(), vec!["y".to_string()]);
        assert!(fv.typed.is_empty());
    }

    #[test]
    fn substitute_atom_into_runs() {
        let out = substitute(&runs_open(), "x", &Replacement::Fs(PathRef::atom("john"))).unwrap();
        let expected = Term::lam_fs(
            "s",
            Term::and(
                eq("s.reln", PathRef::atom("run")),
                eq("s.arg1", PathRef::atom("john")),
            ),
        );
        assert!(alpha_eq(&out, &expected));
    }

    #[test]
    fn identity_substitution() {
        let t = runs_open();
        let out = substitute(&t, "x", &Replacement::Fs(PathRef::var("x"))).unwrap();
        assert!(alpha_eq(&t, &out));
    }

    #[test]
    fn substitution_concatenates_paths() {
        let t = Term::eq(PathRef::var_path("x.f"), PathRef::atom("a"));
        let out = substitute(&t, "x", &Replacement::Fs(PathRef::var_path("y.g"))).unwrap();
        assert_eq!(
            out,
            Term::eq(PathRef::var_path("y.g.f"), PathRef::atom("a"))
        );
    }

    #[test]
    fn substitution_avoids_capture() {
        // (\s. s.f = x)[s/x] must not capture the free s
        let t = Term::lam_fs("s", eq("s.f", PathRef::var("x")));
        let out = substitute(&t, "x", &Replacement::Fs(PathRef::var("s"))).unwrap();
        let Term::LamFs { binder, body } = &out else {
            panic!()
        };
        assert_ne!(binder, "s");
        assert!(free_vars(&out).fs.contains("s"));
        assert_eq!(
            **body,
            Term::eq(
                PathRef::new(FsRef::var(binder.clone()), vec!["f".into()]),
                PathRef::var("s")
            )
        );
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let t = Term::apply_fs(Term::var("P", Type::fs_predicate(1)), PathRef::var("x"));
        assert!(substitute(&t, "P", &Replacement::Fs(PathRef::atom("a"))).is_err());
        assert!(substitute(&t, "x", &Replacement::Term(Term::truth(true))).is_err());
        let wrong = Term::truth(true);
        assert!(matches!(
            substitute(&t, "P", &Replacement::Term(wrong)),
            Err(TermError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn alpha_equivalence() {
        let a = Term::lam_fs("x", Term::eq(PathRef::var("x"), PathRef::atom("a")));
        let b = Term::lam_fs("y", Term::eq(PathRef::var("y"), PathRef::atom("a")));
        let c = Term::lam_fs("x", Term::eq(PathRef::var("x"), PathRef::atom("b")));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));

        let p = Type::fs_predicate(1);
        let d = Term::lam_typed(
            "P",
            p.clone(),
            Term::lam_fs(
                "s",
                Term::apply_fs(Term::var("P", p.clone()), PathRef::var_path("s.arg")),
            ),
        );
        let e = Term::lam_typed(
            "Q",
            p.clone(),
            Term::lam_fs(
                "t",
                Term::apply_fs(Term::var("Q", p), PathRef::var_path("t.arg")),
            ),
        );
        assert!(alpha_eq(&d, &e));
    }

    #[test]
    fn alpha_distinguishes_free_from_bound() {
        let a = Term::lam_fs("x", Term::eq(PathRef::var("x"), PathRef::var("y")));
        let b = Term::lam_fs("y", Term::eq(PathRef::var("y"), PathRef::var("y")));
        assert!(!alpha_eq(&a, &b));
    }
}
