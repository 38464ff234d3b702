use super::subst::{occurs_free, rename, subst_fs, subst_term};
use super::{fresh_name, PathRef, Term, TermError, Type};

/// Normalizes `t` with a fuel bound proportional to its size.
pub fn beta_normalize(t: &Term) -> Result<Term, TermError> {
    beta_normalize_with_fuel(t, 1000 * t.size() as u64 + 10_000)
}

/// β-normalization: contracts every redex (application of an abstraction to
/// a path, an atom or a description), pushes negation and the connectives
/// through abstractions, distributes application over connectives and
/// applies typed truth constants. `fuel` bounds the number of contractions.
pub fn beta_normalize_with_fuel(t: &Term, fuel: u64) -> Result<Term, TermError> {
    Normalizer { fuel, used: 0 }.norm(t)
}

struct Normalizer {
    fuel: u64,
    used: u64,
}

impl Normalizer {
    fn step(&mut self) -> Result<(), TermError> {
        self.used += 1;
        if self.used > self.fuel {
            Err(TermError::FuelExhausted(self.fuel))
        } else {
            Ok(())
        }
    }

    fn norm(&mut self, t: &Term) -> Result<Term, TermError> {
        Ok(match t {
            Term::Const { .. } | Term::Var { .. } | Term::Eq { .. } => t.clone(),
            Term::Not { body } => {
                let b = self.norm(body)?;
                self.neg(b)?
            }
            Term::And { left, right } => {
                let l = self.norm(left)?;
                let r = self.norm(right)?;
                self.connect(true, l, r)?
            }
            Term::Or { left, right } => {
                let l = self.norm(left)?;
                let r = self.norm(right)?;
                self.connect(false, l, r)?
            }
            Term::LamFs { binder, body } => Term::lam_fs(binder.clone(), self.norm(body)?),
            Term::LamTyped { binder, ty, body } => {
                Term::lam_typed(binder.clone(), ty.clone(), self.norm(body)?)
            }
            Term::ApplyFs { fun, arg } => {
                let f = self.norm(fun)?;
                self.apply_fs(f, arg)?
            }
            Term::Apply { fun, arg } => {
                let f = self.norm(fun)?;
                let a = self.norm(arg)?;
                self.apply(f, a)?
            }
        })
    }

    fn apply_fs(&mut self, f: Term, arg: &PathRef) -> Result<Term, TermError> {
        match f {
            Term::LamFs { binder, body } => {
                self.step()?;
                // fs-variables only occur in path positions, so no new redex
                Ok(subst_fs(&body, &binder, arg))
            }
            Term::LamTyped { binder, .. } => Err(TermError::IllTyped(format!(
                "abstraction over typed variable `{binder}` applied to {arg}"
            ))),
            Term::Const { value, ty } => match ty {
                Type::FsArrow { result } => {
                    self.step()?;
                    Ok(Term::constant(value, *result))
                }
                other => Err(TermError::IllTyped(format!(
                    "constant of type {other} applied to {arg}"
                ))),
            },
            Term::And { left, right } => {
                self.step()?;
                let l = self.apply_fs(*left, arg)?;
                let r = self.apply_fs(*right, arg)?;
                self.connect(true, l, r)
            }
            Term::Or { left, right } => {
                self.step()?;
                let l = self.apply_fs(*left, arg)?;
                let r = self.apply_fs(*right, arg)?;
                self.connect(false, l, r)
            }
            Term::Not { body } => {
                self.step()?;
                let b = self.apply_fs(*body, arg)?;
                self.neg(b)
            }
            Term::Eq { .. } => Err(TermError::IllTyped(format!("equation applied to {arg}"))),
            neutral => Ok(Term::apply_fs(neutral, arg.clone())),
        }
    }

    fn apply(&mut self, f: Term, arg: Term) -> Result<Term, TermError> {
        match f {
            Term::LamTyped { binder, body, .. } => {
                self.step()?;
                let reduced = subst_term(&body, &binder, &arg);
                self.norm(&reduced)
            }
            Term::LamFs { binder, .. } => Err(TermError::IllTyped(format!(
                "abstraction over fs-variable `{binder}` applied to a description"
            ))),
            Term::Const { value, ty } => match ty {
                Type::Arrow { result, .. } => {
                    self.step()?;
                    Ok(Term::constant(value, *result))
                }
                other => Err(TermError::IllTyped(format!(
                    "constant of type {other} applied to a description"
                ))),
            },
            Term::And { left, right } => {
                self.step()?;
                let l = self.apply(*left, arg.clone())?;
                let r = self.apply(*right, arg)?;
                self.connect(true, l, r)
            }
            Term::Or { left, right } => {
                self.step()?;
                let l = self.apply(*left, arg.clone())?;
                let r = self.apply(*right, arg)?;
                self.connect(false, l, r)
            }
            Term::Not { body } => {
                self.step()?;
                let b = self.apply(*body, arg)?;
                self.neg(b)
            }
            Term::Eq { .. } => Err(TermError::IllTyped(
                "equation applied to a description".into(),
            )),
            neutral => Ok(Term::apply(neutral, arg)),
        }
    }

    /// ¬(λx.e) → λx.¬e
    fn neg(&mut self, t: Term) -> Result<Term, TermError> {
        match t {
            Term::LamFs { binder, body } => {
                self.step()?;
                Ok(Term::lam_fs(binder, self.neg(*body)?))
            }
            Term::LamTyped { binder, ty, body } => {
                self.step()?;
                Ok(Term::lam_typed(binder, ty, self.neg(*body)?))
            }
            other => Ok(Term::not(other)),
        }
    }

    /// (λx.e) ∘ (λx.e') → λx.(e ∘ e'), and `e ∘ x → x ∘ e` for a variable x.
    fn connect(&mut self, is_and: bool, l: Term, r: Term) -> Result<Term, TermError> {
        let build = |l, r| {
            if is_and {
                Term::and(l, r)
            } else {
                Term::or(l, r)
            }
        };
        match (l, r) {
            (Term::LamFs { binder: x, body: b }, Term::LamFs { binder: y, body: c }) => {
                self.step()?;
                let (z, b, c) = merge_binders(x, *b, y, *c);
                Ok(Term::lam_fs(z, self.connect(is_and, b, c)?))
            }
            (
                Term::LamTyped {
                    binder: x,
                    ty,
                    body: b,
                },
                Term::LamTyped {
                    binder: y, body: c, ..
                },
            ) => {
                self.step()?;
                let (z, b, c) = merge_binders(x, *b, y, *c);
                Ok(Term::lam_typed(z, ty, self.connect(is_and, b, c)?))
            }
            (l, r) if r.is_var() && !l.is_var() => Ok(build(r, l)),
            (l, r) => Ok(build(l, r)),
        }
    }
}

/// Brings `λx.b` and `λy.c` under one binder name.
fn merge_binders(x: String, b: Term, y: String, c: Term) -> (String, Term, Term) {
    if x == y {
        (x, b, c)
    } else if !occurs_free(&c, &x) {
        let c = rename(&c, &y, &x);
        (x, b, c)
    } else {
        let z = fresh_name(&x);
        let b = rename(&b, &x, &z);
        let c = rename(&c, &y, &z);
        (z, b, c)
    }
}

/// Whether `t` is a basic normal description: application heads are
/// variables, no abstraction sits under a connective or negation, `∧`/`∨`
/// chains are right-nested with variables first, and no truth constant is an
/// operand of a connective.
pub fn is_basic_normal(t: &Term) -> bool {
    match t {
        Term::Const { .. } | Term::Var { .. } | Term::Eq { .. } => true,
        Term::Not { body } => !body.is_lambda() && is_basic_normal(body),
        Term::And { left, right } | Term::Or { left, right } => {
            let same_left = matches!(
                (t, &**left),
                (Term::And { .. }, Term::And { .. }) | (Term::Or { .. }, Term::Or { .. })
            );
            !same_left
                && !matches!(**left, Term::Const { .. })
                && !matches!(**right, Term::Const { .. })
                && !(left.is_lambda() && right.is_lambda())
                && !(right.is_var() && !left.is_var())
                && is_basic_normal(left)
                && is_basic_normal(right)
        }
        Term::LamFs { body, .. } | Term::LamTyped { body, .. } => is_basic_normal(body),
        Term::ApplyFs { fun, .. } => neutral_head(fun) && is_basic_normal(fun),
        Term::Apply { fun, arg } => {
            neutral_head(fun) && is_basic_normal(fun) && is_basic_normal(arg)
        }
    }
}

fn neutral_head(f: &Term) -> bool {
    matches!(
        f,
        Term::Var { .. } | Term::ApplyFs { .. } | Term::Apply { .. }
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BinderKind {
    Fs,
    Typed(Type),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub kind: BinderKind,
}

impl Binder {
    /// Re-wraps `body` in the given prefix (outermost first).
    pub fn wrap(binders: &[Binder], body: Term) -> Term {
        binders.iter().rev().fold(body, |acc, b| match &b.kind {
            BinderKind::Fs => Term::lam_fs(b.name.clone(), acc),
            BinderKind::Typed(ty) => Term::lam_typed(b.name.clone(), ty.clone(), acc),
        })
    }
}

/// Splits `λx̄.e` into its binder prefix and a body that is not an abstraction.
pub fn strip_lambda_prefix(t: &Term) -> (Vec<Binder>, Term) {
    let mut binders = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::LamFs { binder, body } => {
                binders.push(Binder {
                    name: binder.clone(),
                    kind: BinderKind::Fs,
                });
                cur = body;
            }
            Term::LamTyped { binder, ty, body } => {
                binders.push(Binder {
                    name: binder.clone(),
                    kind: BinderKind::Typed(ty.clone()),
                });
                cur = body;
            }
            _ => return (binders, cur.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::alpha_eq;

    fn eqv(l: &str, r: PathRef) -> Term {
        Term::eq(PathRef::var_path(l), r)
    }

    #[test]
    fn john_runs_reduces() {
        let runs = Term::lam_fs(
            "x",
            Term::lam_fs(
                "s",
                Term::and(
                    eqv("s.reln", PathRef::atom("run")),
                    eqv("s.arg1", PathRef::var("x")),
                ),
            ),
        );
        let t = Term::apply_fs(runs, PathRef::atom("john"));
        let out = beta_normalize(&t).unwrap();
        let expected = Term::lam_fs(
            "s",
            Term::and(
                eqv("s.reln", PathRef::atom("run")),
                eqv("s.arg1", PathRef::atom("john")),
            ),
        );
        assert!(alpha_eq(&out, &expected), "{out}");
    }

    #[test]
    fn constant_is_already_normal() {
        assert_eq!(
            beta_normalize(&Term::truth(true)).unwrap(),
            Term::truth(true)
        );
    }

    #[test]
    fn agreement_macro_applied_to_path() {
        let third_sg = Term::lam_fs(
            "X",
            Term::and(
                eqv("X.pers", PathRef::atom("p3")),
                eqv("X.nb", PathRef::atom("sg")),
            ),
        );
        let t = Term::apply_fs(third_sg, PathRef::var_path("s.arg"));
        let out = beta_normalize(&t).unwrap();
        let expected = Term::and(
            eqv("s.arg.pers", PathRef::atom("p3")),
            eqv("s.arg.nb", PathRef::atom("sg")),
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn connectives_move_through_abstractions() {
        let a = Term::lam_fs("x", eqv("x.f", PathRef::atom("a")));
        let b = Term::lam_fs("y", eqv("y.g", PathRef::atom("b")));
        let out = beta_normalize(&Term::or(a.clone(), b)).unwrap();
        let expected = Term::lam_fs(
            "x",
            Term::or(
                eqv("x.f", PathRef::atom("a")),
                eqv("x.g", PathRef::atom("b")),
            ),
        );
        assert!(alpha_eq(&out, &expected));
        let out = beta_normalize(&Term::not(a)).unwrap();
        let expected = Term::lam_fs("x", Term::not(eqv("x.f", PathRef::atom("a"))));
        assert!(alpha_eq(&out, &expected));
    }

    #[test]
    fn typed_constants_reduce_under_application() {
        let t = Term::apply_fs(
            Term::constant(true, Type::fs_predicate(1)),
            PathRef::atom("a"),
        );
        assert_eq!(beta_normalize(&t).unwrap(), Term::truth(true));
        let t = Term::apply(
            Term::constant(false, Type::arrow(Type::Bool, Type::Bool)),
            Term::truth(true),
        );
        assert_eq!(beta_normalize(&t).unwrap(), Term::truth(false));
    }

    #[test]
    fn application_distributes_over_variable_headed_connective() {
        let p = Type::fs_predicate(1);
        let f = Term::and(
            Term::lam_fs("y", eqv("y.f", PathRef::atom("a"))),
            Term::var("P", p.clone()),
        );
        let out = beta_normalize(&Term::apply_fs(f, PathRef::var("x"))).unwrap();
        let expected = Term::and(
            Term::apply_fs(Term::var("P", p), PathRef::var("x")),
            eqv("x.f", PathRef::atom("a")),
        );
        assert_eq!(out, expected);
        assert!(is_basic_normal(&out));
    }

    #[test]
    fn ill_typed_redex_is_rejected() {
        let t = Term::apply(Term::lam_fs("x", Term::truth(true)), Term::truth(true));
        assert!(matches!(beta_normalize(&t), Err(TermError::IllTyped(_))));
    }

    #[test]
    fn fuel_bound_is_enforced() {
        let id = Term::lam_typed("B", Type::Bool, Term::var("B", Type::Bool));
        let t = Term::apply(id.clone(), Term::apply(id, Term::truth(true)));
        assert!(matches!(
            beta_normalize_with_fuel(&t, 1),
            Err(TermError::FuelExhausted(1))
        ));
        assert_eq!(beta_normalize_with_fuel(&t, 2).unwrap(), Term::truth(true));
    }

    #[test]
    fn basic_normal_membership() {
        let p = Type::fs_predicate(1);
        let head = Term::apply_fs(Term::var("x", p), PathRef::var_path("y.f"));
        assert!(is_basic_normal(&head));
        let redex = Term::apply_fs(
            Term::lam_fs("x", Term::eq(PathRef::var("x"), PathRef::atom("a"))),
            PathRef::atom("b"),
        );
        assert!(!is_basic_normal(&redex));
        assert!(!is_basic_normal(&Term::and(redex, Term::truth(true))));
    }

    #[test]
    fn strip_and_rebuild_prefix() {
        let p = Type::fs_predicate(1);
        let body = Term::apply_fs(Term::var("P", p.clone()), PathRef::var("s"));
        let t = Term::lam_typed("P", p.clone(), Term::lam_fs("s", body.clone()));
        let (binders, stripped) = strip_lambda_prefix(&t);
        assert_eq!(
            binders,
            vec![
                Binder {
                    name: "P".into(),
                    kind: BinderKind::Typed(p)
                },
                Binder {
                    name: "s".into(),
                    kind: BinderKind::Fs
                },
            ]
        );
        assert_eq!(stripped, body);
        assert_eq!(Binder::wrap(&binders, stripped), t);

        let (binders, body) = strip_lambda_prefix(&Term::truth(true));
        assert!(binders.is_empty());
        assert_eq!(body, Term::truth(true));

        let x1 = Term::var("X1", Type::Bool);
        let x2 = Term::var("X2", Type::Bool);
        let t = Term::lam_fs("x_1", Term::or(x1.clone(), x2.clone()));
        let (binders, body) = strip_lambda_prefix(&t);
        assert_eq!(
            binders,
            vec![Binder {
                name: "x_1".into(),
                kind: BinderKind::Fs
            }]
        );
        assert_eq!(body, Term::or(x1, x2));
    }
}
