//! Type inference for untyped grammar expressions.
//!
//! Inference runs over an internal type language that also has a stand-alone
//! `fs` type, so that binders can start out undetermined and be classified
//! afterwards: a binder whose type resolves to `fs` becomes an fs-abstraction,
//! every other binder a typed one. Public [`Type`]s never contain bare `fs`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::grammar::syntax::{Expr, Pos, RefExpr};
use crate::terms::{FsRef, PathRef, Term, Type};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("cannot unify {left} with {right}")]
    Clash { left: String, right: String },
    #[error("infinite type: ?{meta} occurs in {ty}")]
    Occurs { meta: u32, ty: String },
    #[error("{pos}: `{name}` is used both as a feature structure and as a {used_as}")]
    FsMisuse {
        name: String,
        used_as: &'static str,
        pos: Pos,
    },
    #[error("{pos}: unbound identifier `{name}` used as a description")]
    Unbound { name: String, pos: Pos },
    #[error("{pos}: path `{name}.{path}` applied to a description variable")]
    PathOnDescription {
        name: String,
        path: String,
        pos: Pos,
    },
    #[error("{pos}: macro `{name}` was not expanded")]
    UnexpandedCall { name: String, pos: Pos },
    #[error("a feature structure is not a description")]
    BareFs,
    #[error("ambiguous type {ty}: the expression does not fix every type")]
    Ambiguous { ty: String },
    #[error("expected {expected}, found {found}")]
    Mismatch { expected: Type, found: Type },
    #[error("ill-typed term: {0}")]
    IllTyped(String),
}

/// Inference-side types: public types plus stand-alone `fs`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    Bool,
    Fs,
    Fun(Box<Ty>, Box<Ty>),
    Meta(u32),
}

impl Ty {
    fn fun(a: Ty, r: Ty) -> Ty {
        Ty::Fun(Box::new(a), Box::new(r))
    }

    fn from_type(t: &Type) -> Ty {
        match t {
            Type::Bool => Ty::Bool,
            Type::FsArrow { result } => Ty::fun(Ty::Fs, Ty::from_type(result)),
            Type::Arrow { arg, result } => Ty::fun(Ty::from_type(arg), Ty::from_type(result)),
            Type::Meta { id } => Ty::Meta(*id),
        }
    }

    /// `None` when `fs` occurs outside an argument position.
    fn to_type(&self) -> Option<Type> {
        Some(match self {
            Ty::Bool => Type::Bool,
            Ty::Fs => return None,
            Ty::Meta(id) => Type::Meta { id: *id },
            Ty::Fun(a, r) => match **a {
                Ty::Fs => Type::fs_arrow(r.to_type()?),
                _ => Type::arrow(a.to_type()?, r.to_type()?),
            },
        })
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Bool => write!(f, "bool"),
            Ty::Fs => write!(f, "fs"),
            Ty::Meta(id) => write!(f, "?{id}"),
            Ty::Fun(a, r) => match **a {
                Ty::Fun(..) => write!(f, "({a})->{r}"),
                _ => write!(f, "{a}->{r}"),
            },
        }
    }
}

/// Typing context: types of free typed variables and the current
/// substitution for metas.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    pub bindings: BTreeMap<String, Type>,
    subst: HashMap<u32, Ty>,
    next: u32,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a free typed variable.
    pub fn bind(mut self, name: impl Into<String>, ty: Type) -> Self {
        self.bump_past(&Ty::from_type(&ty));
        self.bindings.insert(name.into(), ty);
        self
    }

    pub fn fresh(&mut self) -> Type {
        Type::Meta {
            id: self.fresh_id(),
        }
    }

    fn fresh_id(&mut self) -> u32 {
        self.next += 1;
        self.next
    }

    fn fresh_ty(&mut self) -> Ty {
        Ty::Meta(self.fresh_id())
    }

    fn bump_past(&mut self, t: &Ty) {
        match t {
            Ty::Meta(id) => self.next = self.next.max(*id),
            Ty::Fun(a, r) => {
                self.bump_past(a);
                self.bump_past(r);
            }
            _ => {}
        }
    }

    /// Applies the substitution exhaustively.
    pub fn resolve(&self, t: &Type) -> Type {
        self.zonk(&Ty::from_type(t))
            .to_type()
            .expect("public types never resolve to bare fs")
    }

    /// Number of metas with a binding.
    pub fn solved_metas(&self) -> usize {
        self.subst.len()
    }

    fn walk(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Meta(id) = t {
            match self.subst.get(&id) {
                Some(next) => t = next.clone(),
                None => break,
            }
        }
        t
    }

    fn zonk(&self, t: &Ty) -> Ty {
        match self.walk(t) {
            Ty::Fun(a, r) => Ty::fun(self.zonk(&a), self.zonk(&r)),
            other => other,
        }
    }

    fn occurs(&self, id: u32, t: &Ty) -> bool {
        match self.walk(t) {
            Ty::Meta(other) => other == id,
            Ty::Fun(a, r) => self.occurs(id, &a) || self.occurs(id, &r),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), TypeError> {
        let (a, b) = (self.walk(a), self.walk(b));
        match (&a, &b) {
            (Ty::Meta(x), Ty::Meta(y)) if x == y => Ok(()),
            (Ty::Meta(x), other) | (other, Ty::Meta(x)) => {
                if self.occurs(*x, other) {
                    return Err(TypeError::Occurs {
                        meta: *x,
                        ty: self.zonk(other).to_string(),
                    });
                }
                self.subst.insert(*x, other.clone());
                Ok(())
            }
            (Ty::Bool, Ty::Bool) | (Ty::Fs, Ty::Fs) => Ok(()),
            (Ty::Fun(a1, r1), Ty::Fun(a2, r2)) => {
                self.unify(a1, a2)?;
                self.unify(r1, r2)
            }
            _ => Err(TypeError::Clash {
                left: self.zonk(&a).to_string(),
                right: self.zonk(&b).to_string(),
            }),
        }
    }
}

/// Most general unifier of two public types, recorded in `env`.
pub fn unify_types(a: &Type, b: &Type, env: &mut TypeEnv) -> Result<(), TypeError> {
    let (a, b) = (Ty::from_type(a), Ty::from_type(b));
    env.bump_past(&a);
    env.bump_past(&b);
    env.unify(&a, &b)
}

/// Inference result before all metas are fixed.
#[derive(Debug, Clone)]
pub struct Inferred {
    node: Node,
    ty: Ty,
    env: TypeEnv,
}

#[derive(Debug, Clone)]
enum Node {
    Const(bool, Ty),
    Var(String, Ty),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Not(Box<Node>),
    ApplyFs(Box<Node>, PathRef),
    /// argument is a bare bound variable whose kind is decided at the end
    ApplyVar(Box<Node>, String, Ty),
    Apply(Box<Node>, Box<Node>),
    Eq(PathRef, PathRef, bool),
    Lam(String, Ty, Box<Node>),
}

impl Inferred {
    /// The type found so far; unresolved parts show as metas.
    pub fn ty(&self) -> Result<Type, TypeError> {
        self.env.zonk(&self.ty).to_type().ok_or(TypeError::BareFs)
    }

    /// Unifies the result type with `expected`.
    pub fn constrain(&mut self, expected: &Type) -> Result<(), TypeError> {
        let want = Ty::from_type(expected);
        self.env.bump_past(&want);
        let ty = self.ty.clone();
        self.env.unify(&ty, &want).map_err(|_| TypeError::Mismatch {
            expected: expected.clone(),
            found: self.ty().unwrap_or(Type::Bool),
        })
    }

    /// The annotated term; fails if any meta is left.
    pub fn finish(self) -> Result<(Type, Term), TypeError> {
        let ty = self.ty()?;
        if ty.has_meta() {
            return Err(TypeError::Ambiguous { ty: ty.to_string() });
        }
        let term = self.build(&self.node)?;
        Ok((ty, term))
    }

    fn resolved(&self, t: &Ty) -> Result<Type, TypeError> {
        let z = self.env.zonk(t);
        let ty = z.to_type().ok_or(TypeError::BareFs)?;
        if ty.has_meta() {
            return Err(TypeError::Ambiguous { ty: z.to_string() });
        }
        Ok(ty)
    }

    fn build(&self, n: &Node) -> Result<Term, TypeError> {
        Ok(match n {
            Node::Const(v, t) => Term::constant(*v, self.resolved(t)?),
            Node::Var(name, t) => Term::var(name.clone(), self.resolved(t)?),
            Node::And(a, b) => Term::and(self.build(a)?, self.build(b)?),
            Node::Or(a, b) => Term::or(self.build(a)?, self.build(b)?),
            Node::Not(a) => Term::not(self.build(a)?),
            Node::ApplyFs(f, p) => Term::apply_fs(self.build(f)?, p.clone()),
            Node::ApplyVar(f, name, t) => {
                let fun = self.build(f)?;
                match self.env.walk(t) {
                    Ty::Fs => Term::apply_fs(fun, PathRef::var(name.clone())),
                    _ => Term::apply(fun, Term::var(name.clone(), self.resolved(t)?)),
                }
            }
            Node::Apply(f, a) => Term::apply(self.build(f)?, self.build(a)?),
            Node::Eq(l, r, pos) => Term::Eq {
                lhs: l.clone(),
                rhs: r.clone(),
                positive: *pos,
            },
            Node::Lam(b, t, body) => {
                let body = self.build(body)?;
                match self.env.walk(t) {
                    Ty::Fs => Term::lam_fs(b.clone(), body),
                    _ => Term::lam_typed(b.clone(), self.resolved(t)?, body),
                }
            }
        })
    }
}

struct Infer {
    env: TypeEnv,
    scope: Vec<(String, Ty)>,
}

impl Infer {
    fn lookup(&self, name: &str) -> Option<Ty> {
        if let Some((_, t)) = self.scope.iter().rev().find(|(n, _)| n == name) {
            return Some(t.clone());
        }
        self.env.bindings.get(name).map(Ty::from_type)
    }

    fn bound(&self, r: &RefExpr) -> Option<Ty> {
        if r.atom {
            None
        } else {
            self.lookup(&r.name)
        }
    }

    /// A reference in fs position: bound names must be fs-variables.
    fn fs_ref(&mut self, r: &RefExpr, used_as: &'static str) -> Result<PathRef, TypeError> {
        match self.bound(r) {
            Some(t) => {
                self.env
                    .unify(&t, &Ty::Fs)
                    .map_err(|_| TypeError::FsMisuse {
                        name: r.name.clone(),
                        used_as,
                        pos: r.pos,
                    })?;
                Ok(PathRef::new(FsRef::var(r.name.clone()), r.path.clone()))
            }
            None => Ok(PathRef::new(FsRef::atom(r.name.clone()), r.path.clone())),
        }
    }

    fn infer(&mut self, e: &Expr) -> Result<(Node, Ty), TypeError> {
        match e {
            Expr::Const(v) => {
                let t = self.env.fresh_ty();
                Ok((Node::Const(*v, t.clone()), t))
            }
            Expr::Ref(r) => {
                let Some(t) = self.bound(r) else {
                    return Err(TypeError::Unbound {
                        name: r.name.clone(),
                        pos: r.pos,
                    });
                };
                if !r.path.is_empty() {
                    return Err(TypeError::PathOnDescription {
                        name: r.name.clone(),
                        path: r.path.join("."),
                        pos: r.pos,
                    });
                }
                if self.env.walk(&t) == Ty::Fs {
                    return Err(TypeError::FsMisuse {
                        name: r.name.clone(),
                        used_as: "description",
                        pos: r.pos,
                    });
                }
                Ok((Node::Var(r.name.clone(), t.clone()), t))
            }
            Expr::Eq { lhs, rhs, positive } => {
                let l = self.fs_ref(lhs, "description")?;
                let r = self.fs_ref(rhs, "description")?;
                Ok((Node::Eq(l, r, *positive), Ty::Bool))
            }
            Expr::And(a, b) | Expr::Or(a, b) => {
                let (na, ta) = self.infer(a)?;
                let (nb, tb) = self.infer(b)?;
                self.env.unify(&ta, &tb)?;
                let node = match e {
                    Expr::And(..) => Node::And(Box::new(na), Box::new(nb)),
                    _ => Node::Or(Box::new(na), Box::new(nb)),
                };
                Ok((node, ta))
            }
            Expr::Not(a) => {
                let (na, ta) = self.infer(a)?;
                Ok((Node::Not(Box::new(na)), ta))
            }
            Expr::Lam { binder, body } => {
                let bt = self.env.fresh_ty();
                self.scope.push((binder.clone(), bt.clone()));
                let res = self.infer(body);
                self.scope.pop();
                let (nb, tb) = res?;
                Ok((
                    Node::Lam(binder.clone(), bt.clone(), Box::new(nb)),
                    Ty::fun(bt, tb),
                ))
            }
            Expr::App { fun, arg } => self.application(fun, arg),
            Expr::Call { name, args, pos } => {
                // a variable applied with call syntax
                if self.lookup(name).is_none() {
                    return Err(TypeError::UnexpandedCall {
                        name: name.clone(),
                        pos: *pos,
                    });
                }
                let mut e = Expr::Ref(RefExpr {
                    name: name.clone(),
                    path: vec![],
                    atom: false,
                    pos: *pos,
                });
                for a in args {
                    e = Expr::app(e, a.clone());
                }
                self.infer(&e)
            }
        }
    }

    fn application(&mut self, fun: &Expr, arg: &Expr) -> Result<(Node, Ty), TypeError> {
        let (nf, tf) = self.infer(fun)?;
        let res = self.env.fresh_ty();
        let (node, ta) = match arg {
            Expr::Ref(r) => match self.bound(r) {
                Some(t) if r.path.is_empty() && self.env.walk(&t) != Ty::Fs => {
                    (Node::ApplyVar(Box::new(nf), r.name.clone(), t.clone()), t)
                }
                _ => {
                    let p = self.fs_ref(r, "function")?;
                    (Node::ApplyFs(Box::new(nf), p), Ty::Fs)
                }
            },
            other => {
                let (na, ta) = self.infer(other)?;
                (Node::Apply(Box::new(nf), Box::new(na)), ta)
            }
        };
        self.env.unify(&tf, &Ty::fun(ta, res.clone()))?;
        Ok((node, res))
    }
}

/// Infers the most general type of an untyped expression. Unbound
/// identifiers in feature-structure positions are atoms.
pub fn infer_type(e: &Expr) -> Result<Inferred, TypeError> {
    infer_type_in(e, TypeEnv::new())
}

/// As [`infer_type`], with free typed variables declared in `env`.
pub fn infer_type_in(e: &Expr, env: TypeEnv) -> Result<Inferred, TypeError> {
    let mut inf = Infer {
        env,
        scope: Vec::new(),
    };
    let (node, ty) = inf.infer(e)?;
    if inf.env.walk(&ty) == Ty::Fs {
        return Err(TypeError::BareFs);
    }
    Ok(Inferred {
        node,
        ty,
        env: inf.env,
    })
}

/// Infers, constrains to `expected` and annotates in one step.
pub fn elaborate(e: &Expr, expected: &Type) -> Result<Term, TypeError> {
    let mut inf = infer_type(e)?;
    inf.constrain(expected)?;
    Ok(inf.finish()?.1)
}

/// Checks an entry type against the type required by its category: they must
/// unify and leave nothing undetermined.
pub fn check_entry(entry: &Type, required: &Type) -> Result<Type, TypeError> {
    let mut env = TypeEnv::new();
    unify_types(entry, required, &mut env).map_err(|_| TypeError::Mismatch {
        expected: required.clone(),
        found: entry.clone(),
    })?;
    let ty = env.resolve(entry);
    if ty.has_meta() {
        return Err(TypeError::Ambiguous { ty: ty.to_string() });
    }
    Ok(ty)
}

/// Type of an annotated term, checking every annotation on the way.
/// Free typed variables carry their own annotation.
pub fn type_of(t: &Term) -> Result<Type, TypeError> {
    let mut fs_bound = Vec::new();
    let mut typed_bound = Vec::new();
    check(t, &mut fs_bound, &mut typed_bound)
}

fn check(
    t: &Term,
    fs_bound: &mut Vec<String>,
    typed_bound: &mut Vec<(String, Type)>,
) -> Result<Type, TypeError> {
    let ill = |msg: String| Err(TypeError::IllTyped(msg));
    let fs_ok = |r: &PathRef, typed_bound: &Vec<(String, Type)>, fs_bound: &Vec<String>| {
        let Some(name) = r.var_name() else {
            return true;
        };
        let typed_pos = typed_bound.iter().rposition(|(n, _)| n == name);
        let fs_pos = fs_bound.iter().rposition(|n| n == name);
        // a typed binder shadows only if it is the innermost; positions are
        // not comparable across the two stacks, so require no typed binder
        typed_pos.is_none() || fs_pos.is_some()
    };
    match t {
        Term::Const { ty, .. } => Ok(ty.clone()),
        Term::Var { name, ty } => {
            if let Some((_, bt)) = typed_bound.iter().rev().find(|(n, _)| n == name) {
                if bt != ty {
                    return ill(format!("`{name}` annotated {ty}, bound at {bt}"));
                }
            }
            Ok(ty.clone())
        }
        Term::Eq { lhs, rhs, .. } => {
            for r in [lhs, rhs] {
                if !fs_ok(r, typed_bound, fs_bound) {
                    return ill(format!("`{r}` refers to a typed variable"));
                }
            }
            Ok(Type::Bool)
        }
        Term::And { left, right } | Term::Or { left, right } => {
            let a = check(left, fs_bound, typed_bound)?;
            let b = check(right, fs_bound, typed_bound)?;
            if a != b {
                return ill(format!("connective operands of types {a} and {b}"));
            }
            Ok(a)
        }
        Term::Not { body } => check(body, fs_bound, typed_bound),
        Term::ApplyFs { fun, arg } => {
            if !fs_ok(arg, typed_bound, fs_bound) {
                return ill(format!("`{arg}` refers to a typed variable"));
            }
            match check(fun, fs_bound, typed_bound)? {
                Type::FsArrow { result } => Ok(*result),
                other => ill(format!("{other} applied to a feature structure")),
            }
        }
        Term::Apply { fun, arg } => {
            let f = check(fun, fs_bound, typed_bound)?;
            let a = check(arg, fs_bound, typed_bound)?;
            match f {
                Type::Arrow { arg: want, result } if *want == a => Ok(*result),
                other => ill(format!("{other} applied to {a}")),
            }
        }
        Term::LamFs { binder, body } => {
            fs_bound.push(binder.clone());
            let r = check(body, fs_bound, typed_bound);
            fs_bound.pop();
            Ok(Type::fs_arrow(r?))
        }
        Term::LamTyped { binder, ty, body } => {
            typed_bound.push((binder.clone(), ty.clone()));
            let r = check(body, fs_bound, typed_bound);
            typed_bound.pop();
            Ok(Type::arrow(ty.clone(), r?))
        }
    }
}

/// Drops every annotation, giving back a surface expression. Atoms are marked
/// so that re-inference does not capture them.
pub fn erase(t: &Term) -> Expr {
    fn reference(r: &PathRef) -> RefExpr {
        RefExpr {
            name: r.base.name().to_string(),
            path: r.path.clone(),
            atom: r.base.is_atom(),
            pos: Pos::default(),
        }
    }
    match t {
        Term::Const { value, .. } => Expr::Const(*value),
        Term::Var { name, .. } => Expr::Ref(RefExpr {
            name: name.clone(),
            path: vec![],
            atom: false,
            pos: Pos::default(),
        }),
        Term::And { left, right } => Expr::And(Box::new(erase(left)), Box::new(erase(right))),
        Term::Or { left, right } => Expr::Or(Box::new(erase(left)), Box::new(erase(right))),
        Term::Not { body } => Expr::Not(Box::new(erase(body))),
        Term::ApplyFs { fun, arg } => Expr::app(erase(fun), Expr::Ref(reference(arg))),
        Term::Apply { fun, arg } => Expr::app(erase(fun), erase(arg)),
        Term::Eq { lhs, rhs, positive } => Expr::Eq {
            lhs: reference(lhs),
            rhs: reference(rhs),
            positive: *positive,
        },
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            Expr::lam(binder.clone(), erase(body))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::syntax::parse_expr;

    fn fsb(n: usize) -> Type {
        Type::fs_predicate(n)
    }

    #[test]
    fn unify_examples() {
        let mut env = TypeEnv::new();
        unify_types(&Type::Bool, &Type::Bool, &mut env).unwrap();
        assert_eq!(env.solved_metas(), 0);

        let mut env = TypeEnv::new();
        let m = env.fresh();
        unify_types(&Type::fs_arrow(m.clone()), &fsb(1), &mut env).unwrap();
        assert_eq!(env.resolve(&m), Type::Bool);

        let mut env = TypeEnv::new();
        let err = unify_types(&Type::Bool, &Type::arrow(Type::Bool, Type::Bool), &mut env);
        assert!(matches!(err, Err(TypeError::Clash { .. })));
    }

    #[test]
    fn occurs_check() {
        let mut env = TypeEnv::new();
        let m = env.fresh();
        let err = unify_types(&m, &Type::arrow(m.clone(), Type::Bool), &mut env);
        assert!(matches!(err, Err(TypeError::Occurs { .. })));
    }

    #[test]
    fn john_runs_types() {
        let e = parse_expr("\\s. s.reln=run & s.arg1=john").unwrap();
        let (ty, t) = infer_type(&e).unwrap().finish().unwrap();
        assert_eq!(ty, fsb(1));
        assert_eq!(t.to_string(), "\\s. s.reln=run & s.arg1=john");

        let e = parse_expr("\\x.\\s. s.reln=run & s.arg1=x").unwrap();
        let (ty, _) = infer_type(&e).unwrap().finish().unwrap();
        assert_eq!(ty, fsb(2));
    }

    #[test]
    fn raising_combinator_is_most_general() {
        let e = parse_expr("\\S \\Vt \\C. S (Vt C)").unwrap();
        let inf = infer_type(&e).unwrap();
        // (e -> g) -> (d -> e) -> d -> g, up to renaming of metas
        let ty = inf.ty().unwrap();
        let Type::Arrow {
            arg: s,
            result: rest,
        } = &ty
        else {
            panic!("{ty}")
        };
        let Type::Arrow {
            arg: vt,
            result: rest,
        } = &**rest
        else {
            panic!("{ty}")
        };
        let Type::Arrow { arg: c, result: g } = &**rest else {
            panic!("{ty}")
        };
        let Type::Arrow {
            arg: e1,
            result: g1,
        } = &**s
        else {
            panic!("{ty}")
        };
        let Type::Arrow {
            arg: d1,
            result: e2,
        } = &**vt
        else {
            panic!("{ty}")
        };
        assert_eq!(e1, e2);
        assert_eq!(g1, g);
        assert_eq!(&**d1, &**c);
        for m in [e1, g1, d1] {
            assert!(matches!(**m, Type::Meta { .. }));
        }
        assert!(e1 != g1 && e1 != d1 && g1 != d1);
    }

    #[test]
    fn raising_combinator_at_lifted_np() {
        let np = Type::arrow(fsb(2), fsb(1));
        let iv_np = Type::arrow(np.clone(), fsb(2));
        let s_np = Type::arrow(np.clone(), fsb(1));
        let expected = Type::arrow(np.clone(), Type::arrow(iv_np, s_np));
        let e = parse_expr("\\S \\Vt \\C. S (Vt C)").unwrap();
        let t = elaborate(&e, &expected).unwrap();
        assert_eq!(type_of(&t).unwrap(), expected);
        assert!(matches!(t, Term::LamTyped { .. }));
    }

    #[test]
    fn binder_kind_comes_from_usage() {
        let e = parse_expr("\\X. X.pers=p3 & X.nb=sg").unwrap();
        let (_, t) = infer_type(&e).unwrap().finish().unwrap();
        assert!(matches!(t, Term::LamFs { .. }));

        // nothing fixes the kind of x until a type is imposed
        let e = parse_expr("\\x. \\P. P x").unwrap();
        assert!(matches!(
            infer_type(&e).unwrap().finish(),
            Err(TypeError::Ambiguous { .. })
        ));
        let want = Type::fs_arrow(Type::arrow(fsb(1), Type::Bool));
        let t = elaborate(&e, &want).unwrap();
        assert_eq!(t.to_string(), "\\x. \\P. P x");
        let Term::LamFs { body, .. } = &t else {
            panic!("{t:?}")
        };
        let Term::LamTyped { body, .. } = &**body else {
            panic!("{t:?}")
        };
        assert!(matches!(**body, Term::ApplyFs { .. }));
    }

    #[test]
    fn fs_and_function_clash() {
        let e = parse_expr("\\x. x.f=a & x y").unwrap();
        assert!(infer_type(&e).is_err());
        let e = parse_expr("\\x. x & x.f=a").unwrap();
        assert!(matches!(
            infer_type(&e),
            Err(TypeError::FsMisuse { .. }) | Err(TypeError::Clash { .. })
        ));
    }

    #[test]
    fn unbound_function_is_an_error() {
        let e = parse_expr("\\s. P s").unwrap();
        assert!(matches!(infer_type(&e), Err(TypeError::Unbound { .. })));
    }

    #[test]
    fn check_entry_examples() {
        assert_eq!(check_entry(&fsb(2), &fsb(2)).unwrap(), fsb(2));
        assert!(check_entry(&Type::Bool, &fsb(2)).is_err());
        let pp_s = Type::arrow(fsb(1), fsb(1));
        let e = parse_expr("\\s.s").unwrap();
        let inf = infer_type(&e).unwrap();
        assert_eq!(check_entry(&inf.ty().unwrap(), &pp_s).unwrap(), pp_s);
    }

    #[test]
    fn double_binder_true_is_rejected_at_s() {
        let e = parse_expr("\\x.\\x. true").unwrap();
        let mut inf = infer_type(&e).unwrap();
        assert!(inf.constrain(&fsb(1)).is_err());
    }

    #[test]
    fn type_of_agrees_and_erase_reinfers() {
        let e = parse_expr("\\P.\\s. s.quant=q & P s.arg s.pred").unwrap();
        let (ty, t) = infer_type(&e).unwrap().finish().unwrap();
        assert_eq!(ty.to_string(), "(fs->fs->bool)->fs->bool");
        assert_eq!(type_of(&t).unwrap(), ty);
        let again = elaborate(&erase(&t), &ty).unwrap();
        assert_eq!(again, t);
    }
}
