//! Feature-description terms: typed λ-terms over boolean combinations of
//! path equations.
//!
//! A [`Term`] of type `bool` is a constraint over feature structures; terms
//! of type `fs -> τ` and `τ' -> τ` are (higher-order) predicates. Feature
//! structures themselves are never terms: they only appear through
//! [`PathRef`]s, i.e. an atom or an fs-variable followed by a (possibly
//! empty) feature path.

mod display;
mod normalize;
mod subst;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use display::canonical_names;
pub use normalize::{
    beta_normalize, beta_normalize_with_fuel, is_basic_normal, strip_lambda_prefix, Binder,
    BinderKind,
};
pub use subst::{alpha_eq, free_vars, substitute, FreeVars, Replacement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("cannot substitute {replacement} for {kind} variable `{var}`")]
    KindMismatch {
        var: String,
        kind: &'static str,
        replacement: &'static str,
    },
    #[error("type mismatch substituting for `{var}`: expected {expected}, found {found}")]
    TypeMismatch {
        var: String,
        expected: Type,
        found: Type,
    },
    #[error("ill-typed redex: {0}")]
    IllTyped(String),
    #[error("β-normalization ran out of fuel after {0} steps")]
    FuelExhausted(u64),
}

/// Description types: `bool | fs -> τ | τ' -> τ`, plus inference metas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Type {
    Bool,
    FsArrow { result: Box<Type> },
    Arrow { arg: Box<Type>, result: Box<Type> },
    Meta { id: u32 },
}

impl Type {
    pub fn fs_arrow(result: Type) -> Type {
        Type::FsArrow {
            result: Box::new(result),
        }
    }

    pub fn arrow(arg: Type, result: Type) -> Type {
        Type::Arrow {
            arg: Box::new(arg),
            result: Box::new(result),
        }
    }

    /// `fs -> fs -> ... -> bool` with `n` feature-structure arguments.
    pub fn fs_predicate(n: usize) -> Type {
        (0..n).fold(Type::Bool, |t, _| Type::fs_arrow(t))
    }

    pub fn has_meta(&self) -> bool {
        match self {
            Type::Bool => false,
            Type::Meta { .. } => true,
            Type::FsArrow { result } => result.has_meta(),
            Type::Arrow { arg, result } => arg.has_meta() || result.has_meta(),
        }
    }

    /// Result type after one application, if this is a function type.
    pub fn result(&self) -> Option<&Type> {
        match self {
            Type::FsArrow { result } | Type::Arrow { result, .. } => Some(result),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => write!(f, "bool"),
            Type::Meta { id } => write!(f, "?{id}"),
            Type::FsArrow { result } => write!(f, "fs->{result}"),
            Type::Arrow { arg, result } => match **arg {
                Type::Arrow { .. } | Type::FsArrow { .. } => write!(f, "({arg})->{result}"),
                _ => write!(f, "{arg}->{result}"),
            },
        }
    }
}

/// An atom or a feature-structure variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FsRef {
    Var { name: String },
    Atom { name: String },
}

impl FsRef {
    pub fn var(name: impl Into<String>) -> Self {
        FsRef::Var { name: name.into() }
    }

    pub fn atom(name: impl Into<String>) -> Self {
        FsRef::Atom { name: name.into() }
    }

    pub fn name(&self) -> &str {
        match self {
            FsRef::Var { name } | FsRef::Atom { name } => name,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            FsRef::Var { name } => Some(name),
            FsRef::Atom { .. } => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, FsRef::Atom { .. })
    }
}

impl fmt::Display for FsRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `t.p`: an atom or fs-variable followed by a possibly empty feature path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathRef {
    pub base: FsRef,
    pub path: Vec<String>,
}

impl PathRef {
    pub fn new(base: FsRef, path: Vec<String>) -> Self {
        PathRef { base, path }
    }

    pub fn var(name: impl Into<String>) -> Self {
        PathRef::new(FsRef::var(name), Vec::new())
    }

    pub fn atom(name: impl Into<String>) -> Self {
        PathRef::new(FsRef::atom(name), Vec::new())
    }

    /// Parses `x.f.g`; the base is taken to be a variable.
    pub fn var_path(dotted: &str) -> Self {
        let mut parts = dotted.split('.').map(str::to_string);
        let base = parts.next().unwrap_or_default();
        PathRef::new(FsRef::Var { name: base }, parts.collect())
    }

    pub fn is_plain(&self) -> bool {
        self.path.is_empty()
    }

    /// `self.path · suffix`
    pub fn extend(&self, suffix: &[String]) -> PathRef {
        let mut path = self.path.clone();
        path.extend_from_slice(suffix);
        PathRef::new(self.base.clone(), path)
    }

    pub fn var_name(&self) -> Option<&str> {
        self.base.as_var()
    }
}

impl fmt::Display for PathRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for feat in &self.path {
            write!(f, ".{feat}")?;
        }
        Ok(())
    }
}

/// A feature description.
///
/// Equations relate two [`PathRef`]s; the forms `t.p ≐ s` and
/// `t = s` are the cases where the right side (or both sides) carry an empty
/// path. Application to a feature structure covers `e x.p`, `e x` and `e a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    Const {
        value: bool,
        ty: Type,
    },
    Var {
        name: String,
        ty: Type,
    },
    And {
        left: Box<Term>,
        right: Box<Term>,
    },
    Or {
        left: Box<Term>,
        right: Box<Term>,
    },
    Not {
        body: Box<Term>,
    },
    ApplyFs {
        fun: Box<Term>,
        arg: PathRef,
    },
    Apply {
        fun: Box<Term>,
        arg: Box<Term>,
    },
    Eq {
        lhs: PathRef,
        rhs: PathRef,
        positive: bool,
    },
    LamFs {
        binder: String,
        body: Box<Term>,
    },
    LamTyped {
        binder: String,
        ty: Type,
        body: Box<Term>,
    },
}

impl Term {
    pub fn truth(value: bool) -> Term {
        Term::Const {
            value,
            ty: Type::Bool,
        }
    }

    pub fn constant(value: bool, ty: Type) -> Term {
        Term::Const { value, ty }
    }

    pub fn var(name: impl Into<String>, ty: Type) -> Term {
        Term::Var {
            name: name.into(),
            ty,
        }
    }

    pub fn and(left: Term, right: Term) -> Term {
        Term::And {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn or(left: Term, right: Term) -> Term {
        Term::Or {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(body: Term) -> Term {
        Term::Not {
            body: Box::new(body),
        }
    }

    /// Right-nested conjunction; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Term>) -> Term {
        let mut items: Vec<Term> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Term::truth(true);
        };
        while let Some(t) = items.pop() {
            acc = Term::and(t, acc);
        }
        acc
    }

    /// Right-nested disjunction; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Term>) -> Term {
        let mut items: Vec<Term> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Term::truth(false);
        };
        while let Some(t) = items.pop() {
            acc = Term::or(t, acc);
        }
        acc
    }

    pub fn apply_fs(fun: Term, arg: PathRef) -> Term {
        Term::ApplyFs {
            fun: Box::new(fun),
            arg,
        }
    }

    pub fn apply(fun: Term, arg: Term) -> Term {
        Term::Apply {
            fun: Box::new(fun),
            arg: Box::new(arg),
        }
    }

    pub fn eq(lhs: PathRef, rhs: PathRef) -> Term {
        Term::Eq {
            lhs,
            rhs,
            positive: true,
        }
    }

    pub fn neq(lhs: PathRef, rhs: PathRef) -> Term {
        Term::Eq {
            lhs,
            rhs,
            positive: false,
        }
    }

    pub fn lam_fs(binder: impl Into<String>, body: Term) -> Term {
        Term::LamFs {
            binder: binder.into(),
            body: Box::new(body),
        }
    }

    pub fn lam_typed(binder: impl Into<String>, ty: Type, body: Term) -> Term {
        Term::LamTyped {
            binder: binder.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var { .. })
    }

    pub fn is_lambda(&self) -> bool {
        matches!(self, Term::LamFs { .. } | Term::LamTyped { .. })
    }

    pub fn is_const(&self, value: bool) -> bool {
        matches!(self, Term::Const { value: v, .. } if *v == value)
    }

    /// Number of constructor nodes (path references count as one).
    pub fn size(&self) -> usize {
        match self {
            Term::Const { .. } | Term::Var { .. } | Term::Eq { .. } => 1,
            Term::And { left, right } | Term::Or { left, right } => 1 + left.size() + right.size(),
            Term::Not { body } | Term::LamFs { body, .. } | Term::LamTyped { body, .. } => {
                1 + body.size()
            }
            Term::ApplyFs { fun, .. } => 2 + fun.size(),
            Term::Apply { fun, arg } => 1 + fun.size() + arg.size(),
        }
    }

    /// The type of an annotated term, read off its annotations.
    pub fn ty(&self) -> Option<Type> {
        match self {
            Term::Const { ty, .. } | Term::Var { ty, .. } => Some(ty.clone()),
            Term::Eq { .. } => Some(Type::Bool),
            Term::And { left, .. } | Term::Or { left, .. } => left.ty(),
            Term::Not { body } => body.ty(),
            Term::LamFs { body, .. } => Some(Type::fs_arrow(body.ty()?)),
            Term::LamTyped { ty, body, .. } => Some(Type::arrow(ty.clone(), body.ty()?)),
            Term::ApplyFs { fun, .. } => match fun.ty()? {
                Type::FsArrow { result } => Some(*result),
                _ => None,
            },
            Term::Apply { fun, .. } => match fun.ty()? {
                Type::Arrow { result, .. } => Some(*result),
                _ => None,
            },
        }
    }

    /// True when the term has no abstractions, applications or typed
    /// variables: a plain feature constraint.
    pub fn is_first_order(&self) -> bool {
        match self {
            Term::Const { ty, .. } => *ty == Type::Bool,
            Term::Eq { .. } => true,
            Term::And { left, right } | Term::Or { left, right } => {
                left.is_first_order() && right.is_first_order()
            }
            Term::Not { body } => body.is_first_order(),
            _ => false,
        }
    }

    /// Every atom name occurring in the term.
    pub fn atoms(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_refs(&mut |r| {
            if let FsRef::Atom { name } = &r.base {
                out.insert(name.clone());
            }
        });
        out
    }

    /// Every feature name occurring in the term.
    pub fn features(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_refs(&mut |r| out.extend(r.path.iter().cloned()));
        out
    }

    pub(crate) fn visit_refs(&self, f: &mut dyn FnMut(&PathRef)) {
        match self {
            Term::Const { .. } | Term::Var { .. } => {}
            Term::Eq { lhs, rhs, .. } => {
                f(lhs);
                f(rhs);
            }
            Term::And { left, right } | Term::Or { left, right } => {
                left.visit_refs(f);
                right.visit_refs(f);
            }
            Term::Apply { fun, arg } => {
                fun.visit_refs(f);
                arg.visit_refs(f);
            }
            Term::Not { body } | Term::LamFs { body, .. } | Term::LamTyped { body, .. } => {
                body.visit_refs(f)
            }
            Term::ApplyFs { fun, arg } => {
                fun.visit_refs(f);
                f(arg);
            }
        }
    }
}

static FRESH: AtomicU64 = AtomicU64::new(1);

/// A name that cannot clash with any identifier of the grammar language.
/// Generated names carry a `'` suffix; [`canonical_names`] renames them for
/// display.
pub fn fresh_name(hint: &str) -> String {
    let stem = hint.split('\'').next().unwrap_or("x");
    let stem = if stem.is_empty() { "x" } else { stem };
    let n = FRESH.fetch_add(1, Ordering::Relaxed);
    format!("{stem}'{n}")
}

/// True for names produced by [`fresh_name`].
pub fn is_generated(name: &str) -> bool {
    name.contains('\'')
}
