//! Evaluation of descriptions over a finite set of feature trees.
//!
//! The universe holds every tree up to a depth bound whose leaves are atoms or
//! featureless nodes, built from a fixed feature and atom inventory. Trees are
//! hash-consed, so two subtrees are equal exactly when their indices are.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::terms::{FsRef, PathRef, Term, Type};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("universe too shallow for path {0}")]
    TooShallow(String),
    #[error("no value assigned to {0}")]
    Unassigned(String),
    #[error("atom {0} is not in the universe")]
    UnknownAtom(String),
    #[error("ill-typed: {0}")]
    IllTyped(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Tree {
    Atom(usize),
    /// one slot per feature; `None` means the feature is absent
    Node(Vec<Option<usize>>),
}

#[derive(Debug)]
struct Inner {
    features: Vec<String>,
    atoms: Vec<String>,
    depth: usize,
    trees: Vec<Tree>,
}

/// Cheap to clone; evaluated functions keep a handle on it.
#[derive(Clone, Debug)]
pub struct FiniteUniverse {
    inner: Rc<Inner>,
}

impl FiniteUniverse {
    pub fn new<S: AsRef<str>>(features: &[S], atoms: &[S], depth: usize) -> Self {
        let features: Vec<String> = features.iter().map(|s| s.as_ref().to_string()).collect();
        let atoms: Vec<String> = atoms.iter().map(|s| s.as_ref().to_string()).collect();
        let mut trees: Vec<Tree> = Vec::new();
        let mut index: HashMap<Tree, usize> = HashMap::new();
        let mut intern = |t: Tree, trees: &mut Vec<Tree>| -> usize {
            *index.entry(t.clone()).or_insert_with(|| {
                trees.push(t);
                trees.len() - 1
            })
        };
        let mut layer: Vec<usize> = (0..atoms.len())
            .map(|a| intern(Tree::Atom(a), &mut trees))
            .collect();
        layer.push(intern(Tree::Node(vec![None; features.len()]), &mut trees));
        for _ in 0..depth {
            let mut next: Vec<usize> = (0..atoms.len())
                .map(|a| intern(Tree::Atom(a), &mut trees))
                .collect();
            let choices: Vec<Option<usize>> = std::iter::once(None)
                .chain(layer.iter().map(|&t| Some(t)))
                .collect();
            let mut slots = vec![0usize; features.len()];
            loop {
                let node = Tree::Node(slots.iter().map(|&i| choices[i]).collect());
                next.push(intern(node, &mut trees));
                // odometer over the feature slots
                let mut k = 0;
                while k < slots.len() {
                    slots[k] += 1;
                    if slots[k] < choices.len() {
                        break;
                    }
                    slots[k] = 0;
                    k += 1;
                }
                if k == slots.len() {
                    break;
                }
            }
            layer = next;
        }
        FiniteUniverse {
            inner: Rc::new(Inner {
                features,
                atoms,
                depth,
                trees,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.inner.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.trees.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.inner.depth
    }

    pub fn trees(&self) -> impl Iterator<Item = usize> {
        0..self.len()
    }

    pub fn atom(&self, name: &str) -> Option<usize> {
        let a = self.inner.atoms.iter().position(|x| x == name)?;
        self.inner.trees.iter().position(|t| *t == Tree::Atom(a))
    }

    /// Subtree under `feature`, if present.
    pub fn feature(&self, tree: usize, feature: &str) -> Option<usize> {
        let f = self.inner.features.iter().position(|x| x == feature)?;
        match &self.inner.trees[tree] {
            Tree::Atom(_) => None,
            Tree::Node(slots) => slots[f],
        }
    }

    /// Readable form, e.g. `[f:a g:[]]`.
    pub fn describe(&self, tree: usize) -> String {
        match &self.inner.trees[tree] {
            Tree::Atom(a) => self.inner.atoms[*a].clone(),
            Tree::Node(slots) => {
                let parts: Vec<String> = slots
                    .iter()
                    .zip(&self.inner.features)
                    .filter_map(|(s, f)| s.map(|t| format!("{f}:{}", self.describe(t))))
                    .collect();
                format!("[{}]", parts.join(" "))
            }
        }
    }

    fn extract(&self, start: Option<usize>, path: &[String]) -> Option<usize> {
        path.iter().try_fold(start?, |t, f| self.feature(t, f))
    }
}

/// A semantic value: truth value, feature tree (`None` when a path is
/// undefined) or function.
#[derive(Clone)]
pub enum Value {
    Bool(bool),
    Fs(Option<usize>),
    Fun(Rc<dyn Fn(Value) -> Result<Value, EvalError>>),
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "Bool({b})"),
            Value::Fs(t) => write!(f, "Fs({t:?})"),
            Value::Fun(_) => f.write_str("Fun(..)"),
        }
    }
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn apply(&self, arg: Value) -> Result<Value, EvalError> {
        match self {
            Value::Fun(f) => f(arg),
            other => Err(EvalError::IllTyped(format!(
                "{other:?} applied as a function"
            ))),
        }
    }
}

pub type Assignment = BTreeMap<String, Value>;

fn constant(value: bool, ty: &Type) -> Result<Value, EvalError> {
    match ty {
        Type::Bool => Ok(Value::Bool(value)),
        Type::FsArrow { result } | Type::Arrow { result, .. } => {
            let inner = constant(value, result)?;
            Ok(Value::Fun(Rc::new(move |_| Ok(inner.clone()))))
        }
        Type::Meta { .. } => Err(EvalError::IllTyped("constant of unknown type".into())),
    }
}

fn lift(a: Value, b: Value, op: fn(bool, bool) -> bool) -> Result<Value, EvalError> {
    match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => Ok(Value::Bool(op(x, y))),
        (Value::Fun(f), Value::Fun(g)) => Ok(Value::Fun(Rc::new(move |v: Value| {
            lift(f(v.clone())?, g(v)?, op)
        }))),
        (a, b) => Err(EvalError::IllTyped(format!(
            "connective over {a:?} and {b:?}"
        ))),
    }
}

fn complement(a: Value) -> Result<Value, EvalError> {
    match a {
        Value::Bool(x) => Ok(Value::Bool(!x)),
        Value::Fun(f) => Ok(Value::Fun(Rc::new(move |v| complement(f(v)?)))),
        a => Err(EvalError::IllTyped(format!("negation of {a:?}"))),
    }
}

fn path(r: &PathRef, env: &Assignment, u: &FiniteUniverse) -> Result<Option<usize>, EvalError> {
    if r.path.len() > u.depth() {
        return Err(EvalError::TooShallow(r.to_string()));
    }
    let start = match &r.base {
        FsRef::Atom { name } => Some(
            u.atom(name)
                .ok_or_else(|| EvalError::UnknownAtom(name.clone()))?,
        ),
        FsRef::Var { name } => match env.get(name) {
            Some(Value::Fs(t)) => *t,
            Some(other) => {
                return Err(EvalError::IllTyped(format!(
                    "{name} is {other:?}, not a feature structure"
                )))
            }
            None => return Err(EvalError::Unassigned(name.clone())),
        },
    };
    Ok(u.extract(start, &r.path))
}

/// Value of `e` under `env`. Equations hold when both sides are defined
/// and denote the same tree.
pub fn eval_denotation(e: &Term, env: &Assignment, u: &FiniteUniverse) -> Result<Value, EvalError> {
    match e {
        Term::Const { value, ty } => constant(*value, ty),
        Term::Var { name, .. } => env
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::Unassigned(name.clone())),
        Term::And { left, right } => lift(
            eval_denotation(left, env, u)?,
            eval_denotation(right, env, u)?,
            |a, b| a && b,
        ),
        Term::Or { left, right } => lift(
            eval_denotation(left, env, u)?,
            eval_denotation(right, env, u)?,
            |a, b| a || b,
        ),
        Term::Not { body } => complement(eval_denotation(body, env, u)?),
        Term::Eq { lhs, rhs, positive } => {
            let l = path(lhs, env, u)?;
            let r = path(rhs, env, u)?;
            let holds = l.is_some() && l == r;
            Ok(Value::Bool(holds == *positive))
        }
        Term::ApplyFs { fun, arg } => {
            let f = eval_denotation(fun, env, u)?;
            f.apply(Value::Fs(path(arg, env, u)?))
        }
        Term::Apply { fun, arg } => {
            let f = eval_denotation(fun, env, u)?;
            f.apply(eval_denotation(arg, env, u)?)
        }
        Term::LamFs { binder, body } | Term::LamTyped { binder, body, .. } => {
            let env = env.clone();
            let u = u.clone();
            let binder = binder.clone();
            let body = (**body).clone();
            Ok(Value::Fun(Rc::new(move |v| {
                let mut inner = env.clone();
                inner.insert(binder.clone(), v);
                eval_denotation(&body, &inner, &u)
            })))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FiniteUniverse {
        FiniteUniverse::new(&["f", "g"], &["a", "b"], 2)
    }

    #[test]
    fn universe_size() {
        // depth 0: 2 atoms + []; depth 1: 2 + 4*4; depth 2: 2 + 19*19
        assert_eq!(FiniteUniverse::new(&["f", "g"], &["a", "b"], 0).len(), 3);
        assert_eq!(FiniteUniverse::new(&["f", "g"], &["a", "b"], 1).len(), 18);
        assert_eq!(small().len(), 363);
    }

    #[test]
    fn closed_under_subtrees() {
        let u = small();
        for t in u.trees() {
            for f in ["f", "g"] {
                if let Some(s) = u.feature(t, f) {
                    assert!(s < u.len());
                }
            }
        }
    }

    #[test]
    fn self_equation_holds() {
        let u = small();
        let e = Term::eq(PathRef::var("x"), PathRef::var("x"));
        for t in u.trees() {
            let env = Assignment::from([("x".to_string(), Value::Fs(Some(t)))]);
            assert_eq!(eval_denotation(&e, &env, &u).unwrap().as_bool(), Some(true));
        }
    }

    #[test]
    fn true_at_function_type_is_constant() {
        let u = small();
        let t = Term::constant(true, Type::fs_predicate(1));
        let v = eval_denotation(&t, &Assignment::new(), &u).unwrap();
        for x in u.trees() {
            assert_eq!(v.apply(Value::Fs(Some(x))).unwrap().as_bool(), Some(true));
        }
    }

    #[test]
    fn disjunction_of_abstractions_is_pointwise() {
        let u = small();
        let e1 = Term::eq(PathRef::var_path("x.f"), PathRef::atom("a"));
        let e2 = Term::eq(PathRef::var_path("x.g"), PathRef::var_path("x.f"));
        let lifted = Term::or(Term::lam_fs("x", e1.clone()), Term::lam_fs("x", e2.clone()));
        let inside = Term::lam_fs("x", Term::or(e1, e2));
        let env = Assignment::new();
        let l = eval_denotation(&lifted, &env, &u).unwrap();
        let r = eval_denotation(&inside, &env, &u).unwrap();
        for x in u.trees() {
            let arg = Value::Fs(Some(x));
            assert_eq!(
                l.apply(arg.clone()).unwrap().as_bool(),
                r.apply(arg).unwrap().as_bool()
            );
        }
    }

    #[test]
    fn long_paths_are_reported() {
        let u = FiniteUniverse::new(&["f"], &["a"], 1);
        let e = Term::eq(PathRef::var_path("x.f.f"), PathRef::atom("a"));
        let env = Assignment::from([("x".to_string(), Value::Fs(Some(0)))]);
        assert!(matches!(
            eval_denotation(&e, &env, &u),
            Err(EvalError::TooShallow(_))
        ));
    }
}
