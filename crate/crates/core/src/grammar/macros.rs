//! Syntactic expansion of `let` macros.

use std::collections::{BTreeSet, HashMap};

use super::syntax::{Expr, Pos, RefExpr};
use super::GrammarError;
use crate::terms::fresh_name;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Macro {
    pub name: String,
    pub params: Vec<String>,
    pub body: Expr,
    pub pos: Pos,
}

pub(crate) struct Expander<'a> {
    macros: &'a HashMap<String, Macro>,
    done: HashMap<String, Expr>,
    active: Vec<String>,
}

impl<'a> Expander<'a> {
    pub(crate) fn new(macros: &'a HashMap<String, Macro>) -> Self {
        Expander {
            macros,
            done: HashMap::new(),
            active: Vec::new(),
        }
    }

    /// Expands every macro use in `e`; `scope` holds the binders around it.
    pub(crate) fn expand(
        &mut self,
        e: &Expr,
        scope: &mut Vec<String>,
    ) -> Result<Expr, GrammarError> {
        Ok(match e {
            Expr::Lam { binder, body } => {
                scope.push(binder.clone());
                let body = self.expand(body, scope);
                scope.pop();
                Expr::lam(binder.clone(), body?)
            }
            Expr::App { fun, arg } => Expr::app(self.expand(fun, scope)?, self.expand(arg, scope)?),
            Expr::And(a, b) => Expr::And(
                Box::new(self.expand(a, scope)?),
                Box::new(self.expand(b, scope)?),
            ),
            Expr::Or(a, b) => Expr::Or(
                Box::new(self.expand(a, scope)?),
                Box::new(self.expand(b, scope)?),
            ),
            Expr::Not(a) => Expr::Not(Box::new(self.expand(a, scope)?)),
            Expr::Ref(r) if r.path.is_empty() && !r.atom && !scope.contains(&r.name) => {
                match self.macros.get(&r.name) {
                    Some(m) => self.instantiate(m, &[], r.pos)?,
                    None => e.clone(),
                }
            }
            Expr::Call { name, args, pos } => {
                let args = args
                    .iter()
                    .map(|a| self.expand(a, scope))
                    .collect::<Result<Vec<_>, _>>()?;
                if scope.contains(name) {
                    Expr::Call {
                        name: name.clone(),
                        args,
                        pos: *pos,
                    }
                } else {
                    match self.macros.get(name) {
                        Some(m) => self.instantiate(m, &args, *pos)?,
                        None => {
                            return Err(GrammarError::UndefinedMacro {
                                name: name.clone(),
                                pos: *pos,
                            })
                        }
                    }
                }
            }
            _ => e.clone(),
        })
    }

    /// The macro body with its own macro uses expanded and its free
    /// identifiers frozen as atoms.
    fn body(&mut self, m: &Macro) -> Result<Expr, GrammarError> {
        if let Some(b) = self.done.get(&m.name) {
            return Ok(b.clone());
        }
        if self.active.contains(&m.name) {
            return Err(GrammarError::MacroCycle {
                name: m.name.clone(),
                pos: m.pos,
            });
        }
        self.active.push(m.name.clone());
        let mut scope = m.params.clone();
        let expanded = self.expand(&m.body, &mut scope);
        self.active.pop();
        let mut bound = m.params.clone();
        let body = freeze_free(&expanded?, &mut bound);
        self.done.insert(m.name.clone(), body.clone());
        Ok(body)
    }

    fn instantiate(&mut self, m: &Macro, args: &[Expr], pos: Pos) -> Result<Expr, GrammarError> {
        // a parameterless macro followed by arguments is applied to them
        let (given, extra) = if m.params.is_empty() {
            (&args[..0], args)
        } else if args.len() == m.params.len() {
            (args, &args[..0])
        } else {
            return Err(GrammarError::Arity {
                name: m.name.clone(),
                expected: m.params.len(),
                found: args.len(),
                pos,
            });
        };
        let body = self.body(m)?;
        let map: HashMap<String, Expr> = m
            .params
            .iter()
            .cloned()
            .zip(given.iter().cloned())
            .collect();
        let mut avoid = BTreeSet::new();
        for a in given {
            free_idents(a, &mut Vec::new(), &mut avoid);
        }
        let mut out = substitute(&body, &map, &avoid, &m.name, pos)?;
        for a in extra {
            out = Expr::app(out, a.clone());
        }
        Ok(out)
    }
}

fn free_idents(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mut note = |r: &RefExpr, bound: &Vec<String>| {
        if !r.atom && !bound.contains(&r.name) {
            out.insert(r.name.clone());
        }
    };
    match e {
        Expr::Lam { binder, body } => {
            bound.push(binder.clone());
            free_idents(body, bound, out);
            bound.pop();
        }
        Expr::App { fun: a, arg: b } | Expr::And(a, b) | Expr::Or(a, b) => {
            free_idents(a, bound, out);
            free_idents(b, bound, out);
        }
        Expr::Not(a) => free_idents(a, bound, out),
        Expr::Eq { lhs, rhs, .. } => {
            note(lhs, bound);
            note(rhs, bound);
        }
        Expr::Ref(r) => note(r, bound),
        Expr::Call { name, args, .. } => {
            if !bound.contains(name) {
                out.insert(name.clone());
            }
            for a in args {
                free_idents(a, bound, out);
            }
        }
        Expr::Const(_) => {}
    }
}

fn freeze_ref(r: &RefExpr, bound: &[String]) -> RefExpr {
    let mut r = r.clone();
    if !bound.contains(&r.name) {
        r.atom = true;
    }
    r
}

fn freeze_free(e: &Expr, bound: &mut Vec<String>) -> Expr {
    match e {
        Expr::Lam { binder, body } => {
            bound.push(binder.clone());
            let body = freeze_free(body, bound);
            bound.pop();
            Expr::lam(binder.clone(), body)
        }
        Expr::App { fun, arg } => Expr::app(freeze_free(fun, bound), freeze_free(arg, bound)),
        Expr::And(a, b) => Expr::And(
            Box::new(freeze_free(a, bound)),
            Box::new(freeze_free(b, bound)),
        ),
        Expr::Or(a, b) => Expr::Or(
            Box::new(freeze_free(a, bound)),
            Box::new(freeze_free(b, bound)),
        ),
        Expr::Not(a) => Expr::Not(Box::new(freeze_free(a, bound))),
        Expr::Eq { lhs, rhs, positive } => Expr::Eq {
            lhs: freeze_ref(lhs, bound),
            rhs: freeze_ref(rhs, bound),
            positive: *positive,
        },
        Expr::Ref(r) => Expr::Ref(freeze_ref(r, bound)),
        Expr::Call { name, args, pos } => Expr::Call {
            name: name.clone(),
            args: args.iter().map(|a| freeze_free(a, bound)).collect(),
            pos: *pos,
        },
        Expr::Const(_) => e.clone(),
    }
}

fn rename_binder(e: &Expr, from: &str, to: &str) -> Expr {
    let fix = |r: &RefExpr| {
        let mut r = r.clone();
        if !r.atom && r.name == from {
            r.name = to.to_string();
        }
        r
    };
    match e {
        Expr::Lam { binder, .. } if binder == from => e.clone(),
        Expr::Lam { binder, body } => Expr::lam(binder.clone(), rename_binder(body, from, to)),
        Expr::App { fun, arg } => {
            Expr::app(rename_binder(fun, from, to), rename_binder(arg, from, to))
        }
        Expr::And(a, b) => Expr::And(
            Box::new(rename_binder(a, from, to)),
            Box::new(rename_binder(b, from, to)),
        ),
        Expr::Or(a, b) => Expr::Or(
            Box::new(rename_binder(a, from, to)),
            Box::new(rename_binder(b, from, to)),
        ),
        Expr::Not(a) => Expr::Not(Box::new(rename_binder(a, from, to))),
        Expr::Eq { lhs, rhs, positive } => Expr::Eq {
            lhs: fix(lhs),
            rhs: fix(rhs),
            positive: *positive,
        },
        Expr::Ref(r) => Expr::Ref(fix(r)),
        Expr::Call { name, args, pos } => Expr::Call {
            name: if name == from {
                to.to_string()
            } else {
                name.clone()
            },
            args: args.iter().map(|a| rename_binder(a, from, to)).collect(),
            pos: *pos,
        },
        Expr::Const(_) => e.clone(),
    }
}

/// Replaces parameters by arguments, renaming body binders that would
/// capture a free identifier of an argument.
fn substitute(
    e: &Expr,
    map: &HashMap<String, Expr>,
    avoid: &BTreeSet<String>,
    macro_name: &str,
    pos: Pos,
) -> Result<Expr, GrammarError> {
    let sub = |e: &Expr| substitute(e, map, avoid, macro_name, pos);
    let as_ref = |r: &RefExpr| -> Result<RefExpr, GrammarError> {
        if r.atom {
            return Ok(r.clone());
        }
        match map.get(&r.name) {
            None => Ok(r.clone()),
            Some(Expr::Ref(a)) => {
                let mut out = a.clone();
                out.path.extend(r.path.iter().cloned());
                Ok(out)
            }
            Some(other) => Err(GrammarError::MacroArgument {
                name: macro_name.to_string(),
                message: format!(
                    "parameter `{}` is used as a feature structure but the argument is `{other}`",
                    r.name
                ),
                pos,
            }),
        }
    };
    Ok(match e {
        Expr::Lam { binder, body } => {
            let mut map = map.clone();
            map.remove(binder);
            let (binder, body) = if avoid.contains(binder) {
                let fresh = fresh_name(binder);
                (fresh.clone(), rename_binder(body, binder, &fresh))
            } else {
                (binder.clone(), (**body).clone())
            };
            Expr::lam(binder, substitute(&body, &map, avoid, macro_name, pos)?)
        }
        Expr::App { fun, arg } => Expr::app(sub(fun)?, sub(arg)?),
        Expr::And(a, b) => Expr::And(Box::new(sub(a)?), Box::new(sub(b)?)),
        Expr::Or(a, b) => Expr::Or(Box::new(sub(a)?), Box::new(sub(b)?)),
        Expr::Not(a) => Expr::Not(Box::new(sub(a)?)),
        Expr::Eq { lhs, rhs, positive } => Expr::Eq {
            lhs: as_ref(lhs)?,
            rhs: as_ref(rhs)?,
            positive: *positive,
        },
        Expr::Ref(r) if !r.atom && r.path.is_empty() => match map.get(&r.name) {
            Some(a) => a.clone(),
            None => e.clone(),
        },
        Expr::Ref(r) => Expr::Ref(as_ref(r)?),
        Expr::Call { name, args, pos: p } => {
            let args = args.iter().map(sub).collect::<Result<Vec<_>, _>>()?;
            match map.get(name) {
                Some(head) => args.into_iter().fold(head.clone(), Expr::app),
                None => Expr::Call {
                    name: name.clone(),
                    args,
                    pos: *p,
                },
            }
        }
        Expr::Const(_) => e.clone(),
    })
}
