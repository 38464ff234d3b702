//! Constraint categorial grammars: categories, the category-to-type map,
//! the grammar file format, macro expansion and lexical elaboration.

mod category;
mod macros;
pub mod syntax;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

pub use category::Category;
pub use macros::Macro;
pub use syntax::{parse_category, parse_expr, Declaration, Expr, Pos, RefExpr, TypeExpr};

use crate::terms::{beta_normalize, canonical_names, Term, TermError, Type};
use crate::typing::{check_entry, infer_type, TypeError};
use macros::Expander;
use syntax::Statement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: undefined macro `{name}`")]
    UndefinedMacro { name: String, pos: Pos },
    #[error("{pos}: macro `{name}` expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },
    #[error("{pos}: macro `{name}` refers to itself")]
    MacroCycle { name: String, pos: Pos },
    #[error("{pos}: in a use of macro `{name}`: {message}")]
    MacroArgument {
        name: String,
        message: String,
        pos: Pos,
    },
    #[error("{pos}: `{name}` is declared twice")]
    Duplicate { name: String, pos: Pos },
    #[error("{pos}: undeclared category `{name}`")]
    UndeclaredCategory { name: String, pos: Pos },
    #[error("{pos}: category alias `{name}` is defined in terms of itself")]
    AliasCycle { name: String, pos: Pos },
    #[error("{pos}: base category `{name}` must have a description type, not bare fs")]
    BareFsCategory { name: String, pos: Pos },
    #[error("{pos}: {what}: {source}")]
    Type {
        what: String,
        pos: Pos,
        source: TypeError,
    },
    #[error("{pos}: {what} has type {inferred}, but its category {cat} requires {required}")]
    EntryType {
        what: String,
        cat: Category,
        inferred: Type,
        required: Type,
        pos: Pos,
    },
    #[error("{pos}: {what}: {source}")]
    Normalize {
        what: String,
        pos: Pos,
        source: TermError,
    },
}

impl GrammarError {
    pub fn pos(&self) -> Pos {
        match self {
            GrammarError::Syntax { pos, .. }
            | GrammarError::UndefinedMacro { pos, .. }
            | GrammarError::Arity { pos, .. }
            | GrammarError::MacroCycle { pos, .. }
            | GrammarError::MacroArgument { pos, .. }
            | GrammarError::Duplicate { pos, .. }
            | GrammarError::UndeclaredCategory { pos, .. }
            | GrammarError::AliasCycle { pos, .. }
            | GrammarError::BareFsCategory { pos, .. }
            | GrammarError::Type { pos, .. }
            | GrammarError::EntryType { pos, .. }
            | GrammarError::Normalize { pos, .. } => *pos,
        }
    }
}

/// A lexical entry: a word, its category and its (β-normal, annotated)
/// semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub id: usize,
    pub word: String,
    pub cat: Category,
    pub sem: Term,
    pub ty: Type,
    pub pos: Pos,
}

/// A unary rule rewriting category `from` to `to`, with a combinator applied
/// to the semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformation {
    pub id: usize,
    pub from: Category,
    pub to: Category,
    pub sem: Term,
    pub pos: Pos,
}

#[derive(Debug, Clone, Default)]
pub struct Grammar {
    /// Base declarations in source order.
    pub declarations: Vec<Declaration>,
    pub base_types: BTreeMap<String, Type>,
    pub aliases: BTreeMap<String, Category>,
    pub transformations: Vec<Transformation>,
    pub lexicon: Vec<LexEntry>,
    pub macros: Vec<Macro>,
    pub warnings: Vec<String>,
}

/// Structural equality, ignoring source positions.
impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        let lex = |g: &Grammar| {
            g.lexicon
                .iter()
                .map(|e| (e.word.clone(), e.cat.clone(), e.sem.clone(), e.ty.clone()))
                .collect::<Vec<_>>()
        };
        let rules = |g: &Grammar| {
            g.transformations
                .iter()
                .map(|t| (t.from.clone(), t.to.clone(), t.sem.clone()))
                .collect::<Vec<_>>()
        };
        let macros = |g: &Grammar| {
            g.macros
                .iter()
                .map(|m| (m.name.clone(), m.params.clone(), m.body.to_string()))
                .collect::<Vec<_>>()
        };
        self.declarations == other.declarations
            && lex(self) == lex(other)
            && rules(self) == rules(other)
            && macros(self) == macros(other)
    }
}

fn lower_type(t: &TypeExpr) -> Option<Type> {
    match t {
        TypeExpr::Bool => Some(Type::Bool),
        TypeExpr::Fs => None,
        TypeExpr::Arrow(a, r) => {
            let r = lower_type(r)?;
            Some(match **a {
                TypeExpr::Fs => Type::fs_arrow(r),
                _ => Type::arrow(lower_type(a)?, r),
            })
        }
    }
}

impl Grammar {
    /// Loads a grammar from source text.
    pub fn parse(src: &str) -> Result<Grammar, GrammarError> {
        let stmts = syntax::parse_statements(src)?;
        let mut g = Grammar::default();
        let mut macros: HashMap<String, Macro> = HashMap::new();
        let mut decl_pos: HashMap<String, Pos> = HashMap::new();

        for stmt in &stmts {
            match stmt {
                Statement::BaseCategories { decls } => {
                    for (d, pos) in decls {
                        let name = match d {
                            Declaration::Type(n, _) | Declaration::Alias(n, _) => n,
                        };
                        if decl_pos.insert(name.clone(), *pos).is_some() {
                            return Err(GrammarError::Duplicate {
                                name: name.clone(),
                                pos: *pos,
                            });
                        }
                        match d {
                            Declaration::Type(n, t) => {
                                let ty =
                                    lower_type(t).ok_or_else(|| GrammarError::BareFsCategory {
                                        name: n.clone(),
                                        pos: *pos,
                                    })?;
                                g.base_types.insert(n.clone(), ty);
                            }
                            Declaration::Alias(n, c) => {
                                g.aliases.insert(n.clone(), c.clone());
                            }
                        }
                        g.declarations.push(d.clone());
                    }
                }
                Statement::Let {
                    name,
                    params,
                    body,
                    pos,
                } => {
                    let m = Macro {
                        name: name.clone(),
                        params: params.clone(),
                        body: body.clone(),
                        pos: *pos,
                    };
                    if macros.insert(name.clone(), m.clone()).is_some() {
                        return Err(GrammarError::Duplicate {
                            name: name.clone(),
                            pos: *pos,
                        });
                    }
                    g.macros.push(m);
                }
                _ => {}
            }
        }

        for (name, pos) in &decl_pos {
            if g.aliases.contains_key(name) {
                g.expand_at(&Category::base(name.clone()), *pos)?;
            }
        }

        let mut expander = Expander::new(&macros);
        for stmt in &stmts {
            match stmt {
                Statement::Transformation { from, to, sem, pos } => {
                    let what = format!("transformation {from} = {to}");
                    let required = Type::arrow(g.upsilon_at(from, *pos)?, g.upsilon_at(to, *pos)?);
                    let sem = expander.expand(sem, &mut Vec::new())?;
                    let (_, term) = elaborate_entry(&what, &sem, to, &required, *pos)?;
                    g.transformations.push(Transformation {
                        id: g.transformations.len(),
                        from: from.clone(),
                        to: to.clone(),
                        sem: term,
                        pos: *pos,
                    });
                }
                Statement::Lex {
                    word,
                    cat,
                    sem,
                    pos,
                } => {
                    let what = format!("entry `{word}`");
                    let required = g.upsilon_at(cat, *pos)?;
                    let sem = expander.expand(sem, &mut Vec::new())?;
                    let (ty, term) = elaborate_entry(&what, &sem, cat, &required, *pos)?;
                    g.lexicon.push(LexEntry {
                        id: g.lexicon.len(),
                        word: word.clone(),
                        cat: cat.clone(),
                        sem: term,
                        ty,
                        pos: *pos,
                    });
                }
                _ => {}
            }
        }
        if g.lexicon.is_empty() {
            g.warnings.push("no lexicon".to_string());
        }
        Ok(g)
    }

    /// Replaces aliases by their definitions, recursively.
    pub fn expand(&self, c: &Category) -> Result<Category, GrammarError> {
        self.expand_at(c, Pos::default())
    }

    fn expand_at(&self, c: &Category, pos: Pos) -> Result<Category, GrammarError> {
        fn go(
            g: &Grammar,
            c: &Category,
            pos: Pos,
            stack: &mut Vec<String>,
        ) -> Result<Category, GrammarError> {
            match c {
                Category::Base { name } => {
                    if g.base_types.contains_key(name) {
                        return Ok(c.clone());
                    }
                    let Some(def) = g.aliases.get(name) else {
                        return Err(GrammarError::UndeclaredCategory {
                            name: name.clone(),
                            pos,
                        });
                    };
                    if stack.contains(name) {
                        return Err(GrammarError::AliasCycle {
                            name: name.clone(),
                            pos,
                        });
                    }
                    stack.push(name.clone());
                    let out = go(g, def, pos, stack);
                    stack.pop();
                    out
                }
                Category::Slash { result, arg } => Ok(Category::slash(
                    go(g, result, pos, stack)?,
                    go(g, arg, pos, stack)?,
                )),
                Category::Backslash { arg, result } => Ok(Category::backslash(
                    go(g, arg, pos, stack)?,
                    go(g, result, pos, stack)?,
                )),
            }
        }
        go(self, c, pos, &mut Vec::new())
    }

    /// The description type of a category: declared for base categories,
    /// `Υ(B) -> Υ(A)` for both `A/B` and `B\A`.
    pub fn upsilon(&self, c: &Category) -> Result<Type, GrammarError> {
        self.upsilon_at(c, Pos::default())
    }

    fn upsilon_at(&self, c: &Category, pos: Pos) -> Result<Type, GrammarError> {
        Ok(match self.expand_at(c, pos)? {
            Category::Base { name } => self.base_types[&name].clone(),
            Category::Slash { result, arg } | Category::Backslash { arg, result } => {
                Type::arrow(self.upsilon_at(&arg, pos)?, self.upsilon_at(&result, pos)?)
            }
        })
    }

    pub fn entries_for<'a>(&'a self, word: &'a str) -> impl Iterator<Item = &'a LexEntry> + 'a {
        self.lexicon.iter().filter(move |e| e.word == word)
    }

    pub fn has_word(&self, word: &str) -> bool {
        self.entries_for(word).next().is_some()
    }

    /// Applies a unary rule to a constituent of category `cat`. `None` when
    /// the rule's source category does not match.
    pub fn apply_transformation(
        &self,
        rule: &Transformation,
        cat: &Category,
        sem: &Term,
    ) -> Result<Option<(Category, Term)>, TermError> {
        let same = match (self.expand(cat), self.expand(&rule.from)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        };
        if !same {
            return Ok(None);
        }
        let raised = beta_normalize(&Term::apply(rule.sem.clone(), sem.clone()))?;
        Ok(Some((rule.to.clone(), raised)))
    }
}

fn elaborate_entry(
    what: &str,
    sem: &Expr,
    cat: &Category,
    required: &Type,
    pos: Pos,
) -> Result<(Type, Term), GrammarError> {
    let type_err = |source| GrammarError::Type {
        what: what.to_string(),
        pos,
        source,
    };
    let mut inf = infer_type(sem).map_err(type_err)?;
    let found = inf.ty().map_err(type_err)?;
    check_entry(&found, required).map_err(|e| match e {
        TypeError::Mismatch { .. } => GrammarError::EntryType {
            what: what.to_string(),
            cat: cat.clone(),
            inferred: found.clone(),
            required: required.clone(),
            pos,
        },
        other => type_err(other),
    })?;
    inf.constrain(required).map_err(type_err)?;
    let (ty, term) = inf.finish().map_err(type_err)?;
    let normal = beta_normalize(&term).map_err(|source| GrammarError::Normalize {
        what: what.to_string(),
        pos,
        source,
    })?;
    Ok((ty, canonical_names(&normal)))
}

/// Parses and elaborates a grammar file's contents.
pub fn parse_grammar(src: &str) -> Result<Grammar, GrammarError> {
    Grammar::parse(src)
}

/// Free function form of [`Grammar::upsilon`].
pub fn upsilon(g: &Grammar, c: &Category) -> Result<Type, GrammarError> {
    g.upsilon(c)
}

/// Prints the grammar in its own file format, with lexical semantics in
/// expanded normal form. Parsing the output gives back an equal grammar.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.declarations.is_empty() {
            writeln!(f, "Base_Categories")?;
            for (i, d) in self.declarations.iter().enumerate() {
                let sep = if i + 1 == self.declarations.len() {
                    ";"
                } else {
                    ","
                };
                match d {
                    Declaration::Type(n, t) => writeln!(f, "    {n} = {t}{sep}")?,
                    Declaration::Alias(n, c) => writeln!(f, "    {n} = {c}{sep}")?,
                }
            }
        }
        for t in &self.transformations {
            writeln!(f, "transformation {} = {} : {};", t.from, t.to, t.sem)?;
        }
        for m in &self.macros {
            if m.params.is_empty() {
                writeln!(f, "let {} = {};", m.name, m.body)?;
            } else {
                writeln!(f, "let {}({}) = {};", m.name, m.params.join(", "), m.body)?;
            }
        }
        for e in &self.lexicon {
            writeln!(f, "lex {}, {}, {};", e.word, e.cat, e.sem)?;
        }
        Ok(())
    }
}
