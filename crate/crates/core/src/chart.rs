//! Bottom-up chart parsing.
//!
//! The chart is built over categories alone: lexical edges, one optional
//! unary step per edge, and the two application rules. Semantics is rebuilt
//! from each edge's derivation reference afterwards and handed to the
//! solver; with interleaving on, every binary edge is solved as it is built
//! and dropped if its description is unsatisfiable.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::grammar::{Category, Grammar, GrammarError};
use crate::solver::{satisfiable_with, SolveOptions, SolvedForm, SolverError, SolverState};
use crate::terms::{alpha_eq, beta_normalize, canonical_names, Term, TermError};

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("nothing to parse")]
    EmptyInput,
    #[error("unknown word(s): {}", .0.join(", "))]
    UnknownWords(Vec<String>),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Application rule: `A/B B => A` or `B B\A => A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    #[serde(rename = "app/")]
    Forward,
    #[serde(rename = "app\\")]
    Backward,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Forward => "app/",
            Rule::Backward => "app\\",
        })
    }
}

/// How an edge was built.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sref {
    Lex {
        entry: usize,
    },
    Binary {
        left: usize,
        right: usize,
        rule: Rule,
    },
    Unary {
        source: usize,
        transformation: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub id: usize,
    pub begin: usize,
    pub end: usize,
    /// category as written in the lexicon or rule that produced it
    pub cat: Category,
    /// `cat` with aliases expanded; matching uses this form
    pub expanded: Category,
    pub sref: Sref,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// solve binary edges while building the chart
    pub interleave: bool,
    pub solver: SolveOptions,
}

#[derive(Debug)]
pub struct Chart {
    pub tokens: Vec<String>,
    pub edges: Vec<Edge>,
    by_span: HashMap<(usize, usize), Vec<usize>>,
    keys: HashSet<(usize, usize, Category, Sref)>,
    sems: Vec<Option<Term>>,
    /// binary edges rejected by the interleaved check
    pub pruned: usize,
}

/// Derivation tree of an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub edge: usize,
    pub cat: Category,
    pub word: Option<String>,
    pub children: Vec<Derivation>,
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.cat)?;
        if let Some(w) = &self.word {
            write!(f, " {w}")?;
        }
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug)]
pub struct Reading {
    pub edge: usize,
    pub derivation: Derivation,
    /// β-normal semantics with canonical binder names
    pub term: Term,
    pub state: SolverState,
    /// other edges whose semantics coincided with this one
    pub duplicates: Vec<usize>,
}

impl Reading {
    /// The solved form; readings are only returned when it exists.
    pub fn model(&self) -> &SolvedForm {
        self.state.model.as_ref().expect("readings are satisfiable")
    }
}

/// Applies a functor to an argument when their categories fit `rule`.
/// `f` is the functor, `b` the argument, each with its semantics; with
/// `gate` set the result must also be satisfiable.
pub fn combine(
    g: &Grammar,
    f: (&Category, &Term),
    b: (&Category, &Term),
    rule: Rule,
    gate: Option<SolveOptions>,
) -> Result<Option<(Category, Term)>, ChartError> {
    let Some(result) = apply_category(&g.expand(f.0)?, &g.expand(b.0)?, rule) else {
        return Ok(None);
    };
    let sem = canonical_names(&beta_normalize(&Term::apply(f.1.clone(), b.1.clone()))?);
    if let Some(opts) = gate {
        if !satisfiable_with(&sem, opts)?.0 {
            return Ok(None);
        }
    }
    Ok(Some((result, sem)))
}

/// Result category as written in the functor, unfolding aliases only as far
/// as needed to reach a slash: `det = np/n` applied forward gives `np`.
fn written_result(g: &Grammar, functor: &Category, rule: Rule) -> Option<Category> {
    let mut c = functor;
    for _ in 0..=g.aliases.len() {
        match (c, rule) {
            (Category::Slash { result, .. }, Rule::Forward)
            | (Category::Backslash { result, .. }, Rule::Backward) => {
                return Some((**result).clone())
            }
            (Category::Base { name }, _) => c = g.aliases.get(name)?,
            _ => return None,
        }
    }
    None
}

fn apply_category(functor: &Category, arg: &Category, rule: Rule) -> Option<Category> {
    match (functor, rule) {
        (Category::Slash { result, arg: want }, Rule::Forward) if **want == *arg => {
            Some((**result).clone())
        }
        (Category::Backslash { arg: want, result }, Rule::Backward) if **want == *arg => {
            Some((**result).clone())
        }
        _ => None,
    }
}

impl Chart {
    fn new(tokens: Vec<String>) -> Self {
        Chart {
            tokens,
            edges: Vec::new(),
            by_span: HashMap::new(),
            keys: HashSet::new(),
            sems: Vec::new(),
            pruned: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges covering exactly `begin..end`, in creation order.
    pub fn span(&self, begin: usize, end: usize) -> impl Iterator<Item = &Edge> {
        self.by_span
            .get(&(begin, end))
            .into_iter()
            .flatten()
            .map(|&i| &self.edges[i])
    }

    fn add(
        &mut self,
        begin: usize,
        end: usize,
        cat: Category,
        expanded: Category,
        sref: Sref,
        sem: Option<Term>,
    ) -> Option<usize> {
        if !self
            .keys
            .insert((begin, end, expanded.clone(), sref.clone()))
        {
            return None;
        }
        let id = self.edges.len();
        self.edges.push(Edge {
            id,
            begin,
            end,
            cat,
            expanded,
            sref,
        });
        self.sems.push(sem);
        self.by_span.entry((begin, end)).or_default().push(id);
        Some(id)
    }

    /// Builds the chart for `tokens`.
    pub fn parse(g: &Grammar, tokens: &[String], opts: &ParseOptions) -> Result<Chart, ChartError> {
        if tokens.is_empty() {
            return Err(ChartError::EmptyInput);
        }
        let unknown: Vec<String> = tokens.iter().filter(|t| !g.has_word(t)).cloned().collect();
        if !unknown.is_empty() {
            return Err(ChartError::UnknownWords(unknown));
        }
        let mut chart = Chart::new(tokens.to_vec());
        let n = tokens.len();
        for (i, tok) in tokens.iter().enumerate() {
            for entry in g.entries_for(tok) {
                let sem = opts.interleave.then(|| entry.sem.clone());
                if let Some(id) = chart.add(
                    i,
                    i + 1,
                    entry.cat.clone(),
                    g.expand(&entry.cat)?,
                    Sref::Lex { entry: entry.id },
                    sem,
                ) {
                    chart.raise(g, id, opts)?;
                }
            }
        }
        for width in 2..=n {
            for begin in 0..=n - width {
                let end = begin + width;
                for mid in begin + 1..end {
                    let lefts: Vec<usize> = chart.span(begin, mid).map(|e| e.id).collect();
                    let rights: Vec<usize> = chart.span(mid, end).map(|e| e.id).collect();
                    for &l in &lefts {
                        for &r in &rights {
                            chart.binary(g, l, r, Rule::Forward, opts)?;
                            chart.binary(g, l, r, Rule::Backward, opts)?;
                        }
                    }
                }
            }
        }
        Ok(chart)
    }

    fn binary(
        &mut self,
        g: &Grammar,
        l: usize,
        r: usize,
        rule: Rule,
        opts: &ParseOptions,
    ) -> Result<(), ChartError> {
        let (f, b) = match rule {
            Rule::Forward => (l, r),
            Rule::Backward => (r, l),
        };
        let Some(result) = apply_category(&self.edges[f].expanded, &self.edges[b].expanded, rule)
        else {
            return Ok(());
        };
        let sem = if opts.interleave {
            let (fs, bs) = (self.sem_of(g, f)?, self.sem_of(g, b)?);
            let fc = self.edges[f].expanded.clone();
            let bc = self.edges[b].expanded.clone();
            match combine(g, (&fc, &fs), (&bc, &bs), rule, Some(opts.solver))? {
                Some((_, sem)) => Some(sem),
                None => {
                    self.pruned += 1;
                    return Ok(());
                }
            }
        } else {
            None
        };
        let (begin, end) = (self.edges[l].begin, self.edges[r].end);
        let sref = Sref::Binary {
            left: l,
            right: r,
            rule,
        };
        let written = written_result(g, &self.edges[f].cat, rule).unwrap_or_else(|| result.clone());
        if let Some(id) = self.add(begin, end, written, result, sref, sem) {
            self.raise(g, id, opts)?;
        }
        Ok(())
    }

    /// Applies each matching transformation once. Edges built by a
    /// transformation are not raised again, which keeps the chart finite.
    fn raise(&mut self, g: &Grammar, id: usize, opts: &ParseOptions) -> Result<(), ChartError> {
        for rule in &g.transformations {
            if g.expand(&rule.from)? != self.edges[id].expanded {
                continue;
            }
            let sem = if opts.interleave {
                let src = self.sem_of(g, id)?;
                g.apply_transformation(rule, &self.edges[id].cat, &src)?
                    .map(|(_, t)| canonical_names(&t))
            } else {
                None
            };
            let (begin, end) = (self.edges[id].begin, self.edges[id].end);
            let sref = Sref::Unary {
                source: id,
                transformation: rule.id,
            };
            self.add(begin, end, rule.to.clone(), g.expand(&rule.to)?, sref, sem);
        }
        Ok(())
    }

    fn sem_of(&mut self, g: &Grammar, id: usize) -> Result<Term, ChartError> {
        if let Some(t) = &self.sems[id] {
            return Ok(t.clone());
        }
        let t = match self.edges[id].sref.clone() {
            Sref::Lex { entry } => g.lexicon[entry].sem.clone(),
            Sref::Binary { left, right, rule } => {
                let (f, b) = match rule {
                    Rule::Forward => (left, right),
                    Rule::Backward => (right, left),
                };
                let (fs, bs) = (self.sem_of(g, f)?, self.sem_of(g, b)?);
                canonical_names(&beta_normalize(&Term::apply(fs, bs))?)
            }
            Sref::Unary {
                source,
                transformation,
            } => {
                let src = self.sem_of(g, source)?;
                let rule = &g.transformations[transformation];
                let raised = beta_normalize(&Term::apply(rule.sem.clone(), src))?;
                canonical_names(&raised)
            }
        };
        self.sems[id] = Some(t.clone());
        Ok(t)
    }

    /// Semantics of an edge, rebuilt from its derivation and β-normalized.
    pub fn semantics(&mut self, g: &Grammar, id: usize) -> Result<Term, ChartError> {
        self.sem_of(g, id)
    }

    pub fn derivation(&self, g: &Grammar, id: usize) -> Derivation {
        let e = &self.edges[id];
        let (word, children) = match &e.sref {
            Sref::Lex { entry } => (Some(g.lexicon[*entry].word.clone()), Vec::new()),
            Sref::Binary { left, right, .. } => (
                None,
                vec![self.derivation(g, *left), self.derivation(g, *right)],
            ),
            Sref::Unary { source, .. } => (None, vec![self.derivation(g, *source)]),
        };
        Derivation {
            edge: id,
            cat: e.cat.clone(),
            word,
            children,
        }
    }

    /// Satisfiable readings of category `target` spanning the whole input,
    /// one per distinct semantics, in edge order.
    pub fn readings(
        &mut self,
        g: &Grammar,
        target: &Category,
        opts: &ParseOptions,
    ) -> Result<Vec<Reading>, ChartError> {
        let target = g.expand(target)?;
        let n = self.tokens.len();
        let roots: Vec<usize> = self
            .span(0, n)
            .filter(|e| e.expanded == target)
            .map(|e| e.id)
            .collect();
        let mut out: Vec<Reading> = Vec::new();
        for id in roots {
            let term = self.sem_of(g, id)?;
            if let Some(r) = out.iter_mut().find(|r| alpha_eq(&r.term, &term)) {
                r.duplicates.push(id);
                continue;
            }
            let (sat, state) = satisfiable_with(&term, opts.solver)?;
            if !sat {
                continue;
            }
            out.push(Reading {
                edge: id,
                derivation: self.derivation(g, id),
                term,
                state,
                duplicates: Vec::new(),
            });
        }
        Ok(out)
    }

    /// Graphviz rendering: one node per edge, arrows to daughters, dashed
    /// for unary steps.
    pub fn to_dot(&self, g: &Grammar) -> String {
        let mut out = String::from("digraph forest {\n  node [shape=box, fontname=monospace];\n");
        for e in &self.edges {
            let mut label = format!("{} [{},{}]", e.cat, e.begin, e.end);
            if let Sref::Lex { entry } = e.sref {
                let _ = write!(label, "\\n{}", g.lexicon[entry].word);
            }
            let _ = writeln!(
                out,
                "  e{} [label=\"{}\"];",
                e.id,
                label.replace('"', "\\\"")
            );
        }
        for e in &self.edges {
            match e.sref {
                Sref::Lex { .. } => {}
                Sref::Binary { left, right, rule } => {
                    let _ = writeln!(out, "  e{} -> e{} [label=\"{rule}\"];", e.id, left);
                    let _ = writeln!(out, "  e{} -> e{};", e.id, right);
                }
                Sref::Unary { source, .. } => {
                    let _ = writeln!(out, "  e{} -> e{} [style=dashed];", e.id, source);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// JSON edge list: `{id, begin, end, cat, sref}` per edge.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Arc<'a> {
            id: usize,
            begin: usize,
            end: usize,
            cat: String,
            sref: &'a Sref,
        }
        let arcs: Vec<Arc> = self
            .edges
            .iter()
            .map(|e| Arc {
                id: e.id,
                begin: e.begin,
                end: e.end,
                cat: e.cat.to_string(),
                sref: &e.sref,
            })
            .collect();
        serde_json::json!({ "tokens": self.tokens, "edges": arcs })
    }

    /// Number of edges per span, for summaries.
    pub fn span_counts(&self) -> BTreeMap<(usize, usize), usize> {
        self.by_span.iter().map(|(k, v)| (*k, v.len())).collect()
    }
}

/// Parses with default options.
pub fn parse_sentence(g: &Grammar, tokens: &[String]) -> Result<Chart, ChartError> {
    Chart::parse(g, tokens, &ParseOptions::default())
}

/// Splits on whitespace and lowercases.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().map(str::to_lowercase).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::grammar::parse_category;

    fn sample() -> Grammar {
        Grammar::parse(corpus::SAMPLE).unwrap()
    }

    fn s() -> Category {
        Category::base("s")
    }

    #[test]
    fn two_word_sentence() {
        let g = sample();
        let chart = parse_sentence(&g, &tokenize("John died")).unwrap();
        assert!(chart.span(0, 2).any(|e| e.expanded == s()));
        let died_first = parse_sentence(&g, &tokenize("died john")).unwrap();
        assert!(!died_first.span(0, 2).any(|e| e.expanded == s()));
    }

    #[test]
    fn verb_phrase_edge() {
        let g = sample();
        let chart = parse_sentence(&g, &tokenize("john read a book")).unwrap();
        let iv = g.expand(&Category::base("iv")).unwrap();
        let vp: Vec<&Edge> = chart.span(1, 4).filter(|e| e.expanded == iv).collect();
        assert!(!vp.is_empty());
        // built from tv = iv/(s/iv) and the np
        assert!(vp.iter().any(|e| matches!(
            e.sref,
            Sref::Binary {
                rule: Rule::Forward,
                ..
            }
        )));
    }

    #[test]
    fn category_mismatch() {
        let g = sample();
        let np = parse_category("np").unwrap();
        let n = parse_category("n").unwrap();
        let t = Term::truth(true);
        assert!(combine(&g, (&np, &t), (&n, &t), Rule::Forward, None)
            .unwrap()
            .is_none());
    }

    #[test]
    fn unknown_and_empty() {
        let g = sample();
        match parse_sentence(&g, &tokenize("john sleeps soundly")) {
            Err(ChartError::UnknownWords(w)) => assert_eq!(w, ["sleeps", "soundly"]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_sentence(&g, &[]),
            Err(ChartError::EmptyInput)
        ));
    }

    #[test]
    fn srefs_are_consistent() {
        let g = sample();
        let chart = parse_sentence(&g, &tokenize("every man loves mary")).unwrap();
        for e in &chart.edges {
            assert!(e.begin < e.end && e.end <= chart.tokens.len());
            if let Sref::Binary { left, right, .. } = e.sref {
                let (l, r) = (&chart.edges[left], &chart.edges[right]);
                assert_eq!((l.begin, l.end, r.end), (e.begin, r.begin, e.end));
            }
            if let Sref::Unary { source, .. } = e.sref {
                assert!(!matches!(chart.edges[source].sref, Sref::Unary { .. }));
            }
        }
    }

    #[test]
    fn readings_and_duplicates() {
        let g = sample();
        let opts = ParseOptions::default();
        let mut chart = Chart::parse(&g, &tokenize("mary died"), &opts).unwrap();
        let rs = chart.readings(&g, &s(), &opts).unwrap();
        assert_eq!(rs.len(), 1);
        let m = rs[0].model();
        assert!(m.to_string().contains("x_1.pred.reln=die"), "{m}");
    }

    #[test]
    fn dot_and_json() {
        let g = sample();
        let chart = parse_sentence(&g, &tokenize("john died")).unwrap();
        let dot = chart.to_dot(&g);
        assert!(dot.starts_with("digraph forest {"));
        assert!(dot.contains("s [0,2]"));
        let json = chart.to_json();
        assert_eq!(json["edges"].as_array().unwrap().len(), chart.len());
        assert_eq!(json["edges"][0]["sref"]["kind"], "lex");
    }
}
