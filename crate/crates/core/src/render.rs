//! Attribute-value matrix rendering of solved forms.
//!
//! Each user variable is drawn as nested `[feature value]` blocks. A node
//! reached more than once gets a tag `#n` at its first occurrence and is
//! shown by the tag alone afterwards. The footer lists the solved form's
//! constraints one per line; feeding it to [`SolvedForm::from_text`] gives
//! back an equivalent solved form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::solver::SolvedForm;
use crate::terms::FsRef;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderedAvm {
    /// variable name and its block, in order of first use
    pub blocks: Vec<(String, Vec<String>)>,
    pub footer: Vec<String>,
}

impl fmt::Display for RenderedAvm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (var, lines) in &self.blocks {
            let pad = " ".repeat(var.len() + 3);
            for (i, l) in lines.iter().enumerate() {
                if i == 0 {
                    writeln!(f, "{var} = {l}")?;
                } else {
                    writeln!(f, "{pad}{l}")?;
                }
            }
        }
        writeln!(f, "--")?;
        for l in &self.footer {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

impl RenderedAvm {
    pub fn bindings(&self) -> BTreeMap<String, String> {
        self.blocks
            .iter()
            .map(|(v, ls)| (v.clone(), ls.join("\n")))
            .collect()
    }
}

struct Painter<'a> {
    m: &'a SolvedForm,
    refs: HashMap<FsRef, usize>,
    tags: HashMap<FsRef, usize>,
    shown: Vec<FsRef>,
}

impl Painter<'_> {
    fn count(&mut self, node: &FsRef) {
        let n = self.refs.entry(node.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            return;
        }
        for (_, v) in self.m.arcs(node) {
            self.count(&v);
        }
    }

    fn paint(&mut self, node: &FsRef) -> Vec<String> {
        if let FsRef::Atom { name } = node {
            return vec![name.clone()];
        }
        let shared = self.refs.get(node).copied().unwrap_or(0) > 1;
        if shared {
            if self.shown.contains(node) {
                return vec![format!("#{}", self.tags[node])];
            }
            let next = self.tags.len() + 1;
            self.tags.insert(node.clone(), next);
        }
        self.shown.push(node.clone());
        let arcs = self.m.arcs(node);
        let mut body = if arcs.is_empty() {
            vec!["[]".to_string()]
        } else {
            let width = arcs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let mut lines = Vec::new();
            for (i, (k, v)) in arcs.iter().enumerate() {
                let open = if i == 0 { "[" } else { " " };
                let sub = self.paint(v);
                for (j, s) in sub.iter().enumerate() {
                    if j == 0 {
                        lines.push(format!("{open}{k:<width$} {s}"));
                    } else {
                        lines.push(format!("{} {s}", " ".repeat(width + 1)));
                    }
                }
            }
            if let Some(last) = lines.last_mut() {
                last.push(']');
            }
            lines
        };
        if shared {
            let tag = format!("#{} ", self.tags[node]);
            let pad = " ".repeat(tag.len());
            for (i, l) in body.iter_mut().enumerate() {
                l.insert_str(0, if i == 0 { &tag } else { &pad });
            }
        }
        body
    }
}

pub fn render_avm(m: &SolvedForm) -> RenderedAvm {
    let mut p = Painter {
        m,
        refs: HashMap::new(),
        tags: HashMap::new(),
        shown: Vec::new(),
    };
    let roots: Vec<(String, FsRef)> = m
        .variables()
        .iter()
        .map(|v| (v.clone(), m.find(&FsRef::var(v.clone()))))
        .collect();
    for (_, r) in &roots {
        p.count(r);
    }
    // a variable drawn inside an earlier block is skipped unless tagged
    let mut blocks = Vec::new();
    for (i, (v, r)) in roots.iter().enumerate() {
        if i > 0 && p.shown.contains(r) && p.refs.get(r).copied().unwrap_or(0) <= 1 {
            continue;
        }
        blocks.push((v.clone(), p.paint(r)));
    }
    RenderedAvm {
        blocks,
        footer: m.constraints().iter().map(|c| c.to_string()).collect(),
    }
}
