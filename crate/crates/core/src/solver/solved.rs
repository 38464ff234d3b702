//! Solved forms: conjunctions of `x = s` and `x.f = s` that are functional
//! and where eliminated variables occur exactly once.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::terms::{FsRef, PathRef};

/// The conjunction became unsatisfiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bottom;

/// A positive equation between two path references. Inside a solved form
/// only `x = s` and `x.f = s` occur; paths are decomposed on entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicConstraint {
    pub lhs: PathRef,
    pub rhs: PathRef,
}

impl AtomicConstraint {
    pub fn new(lhs: PathRef, rhs: PathRef) -> Self {
        AtomicConstraint { lhs, rhs }
    }

    /// `x = t`
    pub fn var_eq(var: &str, value: FsRef) -> Self {
        Self::new(PathRef::var(var), PathRef::new(value, vec![]))
    }

    /// `x.f = t`
    pub fn feat_eq(var: &str, feature: &str, value: FsRef) -> Self {
        Self::new(
            PathRef::new(FsRef::var(var), vec![feature.to_string()]),
            PathRef::new(value, vec![]),
        )
    }
}

impl fmt::Display for AtomicConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.lhs, self.rhs)
    }
}

/// Outcome of checking a negative equation against a solved form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeStatus {
    /// the solved form entails the equation
    Violated,
    /// the solved form entails its negation
    Consistent,
    Undetermined,
}

/// Where a path leads in a solved form.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Resolved {
    Node(FsRef),
    /// some feature along the path is not constrained yet
    Missing,
    /// the path runs through an atom, so it denotes nothing
    Blocked,
}

const INTERNAL: char = '#';

fn is_internal(name: &str) -> bool {
    name.starts_with(INTERNAL)
}

#[derive(Debug, Clone, Default)]
pub struct SolvedForm {
    /// eliminated variable -> representative (never itself eliminated)
    bindings: BTreeMap<String, FsRef>,
    /// representative variable -> feature -> value
    features: BTreeMap<String, BTreeMap<String, FsRef>>,
    /// user variables in order of first use
    order: Vec<String>,
    next: u32,
}

impl SolvedForm {
    pub fn new() -> Self {
        Self::default()
    }

    /// User variables mentioned so far, in order of first use.
    pub fn variables(&self) -> &[String] {
        &self.order
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.keys().all(|k| is_internal(k)) && self.features.values().all(|m| m.is_empty())
    }

    fn note(&mut self, r: &PathRef) {
        if let FsRef::Var { name } = &r.base {
            if !is_internal(name) && !self.order.contains(name) {
                self.order.push(name.clone());
            }
        }
    }

    /// Canonical representative.
    pub fn find(&self, r: &FsRef) -> FsRef {
        match r {
            FsRef::Var { name } => self
                .bindings
                .get(name)
                .cloned()
                .unwrap_or_else(|| r.clone()),
            FsRef::Atom { .. } => r.clone(),
        }
    }

    fn feature_of(&self, node: &str, f: &str) -> Option<FsRef> {
        self.features
            .get(node)
            .and_then(|m| m.get(f))
            .map(|v| self.find(v))
    }

    /// Feature arcs leaving the node of `r`, by feature name, with targets
    /// already resolved to representatives.
    pub fn arcs(&self, r: &FsRef) -> Vec<(String, FsRef)> {
        match self.find(r) {
            FsRef::Var { name } => self
                .features
                .get(&name)
                .map(|m| m.iter().map(|(f, v)| (f.clone(), self.find(v))).collect())
                .unwrap_or_default(),
            FsRef::Atom { .. } => Vec::new(),
        }
    }

    fn has_features(&self, node: &str) -> bool {
        self.features.get(node).is_some_and(|m| !m.is_empty())
    }

    fn fresh_internal(&mut self) -> String {
        self.next += 1;
        format!("{INTERNAL}{}", self.next)
    }

    fn resolve(&self, r: &PathRef) -> Resolved {
        let mut cur = self.find(&r.base);
        for f in &r.path {
            match &cur {
                FsRef::Atom { .. } => return Resolved::Blocked,
                FsRef::Var { name } => match self.feature_of(name, f) {
                    Some(next) => cur = next,
                    None => return Resolved::Missing,
                },
            }
        }
        Resolved::Node(cur)
    }

    fn walk_create(&mut self, r: &PathRef) -> Result<FsRef, Bottom> {
        let mut cur = self.find(&r.base);
        for f in &r.path {
            let name = match &cur {
                FsRef::Atom { .. } => return Err(Bottom),
                FsRef::Var { name } => name.clone(),
            };
            cur = match self.feature_of(&name, f) {
                Some(next) => next,
                None => {
                    let node = FsRef::var(self.fresh_internal());
                    self.features
                        .entry(name)
                        .or_default()
                        .insert(f.clone(), node.clone());
                    node
                }
            };
        }
        Ok(cur)
    }

    /// Which of two representatives survives a merge: user variables beat
    /// internal nodes, earlier variables beat later ones.
    fn survivor<'a>(&self, x: &'a str, y: &'a str) -> (&'a str, &'a str) {
        let rank = |v: &str| -> (bool, usize, u32) {
            if is_internal(v) {
                (true, 0, v[1..].parse().unwrap_or(u32::MAX))
            } else {
                (
                    false,
                    self.order.iter().position(|o| o == v).unwrap_or(usize::MAX),
                    0,
                )
            }
        };
        if rank(x) <= rank(y) {
            (x, y)
        } else {
            (y, x)
        }
    }

    fn eliminate(&mut self, x: &str, target: FsRef) {
        let old = FsRef::var(x);
        for v in self.bindings.values_mut() {
            if *v == old {
                *v = target.clone();
            }
        }
        for m in self.features.values_mut() {
            for v in m.values_mut() {
                if *v == old {
                    *v = target.clone();
                }
            }
        }
        self.bindings.insert(x.to_string(), target);
    }

    fn unify(&mut self, a: FsRef, b: FsRef) -> Result<(), Bottom> {
        let mut work = vec![(a, b)];
        while let Some((a, b)) = work.pop() {
            let (a, b) = (self.find(&a), self.find(&b));
            if a == b {
                continue;
            }
            match (&a, &b) {
                (FsRef::Atom { .. }, FsRef::Atom { .. }) => return Err(Bottom),
                (FsRef::Var { name }, FsRef::Atom { .. })
                | (FsRef::Atom { .. }, FsRef::Var { name }) => {
                    if self.has_features(name) {
                        return Err(Bottom);
                    }
                    let atom = if a.is_atom() { a.clone() } else { b.clone() };
                    self.features.remove(name);
                    self.eliminate(name, atom);
                }
                (FsRef::Var { name: x }, FsRef::Var { name: y }) => {
                    let (keep, drop) = self.survivor(x, y);
                    let (keep, drop) = (keep.to_string(), drop.to_string());
                    let moved = self.features.remove(&drop).unwrap_or_default();
                    self.eliminate(&drop, FsRef::var(keep.clone()));
                    for (f, v) in moved {
                        let v = self.find(&v);
                        match self.feature_of(&keep, &f) {
                            Some(w) => work.push((v, w)),
                            None => {
                                self.features.entry(keep.clone()).or_default().insert(f, v);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds `lhs = rhs`, decomposing paths into single-feature steps.
    pub fn assert_eq(&mut self, lhs: &PathRef, rhs: &PathRef) -> Result<(), Bottom> {
        self.note(lhs);
        self.note(rhs);
        let l = self.walk_create(lhs)?;
        let r = self.walk_create(rhs)?;
        self.unify(l, r)
    }

    /// True when every model of the solved form satisfies `lhs = rhs`.
    pub fn entails(&self, lhs: &PathRef, rhs: &PathRef) -> bool {
        match (self.resolve(lhs), self.resolve(rhs)) {
            (Resolved::Node(a), Resolved::Node(b)) => a == b,
            _ => false,
        }
    }

    pub fn check_negative(&self, lhs: &PathRef, rhs: &PathRef) -> NegativeStatus {
        match (self.resolve(lhs), self.resolve(rhs)) {
            (Resolved::Blocked, _) | (_, Resolved::Blocked) => NegativeStatus::Consistent,
            (Resolved::Node(a), Resolved::Node(b)) => {
                if a == b {
                    return NegativeStatus::Violated;
                }
                match (&a, &b) {
                    (FsRef::Atom { .. }, FsRef::Atom { .. }) => NegativeStatus::Consistent,
                    (FsRef::Var { name }, FsRef::Atom { .. })
                    | (FsRef::Atom { .. }, FsRef::Var { name })
                        if self.has_features(name) =>
                    {
                        NegativeStatus::Consistent
                    }
                    _ => NegativeStatus::Undetermined,
                }
            }
            _ => NegativeStatus::Undetermined,
        }
    }

    /// Representatives reachable from the references through feature
    /// constraints, the references' own nodes included.
    pub(crate) fn closure(&self, refs: impl IntoIterator<Item = FsRef>) -> Vec<String> {
        let mut seen: Vec<String> = Vec::new();
        let mut stack: Vec<String> = refs
            .into_iter()
            .filter_map(|r| self.find(&r).as_var().map(str::to_string))
            .collect();
        while let Some(x) = stack.pop() {
            if seen.contains(&x) {
                continue;
            }
            if let Some(m) = self.features.get(&x) {
                for v in m.values() {
                    if let FsRef::Var { name } = self.find(v) {
                        stack.push(name);
                    }
                }
            }
            seen.push(x);
        }
        seen
    }

    /// Length of the longest feature path below `var`; `None` if the graph
    /// below it has a cycle.
    pub fn depth_from(&self, var: &str) -> Option<usize> {
        fn go(sf: &SolvedForm, x: &str, stack: &mut Vec<String>) -> Option<usize> {
            if stack.iter().any(|s| s == x) {
                return None;
            }
            stack.push(x.to_string());
            let mut best = 0;
            if let Some(m) = sf.features.get(x) {
                for v in m.values() {
                    if let FsRef::Var { name } = sf.find(v) {
                        best = best.max(1 + go(sf, &name, stack)?);
                    } else {
                        best = best.max(1);
                    }
                }
            }
            stack.pop();
            Some(best)
        }
        match self.find(&FsRef::var(var)) {
            FsRef::Var { name } => go(self, &name, &mut Vec::new()),
            FsRef::Atom { .. } => Some(0),
        }
    }

    /// Checks the solved-form conditions; used by tests after every step.
    pub fn validate(&self) -> Result<(), String> {
        for (x, t) in &self.bindings {
            if let FsRef::Var { name } = t {
                if self.bindings.contains_key(name) {
                    return Err(format!("{x} is bound to eliminated {name}"));
                }
            }
            if self.features.contains_key(x) {
                return Err(format!("eliminated {x} still has features"));
            }
        }
        for (x, m) in &self.features {
            for (f, v) in m {
                if let FsRef::Var { name } = v {
                    if self.bindings.contains_key(name) {
                        return Err(format!("{x}.{f} points to eliminated {name}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Names every representative by a path from a user variable.
    fn names(&self) -> (HashMap<String, PathRef>, Vec<String>) {
        let mut names: HashMap<String, PathRef> = HashMap::new();
        let mut visit = Vec::new();
        let mut queue = VecDeque::new();
        for v in &self.order {
            if !self.bindings.contains_key(v) {
                names.insert(v.clone(), PathRef::var(v.clone()));
                queue.push_back(v.clone());
            }
        }
        while let Some(x) = queue.pop_front() {
            visit.push(x.clone());
            if let Some(m) = self.features.get(&x) {
                for (f, v) in m {
                    if let FsRef::Var { name } = v {
                        if !names.contains_key(name) {
                            let p = names[&x].extend(std::slice::from_ref(f));
                            names.insert(name.clone(), p);
                            queue.push_back(name.clone());
                        }
                    }
                }
            }
        }
        // nodes not reachable from a user variable keep their own name
        for x in self.features.keys() {
            if !names.contains_key(x) {
                names.insert(x.clone(), PathRef::var(x.clone()));
                visit.push(x.clone());
            }
        }
        (names, visit)
    }

    /// The solved form as equations over user variables, in first-use order.
    /// Internal nodes appear as paths from the variables that reach them.
    pub fn constraints(&self) -> Vec<AtomicConstraint> {
        let (names, visit) = self.names();
        let name_of = |r: &FsRef| -> PathRef {
            match r {
                FsRef::Atom { .. } => PathRef::new(r.clone(), vec![]),
                FsRef::Var { name } => names
                    .get(name)
                    .cloned()
                    .unwrap_or_else(|| PathRef::var(name.clone())),
            }
        };
        let mut refs: HashMap<String, usize> = HashMap::new();
        for t in self
            .bindings
            .values()
            .chain(self.features.values().flat_map(|m| m.values()))
        {
            if let FsRef::Var { name } = t {
                *refs.entry(name.clone()).or_default() += 1;
            }
        }
        let mut out = Vec::new();
        for v in &self.order {
            if let Some(t) = self.bindings.get(v) {
                out.push(AtomicConstraint::new(PathRef::var(v.clone()), name_of(t)));
            }
        }
        for x in &visit {
            let Some(m) = self.features.get(x) else {
                continue;
            };
            let here = &names[x];
            for (f, v) in m {
                let lhs = here.extend(std::slice::from_ref(f));
                let rhs = name_of(v);
                if rhs == lhs {
                    // defining edge of an internal node
                    let leaf = !self.has_features(v.name());
                    if leaf && refs.get(v.name()).copied().unwrap_or(0) == 1 {
                        out.push(AtomicConstraint::new(lhs.clone(), lhs));
                    }
                    continue;
                }
                out.push(AtomicConstraint::new(lhs, rhs));
            }
        }
        out
    }

    /// Rebuilds a solved form from equations; `is_var` tells variables from
    /// atoms.
    pub fn from_constraints<'a>(
        cs: impl IntoIterator<Item = &'a AtomicConstraint>,
    ) -> Result<SolvedForm, Bottom> {
        let mut sf = SolvedForm::new();
        for c in cs {
            sf.assert_eq(&c.lhs, &c.rhs)?;
        }
        Ok(sf)
    }

    /// Parses the text produced by `Display` (also accepts `;` separators).
    pub fn from_text(text: &str, is_var: impl Fn(&str) -> bool) -> Result<SolvedForm, String> {
        let parse_ref = |s: &str| -> Result<PathRef, String> {
            let mut parts = s.trim().split('.');
            let base = parts
                .next()
                .filter(|b| !b.is_empty())
                .ok_or_else(|| format!("empty reference in `{s}`"))?;
            let base = if is_var(base) {
                FsRef::var(base)
            } else {
                FsRef::atom(base)
            };
            Ok(PathRef::new(base, parts.map(str::to_string).collect()))
        };
        let mut sf = SolvedForm::new();
        for line in text.split(['\n', ';']) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (l, r) = line
                .split_once('=')
                .ok_or_else(|| format!("expected `=` in `{line}`"))?;
            sf.assert_eq(&parse_ref(l)?, &parse_ref(r)?)
                .map_err(|_| format!("`{line}` contradicts earlier constraints"))?;
        }
        Ok(sf)
    }

    /// Both solved forms have the same models.
    pub fn equivalent(&self, other: &SolvedForm) -> bool {
        self.entails_all(other) && other.entails_all(self)
    }

    /// Every constraint of `other` holds in every model of `self`.
    pub fn entails_all(&self, other: &SolvedForm) -> bool {
        other
            .constraints()
            .iter()
            .all(|c| self.entails(&c.lhs, &c.rhs))
    }
}

/// Canonical text form: one constraint per line.
impl fmt::Display for SolvedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.constraints() {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Functional form of [`SolvedForm::assert_eq`]: `None` stands for ⊥.
pub fn assert_atomic(m: &SolvedForm, c: &AtomicConstraint) -> Option<SolvedForm> {
    let mut out = m.clone();
    out.assert_eq(&c.lhs, &c.rhs).ok()?;
    Some(out)
}
