//! Satisfiability of feature descriptions.
//!
//! [`solve`] rewrites a description of type `bool` into a pair ⟨M, C⟩: a
//! solved form `M` holding the constraints every model must satisfy, and a
//! residue `C` such that the input is equivalent to `M ∧ C`. Disjunctions are
//! simplified under `M`. A disjunction whose branches both share variables
//! with the remaining conjuncts (through feature constraints of `M`) is
//! distributed over them and each branch solved on its own; when more than
//! one branch survives, the undistributed conjunction is kept as residue.
//! Without distribution ([`Mode::Polynomial`]) the solver is sound but may
//! miss some contradictions.

mod denote;
mod oracle;
mod solved;

use std::collections::VecDeque;

use thiserror::Error;

pub use denote::{eval_denotation, Assignment, EvalError, FiniteUniverse, Value};
pub use oracle::{minimal_models, oracle_sat, oracle_sat_in};
pub use solved::{assert_atomic, AtomicConstraint, Bottom, NegativeStatus, SolvedForm};

use crate::terms::{
    alpha_eq, beta_normalize, free_vars, fresh_name, strip_lambda_prefix, Binder, FsRef, PathRef,
    Term, TermError, Type,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("solver exceeded its step bound of {0}")]
    FuelExhausted(u64),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("expected a description of type bool, found {0}")]
    NotBool(Type),
    #[error("formula has {0} atomic constraints; the oracle accepts at most 20")]
    TooLarge(usize),
    #[error("not a first-order constraint: {0}")]
    NotFirstOrder(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// all rules, including distribution
    #[default]
    Complete,
    /// no distribution: polynomial, sound, incomplete
    Polynomial,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub mode: Mode,
    /// step bound; defaults to 1000 times the input size
    pub fuel: Option<u64>,
}

/// Result of solving: `model` is `None` when the input is unsatisfiable, in
/// which case `residue` is `false`.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub model: Option<SolvedForm>,
    pub residue: Term,
    /// negative equations the model neither entails nor refutes; they are
    /// also conjuncts of the residue
    pub negatives: Vec<Term>,
    pub steps: u64,
}

impl SolverState {
    pub fn is_false(&self) -> bool {
        self.model.is_none()
    }

    fn bottom(steps: u64) -> Self {
        SolverState {
            model: None,
            residue: Term::truth(false),
            negatives: Vec::new(),
            steps,
        }
    }
}

/// Negation normal form: negation only on equations and opaque
/// applications.
pub fn nnf(t: &Term) -> Term {
    match t {
        Term::Not { body } => negate(body),
        Term::And { left, right } => Term::and(nnf(left), nnf(right)),
        Term::Or { left, right } => Term::or(nnf(left), nnf(right)),
        Term::LamFs { binder, body } => Term::lam_fs(binder.clone(), nnf(body)),
        Term::LamTyped { binder, ty, body } => {
            Term::lam_typed(binder.clone(), ty.clone(), nnf(body))
        }
        _ => t.clone(),
    }
}

fn negate(t: &Term) -> Term {
    match t {
        Term::Not { body } => nnf(body),
        Term::And { left, right } => Term::or(negate(left), negate(right)),
        Term::Or { left, right } => Term::and(negate(left), negate(right)),
        Term::Const { value, ty } => Term::constant(!value, ty.clone()),
        Term::Eq { lhs, rhs, positive } => Term::Eq {
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            positive: !positive,
        },
        Term::LamFs { binder, body } => Term::lam_fs(binder.clone(), negate(body)),
        Term::LamTyped { binder, ty, body } => {
            Term::lam_typed(binder.clone(), ty.clone(), negate(body))
        }
        _ => Term::not(t.clone()),
    }
}

pub(crate) fn flatten_or(t: Term, out: &mut Vec<Term>) {
    match t {
        Term::Or { left, right } => {
            flatten_or(*left, out);
            flatten_or(*right, out);
        }
        other => out.push(other),
    }
}

/// Conjunct order of a basic normal description: boolean variables first,
/// then equations, other literals, disjunctions.
fn arrange(mut items: Vec<Term>) -> Vec<Term> {
    items.sort_by_key(|t| match t {
        Term::Var { .. } => 0,
        Term::Eq { .. } => 1,
        Term::Or { .. } => 3,
        _ => 2,
    });
    items
}

fn refs_of(t: &Term) -> Vec<FsRef> {
    free_vars(t).fs.into_iter().map(FsRef::var).collect()
}

fn closure_meets(m: &SolvedForm, a: Vec<FsRef>, b: Vec<FsRef>) -> bool {
    let ca = m.closure(a);
    let cb = m.closure(b);
    ca.iter().any(|x| cb.contains(x))
}

/// Whether the two descriptions share a variable once each side is closed
/// under the feature constraints of `m`.
pub fn m_dependent(m: &SolvedForm, c1: &Term, c2: &Term) -> bool {
    closure_meets(m, refs_of(c1), refs_of(c2))
}

enum Stop {
    Bottom,
    Fuel,
}

type Step<T> = Result<T, Stop>;

#[derive(Clone, Default)]
struct Ctx {
    model: SolvedForm,
    negatives: Vec<(PathRef, PathRef)>,
}

/// A solved conjunction: atoms absorbed into the model at this level and the
/// remaining literals and disjunctions.
struct Conj {
    atoms: Vec<Term>,
    rest: Vec<Term>,
}

enum Simplified {
    True,
    One(Term),
    Many(Vec<Term>),
}

struct Engine {
    complete: bool,
    fuel: u64,
    used: u64,
}

fn entailed(m: &SolvedForm, atom: &Term) -> bool {
    match atom {
        Term::Eq {
            lhs,
            rhs,
            positive: true,
        } => m.entails(lhs, rhs),
        Term::Eq {
            lhs,
            rhs,
            positive: false,
        } => m.check_negative(lhs, rhs) == NegativeStatus::Consistent,
        _ => false,
    }
}

fn complementary(lits: &[Term]) -> bool {
    lits.iter().any(|l| match l {
        Term::Not { body } => lits.iter().any(|o| alpha_eq(o, body)),
        _ => false,
    })
}

impl Engine {
    fn tick(&mut self) -> Step<()> {
        self.used += 1;
        if self.used > self.fuel {
            Err(Stop::Fuel)
        } else {
            Ok(())
        }
    }

    fn conj(&mut self, ctx: &mut Ctx, items: Vec<Term>) -> Step<Conj> {
        let mut queue: VecDeque<Term> = items.into();
        let mut atoms = Vec::new();
        let mut literals: Vec<Term> = Vec::new();
        // each disjunction carries a flag: already tested by distribution
        // against the current pending conjuncts
        let mut disjunctions: Vec<(Vec<Term>, bool)> = Vec::new();
        loop {
            while let Some(t) = queue.pop_front() {
                self.tick()?;
                match t {
                    Term::And { left, right } => {
                        queue.push_front(*right);
                        queue.push_front(*left);
                    }
                    Term::Const { value: true, .. } => {}
                    Term::Const { value: false, .. } => return Err(Stop::Bottom),
                    Term::Eq {
                        lhs,
                        rhs,
                        positive: true,
                    } => {
                        ctx.model.assert_eq(&lhs, &rhs).map_err(|_| Stop::Bottom)?;
                        atoms.push(Term::eq(lhs, rhs));
                    }
                    Term::Eq {
                        lhs,
                        rhs,
                        positive: false,
                    } => match ctx.model.check_negative(&lhs, &rhs) {
                        NegativeStatus::Violated => return Err(Stop::Bottom),
                        NegativeStatus::Consistent => {}
                        NegativeStatus::Undetermined => {
                            ctx.negatives.push((lhs.clone(), rhs.clone()));
                            atoms.push(Term::neq(lhs, rhs));
                        }
                    },
                    t @ Term::Or { .. } => {
                        let mut ds = Vec::new();
                        flatten_or(t, &mut ds);
                        disjunctions.push((ds, false));
                    }
                    other => literals.push(self.inside(other)?),
                }
            }

            let mut pending = Vec::new();
            for (l, r) in std::mem::take(&mut ctx.negatives) {
                match ctx.model.check_negative(&l, &r) {
                    NegativeStatus::Violated => return Err(Stop::Bottom),
                    NegativeStatus::Consistent => {}
                    NegativeStatus::Undetermined => pending.push((l, r)),
                }
            }
            ctx.negatives = pending;
            if complementary(&literals) {
                return Err(Stop::Bottom);
            }

            let mut changed = false;
            let mut kept = Vec::new();
            for (d, settled) in std::mem::take(&mut disjunctions) {
                match self.disjunction(ctx, d)? {
                    Simplified::True => changed = true,
                    Simplified::One(t) => {
                        queue.push_back(t);
                        changed = true;
                    }
                    Simplified::Many(ds) => kept.push((ds, settled)),
                }
            }
            disjunctions = kept;
            if changed {
                for d in &mut disjunctions {
                    d.1 = false;
                }
                continue;
            }

            if self.complete {
                if let Some(k) = self.distributable(ctx, &literals, &disjunctions) {
                    // (e | e') & E  =>  (e & E) | (e' & E), solved as a case split
                    let d = &disjunctions[k].0;
                    let others: Vec<Term> = literals
                        .iter()
                        .cloned()
                        .chain(
                            disjunctions
                                .iter()
                                .enumerate()
                                .filter(|(j, _)| *j != k)
                                .map(|(_, (o, _))| Term::disj(o.clone())),
                        )
                        .collect();
                    let tail = Term::conj(others);
                    let branches = vec![
                        Term::and(d[0].clone(), tail.clone()),
                        Term::and(Term::disj(d[1..].to_vec()), tail),
                    ];
                    match self.disjunction(ctx, branches)? {
                        Simplified::True => {
                            literals.clear();
                            disjunctions.clear();
                        }
                        Simplified::One(t) => {
                            literals.clear();
                            disjunctions.clear();
                            queue.push_back(t);
                        }
                        // each branch was solved completely, so the pending
                        // conjunction is satisfiable as it stands: keep it
                        // undistributed
                        Simplified::Many(_) => {
                            for d in &mut disjunctions {
                                d.1 = true;
                            }
                        }
                    }
                    continue;
                }
            }
            break;
        }
        let mut rest = literals;
        rest.extend(disjunctions.into_iter().map(|(d, _)| Term::disj(d)));
        Ok(Conj { atoms, rest })
    }

    /// Solves the abstractions passed as arguments in an opaque literal.
    fn inside(&mut self, t: Term) -> Step<Term> {
        Ok(match t {
            Term::Not { body } => Term::not(self.inside(*body)?),
            Term::ApplyFs { fun, arg } => Term::apply_fs(self.inside(*fun)?, arg),
            Term::Apply { fun, arg } => Term::apply(self.inside(*fun)?, self.argument(*arg)?),
            other => other,
        })
    }

    fn argument(&mut self, t: Term) -> Step<Term> {
        let (binders, body) = strip_lambda_prefix(&t);
        if body.ty() != Some(Type::Bool) {
            return Ok(t);
        }
        let mut sub = Ctx::default();
        let solved = match self.conj(&mut sub, vec![body]) {
            Ok(c) => {
                let mut items: Vec<Term> = sub
                    .model
                    .constraints()
                    .into_iter()
                    .map(|c| Term::eq(c.lhs, c.rhs))
                    .collect();
                items.extend(
                    sub.negatives
                        .iter()
                        .map(|(l, r)| Term::neq(l.clone(), r.clone())),
                );
                items.extend(c.rest);
                Term::conj(arrange(items))
            }
            Err(Stop::Bottom) => Term::truth(false),
            Err(Stop::Fuel) => return Err(Stop::Fuel),
        };
        Ok(Binder::wrap(&binders, solved))
    }

    /// Solves each disjunct under the current model and drops the
    /// contradictory ones.
    fn disjunction(&mut self, ctx: &Ctx, ds: Vec<Term>) -> Step<Simplified> {
        let mut kept: Vec<Term> = Vec::new();
        for d in ds {
            self.tick()?;
            let mut sub = ctx.clone();
            let c = match self.conj(&mut sub, vec![d]) {
                Ok(c) => c,
                Err(Stop::Bottom) => continue,
                Err(Stop::Fuel) => return Err(Stop::Fuel),
            };
            let mut items: Vec<Term> = c
                .atoms
                .into_iter()
                .filter(|a| !entailed(&ctx.model, a))
                .collect();
            items.extend(c.rest);
            if items.is_empty() {
                return Ok(Simplified::True);
            }
            let t = Term::conj(arrange(items));
            flatten_or(t, &mut kept);
        }
        kept.sort_by_key(|t| !t.is_var());
        match kept.len() {
            0 => Err(Stop::Bottom),
            1 => Ok(Simplified::One(kept.pop().expect("one disjunct"))),
            _ => Ok(Simplified::Many(kept)),
        }
    }

    /// First disjunction whose two branches both depend on the other pending
    /// conjuncts.
    fn distributable(
        &self,
        ctx: &Ctx,
        literals: &[Term],
        disjunctions: &[(Vec<Term>, bool)],
    ) -> Option<usize> {
        if literals.len() + disjunctions.len() < 2 {
            return None;
        }
        for (k, (d, settled)) in disjunctions.iter().enumerate() {
            if *settled {
                continue;
            }
            let mut others: Vec<FsRef> = Vec::new();
            for l in literals {
                others.extend(refs_of(l));
            }
            for (j, (o, _)) in disjunctions.iter().enumerate() {
                if j != k {
                    for t in o {
                        others.extend(refs_of(t));
                    }
                }
            }
            for (l, r) in &ctx.negatives {
                others.push(l.base.clone());
                others.push(r.base.clone());
            }
            let first = refs_of(&d[0]);
            let rest: Vec<FsRef> = d[1..].iter().flat_map(refs_of).collect();
            if closure_meets(&ctx.model, first, others.clone())
                && closure_meets(&ctx.model, rest, others)
            {
                return Some(k);
            }
        }
        None
    }
}

/// Solves a description of type `bool` in complete mode.
pub fn solve(e: &Term, mode: Mode) -> Result<SolverState, SolverError> {
    solve_with(e, SolveOptions { mode, fuel: None })
}

pub fn solve_with(e: &Term, opts: SolveOptions) -> Result<SolverState, SolverError> {
    if let Some(ty) = e.ty() {
        if ty != Type::Bool {
            return Err(SolverError::NotBool(ty));
        }
    }
    let normal = beta_normalize(e)?;
    let input = nnf(&normal);
    let size = e.size().max(input.size()) as u64;
    let fuel = opts.fuel.unwrap_or(1000 * size);
    let mut engine = Engine {
        complete: opts.mode == Mode::Complete,
        fuel,
        used: 0,
    };
    let mut ctx = Ctx::default();
    match engine.conj(&mut ctx, vec![input]) {
        Ok(c) => {
            let negatives: Vec<Term> = ctx
                .negatives
                .iter()
                .map(|(l, r)| Term::neq(l.clone(), r.clone()))
                .collect();
            let mut items = negatives.clone();
            items.extend(c.rest);
            Ok(SolverState {
                model: Some(ctx.model),
                residue: Term::conj(arrange(items)),
                negatives,
                steps: engine.used,
            })
        }
        Err(Stop::Bottom) => Ok(SolverState::bottom(engine.used)),
        Err(Stop::Fuel) => Err(SolverError::FuelExhausted(fuel)),
    }
}

/// Decides satisfiability of a description in normal form `λx̄. e`: the
/// binders are read existentially and the body is solved in complete mode.
pub fn satisfiable(e: &Term) -> Result<(bool, SolverState), SolverError> {
    satisfiable_with(e, SolveOptions::default())
}

pub fn satisfiable_with(e: &Term, opts: SolveOptions) -> Result<(bool, SolverState), SolverError> {
    let normal = beta_normalize(e)?;
    let (_, mut body) = strip_lambda_prefix(&normal);
    // a normal form of function type that is not an abstraction (a lifted
    // constant or connective) is applied to fresh variables instead
    loop {
        body = match body.ty() {
            Some(Type::FsArrow { .. }) => {
                beta_normalize(&Term::apply_fs(body, PathRef::var(fresh_name("x"))))?
            }
            Some(Type::Arrow { arg, .. }) => {
                beta_normalize(&Term::apply(body, Term::var(fresh_name("P"), *arg)))?
            }
            _ => break,
        };
        body = strip_lambda_prefix(&body).1;
    }
    let state = solve_with(&body, opts)?;
    Ok((!state.is_false(), state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::is_basic_normal;

    fn v(s: &str) -> PathRef {
        PathRef::var_path(s)
    }

    fn a(s: &str) -> PathRef {
        PathRef::atom(s)
    }

    #[test]
    fn deterministic_part_moves_into_the_model() {
        // x.agr.pers=p3 & (x.agr.pers=p1 | x.cat=v)
        let e = Term::and(
            Term::eq(v("x.agr.pers"), a("p3")),
            Term::or(
                Term::eq(v("x.agr.pers"), a("p1")),
                Term::eq(v("x.cat"), a("v")),
            ),
        );
        let st = solve(&e, Mode::Complete).unwrap();
        let m = st.model.unwrap();
        assert!(m.entails(&v("x.agr.pers"), &a("p3")));
        assert!(m.entails(&v("x.cat"), &a("v")));
        assert!(st.residue.is_const(true));
    }

    #[test]
    fn false_and_clashes_give_bottom() {
        let e = Term::and(Term::eq(v("x"), a("a")), Term::truth(false));
        assert!(solve(&e, Mode::Complete).unwrap().is_false());
        let e = Term::and(Term::eq(v("x"), a("a")), Term::eq(v("x"), a("b")));
        let st = solve(&e, Mode::Complete).unwrap();
        assert!(st.is_false());
        assert!(st.residue.is_const(false));
    }

    #[test]
    fn distribution_finds_hidden_contradictions() {
        // (x=a | y=a) & (x=b | y=b) & x.f=y is unsat only by case analysis
        // when combined with x\=... ; here: (x=a | x=b) & (x=c | x=d)
        let d1 = Term::or(Term::eq(v("x.f"), a("a")), Term::eq(v("x.g"), a("a")));
        let d2 = Term::or(Term::eq(v("x.f"), a("b")), Term::eq(v("x.f"), a("c")));
        let d3 = Term::or(Term::eq(v("x.g"), a("b")), Term::eq(v("x.g"), a("c")));
        let e = Term::conj([d1, d2, d3]);
        assert!(solve(&e, Mode::Complete).unwrap().is_false());
        // each disjunction alone is fine, so the polynomial mode misses it
        assert!(!solve(&e, Mode::Polynomial).unwrap().is_false());
    }

    #[test]
    fn independent_disjunctions_are_left_alone() {
        let d1 = Term::or(Term::eq(v("x"), a("a")), Term::eq(v("x"), a("b")));
        let d2 = Term::or(Term::eq(v("y"), a("a")), Term::eq(v("y"), a("b")));
        let st = solve(&Term::and(d1, d2), Mode::Complete).unwrap();
        assert!(!st.is_false());
        assert!(is_basic_normal(&st.residue), "{}", st.residue);
        assert_eq!(st.residue.to_string(), "(x=a | x=b) & (y=a | y=b)");
    }

    #[test]
    fn negatives_are_checked_and_kept() {
        let e = Term::and(Term::neq(v("x"), v("y")), Term::eq(v("x"), a("a")));
        let st = solve(&e, Mode::Complete).unwrap();
        assert_eq!(st.residue.to_string(), "x\\=y");
        let e = Term::conj([
            Term::neq(v("x"), v("y")),
            Term::eq(v("x"), a("a")),
            Term::eq(v("y"), a("a")),
        ]);
        assert!(solve(&e, Mode::Complete).unwrap().is_false());
    }

    #[test]
    fn satisfiable_strips_binders() {
        let t = Term::lam_fs(
            "s",
            Term::and(
                Term::eq(v("s.reln"), a("run")),
                Term::eq(v("s.arg1"), a("john")),
            ),
        );
        assert!(satisfiable(&t).unwrap().0);
        let t = Term::lam_fs(
            "s",
            Term::and(Term::eq(v("s"), a("a")), Term::eq(v("s"), a("b"))),
        );
        assert!(!satisfiable(&t).unwrap().0);
        assert!(
            satisfiable(&Term::constant(true, Type::fs_predicate(2)))
                .unwrap()
                .0
        );
        assert!(
            !satisfiable(&Term::constant(false, Type::fs_predicate(1)))
                .unwrap()
                .0
        );
    }

    #[test]
    fn opaque_literals_stay_in_the_residue() {
        let p = Term::var("P", Type::fs_predicate(1));
        let body = Term::and(
            Term::apply_fs(p.clone(), v("s.arg")),
            Term::eq(v("s.f"), a("a")),
        );
        let st = solve(&body, Mode::Complete).unwrap();
        assert_eq!(st.residue.to_string(), "P s.arg");
        let lit = Term::apply_fs(p, v("s"));
        let e = Term::and(lit.clone(), Term::not(lit));
        assert!(solve(&e, Mode::Complete).unwrap().is_false());
    }

    #[test]
    fn m_dependence() {
        let mut m = SolvedForm::new();
        m.assert_eq(&v("x.f"), &v("z")).unwrap();
        let cx = Term::eq(v("x"), a("a"));
        let cz = Term::eq(v("z"), a("a"));
        assert!(m_dependent(&m, &cx, &cz));
        let cy = Term::eq(v("y"), a("a"));
        assert!(!m_dependent(&SolvedForm::new(), &cx, &cy));
        let mut m = SolvedForm::new();
        m.assert_eq(&v("x.f"), &v("y")).unwrap();
        m.assert_eq(&v("y.g"), &v("z")).unwrap();
        assert!(m_dependent(&m, &cx, &cz));
    }

    #[test]
    fn fuel_is_enforced() {
        let e = Term::conj((0..5).map(|i| Term::eq(v(&format!("x.f{i}")), a("a"))));
        let err = solve_with(
            &e,
            SolveOptions {
                mode: Mode::Complete,
                fuel: Some(2),
            },
        );
        assert!(matches!(err, Err(SolverError::FuelExhausted(2))));
    }
}
