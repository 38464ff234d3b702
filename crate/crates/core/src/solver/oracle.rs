//! Reference decision procedure by disjunctive expansion. Exponential; meant
//! for cross-checking the solver on small formulas.

use super::{nnf, NegativeStatus, SolvedForm, SolverError};
use crate::terms::{PathRef, Term};

const MAX_ATOMS: usize = 20;

#[derive(Clone, Default)]
struct Branch {
    model: SolvedForm,
    negatives: Vec<(PathRef, PathRef)>,
}

fn count_equations(t: &Term) -> usize {
    match t {
        Term::Eq { .. } => 1,
        Term::And { left, right } | Term::Or { left, right } => {
            count_equations(left) + count_equations(right)
        }
        Term::Not { body } => count_equations(body),
        _ => 0,
    }
}

fn prepare(e: &Term, limit: usize) -> Result<Term, SolverError> {
    if !e.is_first_order() {
        return Err(SolverError::NotFirstOrder(e.to_string()));
    }
    let n = count_equations(e);
    if n > limit {
        return Err(SolverError::TooLarge(n));
    }
    Ok(nnf(e))
}

/// Visits every consistent disjunct of the expansion until `visit` returns
/// true. Returns whether it stopped early.
fn walk(mut work: Vec<Term>, mut b: Branch, visit: &mut dyn FnMut(Branch) -> bool) -> bool {
    while let Some(t) = work.pop() {
        match t {
            Term::And { left, right } => {
                work.push(*right);
                work.push(*left);
            }
            Term::Or { left, right } => {
                let mut other = work.clone();
                other.push(*right);
                work.push(*left);
                return walk(work, b.clone(), visit) || walk(other, b, visit);
            }
            Term::Const { value, .. } => {
                if !value {
                    return false;
                }
            }
            Term::Eq {
                lhs,
                rhs,
                positive: true,
            } => {
                if b.model.assert_eq(&lhs, &rhs).is_err() {
                    return false;
                }
            }
            Term::Eq {
                lhs,
                rhs,
                positive: false,
            } => b.negatives.push((lhs, rhs)),
            other => unreachable!("not first-order after the guard: {other}"),
        }
    }
    if b.negatives
        .iter()
        .any(|(l, r)| b.model.check_negative(l, r) == NegativeStatus::Violated)
    {
        return false;
    }
    visit(b)
}

/// Satisfiability of a first-order formula with at most 20 equations.
pub fn oracle_sat(e: &Term) -> Result<bool, SolverError> {
    oracle_sat_in(&SolvedForm::new(), e, MAX_ATOMS)
}

/// Satisfiability of `m ∧ e`, with an explicit bound on the number of
/// equations in `e`.
pub fn oracle_sat_in(m: &SolvedForm, e: &Term, limit: usize) -> Result<bool, SolverError> {
    let f = prepare(e, limit)?;
    let start = Branch {
        model: m.clone(),
        negatives: Vec::new(),
    };
    Ok(walk(vec![f], start, &mut |_| true))
}

/// Minimal models of the positive part of a first-order formula: solved
/// forms of the consistent disjuncts, minus those strictly stronger than
/// another and duplicates. Negative equations only prune disjuncts.
pub fn minimal_models(e: &Term) -> Result<Vec<SolvedForm>, SolverError> {
    let f = prepare(e, MAX_ATOMS)?;
    let mut all: Vec<SolvedForm> = Vec::new();
    walk(vec![f], Branch::default(), &mut |b| {
        all.push(b.model);
        false
    });
    let mut out: Vec<SolvedForm> = Vec::new();
    for (i, m) in all.iter().enumerate() {
        let stronger = all
            .iter()
            .enumerate()
            .any(|(j, o)| j != i && m.entails_all(o) && !o.entails_all(m));
        if !stronger && !out.iter().any(|o| o.equivalent(m)) {
            out.push(m.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::PathRef;

    fn eq(l: &str, r: &str) -> Term {
        Term::eq(PathRef::var_path(l), PathRef::atom(r))
    }

    #[test]
    fn trivial_cases() {
        assert!(oracle_sat(&Term::truth(true)).unwrap());
        let x_a = eq("x", "a");
        assert!(!oracle_sat(&Term::and(x_a.clone(), Term::not(x_a))).unwrap());
    }

    #[test]
    fn models_of_disjunctions() {
        let ms = minimal_models(&eq("x", "a")).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].to_string(), "x=a\n");

        let ms = minimal_models(&Term::or(eq("x", "a"), eq("x", "b"))).unwrap();
        let texts: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        assert_eq!(texts, ["x=a\n", "x=b\n"]);

        let e = Term::and(Term::or(eq("x.f", "a"), eq("x.f", "b")), eq("x.f", "a"));
        let ms = minimal_models(&e).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].to_string(), "x.f=a\n");
    }

    #[test]
    fn weaker_model_wins() {
        // x=a | (x=a & y=b): only {x=a} is minimal
        let e = Term::or(eq("x", "a"), Term::and(eq("x", "a"), eq("y", "b")));
        let ms = minimal_models(&e).unwrap();
        assert_eq!(ms.len(), 1);
    }

    #[test]
    fn guards() {
        let big = Term::conj((0..21).map(|i| eq(&format!("x.f{i}"), "a")));
        assert_eq!(oracle_sat(&big), Err(SolverError::TooLarge(21)));
        let lam = Term::lam_fs("x", eq("x", "a"));
        assert!(matches!(
            oracle_sat(&lam),
            Err(SolverError::NotFirstOrder(_))
        ));
    }
}
