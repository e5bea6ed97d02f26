//! Syntactic unification with occurs check.

use thiserror::Error;

use super::subst::{Substitutable, Substitution};
use crate::syntax::{Atom, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("symbol clash: {0} vs {1}")]
    Clash(String, String),
    #[error("occurs check: {var} in {term}")]
    OccursCheck { var: String, term: Term },
}

/// Most general unifier of two terms. The result is idempotent.
pub fn unify(a: &Term, b: &Term) -> Result<Substitution, UnifyError> {
    unify_pairs(vec![(a.clone(), b.clone())], Substitution::new())
}

/// Most general unifier of two atoms (same predicate and arity required).
pub fn unify_atoms(a: &Atom, b: &Atom) -> Result<Substitution, UnifyError> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return Err(UnifyError::Clash(
            format!("{}/{}", a.predicate, a.args.len()),
            format!("{}/{}", b.predicate, b.args.len()),
        ));
    }
    let pairs = a.args.iter().cloned().zip(b.args.iter().cloned()).rev().collect();
    unify_pairs(pairs, Substitution::new())
}

fn unify_pairs(mut stack: Vec<(Term, Term)>, mut subst: Substitution) -> Result<Substitution, UnifyError> {
    while let Some((a, b)) = stack.pop() {
        let a = a.substitute(&subst);
        let b = b.substitute(&subst);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs(&x) {
                    return Err(UnifyError::OccursCheck { var: x, term: t });
                }
                subst.bind_normalised(x, t);
            }
            (Term::Fn(f, fargs), Term::Fn(g, gargs)) => {
                if f != g || fargs.len() != gargs.len() {
                    return Err(UnifyError::Clash(format!("{f}/{}", fargs.len()), format!("{g}/{}", gargs.len())));
                }
                stack.extend(fargs.into_iter().zip(gargs).rev());
            }
        }
    }
    Ok(subst)
}
