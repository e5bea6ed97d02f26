//! Binary resolution, factoring and the generation phase of the given-clause
//! loop.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use super::subst::Substitution;
use super::unify::unify_atoms;
use crate::syntax::{Clause, Literal, Rule, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("literal index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("literals have the same polarity")]
    SamePolarity,
    #[error("literals have opposite polarity")]
    OppositePolarity,
    #[error("atoms do not unify")]
    NotUnifiable,
    #[error("factoring needs i < j")]
    BadOrder,
}

/// Returns a variant of `clause` sharing no variable with `reserved`.
///
/// Only clashing variables are renamed; each gets the first `X<k>` that is
/// neither reserved nor already used by the clause.
pub fn rename_apart(clause: &Clause, reserved: &BTreeSet<String>) -> Clause {
    let vars = clause.vars();
    if !vars.iter().any(|v| reserved.contains(*v)) {
        return clause.clone();
    }
    let mut taken: BTreeSet<String> = reserved.iter().cloned().collect();
    taken.extend(vars.iter().map(|v| v.to_string()));
    let mut next = 0usize;
    let mut pairs = Vec::new();
    for v in vars.iter().filter(|v| reserved.contains(**v)) {
        let fresh = loop {
            let candidate = format!("X{next}");
            next += 1;
            if !taken.contains(&candidate) {
                break candidate;
            }
        };
        taken.insert(fresh.clone());
        pairs.push((v.to_string(), Term::Var(fresh)));
    }
    Substitution::from_pairs(pairs).apply(clause)
}

/// Renames variables to `X0, X1, ...` by first occurrence. Two clauses are
/// variants with identical literal order iff their canonical literals agree.
pub fn canonical_literals(literals: &[Literal]) -> Vec<Literal> {
    let mut vars = Vec::new();
    for lit in literals {
        lit.collect_vars(&mut vars);
    }
    let s = Substitution::from_pairs(vars.iter().enumerate().map(|(i, v)| (v.to_string(), Term::Var(format!("X{i}")))));
    literals.iter().map(|l| s.apply(l)).collect()
}

pub fn is_tautology(clause: &Clause) -> bool {
    let lits = &clause.literals;
    lits.iter().enumerate().any(|(i, a)| lits[i + 1..].iter().any(|b| a.positive != b.positive && a.atom == b.atom))
}

/// Binary resolution on literal `i` of `c1` and literal `j` of `c2`.
///
/// The clauses must already be variable-disjoint. The resolvent lists the
/// remaining literals of `c1` then those of `c2`; duplicates are kept.
pub fn resolve(c1: &Clause, i: usize, c2: &Clause, j: usize) -> Result<Clause, InferenceError> {
    let l1 = c1.literals.get(i).ok_or(InferenceError::IndexOutOfRange(i))?;
    let l2 = c2.literals.get(j).ok_or(InferenceError::IndexOutOfRange(j))?;
    if l1.positive == l2.positive {
        return Err(InferenceError::SamePolarity);
    }
    let mgu = unify_atoms(&l1.atom, &l2.atom).map_err(|_| InferenceError::NotUnifiable)?;
    let literals = c1
        .literals
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i)
        .chain(c2.literals.iter().enumerate().filter(|(k, _)| *k != j))
        .map(|(_, l)| mgu.apply(l))
        .collect();
    Ok(Clause::derived(literals, Rule::Resolution, vec![c1.id, c2.id]))
}

/// Factoring of literals `i < j`: unify them and drop literal `j`.
pub fn factor(clause: &Clause, i: usize, j: usize) -> Result<Clause, InferenceError> {
    if i >= j {
        return Err(InferenceError::BadOrder);
    }
    let li = clause.literals.get(i).ok_or(InferenceError::IndexOutOfRange(i))?;
    let lj = clause.literals.get(j).ok_or(InferenceError::IndexOutOfRange(j))?;
    if li.positive != lj.positive {
        return Err(InferenceError::OppositePolarity);
    }
    let mgu = unify_atoms(&li.atom, &lj.atom).map_err(|_| InferenceError::NotUnifiable)?;
    let literals = clause.literals.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, l)| mgu.apply(l)).collect();
    Ok(Clause::derived(literals, Rule::Factoring, vec![clause.id]))
}

/// Key used to detect repeated clauses: canonical literals.
pub type VariantKey = Vec<Literal>;

pub fn variant_key(clause: &Clause) -> VariantKey {
    canonical_literals(&clause.literals)
}

/// Every resolvent between `given` and each partner (partner renamed apart;
/// all literal pairs, given literal first) followed by every factor of
/// `given`.
///
/// Each result has repeated literals merged and canonical variable names.
/// Tautologies, and clauses that are variants of a partner or of an earlier
/// result, are dropped. Results carry id 0 until a proof state admits them.
pub fn generate_inferences(given: &Clause, partners: &[Clause]) -> Vec<Clause> {
    let mut seen: HashSet<VariantKey> = partners.iter().map(variant_key).collect();
    let partners: Vec<&Clause> = partners.iter().collect();
    generate_inferences_excluding(given, &partners, &mut seen)
}

/// As [`generate_inferences`], with the caller supplying the set of variant
/// keys to suppress. New results are added to `seen`.
pub fn generate_inferences_excluding(
    given: &Clause,
    partners: &[&Clause],
    seen: &mut HashSet<VariantKey>,
) -> Vec<Clause> {
    let mut out = Vec::new();
    let reserved: BTreeSet<String> = given.vars().into_iter().map(str::to_owned).collect();
    for partner in partners {
        let partner = rename_apart(partner, &reserved);
        for i in 0..given.literals.len() {
            for j in 0..partner.literals.len() {
                if let Ok(resolvent) = resolve(given, i, &partner, j) {
                    admit(resolvent, seen, &mut out);
                }
            }
        }
    }
    for i in 0..given.literals.len() {
        for j in i + 1..given.literals.len() {
            if let Ok(f) = factor(given, i, j) {
                admit(f, seen, &mut out);
            }
        }
    }
    out
}

fn admit(mut clause: Clause, seen: &mut HashSet<VariantKey>, out: &mut Vec<Clause>) {
    let mut merged: Vec<Literal> = Vec::with_capacity(clause.literals.len());
    for lit in clause.literals.drain(..) {
        if !merged.contains(&lit) {
            merged.push(lit);
        }
    }
    clause.literals = canonical_literals(&merged);
    if is_tautology(&clause) {
        return;
    }
    if seen.insert(clause.literals.clone()) {
        out.push(clause);
    }
}
