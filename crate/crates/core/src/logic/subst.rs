use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Atom, Clause, Literal, Term};

/// Mapping from variable names to terms, applied simultaneously.
///
/// Unifiers built by [`crate::logic::unify`] are idempotent; substitutions
/// built by hand need not be.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a substitution from pairs; trivial bindings `X -> X` are dropped.
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Term)>,
        S: Into<String>,
    {
        let mut s = Self::new();
        for (v, t) in pairs {
            let v = v.into();
            if !matches!(&t, Term::Var(w) if *w == v) {
                s.bindings.insert(v, t);
            }
        }
        s
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn apply<T: Substitutable>(&self, target: &T) -> T {
        target.substitute(self)
    }

    /// Extends an idempotent substitution with `var -> term`, rewriting
    /// existing bindings so the result stays idempotent. The caller ensures
    /// `term` is already normalised under `self` and does not contain `var`.
    pub(crate) fn bind_normalised(&mut self, var: String, term: Term) {
        let single = Substitution::from_pairs([(var.clone(), term.clone())]);
        for bound in self.bindings.values_mut() {
            *bound = bound.substitute(&single);
        }
        self.bindings.insert(var, term);
    }

    /// `apply(s, apply(s, t)) == apply(s, t)` for every term; equivalently no
    /// bound variable occurs in the range.
    pub fn is_idempotent(&self) -> bool {
        self.bindings.values().all(|t| self.bindings.keys().all(|v| !t.occurs(v)))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

pub trait Substitutable {
    fn substitute(&self, s: &Substitution) -> Self;
}

impl Substitutable for Term {
    fn substitute(&self, s: &Substitution) -> Self {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Fn(f, args) => Term::Fn(f.clone(), args.iter().map(|a| a.substitute(s)).collect()),
        }
    }
}

impl Substitutable for Atom {
    fn substitute(&self, s: &Substitution) -> Self {
        Atom { predicate: self.predicate.clone(), args: self.args.iter().map(|a| a.substitute(s)).collect() }
    }
}

impl Substitutable for Literal {
    fn substitute(&self, s: &Substitution) -> Self {
        Literal { positive: self.positive, atom: self.atom.substitute(s) }
    }
}

/// Only the literals change; id, order number and provenance are kept.
impl Substitutable for Clause {
    fn substitute(&self, s: &Substitution) -> Self {
        Clause { literals: self.literals.iter().map(|l| l.substitute(s)).collect(), ..self.clone() }
    }
}
