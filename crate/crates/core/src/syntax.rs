//! First-order syntax: terms, literals, clauses and clause sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// A first-order term. Constants are functions with no arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Fn(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Fn(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Fn(name.into(), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Fn(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// True if variable `name` occurs anywhere in this term.
    pub fn occurs(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Fn(_, args) => args.iter().any(|a| a.occurs(name)),
        }
    }

    /// Number of symbol occurrences (variables included).
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Fn(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Appends variables in first-occurrence order, without repeats.
    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Term::Fn(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

/// Predicate symbol applied to arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Term::size).sum::<usize>()
    }

    pub fn is_equality(&self) -> bool {
        self.predicate == EQUALITY && self.args.len() == 2
    }
}

/// Name under which `=` is stored; the engine treats it as an ordinary predicate.
pub const EQUALITY: &str = "=";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { positive: false, atom }
    }

    pub fn negated(&self) -> Self {
        Literal { positive: !self.positive, atom: self.atom.clone() }
    }

    pub fn size(&self) -> usize {
        self.atom.size()
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        self.atom.args.iter().for_each(|a| a.collect_vars(out));
    }
}

/// TPTP formula role. Input roles are preserved verbatim; `Derived` marks
/// clauses produced by inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Axiom,
    Hypothesis,
    NegatedConjecture,
    Conjecture,
    Lemma,
    Plain,
    Derived,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Hypothesis => "hypothesis",
            Role::NegatedConjecture => "negated_conjecture",
            Role::Conjecture => "conjecture",
            Role::Lemma => "lemma",
            Role::Plain => "plain",
            Role::Derived => "derived",
        }
    }

    /// Roles accepted in input files. `derived` is output-only.
    pub fn from_input(s: &str) -> Option<Role> {
        Some(match s {
            "axiom" => Role::Axiom,
            "hypothesis" => Role::Hypothesis,
            "negated_conjecture" => Role::NegatedConjecture,
            "conjecture" => Role::Conjecture,
            "lemma" => Role::Lemma,
            "plain" => Role::Plain,
            _ => return None,
        })
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Resolution,
    Factoring,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Resolution => "resolution",
            Rule::Factoring => "factoring",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Inference {
    Input,
    Derived { rule: Rule, parents: Vec<usize> },
}

impl Inference {
    pub fn parents(&self) -> &[usize] {
        match self {
            Inference::Input => &[],
            Inference::Derived { parents, .. } => parents,
        }
    }
}

/// A clause together with its bookkeeping inside a proof state.
///
/// `id` and `order_number` coincide for clauses living in an episode; clauses
/// fresh out of the inference layer carry zeros until the environment admits
/// them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub id: usize,
    pub literals: Vec<Literal>,
    pub label: String,
    pub role: Role,
    pub order_number: usize,
    pub inference: Inference,
    pub processed: bool,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        Clause {
            id: 0,
            literals,
            label: String::new(),
            role: Role::Plain,
            order_number: 0,
            inference: Inference::Input,
            processed: false,
        }
    }

    pub fn derived(literals: Vec<Literal>, rule: Rule, parents: Vec<usize>) -> Self {
        Clause { role: Role::Derived, inference: Inference::Derived { rule, parents }, ..Clause::new(literals) }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(|l| l.atom.args.iter().all(Term::is_ground))
    }

    /// Total count of predicate, function, constant and variable occurrences.
    pub fn size(&self) -> usize {
        self.literals.iter().map(Literal::size).sum()
    }

    /// Variables in first-occurrence order.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for lit in &self.literals {
            lit.collect_vars(&mut out);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    Function,
    Predicate,
}

/// Clauses of one problem plus the signature they use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClauseSet {
    pub clauses: Vec<Clause>,
    pub signature: BTreeMap<(String, usize), SymbolKind>,
    /// Set when `=` or `!=` appeared; the engine does no equality reasoning.
    pub has_equality: bool,
}

impl ClauseSet {
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn predicates(&self) -> BTreeSet<(&str, usize)> {
        self.signature
            .iter()
            .filter(|(_, k)| **k == SymbolKind::Predicate)
            .map(|((s, a), _)| (s.as_str(), *a))
            .collect()
    }
}
