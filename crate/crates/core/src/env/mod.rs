//! Episodic given-clause environment with a reset/step contract.
//!
//! An episode starts from a problem's input clauses. Each step selects one
//! unprocessed clause (the given clause), marks it processed and, unless it
//! is empty, adds its inferences with the processed clauses. Selecting an
//! empty clause ends the episode with reward 1.0. Step and clause limits are
//! soft: they are checked once per step, after the generation burst.

mod library;
mod mock;
mod native;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Clause;
use crate::tptp::TptpError;

pub use library::ProblemLibrary;
pub use mock::{Recorder, Script, ScriptedBackend, ScriptedEpisode, ScriptedStep};
pub use native::NativeEnv;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvConfig {
    /// Maximum number of actions per episode.
    pub step_limit: usize,
    /// Proof-state size at which an episode is truncated.
    pub max_clauses: usize,
    /// Problems drawn from (uniformly) on reset without an explicit id.
    pub problem_list: Vec<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Refuted,
    StepLimit,
    ClauseLimit,
    Saturated,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::Refuted => "refuted",
            Status::StepLimit => "step_limit",
            Status::ClauseLimit => "clause_limit",
            Status::Saturated => "saturated",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full environment state. `clauses[k].id == clauses[k].order_number == k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofState {
    pub problem_id: String,
    pub clauses: Vec<Clause>,
    pub steps_taken: usize,
    pub status: Status,
}

impl ProofState {
    pub fn has_unprocessed(&self) -> bool {
        self.clauses.iter().any(|c| !c.processed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedClause {
    pub id: usize,
    pub order_number: usize,
    pub text: String,
    /// Symbol-occurrence count.
    pub size: usize,
    pub processed: bool,
}

/// What an agent sees after reset or step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub clauses: Vec<ObservedClause>,
    /// `action_mask[k]` is true iff clause `k` may be selected.
    pub action_mask: Vec<bool>,
    pub steps_taken: usize,
    pub problem_id: String,
}

impl Observation {
    pub fn legal_actions(&self) -> impl Iterator<Item = usize> + '_ {
        self.action_mask.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepInfo {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub terminal_reason: Option<Status>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub proof_clause_ids: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    /// A proof was found.
    pub terminated: bool,
    /// A resource limit was hit or the clause set saturated.
    pub truncated: bool,
    pub info: StepInfo,
}

impl StepResult {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("problem list is empty")]
    NoProblems,
    #[error("unknown problem '{0}'")]
    UnknownProblem(String),
    #[error("problem '{problem}': {error}")]
    Parse { problem: String, error: TptpError },
    #[error("problem '{problem}' has {count} input clauses, more than max_clauses = {max}")]
    TooManyInputClauses { problem: String, count: usize, max: usize },
    #[error("step before reset")]
    NotReset,
    #[error("episode is over")]
    EpisodeOver,
    #[error("action {action} out of range (state has {len} clauses)")]
    ActionOutOfRange { action: usize, len: usize },
    #[error("clause {0} is already processed")]
    AlreadyProcessed(usize),
    #[error("clause {0} not found")]
    ClauseNotFound(usize),
    #[error("clause {0} is not empty")]
    NotEmptyClause(usize),
    #[error("script: {0}")]
    Script(String),
}

/// The reset/step contract shared by every environment implementation.
/// Agent code depends only on this trait.
pub trait Backend {
    /// Starts an episode on `problem`, or on a seeded random choice from the
    /// configured problem list when `None`.
    fn reset(&mut self, problem: Option<&str>) -> Result<Observation, EnvError>;

    fn step(&mut self, action: usize) -> Result<StepResult, EnvError>;
}

impl<B: Backend + ?Sized> Backend for &mut B {
    fn reset(&mut self, problem: Option<&str>) -> Result<Observation, EnvError> {
        (**self).reset(problem)
    }

    fn step(&mut self, action: usize) -> Result<StepResult, EnvError> {
        (**self).step(action)
    }
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn reset(&mut self, problem: Option<&str>) -> Result<Observation, EnvError> {
        (**self).reset(problem)
    }

    fn step(&mut self, action: usize) -> Result<StepResult, EnvError> {
        (**self).step(action)
    }
}

/// Ancestor closure of an empty clause under parent links, itself included.
pub fn extract_proof(state: &ProofState, empty_clause_id: usize) -> Result<BTreeSet<usize>, EnvError> {
    let find = |id: usize| state.clauses.get(id).filter(|c| c.id == id).ok_or(EnvError::ClauseNotFound(id));
    if !find(empty_clause_id)?.is_empty() {
        return Err(EnvError::NotEmptyClause(empty_clause_id));
    }
    let mut proof = BTreeSet::new();
    let mut pending = vec![empty_clause_id];
    while let Some(id) = pending.pop() {
        if proof.insert(id) {
            pending.extend(find(id)?.inference.parents().iter().copied());
        }
    }
    Ok(proof)
}
