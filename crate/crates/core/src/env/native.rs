use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    extract_proof, Backend, EnvConfig, EnvError, Observation, ObservedClause, ProblemLibrary, ProofState, Status,
    StepInfo, StepResult,
};
use crate::logic::{generate_inferences_excluding, variant_key, VariantKey};
use crate::syntax::Clause;
use crate::tptp::serialize_clause;

/// The built-in saturation engine: binary resolution and factoring over the
/// processed clauses.
pub struct NativeEnv {
    config: EnvConfig,
    library: Arc<ProblemLibrary>,
    rng: ChaCha8Rng,
    state: Option<ProofState>,
    // Rendered clause text, aligned with `state.clauses`.
    texts: Vec<String>,
    // Variant keys of every clause in the state; new clauses matching one are dropped.
    seen: HashSet<VariantKey>,
}

impl NativeEnv {
    pub fn new(config: EnvConfig, library: Arc<ProblemLibrary>) -> Result<Self, EnvError> {
        if config.step_limit == 0 {
            return Err(EnvError::InvalidConfig("step_limit must be at least 1".into()));
        }
        if config.max_clauses == 0 {
            return Err(EnvError::InvalidConfig("max_clauses must be at least 1".into()));
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(NativeEnv { config, library, rng, state: None, texts: Vec::new(), seen: HashSet::new() })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn library(&self) -> &ProblemLibrary {
        &self.library
    }

    pub fn state(&self) -> Option<&ProofState> {
        self.state.as_ref()
    }

    fn choose_problem(&mut self) -> Result<String, EnvError> {
        let list = &self.config.problem_list;
        if list.is_empty() {
            return Err(EnvError::NoProblems);
        }
        Ok(list[self.rng.gen_range(0..list.len())].clone())
    }

    fn admit(&mut self, mut clause: Clause) {
        let state = self.state.as_mut().expect("admit during an episode");
        let id = state.clauses.len();
        clause.id = id;
        clause.order_number = id;
        clause.processed = false;
        if clause.label.is_empty() {
            clause.label = format!("c{id}");
        }
        self.texts.push(serialize_clause(&clause));
        state.clauses.push(clause);
    }

    fn observation(&self) -> Observation {
        let state = self.state.as_ref().expect("observation during an episode");
        let running = state.status == Status::Running;
        Observation {
            clauses: state
                .clauses
                .iter()
                .zip(&self.texts)
                .map(|(c, text)| ObservedClause {
                    id: c.id,
                    order_number: c.order_number,
                    text: text.clone(),
                    size: c.size(),
                    processed: c.processed,
                })
                .collect(),
            action_mask: state.clauses.iter().map(|c| running && !c.processed).collect(),
            steps_taken: state.steps_taken,
            problem_id: state.problem_id.clone(),
        }
    }
}

impl Backend for NativeEnv {
    fn reset(&mut self, problem: Option<&str>) -> Result<Observation, EnvError> {
        let problem_id = match problem {
            Some(id) => id.to_owned(),
            None => self.choose_problem()?,
        };
        let set = self
            .library
            .parse(&problem_id)
            .ok_or_else(|| EnvError::UnknownProblem(problem_id.clone()))?
            .map_err(|error| EnvError::Parse { problem: problem_id.clone(), error })?;
        if set.len() > self.config.max_clauses {
            return Err(EnvError::TooManyInputClauses {
                problem: problem_id,
                count: set.len(),
                max: self.config.max_clauses,
            });
        }
        self.texts.clear();
        self.seen.clear();
        self.state = Some(ProofState {
            problem_id,
            clauses: Vec::with_capacity(set.len()),
            steps_taken: 0,
            status: Status::Running,
        });
        for clause in set.clauses {
            self.seen.insert(variant_key(&clause));
            self.admit(clause);
        }
        Ok(self.observation())
    }

    fn step(&mut self, action: usize) -> Result<StepResult, EnvError> {
        let state = self.state.as_mut().ok_or(EnvError::NotReset)?;
        if state.status != Status::Running {
            return Err(EnvError::EpisodeOver);
        }
        let len = state.clauses.len();
        let given = state.clauses.get_mut(action).ok_or(EnvError::ActionOutOfRange { action, len })?;
        if given.processed {
            return Err(EnvError::AlreadyProcessed(action));
        }
        given.processed = true;
        state.steps_taken += 1;

        if state.clauses[action].is_empty() {
            state.status = Status::Refuted;
            let proof = extract_proof(state, action)?;
            return Ok(StepResult {
                observation: self.observation(),
                reward: 1.0,
                terminated: true,
                truncated: false,
                info: StepInfo {
                    terminal_reason: Some(Status::Refuted),
                    proof_clause_ids: Some(proof.into_iter().collect()),
                },
            });
        }

        let given = &state.clauses[action];
        let partners: Vec<&Clause> = state.clauses.iter().filter(|c| c.processed).collect();
        let new = generate_inferences_excluding(given, &partners, &mut self.seen);
        for clause in new {
            self.admit(clause);
        }

        let state = self.state.as_mut().expect("episode running");
        state.status = if state.steps_taken >= self.config.step_limit {
            Status::StepLimit
        } else if state.clauses.len() >= self.config.max_clauses {
            Status::ClauseLimit
        } else if !state.has_unprocessed() {
            Status::Saturated
        } else {
            Status::Running
        };
        let status = state.status;
        Ok(StepResult {
            observation: self.observation(),
            reward: 0.0,
            terminated: false,
            truncated: status != Status::Running,
            info: StepInfo { terminal_reason: (status != Status::Running).then_some(status), proof_clause_ids: None },
        })
    }
}
