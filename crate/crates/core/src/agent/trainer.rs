//! Episode loop: act, store successful episodes, regress on replayed steps.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::buffer::{EpisodeStep, ReplayBuffer};
use super::features::{FeatureConfig, DEFAULT_SIZE_CAP};
use super::model::QModel;
use super::policy::select_action;
use super::AgentError;
use crate::env::{Backend, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub episodes: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Share of the episodes over which epsilon anneals linearly.
    pub eps_decay_fraction: f64,
    pub batch_size: usize,
    pub updates_per_episode: usize,
    pub buffer_capacity: usize,
    pub learning_rate: f64,
    pub size_cap: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            episodes: 200,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_fraction: 0.8,
            batch_size: 32,
            updates_per_episode: 20,
            buffer_capacity: 100,
            learning_rate: 1.0,
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

impl TrainConfig {
    pub fn epsilon(&self, episode: usize) -> f64 {
        let span = self.eps_decay_fraction * self.episodes as f64;
        let progress = if span > 0.0 { (episode as f64 / span).min(1.0) } else { 1.0 };
        self.eps_start * (1.0 - progress) + self.eps_end * progress
    }

    fn validate(&self) -> Result<(), AgentError> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.eps_start) || !unit(self.eps_end) || !unit(self.eps_decay_fraction) {
            return Err(AgentError::InvalidConfig("epsilon schedule values must lie in [0, 1]".into()));
        }
        if self.batch_size == 0 {
            return Err(AgentError::InvalidConfig("batch size must be positive".into()));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(AgentError::InvalidConfig("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Result of playing one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub problem_id: String,
    pub steps: Vec<EpisodeStep>,
    pub status: Status,
    pub final_reward: f64,
    pub proof_ids: Option<BTreeSet<usize>>,
    /// Proof-state size when the episode ended.
    pub clause_count: usize,
}

impl EpisodeOutcome {
    pub fn solved(&self) -> bool {
        self.status == Status::Refuted
    }
}

/// Plays one epsilon-greedy episode to its end.
pub fn play_episode<B, R>(
    env: &mut B,
    problem: Option<&str>,
    model: &QModel,
    features: &FeatureConfig,
    epsilon: f64,
    rng: &mut R,
) -> Result<EpisodeOutcome, AgentError>
where
    B: Backend + ?Sized,
    R: Rng + ?Sized,
{
    let mut obs = env.reset(problem)?;
    let mut outcome = EpisodeOutcome {
        problem_id: obs.problem_id.clone(),
        steps: Vec::new(),
        status: Status::Saturated,
        final_reward: 0.0,
        proof_ids: None,
        clause_count: obs.clauses.len(),
    };
    if obs.legal_actions().next().is_none() {
        return Ok(outcome);
    }
    loop {
        let action = select_action(model, &obs, epsilon, features, rng)?;
        outcome.steps.push(EpisodeStep { action, selected: obs.clauses[action].clone() });
        let result = env.step(action)?;
        outcome.final_reward += result.reward;
        outcome.clause_count = result.observation.clauses.len();
        if result.done() {
            outcome.status = result.info.terminal_reason.unwrap_or(Status::Saturated);
            outcome.proof_ids = result.info.proof_clause_ids.map(|ids| ids.into_iter().collect());
            return Ok(outcome);
        }
        obs = result.observation;
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub problem: String,
    pub terminal: Status,
    pub steps: usize,
    pub clauses: usize,
    pub buffer_size: usize,
    pub epsilon: f64,
}

pub struct TrainOutput {
    pub model: QModel,
    pub log: Vec<EpisodeLog>,
    pub buffer: ReplayBuffer,
}

/// Runs `config.episodes` episodes from `initial`. After each episode the
/// model takes `updates_per_episode` gradient steps on batches sampled from
/// the buffer, if it holds anything.
pub fn train<B, R>(
    env: &mut B,
    config: &TrainConfig,
    features: &FeatureConfig,
    initial: QModel,
    rng: &mut R,
) -> Result<TrainOutput, AgentError>
where
    B: Backend + ?Sized,
    R: Rng + ?Sized,
{
    config.validate()?;
    let mut model = initial;
    let mut buffer = ReplayBuffer::new(config.buffer_capacity)?;
    let mut log = Vec::with_capacity(config.episodes);
    for episode in 0..config.episodes {
        let epsilon = config.epsilon(episode);
        let outcome = play_episode(env, None, &model, features, epsilon, rng)?;
        buffer.record_episode(
            &outcome.problem_id,
            &outcome.steps,
            outcome.final_reward,
            outcome.proof_ids.as_ref(),
            features,
        )?;
        if !buffer.is_empty() {
            for _ in 0..config.updates_per_episode {
                let batch = buffer.sample_batch(config.batch_size, rng)?;
                model = model.update(&batch, config.learning_rate)?;
            }
        }
        log.push(EpisodeLog {
            episode,
            problem: outcome.problem_id,
            terminal: outcome.status,
            steps: outcome.steps.len(),
            clauses: outcome.clause_count,
            buffer_size: buffer.len(),
            epsilon,
        });
    }
    Ok(TrainOutput { model, log, buffer })
}

/// Plays one episode per problem. Per-problem failures (e.g. parse errors)
/// are reported in place rather than aborting the run.
pub fn evaluate<B, R>(
    env: &mut B,
    problems: &[String],
    model: &QModel,
    features: &FeatureConfig,
    epsilon: f64,
    rng: &mut R,
) -> Vec<(String, Result<EpisodeOutcome, AgentError>)>
where
    B: Backend + ?Sized,
    R: Rng + ?Sized,
{
    problems.iter().map(|id| (id.clone(), play_episode(env, Some(id), model, features, epsilon, rng))).collect()
}
