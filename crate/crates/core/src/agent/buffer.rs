//! Replay memory holding successful episodes only.

use std::collections::{BTreeSet, VecDeque};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::{featurize_observed, FeatureConfig, FeatureVector};
use super::AgentError;
use crate::env::ObservedClause;

/// One action of an episode: the selected clause as it was observed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeStep {
    pub action: usize,
    pub selected: ObservedClause,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub features: FeatureVector,
    pub distributed_reward: f64,
    pub problem_id: String,
    pub episode_index: usize,
    pub step_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub transitions: Vec<Transition>,
    pub final_reward: f64,
    pub proof_ids: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayBuffer {
    episodes: VecDeque<EpisodeRecord>,
    capacity: usize,
    insertion_counter: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self, AgentError> {
        if capacity == 0 {
            return Err(AgentError::InvalidConfig("buffer capacity must be positive".into()));
        }
        Ok(ReplayBuffer { episodes: VecDeque::with_capacity(capacity), capacity, insertion_counter: 0 })
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of episodes ever stored, evicted ones included.
    pub fn insertion_counter(&self) -> usize {
        self.insertion_counter
    }

    /// Oldest first.
    pub fn episodes(&self) -> impl Iterator<Item = &EpisodeRecord> {
        self.episodes.iter()
    }

    /// Stores a successful episode with its reward spread evenly over the
    /// steps that selected proof clauses; other steps get zero. Episodes with
    /// non-positive reward are ignored. Returns whether the episode was
    /// stored.
    pub fn record_episode(
        &mut self,
        problem_id: &str,
        steps: &[EpisodeStep],
        final_reward: f64,
        proof_ids: Option<&BTreeSet<usize>>,
        features: &FeatureConfig,
    ) -> Result<bool, AgentError> {
        if final_reward <= 0.0 {
            return Ok(false);
        }
        let proof = proof_ids.ok_or(AgentError::MissingProof)?;
        let in_proof = steps.iter().filter(|s| proof.contains(&s.selected.id)).count();
        if in_proof == 0 {
            return Err(AgentError::MissingProof);
        }
        let share = final_reward / in_proof as f64;
        let episode_index = self.insertion_counter;
        let transitions = steps
            .iter()
            .enumerate()
            .map(|(step_index, s)| Transition {
                features: featurize_observed(&s.selected, features),
                distributed_reward: if proof.contains(&s.selected.id) { share } else { 0.0 },
                problem_id: problem_id.to_owned(),
                episode_index,
                step_index,
            })
            .collect();
        if self.episodes.len() == self.capacity {
            self.episodes.pop_front();
        }
        self.episodes.push_back(EpisodeRecord { transitions, final_reward, proof_ids: proof.clone() });
        self.insertion_counter += 1;
        Ok(true)
    }

    /// Draws `batch_size` transitions with replacement. The episode at
    /// position `k` (0 = oldest) is chosen with weight `k + 1`; a step is
    /// then chosen uniformly within it.
    pub fn sample_batch<R: Rng + ?Sized>(&self, batch_size: usize, rng: &mut R) -> Result<Vec<Transition>, AgentError> {
        if self.episodes.is_empty() {
            return Err(AgentError::EmptyBuffer);
        }
        let weights = WeightedIndex::new(1..=self.episodes.len()).expect("positive weights");
        let mut batch = Vec::with_capacity(batch_size);
        for _ in 0..batch_size {
            let episode = &self.episodes[weights.sample(rng)];
            let step = rng.gen_range(0..episode.transitions.len());
            batch.push(episode.transitions[step].clone());
        }
        Ok(batch)
    }
}
