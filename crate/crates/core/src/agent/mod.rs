//! Clause-selection agent: features, logistic Q-model, epsilon-greedy
//! policy, replay buffer and trainer.

mod buffer;
mod features;
mod model;
mod policy;
mod trainer;

use thiserror::Error;

use crate::env::EnvError;

pub use buffer::{EpisodeRecord, EpisodeStep, ReplayBuffer, Transition};
pub use features::{featurize, featurize_observed, FeatureConfig, FeatureVector, DEFAULT_SIZE_CAP};
pub use model::{sigmoid, Gradient, ModelFile, QModel, MODEL_VERSION};
pub use policy::select_action;
pub use trainer::{evaluate, play_episode, train, EpisodeLog, EpisodeOutcome, TrainConfig, TrainOutput};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("no legal action")]
    NoLegalAction,
    #[error("replay buffer is empty")]
    EmptyBuffer,
    #[error("successful episode has no step selecting a proof clause")]
    MissingProof,
    #[error("non-finite gradient or parameter")]
    NonFiniteGradient,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("model file: {0}")]
    ModelFile(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}
