//! Reinforcement-learning environment for given-clause saturation over TPTP
//! CNF problems, with a linear Q-learning clause-selection agent.
//!
//! - [`tptp`] reads and writes the CNF fragment of TPTP.
//! - [`logic`] holds unification, resolution and factoring.
//! - [`env`] is the reset/step environment and its backends.
//! - [`agent`] is the learner: features, Q-model, replay buffer, trainer.
//! - [`protocol`] serves the environment as line-delimited JSON.
//! - [`corpus`] generates synthetic problem families.

pub mod agent;
pub mod corpus;
pub mod env;
pub mod logic;
pub mod protocol;
pub mod syntax;
pub mod tptp;
