use rand::Rng;

use super::features::{featurize_observed, FeatureConfig};
use super::model::QModel;
use super::AgentError;
use crate::env::Observation;

/// Epsilon-greedy clause selection.
///
/// With probability `epsilon` a legal clause is drawn uniformly; otherwise
/// the legal clause with the highest q-value wins, ties going to the lowest
/// index. No randomness is consumed when `epsilon == 0`.
pub fn select_action<R: Rng + ?Sized>(
    model: &QModel,
    obs: &Observation,
    epsilon: f64,
    features: &FeatureConfig,
    rng: &mut R,
) -> Result<usize, AgentError> {
    let legal: Vec<usize> = obs.legal_actions().collect();
    if legal.is_empty() {
        return Err(AgentError::NoLegalAction);
    }
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return Ok(legal[rng.gen_range(0..legal.len())]);
    }
    Ok(greedy(model, obs, &legal, features))
}

fn greedy(model: &QModel, obs: &Observation, legal: &[usize], features: &FeatureConfig) -> usize {
    // Compare logits: sigmoid saturates to equal values far from zero.
    let mut best = legal[0];
    let mut best_value = f64::NEG_INFINITY;
    for &i in legal {
        let value = model.logit(&featurize_observed(&obs.clauses[i], features));
        if value > best_value {
            best = i;
            best_value = value;
        }
    }
    best
}
