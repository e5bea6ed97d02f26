//! Logistic-regression Q-value function and its persistence format.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{FeatureConfig, FeatureVector};
use super::{AgentError, Transition};

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QModel {
    pub weights: [f64; 2],
    pub bias: f64,
}

/// Partial derivatives of the batch loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub weights: [f64; 2],
    pub bias: f64,
}

impl QModel {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn logit(&self, f: &FeatureVector) -> f64 {
        self.weights[0] * f.0[0] + self.weights[1] * f.0[1] + self.bias
    }

    pub fn q_value(&self, f: &FeatureVector) -> f64 {
        sigmoid(self.logit(f))
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite()) && self.bias.is_finite()
    }

    /// Mean squared error between q-values and distributed rewards.
    pub fn loss(&self, batch: &[Transition]) -> f64 {
        if batch.is_empty() {
            return 0.0;
        }
        batch.iter().map(|t| (self.q_value(&t.features) - t.distributed_reward).powi(2)).sum::<f64>()
            / batch.len() as f64
    }

    pub fn gradient(&self, batch: &[Transition]) -> Gradient {
        let mut g = Gradient { weights: [0.0; 2], bias: 0.0 };
        if batch.is_empty() {
            return g;
        }
        for t in batch {
            let q = self.q_value(&t.features);
            let dz = 2.0 * (q - t.distributed_reward) * q * (1.0 - q);
            g.weights[0] += dz * t.features.0[0];
            g.weights[1] += dz * t.features.0[1];
            g.bias += dz;
        }
        let n = batch.len() as f64;
        g.weights[0] /= n;
        g.weights[1] /= n;
        g.bias /= n;
        g
    }

    /// One gradient-descent step on [`QModel::loss`].
    pub fn update(&self, batch: &[Transition], learning_rate: f64) -> Result<QModel, AgentError> {
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(AgentError::InvalidConfig(format!("learning rate must be positive, got {learning_rate}")));
        }
        let g = self.gradient(batch);
        if !(g.weights.iter().all(|x| x.is_finite()) && g.bias.is_finite()) {
            return Err(AgentError::NonFiniteGradient);
        }
        let next = QModel {
            weights: [self.weights[0] - learning_rate * g.weights[0], self.weights[1] - learning_rate * g.weights[1]],
            bias: self.bias - learning_rate * g.bias,
        };
        if !next.is_finite() {
            return Err(AgentError::NonFiniteGradient);
        }
        Ok(next)
    }
}

/// On-disk model: `{"version":1,"weights":[w1,w2],"bias":b,"s_cap":S,"max_clauses":M}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: u32,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub s_cap: usize,
    pub max_clauses: usize,
}

pub const MODEL_VERSION: u32 = 1;

impl ModelFile {
    pub fn new(model: &QModel, features: &FeatureConfig) -> Self {
        ModelFile {
            version: MODEL_VERSION,
            weights: model.weights.to_vec(),
            bias: model.bias,
            s_cap: features.size_cap,
            max_clauses: features.max_clauses,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model file serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, AgentError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| AgentError::ModelFile(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), AgentError> {
        if self.version != MODEL_VERSION {
            return Err(AgentError::ModelFile(format!("unsupported version {}", self.version)));
        }
        if self.weights.len() != 2 {
            return Err(AgentError::ModelFile(format!("expected 2 weights, found {}", self.weights.len())));
        }
        if !self.weights.iter().chain([&self.bias]).all(|x| x.is_finite()) {
            return Err(AgentError::ModelFile("non-finite parameter".into()));
        }
        if self.s_cap == 0 || self.max_clauses == 0 {
            return Err(AgentError::ModelFile("s_cap and max_clauses must be positive".into()));
        }
        Ok(())
    }

    pub fn model(&self) -> QModel {
        QModel { weights: [self.weights[0], self.weights[1]], bias: self.bias }
    }

    pub fn features(&self) -> FeatureConfig {
        FeatureConfig::new(self.s_cap, self.max_clauses)
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        fs::write(path, self.to_json() + "\n").map_err(|e| AgentError::ModelFile(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, AgentError> {
        let text = fs::read_to_string(path).map_err(|e| AgentError::ModelFile(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
