use serde::{Deserialize, Serialize};

use crate::env::{EnvConfig, ObservedClause};
use crate::syntax::Clause;

pub const DEFAULT_SIZE_CAP: usize = 64;

/// Normalisation constants for clause features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Sizes at or above this map to 1.0.
    pub size_cap: usize,
    /// Divisor for order numbers.
    pub max_clauses: usize,
}

impl FeatureConfig {
    pub fn new(size_cap: usize, max_clauses: usize) -> Self {
        FeatureConfig { size_cap: size_cap.max(1), max_clauses: max_clauses.max(1) }
    }

    pub fn for_env(config: &EnvConfig) -> Self {
        Self::new(DEFAULT_SIZE_CAP, config.max_clauses)
    }

    pub fn vector(&self, size: usize, order_number: usize) -> FeatureVector {
        let cap = self.size_cap as f64;
        let size = (size as f64).min(cap) / cap;
        // Clause-limit overshoot can push order numbers past max_clauses.
        let order = (order_number as f64 / self.max_clauses as f64).min(1.0);
        FeatureVector([size, order])
    }
}

/// `[normalised size, normalised order number]`, both in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; 2]);

impl FeatureVector {
    pub fn values(&self) -> &[f64; 2] {
        &self.0
    }
}

pub fn featurize(clause: &Clause, config: &FeatureConfig) -> FeatureVector {
    config.vector(clause.size(), clause.order_number)
}

pub fn featurize_observed(clause: &ObservedClause, config: &FeatureConfig) -> FeatureVector {
    config.vector(clause.size, clause.order_number)
}
