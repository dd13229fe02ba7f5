//! Guards for the stages whose cost can grow exponentially with the model.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("{stage}: lasso did not close within {limit} supports")]
    LassoTooLong { stage: &'static str, limit: usize },
    #[error("{stage}: subset search over {width} target states exceeds the limit of {limit}")]
    SubsetSearchTooWide {
        stage: &'static str,
        width: usize,
        limit: usize,
    },
    #[error("strategy enumeration needs {needed} nodes, budget is {budget}")]
    EnumerationBudget { needed: String, budget: u64 },
}

impl GuardError {
    pub fn stage(&self) -> &'static str {
        match self {
            GuardError::LassoTooLong { stage, .. } => stage,
            GuardError::SubsetSearchTooWide { stage, .. } => stage,
            GuardError::EnumerationBudget { .. } => "strategy enumeration",
        }
    }
}

/// Thresholds for the exponential stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Longest predecessor or support lasso that is materialized.
    pub max_lasso: usize,
    /// Largest target set whose subsets are searched.
    pub max_subset_width: usize,
    /// Node budget for pure-strategy enumeration.
    pub enumeration_budget: u64,
    /// Bit size above which closed-form bounds are reported by formula only.
    pub bound_bits_cap: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_lasso: 1 << 20,
            max_subset_width: 16,
            enumeration_budget: 1_000_000,
            bound_bits_cap: 1 << 24,
        }
    }
}
