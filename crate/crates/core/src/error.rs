use std::fmt;

use thiserror::Error;

use crate::graph::GraphError;

/// Graph classes for which the pipeline guarantees an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphClass {
    ClawOddHoleFree,
    ForkOddHoleFree,
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphClass::ClawOddHoleFree => f.write_str("(claw, odd hole)-free"),
            GraphClass::ForkOddHoleFree => f.write_str("(fork, odd hole)-free"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    /// The input was shown not to belong to the class.
    #[error("graph is not {class}: {reason}")]
    NotInClass { class: GraphClass, reason: String },
    #[error("sampler exceeded its budget of {budget} steps (needed about {needed})")]
    BudgetExceeded { budget: u64, needed: u64 },
    #[error("instance of size {n} exceeds the oracle cap {cap}")]
    OracleCap { n: usize, cap: usize },
    #[error("invalid input: {0}")]
    Input(String),
}

impl CountError {
    pub(crate) fn reject(class: GraphClass, reason: impl Into<String>) -> Self {
        CountError::NotInClass {
            class,
            reason: reason.into(),
        }
    }

    /// Re-tags a class rejection, keeping the reason.
    pub(crate) fn reclass(self, class: GraphClass) -> Self {
        match self {
            CountError::NotInClass { reason, .. } => CountError::NotInClass { class, reason },
            other => other,
        }
    }
}

impl From<GraphError> for CountError {
    fn from(e: GraphError) -> Self {
        CountError::Input(e.to_string())
    }
}
