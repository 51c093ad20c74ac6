use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("conflicting assignment: node {node} assigned colors {first} and {second}")]
    ConflictingAssignment { node: usize, first: usize, second: usize },

    #[error("color {color} out of range for K = {k}")]
    ColorOutOfRange { color: usize, k: usize },

    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("mismatched color counts: {left} vs {right}")]
    MismatchedColorCount { left: usize, right: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("not a hard-core decoration: {0}")]
    NotHardcore(String),

    #[error("enumeration budget exceeded: {required} configurations, budget {budget}")]
    BudgetExceeded { required: String, budget: u128 },

    #[error("Gibbs measure undefined: partition function is zero")]
    ZeroPartition,

    #[error("conditioning event has probability zero")]
    ZeroProbabilityCondition,

    #[error("all boundary conditions infeasible")]
    AllBoundaryInfeasible,

    #[error("constant term vanishes; Roots undefined")]
    VanishingConstantTerm,

    #[error("pattern too large: {nodes} nodes, limit {limit}")]
    PatternTooLarge { nodes: usize, limit: usize },

    #[error("pattern must be connected")]
    DisconnectedPattern,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::PatternTooLarge { .. })
    }

    pub(crate) fn budget(required: impl ToString, budget: u128) -> Self {
        Error::BudgetExceeded {
            required: required.to_string(),
            budget,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
