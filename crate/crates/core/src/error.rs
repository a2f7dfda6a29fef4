use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("negative value `{0}` (utilities and bids must be nonnegative)")]
    Negative(String),

    #[error("item o_{item} has no agent with positive utility")]
    UnvaluedItem { item: usize },

    #[error("shape mismatch: expected {expected_agents}x{expected_items}, got {agents}x{items}")]
    ShapeMismatch {
        expected_agents: usize,
        expected_items: usize,
        agents: usize,
        items: usize,
    },

    #[error("agent index {index} out of range (n = {agents})")]
    AgentOutOfRange { index: usize, agents: usize },

    #[error("item index {index} out of range (m = {items})")]
    ItemOutOfRange { index: usize, items: usize },

    #[error("instance must have at least one agent")]
    NoAgents,

    #[error("invalid priority order: {0}")]
    InvalidPriority(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("work bound exceeded: {what} needs {needed} units, limit is {limit}")]
    WorkBound {
        what: String,
        needed: u128,
        limit: u64,
    },

    #[error(
        "feasibility rule {rule} returned no agent for item o_{item} despite a positive bidder"
    )]
    EmptyFeasibleSet { rule: String, item: usize },

    #[error("utilities are not 0/1 (bounded envy is only defined for binary utilities)")]
    NonBinaryUtilities,

    #[error("linear program infeasible: {0}")]
    Infeasible(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("unsatisfiable domain spec: {0}")]
    Unsatisfiable(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
