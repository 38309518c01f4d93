use thiserror::Error;

/// Errors produced by graph ingestion, feature learning and role assignment.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: u64 },

    #[error("line {line}: weight must be positive, got {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("line {line}: malformed token {token:?}")]
    Malformed { line: usize, token: String },

    #[error("line {line}: expected 2 or 3 columns, found {found}")]
    ColumnCount { line: usize, found: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("permutation is not a bijection on 0..{n}")]
    NotBijection { n: usize },

    #[error("unknown {what} {name:?}")]
    Unknown { what: &'static str, name: String },

    #[error("feature id {id} out of range (have {count} features)")]
    FeatureOutOfRange { id: usize, count: usize },

    #[error("malformed descriptor list: {0}")]
    MalformedDescriptors(String),

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("rank {rank} outside 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("matrix has a negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph too large for brute-force oracle: n = {n} > {max}")]
    OracleTooLarge { n: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
