//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by graph construction, model specification, estimation
/// and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range 1..={count}")]
    NodeOutOfRange { index: usize, count: usize },

    #[error("self-loop on node {node} is not allowed")]
    SelfLoop { node: usize },

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("community label {label} out of range 1..={count}")]
    CommunityOutOfRange { label: usize, count: usize },

    #[error("interaction mask needs two distinct communities; use the community mask for c = {community}")]
    InteractionSameCommunity { community: usize },

    #[error("invalid model order: {0}")]
    InvalidOrder(String),

    #[error("parameter vector length {got} does not match layout length {expected}")]
    ParameterLength { expected: usize, got: usize },

    #[error("stage adjacency only available up to r = {available}, but r = {requested} required")]
    StageShortage { requested: usize, available: usize },

    #[error("companion stationarity check requires static weights")]
    TimeVaryingWeights,

    #[error("simulation produced a non-finite value at t = {t} (node {node}); coefficients are likely explosive")]
    ExplosiveSimulation { t: i64, node: usize },

    #[error("realization too short: T = {len} with maximum lag p = {max_lag}")]
    RealizationTooShort { len: usize, max_lag: usize },

    #[error("community {community} is empty but has a nonzero model order")]
    EmptyCommunity { community: usize },

    #[error("design matrix is rank deficient; dependent columns: {columns}")]
    RankDeficient { columns: String },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("Gram matrix block for community {community} has a nonpositive eigenvalue floor")]
    NonPositiveTau { community: usize },

    #[error("series for node {node} is constant; cannot normalize")]
    ConstantSeries { node: usize },

    #[error("standardization window must satisfy 2 <= T0 <= T, got T0 = {t0}, T = {len}")]
    BadWindow { t0: usize, len: usize },

    #[error("differencing lag {lag} requires more than {lag} observations, got {len}")]
    DifferenceTooShort { lag: usize, len: usize },

    #[error("VAR({p}) on {d} nodes is underdetermined with T = {len} observations")]
    Underdetermined { p: usize, d: usize, len: usize },

    #[error("periodic weights preset expects a 3-community partition, got C = {got}")]
    PresetCommunities { got: usize },

    #[error("unknown node label `{0}`")]
    UnknownLabel(String),

    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Invalid(String),
}
