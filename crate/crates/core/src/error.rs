use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("{what} = {value} exceeds the limit of {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("submodular minimization did not converge within {0} major cycles")]
    SfmNoConvergence(usize),

    #[error("network is not fully connected")]
    NotFullyConnected,

    #[error("schedule does not permit universal recovery")]
    InfeasibleSchedule,

    #[error("random coding failed after {attempts} attempts; node ranks {ranks:?} (need {k})")]
    CodingFailed {
        attempts: usize,
        ranks: Vec<usize>,
        k: usize,
    },

    #[error("transmission {index} by node {node} in round {round} is not in the sender's span")]
    CausalityViolation {
        index: usize,
        node: usize,
        round: usize,
    },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("scheme does not achieve recovery; node ranks {0:?}")]
    NoRecovery(Vec<usize>),

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program: {0}")]
    Lp(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("property violated: {0}")]
    PropertyViolation(String),

    #[error("rejection sampling gave up after {0} resamples")]
    SamplingCap(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
