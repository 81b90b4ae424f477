use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight at index {0} is negative")]
    NegativeWeight(usize),
    #[error("weights sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("loss at index {index} is {value}, expected a finite value in [0, 1]")]
    LossOutOfRange { index: usize, value: f64 },
    #[error("need at least 2 experts, got {0}")]
    TooFewExperts(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("empty trace")]
    EmptyTrace,
    #[error("invalid round index {0}, rounds start at 1")]
    InvalidRound(u64),
    #[error("round {got} presented out of order, expected round {expected}")]
    OutOfOrderRound { expected: u64, got: u64 },
    #[error("round {0} is missing the previous round's loss vector")]
    MissingLoss(u64),
    #[error("invalid learning-rate schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid learning rate {0}")]
    InvalidEta(f64),
    #[error("unknown learner: {0}")]
    UnknownLearner(String),
    #[error("unknown instance: {0}")]
    UnknownInstance(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("gap is undefined for instance {0}")]
    UndefinedGap(String),
    #[error("instance {0} has no declared best expert")]
    UndeclaredBestExpert(String),
    #[error("expert {0} has non-positive estimated gap to the best expert")]
    ZeroGapDivision(usize),
    #[error("instance {0} is not i.i.d. over rounds")]
    NotIid(String),
    #[error("invalid horizon {0}, need T >= 1")]
    InvalidHorizon(u64),
    #[error("invalid trial count {0}, need N >= 1")]
    InvalidTrials(usize),
    #[error("checkpoint grids differ between trials")]
    GridMismatch,
    #[error("unknown bound: {0}")]
    UnknownBound(String),
    #[error("bound {id} needs parameter {param}")]
    MissingParameter { id: String, param: &'static str },
    #[error("bound {id} is outside its validity domain: {condition}")]
    OutOfValidityDomain { id: String, condition: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
