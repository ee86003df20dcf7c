use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("truncation too shallow: order {order} needs radius {needed}, graph certifies {available}")]
    TruncationTooShallow {
        order: usize,
        needed: usize,
        available: usize,
    },
    #[error("vertex budget exceeded: construction needs {needed} vertices, budget is {budget}")]
    VertexBudgetExceeded { needed: u128, budget: usize },
    #[error("walk count overflow at order {order}")]
    WalkCountOverflow { order: usize },
    #[error("negative omega at index {index}: {value}")]
    NegativeOmega { index: usize, value: String },
    #[error("inconsistent moments: omega vanishes at index {index} but higher moments do not terminate")]
    InconsistentTermination { index: usize },
    #[error("moment sequence must start with M0 = 1")]
    NotNormalized,
    #[error("order {requested} exceeds available order {available}")]
    OrderTooHigh { requested: usize, available: usize },
    #[error("branch ambiguity at z = {re} + {im}i")]
    BranchAmbiguity { re: f64, im: f64 },
    #[error("not a vacuum vector: A- has nonzero component at vertex {vertex}")]
    NotVacuum { vertex: usize },
    #[error("not a J-vacuum: eigen-relation fails at step {step}")]
    NotJVacuum { step: usize },
    #[error("depth {requested} exceeds certified depth {available}")]
    DepthExceeded { requested: usize, available: usize },
    #[error("vector is not supported in a single level")]
    MixedLevels,
    #[error("zero vector")]
    ZeroVector,
    #[error("unknown vertex word {0}")]
    UnknownWord(String),
}
