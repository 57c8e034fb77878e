use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node index {index} out of range for graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("label {label} exceeds community count {k}")]
    LabelOutOfRange { label: usize, k: usize },

    #[error("edge probability {prob} for pair ({i}, {j}) is outside [0, 1]")]
    InvalidProbability { i: usize, j: usize, prob: f64 },

    #[error("brute-force enumeration limited to k <= {max}, got k = {k}")]
    KTooLarge { k: usize, max: usize },

    #[error("exhaustive search limited to {max} items, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("no assignment satisfies the parameter-space constraints")]
    Infeasible,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("no points outside the zero-row set")]
    EmptyInput,

    #[error("every community of the initial labeling is empty")]
    NoCommunities,

    #[error("reference leave-one-out labeling assigns every node to 0")]
    DegenerateReference,

    #[error("success probability {0} is 0 or 1; likelihood ratio undefined")]
    DegenerateProbability(f64),

    #[error("no results to summarize")]
    EmptyResults,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
