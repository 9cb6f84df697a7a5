use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("term count {count} exceeds the cap of {cap}")]
    TermCap { count: usize, cap: usize },
    #[error("basis size {size} exceeds the cap of {cap}")]
    BasisCap { size: usize, cap: usize },
    #[error("free product space dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("result needs a tensor longer than the truncation depth {depth}")]
    DepthOverflow { depth: usize },
    #[error("unknown component {0}")]
    UnknownComponent(usize),
    #[error("component {algebra_id} has no generator {local_id}")]
    UnknownGenerator { algebra_id: usize, local_id: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("expected a polynomial in positive-face letters only")]
    NotPositiveFace,
    #[error("index pattern {0:?} is not alternating")]
    NotAlternating(Vec<usize>),
    #[error("all Schmidt weights are zero")]
    ZeroWeights,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("cannot parse word: {0}")]
    WordSyntax(String),
}

pub type Result<T> = std::result::Result<T, Error>;
