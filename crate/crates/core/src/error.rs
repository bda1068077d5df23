use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("{what} = {value} is out of the supported range {range}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate label {label:?} in {axis}")]
    DuplicateLabel { axis: &'static str, label: String },

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry {
        row: String,
        col: String,
        value: String,
    },

    #[error("ill-formed protocol: {0}")]
    IllFormedProtocol(String),

    #[error("edge {0} is empty and cannot be covered")]
    EmptyEdge(String),

    #[error("fractional cover is infeasible: edge {0} is covered with weight < 1")]
    InfeasibleCover(String),

    #[error("T_{k} does not cover matching {matching}")]
    UncoveredMatching { k: usize, matching: String },

    #[error("not a sorting network")]
    NotSortingNetwork,

    #[error("point violates {0}")]
    Infeasible(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub(crate) fn out_of_range(what: &'static str, value: usize, range: impl Into<String>) -> Error {
    Error::OutOfRange {
        what,
        value: value as i64,
        range: range.into(),
    }
}
