use thiserror::Error;

use crate::decompose::Stage;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input arity mismatch: expected {expected} bits, got {got}")]
    InputArity { expected: usize, got: usize },

    #[error("resource limit: {what} is {value}, cap is {cap}")]
    ResourceLimit { what: &'static str, value: usize, cap: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("composition error: {0}")]
    Composition(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{line}: {message}")]
    Semantic { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("polynomial value {value} at point {point} lies outside [{lo}, {hi}]")]
    Range { point: String, value: String, lo: i64, hi: i64 },

    #[error("circuit is not of the form SYM(AND-of-literals): {0}")]
    NotSymAnd(String),

    #[error("monomial budget exceeded: attained {attained}, budget {budget}")]
    KBudget { attained: usize, budget: usize, trace: Vec<Stage> },

    #[error("unsupported depth {depth} (limit {limit})")]
    UnsupportedDepth { depth: usize, limit: usize },

    #[error("coefficient overflow: {0}")]
    Overflow(String),

    #[error("duplicate variable x{0} in literal list")]
    DuplicateVariable(usize),

    #[error("decode error in record {record}: {message}")]
    Decode { record: u64, message: String },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("machine description error: {0}")]
    Machine(String),

    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<Error> },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
