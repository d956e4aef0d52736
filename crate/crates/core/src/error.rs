use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid color {ch:?} at position {pos} (r = {r})")]
    InvalidColor { pos: usize, ch: char, r: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("oracle guard: n = {0} exceeds brute-force limit {1}")]
    OracleGuard(usize, usize),

    #[error("unknown witness {0:?}")]
    UnknownWitness(String),

    #[error("witness parameter out of range: {0}")]
    WitnessParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
