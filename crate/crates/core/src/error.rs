use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coding vector length {got} does not match block size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("erasure probability {0} outside [0, 1)")]
    InvalidErasureProb(f64),

    #[error("slot {got} does not advance past slot {last}")]
    SlotRegression { last: u32, got: u32 },

    #[error("block incomplete: receiver {receiver} still wants {missing} packet(s)")]
    IncompleteBlock { receiver: usize, missing: usize },

    #[error("instance has no wanted packets")]
    NoWantedPackets,

    #[error("hypergraph has no hyperedges")]
    EmptyHypergraph,

    #[error("instance too large for exhaustive search: {what} = {got}, limit {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("wants sizes are not uniform: saw both {a} and {b}")]
    NonUniformWants { a: usize, b: usize },

    #[error("coding set brings no new information to receiver {receiver}")]
    UselessCodingSet { receiver: usize },

    #[error("no innovative coefficients found after {attempts} attempts")]
    CoefficientSearchExhausted { attempts: u32 },

    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),

    #[error("invalid hypergraph line {line}: {reason}")]
    BadHypergraphLine { line: usize, reason: String },
}
