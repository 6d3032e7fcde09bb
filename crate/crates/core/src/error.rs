use alloc::string::String;

/// Errors raised by the engine. Every variant is a contract violation by the
/// caller or a numerical precondition failure; none is retried internally.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate system label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown system label `{0}`")]
    UnknownLabel(String),
    #[error("invalid system `{name}`: {reason}")]
    InvalidSystem { name: String, reason: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("subsystem sets overlap on `{0}`")]
    OverlappingSets(String),
    #[error("no overlapping subsystem between perspective and state")]
    NoOverlap,
    #[error("record register `{0}` collides with an existing system")]
    RecordCollision(String),
    #[error("conditioning on `{register}` = {outcome} has zero probability ({probability:e})")]
    ZeroProbability {
        register: String,
        outcome: usize,
        probability: f64,
    },
    #[error("size cap exceeded: {requested} qubits requested, cap is {cap}")]
    SizeCapExceeded { requested: usize, cap: usize },
    #[error("classicality check failed for `{0}`")]
    ClassicalityViolated(String),
    #[error("certainty chain too short for the consistency rule")]
    ChainTooShort,
    #[error("self-description: `{owner}` cannot hold `{system}` inside their own cut")]
    SelfDescription { owner: String, system: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
