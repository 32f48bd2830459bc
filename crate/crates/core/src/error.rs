//! Crate-wide error type.

use thiserror::Error;

/// A type alias for `Result<T, Error>`.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A malformed input record, reported with its 1-based line number.
    #[error("line {line}: {message}")]
    Record { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Motif classification of two events that share no node.
    #[error("events {first} and {second} are not adjacent (no shared node)")]
    NotAdjacent { first: u32, second: u32 },

    /// Motif classification of a pair that violates (time, id) ordering.
    #[error("events {first} and {second} violate (time, id) ordering")]
    OrderViolation { first: u32, second: u32 },

    /// Motif classification involving a self-loop event.
    #[error("event {event} is a self-loop and has no motif role")]
    SelfLoop { event: u32 },

    /// A streaming event arrived too late for the configured lateness window.
    #[error("event at index {index} arrived out of order (time {time} < watermark {watermark})")]
    OutOfOrder { index: usize, time: f64, watermark: f64 },

    /// An operation that needs at least one event-graph edge got none.
    #[error("operation requires at least one event-graph edge")]
    NoEdges,

    /// An operation received an empty collection it cannot work with.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cluster count {k} out of range for {n} observations")]
    KOutOfRange { k: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
