use thiserror::Error;

/// Errors surfaced by the simulation and numerics layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad constellation, non-positive parameter, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside an operation's domain (non-positive distance, empty
    /// geometry, length mismatch, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A satellite id was not found in the supplied state set.
    #[error("lookup error: {0}")]
    Lookup(String),

    /// A numerical routine failed to converge or left its validity range.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The detection context admits no finite MMSE solution.
    #[error("degenerate detection context: {0}")]
    Degenerate(String),

    /// Closed forms assume identical per-satellite statistics; the supplied
    /// path losses spread too far apart.
    #[error("non-uniform constellation: {0}")]
    NonUniform(String),
}

pub type Result<T> = std::result::Result<T, Error>;
