use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit-code contract:
/// `Parameter`/`Unsupported` are usage errors, `SizeGuard` is the resource
/// guard, `Io`/format errors are I/O failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("size guard: {what} = {actual} exceeds limit {limit}")]
    SizeGuard {
        what: &'static str,
        actual: u64,
        limit: u64,
    },

    #[error("snapshot magic mismatch: expected \"PBP1\", found {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("snapshot version mismatch: found version byte {found:?}, this build reads version '1'")]
    VersionMismatch { found: u8 },

    #[error("snapshot truncated: expected {expected} bytes of {what}, found {actual}")]
    Truncated {
        what: &'static str,
        expected: u64,
        actual: u64,
    },

    #[error("snapshot header corrupt: {0}")]
    HeaderCorrupt(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("stabilization failed: {0}")]
    Unstable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
