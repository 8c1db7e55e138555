//! Error type shared by all engine modules.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// A differential expansion referenced a coefficient outside the stored
    /// domain of a windowed cochain.
    #[error("undefined reference: coefficient at {0} lies outside the stored domain")]
    UndefinedReference(String),

    /// A coboundary generator failed a cocycle constraint. Under the
    /// (r, 2r, 4r) radii scheme this cannot happen; it indicates a bug in the
    /// radii contract, not a mathematical failure.
    #[error(
        "window inconsistency: coboundary generator {generator} violates constraint {constraint}"
    )]
    WindowInconsistency {
        generator: String,
        constraint: String,
    },

    #[error("window too small: radius {got}, need at least {need}")]
    WindowTooSmall { got: i64, need: i64 },

    /// Input to a replay was expected to satisfy the inner cocycle
    /// constraints and does not.
    #[error("not a cocycle: constraint fails at {0}")]
    NotACocycle(String),

    /// A replay found a coefficient that the replayed argument forces to
    /// zero but which is not zero.
    #[error("nonzero residual at {tuple}: {value}")]
    NonzeroResidual { tuple: String, value: String },

    /// A recurrence denominator vanished where the replay ordering promises
    /// it cannot; signals an implementation ordering bug.
    #[error("division guard tripped at {0}")]
    DivisionGuard(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A user-supplied algebra failed validation (antisymmetry, Jacobi,
    /// degree-additivity, closure or center bookkeeping).
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("parse error: {0}")]
    Parse(String),
}
