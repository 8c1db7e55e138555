//! Exact-arithmetic engine for the truncated (windowed) Chevalley-Eilenberg
//! cohomology of Z-graded Lie algebras.
//!
//! The crate computes cohomology dimensions h^q_(d) of the Witt algebra, the
//! Virasoro algebra and user-defined graded Lie algebras over windows of
//! increasing radius, entirely in rational arithmetic. On top of the windowed
//! engine it provides mechanical replays of the classical vanishing arguments
//! (degree-reduction homotopy, normalization recurrences, level-by-level
//! annihilation) and closed-form distinguished cocycles (the Godbillon-Vey
//! 3-cocycle and the central-extension 2-cocycle) with cocycle and
//! non-coboundary certification.

pub mod algebra;
pub mod cochain;
pub mod error;
pub mod linalg;
pub mod rational;
pub mod replay;
pub mod special;
pub mod window;

pub use error::EngineError;
pub use rational::Rational;

/// Version string stamped into reports and cache keys.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Result<T> = std::result::Result<T, EngineError>;
