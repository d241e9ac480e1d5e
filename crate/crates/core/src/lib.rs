//! Fine- and coarse-grained static information flow control.
//!
//! Two small languages over a shared security lattice, their typecheckers
//! and evaluators, and type-directed translations in both directions.

pub mod cg;
pub mod cg2fg;
pub mod ctx;
pub mod env;
pub mod error;
pub mod fg;
pub mod fg2cg;
mod fresh;
pub mod heap;
pub mod lattice;
pub mod surface;

pub use error::{EvalError, TranslateError, TypeError, TypeErrorKind};
pub use fresh::Fresh;
pub use heap::DEFAULT_FUEL;
pub use lattice::{Label, Lattice};

/// Remaining stack below which evaluation grows a new segment.
pub(crate) const RED_ZONE: usize = 64 * 1024;
/// Size of each new stack segment.
pub(crate) const STACK_CHUNK: usize = 16 * 1024 * 1024;

/// Deliberate translator faults, used to check that the oracles notice them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Exchange the branches of every translated `case` and `if`.
    SwapCase,
    /// Omit the taint coercion around FG eliminations.
    DropCoerce,
}
