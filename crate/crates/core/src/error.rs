use thiserror::Error;

/// What went wrong, independent of which typing rule reported it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeErrorKind {
    UnboundVariable,
    Mismatch,
    /// A write below the program counter.
    PcViolation,
    /// A function whose latent label is below `pc ⊔ ℓ` was applied.
    LabelEscalation,
    /// A bind whose first computation is tainted above the continuation's pc.
    TaintViolation,
    /// The value assigned to a reference is labeled above the reference.
    AssignLabel,
    /// A label from a different lattice instance.
    Lattice,
}

/// A typing failure, tagged with the rule that rejected the term.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{rule}: {message}")]
pub struct TypeError {
    pub rule: &'static str,
    pub kind: TypeErrorKind,
    pub message: String,
}

impl TypeError {
    pub fn new(rule: &'static str, kind: TypeErrorKind, message: impl Into<String>) -> Self {
        TypeError { rule, kind, message: message.into() }
    }
}

/// Runtime failure of an evaluator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("fuel exhausted after {0} steps")]
    Timeout(u64),
    #[error("stuck: {0}")]
    Stuck(String),
}

/// Failure of either translation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    /// The source program does not typecheck.
    #[error("source program is ill-typed: {0}")]
    Source(#[from] TypeError),
    /// An internal invariant of the translator failed.
    #[error("translation invariant violated: {0}")]
    Invariant(String),
}
