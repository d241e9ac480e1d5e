//! The fine-grained language: every value and every type carries a label.

pub mod eval;
pub mod syntax;
pub mod typing;

pub use eval::{fg_eval, FgClosure, FgEnv, FgMachine, FgOutcome, FgValue};
pub use syntax::{BoolOp, FgExpr, FgType, FgUnlabeled};
pub use typing::{fg_subtype, fg_typecheck, protected, FgChecker, FgCtx};
