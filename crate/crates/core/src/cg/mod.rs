pub mod eval;
pub mod syntax;
pub mod typing;

pub use eval::{cg_eval_pure, cg_force, cg_run, CgClosure, CgEnv, CgMachine, CgOutcome, CgValue, Thunk};
pub use syntax::{CgExpr, CgType};
pub use typing::{cg_subtype, cg_typecheck, CgChecker, CgCtx};
