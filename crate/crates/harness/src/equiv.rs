//! Differential checks between a closed program and its translation.

use std::collections::HashSet;

use ifc_core::cg::{cg_run, CgCtx, CgEnv, CgExpr, CgValue};
use ifc_core::cg2fg::cg2fg_expr;
use ifc_core::fg::{fg_eval, FgCtx, FgEnv, FgExpr, FgMachine, FgValue};
use ifc_core::heap::Heap;
use ifc_core::{EvalError, Label, Lattice, TranslateError};

/// Outcome of running a program and its translation side by side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equiv {
    /// Both runs produced this boolean, or both timed out (`None`).
    Agree(Option<bool>),
    Disagree {
        source: String,
        target: String,
    },
    /// Exactly one side ran out of fuel.
    OneSidedTimeout {
        source: Option<bool>,
        target: Option<bool>,
    },
}

impl Equiv {
    pub fn is_failure(&self) -> bool {
        matches!(self, Equiv::Disagree { .. })
    }

    pub fn terminated(&self) -> bool {
        matches!(self, Equiv::Agree(Some(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquivError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("evaluation got stuck: {0}")]
    Stuck(String),
}

fn settle(r: Result<Option<bool>, EvalError>, what: &str) -> Result<Option<bool>, EquivError> {
    match r {
        Ok(b) => Ok(b),
        Err(EvalError::Timeout(_)) => Ok(None),
        Err(EvalError::Stuck(m)) => Err(EquivError::Stuck(format!("{what}: {m}"))),
    }
}

fn compare(source: Option<bool>, target: Option<bool>) -> Equiv {
    match (source, target) {
        (a, b) if a == b => Equiv::Agree(a),
        (Some(a), Some(b)) => Equiv::Disagree { source: a.to_string(), target: b.to_string() },
        (source, target) => Equiv::OneSidedTimeout { source, target },
    }
}

fn fg_bool(v: &FgValue<'_>) -> Result<Option<bool>, EvalError> {
    v.as_bool().map(Some).ok_or_else(|| EvalError::Stuck(format!("expected a boolean, found {v}")))
}

/// Run a closed FG program of type `bool^ℓ` and its CG translation, which is
/// forced and its `Labeled` wrapper removed.
pub fn equiv_check_fg2cg(lattice: &Lattice, pc: Label, e: &FgExpr, fuel: u64) -> Result<Equiv, EquivError> {
    equiv_check_fg2cg_with(lattice, pc, e, fuel, ifc_core::Mutation::None)
}

pub fn equiv_check_fg2cg_with(
    lattice: &Lattice,
    pc: Label,
    e: &FgExpr,
    fuel: u64,
    mutation: ifc_core::Mutation,
) -> Result<Equiv, EquivError> {
    let target = ifc_core::fg2cg::Fg2Cg::new(lattice, &FgCtx::new(), e)
        .with_mutation(mutation)
        .run(&FgCtx::new(), pc, e)?
        .target;
    let source = settle(fg_eval(Heap::new(), e, &FgEnv::new(), fuel).and_then(|o| fg_bool(&o.value)), "source")?;
    let run = cg_run(Heap::new(), &target, &CgEnv::new(), fuel).and_then(|o| match o.value {
        CgValue::Labeled(v) => {
            v.as_bool().map(Some).ok_or_else(|| EvalError::Stuck(format!("expected a boolean, found {v}")))
        }
        other => Err(EvalError::Stuck(format!("expected a labeled boolean, found {other}"))),
    });
    Ok(compare(source, settle(run, "target")?))
}

/// Run a closed CG computation returning `bool` and its FG translation
/// applied to `()`, decoding the `inl` coding.
pub fn equiv_check_cg2fg(lattice: &Lattice, e: &CgExpr, fuel: u64) -> Result<Equiv, EquivError> {
    equiv_check_cg2fg_with(lattice, e, fuel, ifc_core::Mutation::None).map(|(r, _)| r)
}

/// As [`equiv_check_cg2fg`], also returning how many times the target
/// entered a dead `inr` branch.
pub fn equiv_check_cg2fg_with(
    lattice: &Lattice,
    e: &CgExpr,
    fuel: u64,
    mutation: ifc_core::Mutation,
) -> Result<(Equiv, usize), EquivError> {
    let result =
        ifc_core::cg2fg::Cg2Fg::new(lattice, &CgCtx::new(), e).with_mutation(mutation).run(&CgCtx::new(), e)?;
    let source = cg_run(Heap::new(), e, &CgEnv::new(), fuel).and_then(|o| match o.value {
        CgValue::Bool(b) => Ok(Some(b)),
        other => Err(EvalError::Stuck(format!("expected a boolean, found {other}"))),
    });
    let source = settle(source, "source")?;
    let applied = FgExpr::app(result.target, FgExpr::Unit);
    let (target, hits) = run_decoded(&applied, &result.dead_binders, fuel);
    Ok((compare(source, settle(target, "target")?), hits))
}

/// Evaluate a translated thunk application and decode `(inl b)` to `b`.
fn run_decoded(e: &FgExpr, dead: &HashSet<String>, fuel: u64) -> (Result<Option<bool>, EvalError>, usize) {
    let mut m = FgMachine::new(fuel);
    m.watch_binders(dead);
    let r = m.eval(&FgEnv::new(), e).and_then(|v| match v {
        FgValue::Inl(b) => fg_bool(&b),
        other => Err(EvalError::Stuck(format!("expected (inl b), found {other}"))),
    });
    (r, m.dead_hits())
}

/// Dead-branch hits when running `e_F ()` for a closed CG computation.
pub fn dead_hits_cg2fg(lattice: &Lattice, e: &CgExpr, fuel: u64) -> Result<usize, EquivError> {
    let result = cg2fg_expr(lattice, &CgCtx::new(), e)?;
    let applied = FgExpr::app(result.target, FgExpr::Unit);
    Ok(run_decoded(&applied, &result.dead_binders, fuel).1)
}
