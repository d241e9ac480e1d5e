//! Noninterference oracles.
//!
//! A program with one free secret `x` is run twice, with two different
//! secrets substituted for `x`. If both runs terminate they must produce the
//! same boolean. Nontermination is not an observable channel, so a pair where
//! either run times out is counted and skipped.

use std::collections::BTreeSet;
use std::fmt;

use ifc_core::cg::{cg_run, CgChecker, CgCtx, CgEnv, CgExpr, CgMachine, CgType, CgValue};
use ifc_core::fg::{fg_eval, FgChecker, FgCtx, FgEnv, FgExpr, FgType, FgValue};
use ifc_core::heap::Heap;
use ifc_core::surface::{Printer, Program, SourceFile};
use ifc_core::{EvalError, Fresh, Label, Lattice, TranslateError, TypeError, TypeErrorKind};

use crate::gen::{CgGen, FgGen};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NiConfig {
    pub secret_label: Label,
    pub observer: Label,
    /// Number of secret pairs to try.
    pub samples: usize,
    pub fuel: u64,
    pub seed: u64,
}

impl NiConfig {
    pub fn new(secret_label: Label, observer: Label) -> Self {
        NiConfig { secret_label, observer, samples: 50, fuel: 100_000, seed: 0 }
    }
}

/// A pair of runs that terminated with different results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub program: String,
    pub secret1: String,
    pub secret2: String,
    pub result1: String,
    pub result2: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Every pair where both runs terminated agreed.
    Pass {
        pairs: usize,
        timeouts: usize,
    },
    Counterexample(Box<Counterexample>),
    /// No pair had two terminating runs.
    Inconclusive {
        timeouts: usize,
    },
}

impl Verdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, Verdict::Counterexample(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass { pairs, timeouts } => write!(f, "verdict=pass pairs={pairs} timeouts={timeouts}"),
            Verdict::Inconclusive { timeouts } => write!(f, "verdict=inconclusive timeouts={timeouts}"),
            Verdict::Counterexample(c) => write!(
                f,
                "verdict=counterexample secret1={} secret2={} result1={} result2={}",
                c.secret1, c.secret2, c.result1, c.result2
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NiError {
    /// The observer can see the secret's label.
    #[error("secret label {0} flows to observer {1}")]
    Config(String, String),
    /// The program does not have the type noninterference requires.
    #[error(transparent)]
    Precondition(#[from] TypeError),
    #[error("secret `{0}` is ill-typed: {1}")]
    Secret(String, String),
    /// A well-typed run went wrong; this is always a bug.
    #[error("evaluation got stuck: {0}")]
    Stuck(String),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    /// The source file does not declare exactly one secret variable.
    #[error("{0}")]
    Subject(String),
}

fn check_config(lattice: &Lattice, cfg: &NiConfig) -> Result<(), NiError> {
    if lattice.flows(cfg.secret_label, cfg.observer) {
        Err(NiError::Config(lattice.show(cfg.secret_label), lattice.show(cfg.observer)))
    } else {
        Ok(())
    }
}

fn stuck(e: EvalError) -> Result<Option<bool>, NiError> {
    match e {
        EvalError::Timeout(_) => Ok(None),
        EvalError::Stuck(msg) => Err(NiError::Stuck(msg)),
    }
}

/// Run every pair through `run` (which yields `None` on timeout) and
/// aggregate.
fn judge<S>(
    program: String,
    pairs: &[(S, S)],
    show: impl Fn(&S) -> String,
    mut run: impl FnMut(&S) -> Result<Option<bool>, NiError>,
) -> Result<Verdict, NiError> {
    let (mut agreed, mut timeouts) = (0, 0);
    for (s1, s2) in pairs {
        let (r1, r2) = (run(s1)?, run(s2)?);
        match (r1, r2) {
            (Some(a), Some(b)) if a == b => agreed += 1,
            (Some(a), Some(b)) => {
                return Ok(Verdict::Counterexample(Box::new(Counterexample {
                    program,
                    secret1: show(s1),
                    secret2: show(s2),
                    result1: a.to_string(),
                    result2: b.to_string(),
                })))
            }
            _ => timeouts += 1,
        }
    }
    if agreed == 0 && timeouts > 0 {
        Ok(Verdict::Inconclusive { timeouts })
    } else {
        Ok(Verdict::Pass { pairs: agreed, timeouts })
    }
}

// ---------------------------------------------------------------------------
// FG
// ---------------------------------------------------------------------------

/// `samples` pairs of closed FG value expressions of type `t`, distinct
/// wherever `t` has more than one inhabitant we can find.
pub fn fg_secret_pairs(lattice: &Lattice, t: &FgType, samples: usize, seed: u64) -> Vec<(FgExpr, FgExpr)> {
    let mut g = FgGen::new(lattice, seed);
    (0..samples)
        .map(|_| {
            let a = g.value(t);
            let mut b = g.value(t);
            for _ in 0..8 {
                if a != b {
                    break;
                }
                b = g.value(t);
            }
            (a, b)
        })
        .collect()
}

/// Check `x : A^ℓi ⊢_pc e : bool^ℓ` for the configured labels.
pub fn fg_precondition(
    lattice: &Lattice,
    e: &FgExpr,
    x: &str,
    secret: &FgType,
    pc: Label,
    cfg: &NiConfig,
) -> Result<FgType, NiError> {
    check_config(lattice, cfg)?;
    let checker = FgChecker::new(lattice);
    let ctx: FgCtx = [(x, secret.with_label(cfg.secret_label))].into_iter().collect();
    let got = checker.check_program(&ctx, pc, e)?;
    let goal = FgType::bool(cfg.observer);
    if !checker.subtype(&got, &goal) {
        let p = Printer::new(lattice);
        return Err(TypeError::new(
            "FG-sub",
            TypeErrorKind::Mismatch,
            format!("program has type {}, observer expects {}", p.fg_type(&got), p.fg_type(&goal)),
        )
        .into());
    }
    Ok(got)
}

/// Noninterference for FG with secrets drawn from the configured seed.
pub fn ni_check_fg(
    lattice: &Lattice,
    e: &FgExpr,
    x: &str,
    secret: &FgType,
    pc: Label,
    cfg: &NiConfig,
) -> Result<Verdict, NiError> {
    let secret = secret.with_label(cfg.secret_label);
    let pairs = fg_secret_pairs(lattice, &secret, cfg.samples, cfg.seed);
    ni_check_fg_with(lattice, e, x, &secret, pc, cfg, &pairs)
}

/// Noninterference for FG against explicit secret expressions. Each secret
/// is evaluated in an empty heap and the resulting value is bound to `x`.
pub fn ni_check_fg_with(
    lattice: &Lattice,
    e: &FgExpr,
    x: &str,
    secret: &FgType,
    pc: Label,
    cfg: &NiConfig,
    pairs: &[(FgExpr, FgExpr)],
) -> Result<Verdict, NiError> {
    fg_precondition(lattice, e, x, secret, pc, cfg)?;
    let checker = FgChecker::new(lattice);
    let want = secret.with_label(cfg.secret_label);
    let p = Printer::new(lattice);
    for v in pairs.iter().flat_map(|(a, b)| [a, b]) {
        let ok = checker.check_program(&FgCtx::new(), lattice.bot(), v).map(|t| checker.subtype(&t, &want));
        if ok != Ok(true) {
            return Err(NiError::Secret(p.fg_expr_flat(v), format!("expected {}", p.fg_type(&want))));
        }
    }
    judge(
        p.fg_expr_flat(e),
        pairs,
        |v| p.fg_expr_flat(v),
        |v| {
            let secret = match fg_eval(Heap::new(), v, &FgEnv::new(), cfg.fuel) {
                Ok(out) => out.value,
                Err(err) => return stuck(err),
            };
            let env: FgEnv<'_> = FgEnv::new().extend(x, secret);
            match fg_eval(Heap::new(), e, &env, cfg.fuel) {
                Ok(out) => match out.value {
                    FgValue::Bool(b) => Ok(Some(b)),
                    other => Err(NiError::Stuck(format!("expected a boolean result, found {other}"))),
                },
                Err(err) => stuck(err),
            }
        },
    )
}

// ---------------------------------------------------------------------------
// CG
// ---------------------------------------------------------------------------

/// Pairs of closed secrets `label ℓi v` with `v : τ`.
pub fn cg_secret_pairs(lattice: &Lattice, l: Label, t: &CgType, samples: usize, seed: u64) -> Vec<(CgExpr, CgExpr)> {
    let mut g = CgGen::new(lattice, seed);
    (0..samples)
        .map(|_| {
            let a = g.value(t);
            let mut b = g.value(t);
            for _ in 0..8 {
                if a != b {
                    break;
                }
                b = g.value(t);
            }
            (CgExpr::label(l, a), CgExpr::label(l, b))
        })
        .collect()
}

/// Check `x : Labeled ℓi τ ⊢ e : SLIO _ ℓ bool`.
pub fn cg_precondition(
    lattice: &Lattice,
    e: &CgExpr,
    x: &str,
    payload: &CgType,
    cfg: &NiConfig,
) -> Result<CgType, NiError> {
    check_config(lattice, cfg)?;
    let checker = CgChecker::new(lattice);
    let ctx: CgCtx = [(x, CgType::labeled(cfg.secret_label, payload.clone()))].into_iter().collect();
    let got = checker.check_program(&ctx, e)?;
    let goal = CgType::slio(lattice.bot(), cfg.observer, CgType::Bool);
    if !checker.subtype(&got, &goal) {
        let p = Printer::new(lattice);
        return Err(TypeError::new(
            "CG-sub",
            TypeErrorKind::Mismatch,
            format!("program has type {}, observer expects {}", p.cg_type(&got), p.cg_type(&goal)),
        )
        .into());
    }
    Ok(got)
}

pub fn ni_check_cg(
    lattice: &Lattice,
    e: &CgExpr,
    x: &str,
    payload: &CgType,
    cfg: &NiConfig,
) -> Result<Verdict, NiError> {
    let pairs = cg_secret_pairs(lattice, cfg.secret_label, payload, cfg.samples, cfg.seed);
    ni_check_cg_with(lattice, e, x, payload, cfg, &pairs)
}

/// Noninterference for CG against explicit secrets. A secret of type
/// `Labeled ℓi τ` is evaluated purely; a secret of type `SLIO _ _ (Labeled
/// ℓi τ)` is run and its result used.
pub fn ni_check_cg_with(
    lattice: &Lattice,
    e: &CgExpr,
    x: &str,
    payload: &CgType,
    cfg: &NiConfig,
    pairs: &[(CgExpr, CgExpr)],
) -> Result<Verdict, NiError> {
    cg_precondition(lattice, e, x, payload, cfg)?;
    let checker = CgChecker::new(lattice);
    let want = CgType::labeled(cfg.secret_label, payload.clone());
    let p = Printer::new(lattice);
    let mut computed = Vec::with_capacity(pairs.len() * 2);
    for v in pairs.iter().flat_map(|(a, b)| [a, b]) {
        let t = checker.check_program(&CgCtx::new(), v);
        let is_computation = match &t {
            Ok(t) if checker.subtype(t, &want) => false,
            Ok(CgType::Slio(_, _, inner)) if checker.subtype(inner, &want) => true,
            _ => return Err(NiError::Secret(p.cg_expr_flat(v), format!("expected {}", p.cg_type(&want)))),
        };
        computed.push(is_computation);
    }
    let mut index = 0;
    judge(
        p.cg_expr_flat(e),
        pairs,
        |v| p.cg_expr_flat(v),
        |v| {
            let is_computation = computed[index];
            index += 1;
            let mut m = CgMachine::new(cfg.fuel);
            let secret = match m.eval_pure(&CgEnv::new(), v) {
                Ok(s) if is_computation => match m.force(&s) {
                    Ok(s) => s,
                    Err(err) => return stuck(err),
                },
                Ok(s) => s,
                Err(err) => return stuck(err),
            };
            let env: CgEnv<'_> = CgEnv::new().extend(x, secret);
            match cg_run(Heap::new(), e, &env, cfg.fuel) {
                Ok(out) => match out.value {
                    CgValue::Bool(b) => Ok(Some(b)),
                    other => Err(NiError::Stuck(format!("expected a boolean result, found {other}"))),
                },
                Err(err) => stuck(err),
            }
        },
    )
}

// ---------------------------------------------------------------------------
// Transfer through the translations
// ---------------------------------------------------------------------------

fn fresh_for_cg(e: &CgExpr, x: &str) -> Fresh {
    let mut names = BTreeSet::new();
    e.names(&mut names);
    names.insert(x.to_string());
    Fresh::avoiding(names)
}

fn fresh_for_fg(e: &FgExpr, x: &str) -> Fresh {
    let mut names = BTreeSet::new();
    e.names(&mut names);
    names.insert(x.to_string());
    Fresh::avoiding(names)
}

/// Turn an FG noninterference program into a CG one: translate it and
/// unwrap the labeled boolean, `bind(e_t, y. unlabel y)`.
pub fn fg_ni_to_cg(lattice: &Lattice, e: &FgExpr, x: &str, secret: &FgType, pc: Label) -> Result<CgExpr, NiError> {
    let ctx: FgCtx = [(x, secret.clone())].into_iter().collect();
    let target = ifc_core::fg2cg::fg2cg_expr(lattice, &ctx, pc, e)?.target;
    let y = fresh_for_cg(&target, x).name("y");
    Ok(CgExpr::bind(target, y.clone(), CgExpr::unlabel(CgExpr::var(y))))
}

/// Secrets for a translated program: the CG translations of the FG secrets.
pub fn fg_secrets_to_cg(lattice: &Lattice, pairs: &[(FgExpr, FgExpr)]) -> Result<Vec<(CgExpr, CgExpr)>, NiError> {
    let tr = |v: &FgExpr| -> Result<CgExpr, NiError> {
        Ok(ifc_core::fg2cg::fg2cg_expr(lattice, &FgCtx::new(), lattice.bot(), v)?.target)
    };
    pairs.iter().map(|(a, b)| Ok((tr(a)?, tr(b)?))).collect()
}

/// Turn a CG noninterference program into an FG one: translate, run the
/// thunk and decode the result, `case (e_F ()) (y. y) (z. false)`.
pub fn cg_ni_to_fg(
    lattice: &Lattice,
    e: &CgExpr,
    x: &str,
    payload: &CgType,
    secret_label: Label,
) -> Result<FgExpr, NiError> {
    let ctx: CgCtx = [(x, CgType::labeled(secret_label, payload.clone()))].into_iter().collect();
    let target = ifc_core::cg2fg::cg2fg_expr(lattice, &ctx, e)?.target;
    let mut fresh = fresh_for_fg(&target, x);
    let (y, z) = (fresh.name("y"), fresh.name("z"));
    Ok(FgExpr::case(FgExpr::app(target, FgExpr::Unit), y.clone(), FgExpr::var(y), z, FgExpr::Bool(false)))
}

/// Secrets for a CG→FG translated program: translations of the CG secrets.
pub fn cg_secrets_to_fg(lattice: &Lattice, pairs: &[(CgExpr, CgExpr)]) -> Result<Vec<(FgExpr, FgExpr)>, NiError> {
    let tr =
        |v: &CgExpr| -> Result<FgExpr, NiError> { Ok(ifc_core::cg2fg::cg2fg_expr(lattice, &CgCtx::new(), v)?.target) };
    pairs.iter().map(|(a, b)| Ok((tr(a)?, tr(b)?))).collect()
}

/// A generated FG noninterference subject.
#[derive(Debug, Clone)]
pub struct FgSubject {
    pub var: String,
    /// The secret's type, labeled with the secret label.
    pub secret: FgType,
    pub pc: Label,
    pub program: FgExpr,
}

#[derive(Debug, Clone)]
pub struct CgSubject {
    pub var: String,
    /// Payload of the secret, which has type `Labeled ℓi payload`.
    pub payload: CgType,
    pub program: CgExpr,
}

/// A random well-typed FG program with one free secret `h` at the
/// configured labels.
pub fn gen_fg_subject(lattice: &Lattice, cfg: &NiConfig, size: usize, seed: u64) -> Option<FgSubject> {
    let mut g = FgGen::new(lattice, seed);
    for _ in 0..20 {
        let secret = g.secret_type(1).with_label(cfg.secret_label);
        let pc = g.src.label_below(cfg.observer);
        let ctx: FgCtx = [("h", secret.clone())].into_iter().collect();
        if let Some(program) = g.program(&ctx, pc, &FgType::bool(cfg.observer), size) {
            return Some(FgSubject { var: "h".into(), secret, pc, program });
        }
    }
    None
}

pub fn gen_cg_subject(lattice: &Lattice, cfg: &NiConfig, size: usize, seed: u64) -> Option<CgSubject> {
    let mut g = CgGen::new(lattice, seed);
    for _ in 0..20 {
        let payload = g.secret_type(1);
        let ctx: CgCtx = [("h", CgType::labeled(cfg.secret_label, payload.clone()))].into_iter().collect();
        let pc = g.src.label();
        let goal = CgType::slio(pc, cfg.observer, CgType::Bool);
        if let Some(program) = g.program(&ctx, &goal, size) {
            return Some(CgSubject { var: "h".into(), payload, program });
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Source files
// ---------------------------------------------------------------------------

/// The single secret a source file declares: its name and label. FG secrets
/// take the top label of their type; CG secrets must be `Labeled ℓ τ`.
pub fn declared_secret(file: &SourceFile) -> Result<(String, Label), NiError> {
    let one = |n: usize| {
        if n == 1 {
            Ok(())
        } else {
            Err(NiError::Subject(format!("expected exactly one secret variable in the context, found {n}")))
        }
    };
    match &file.program {
        Program::Fg { ctx, .. } => {
            one(ctx.len())?;
            let (x, t) = ctx.iter().next().expect("one entry");
            Ok((x.to_string(), t.label))
        }
        Program::Cg { ctx, .. } => {
            one(ctx.len())?;
            let (x, t) = ctx.iter().next().expect("one entry");
            match t {
                CgType::Labeled(l, _) => Ok((x.to_string(), *l)),
                other => Err(NiError::Subject(format!(
                    "secret `{x}` must have a Labeled type, found {}",
                    Printer::new(&file.lattice).cg_type(other)
                ))),
            }
        }
    }
}

/// Check the noninterference precondition for a source file, as [`ni_check_source`]
/// would, without running anything.
pub fn precondition_source(file: &SourceFile, pc: Label, cfg: &NiConfig) -> Result<(), NiError> {
    let (x, _) = declared_secret(file)?;
    match &file.program {
        Program::Fg { ctx, body } => {
            let t = ctx.lookup(&x).expect("declared");
            fg_precondition(&file.lattice, body, &x, t, pc, cfg).map(|_| ())
        }
        Program::Cg { ctx, body } => {
            let CgType::Labeled(_, payload) = ctx.lookup(&x).expect("declared") else { unreachable!() };
            cg_precondition(&file.lattice, body, &x, payload, cfg).map(|_| ())
        }
    }
}

/// Noninterference for the program in a source file. The context names the
/// secret; `cfg.secret_label` overrides its declared label. FG programs run
/// at `pc`; CG programs ignore it.
pub fn ni_check_source(file: &SourceFile, pc: Label, cfg: &NiConfig) -> Result<Verdict, NiError> {
    let (x, _) = declared_secret(file)?;
    match &file.program {
        Program::Fg { ctx, body } => {
            let t = ctx.lookup(&x).expect("declared");
            ni_check_fg(&file.lattice, body, &x, t, pc, cfg)
        }
        Program::Cg { ctx, body } => {
            let CgType::Labeled(_, payload) = ctx.lookup(&x).expect("declared") else { unreachable!() };
            ni_check_cg(&file.lattice, body, &x, payload, cfg)
        }
    }
}
