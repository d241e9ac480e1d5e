//! Big-step, call-by-value evaluation `(H, e) ⇓ʲ (H', v)`.
//!
//! Labels are erased at runtime. Closures capture their environment.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::env::Env;
use crate::error::EvalError;
use crate::fg::syntax::{BoolOp, FgExpr};
use crate::heap::{Fuel, Heap, Loc};
use crate::lattice::Label;
use crate::{RED_ZONE, STACK_CHUNK};

pub struct FgClosure<'a> {
    pub param: &'a str,
    pub latent: Label,
    pub body: &'a FgExpr,
    pub env: FgEnv<'a>,
}

#[derive(Clone)]
pub enum FgValue<'a> {
    Unit,
    Bool(bool),
    Closure(Arc<FgClosure<'a>>),
    Pair(Arc<(FgValue<'a>, FgValue<'a>)>),
    Inl(Arc<FgValue<'a>>),
    Inr(Arc<FgValue<'a>>),
    Loc(Loc),
}

pub type FgEnv<'a> = Env<'a, FgValue<'a>>;

impl FgValue<'_> {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            FgValue::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for FgValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FgValue::Unit => f.write_str("()"),
            FgValue::Bool(b) => write!(f, "{b}"),
            FgValue::Closure(_) => f.write_str("<fun>"),
            FgValue::Pair(p) => write!(f, "(pair {} {})", p.0, p.1),
            FgValue::Inl(v) => write!(f, "(inl {v})"),
            FgValue::Inr(v) => write!(f, "(inr {v})"),
            FgValue::Loc(l) => write!(f, "<loc {}>", l.0),
        }
    }
}

impl fmt::Debug for FgValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An evaluator owning its heap and step budget.
pub struct FgMachine<'a> {
    pub heap: Heap<FgValue<'a>>,
    fuel: Fuel,
    dead_binders: Option<&'a HashSet<String>>,
    dead_hits: usize,
}

fn stuck<T>(msg: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Stuck(msg.into()))
}

impl<'a> FgMachine<'a> {
    pub fn new(fuel: u64) -> Self {
        FgMachine::with_heap(Heap::new(), fuel)
    }

    pub fn with_heap(heap: Heap<FgValue<'a>>, fuel: u64) -> Self {
        FgMachine { heap, fuel: Fuel::new(fuel), dead_binders: None, dead_hits: 0 }
    }

    /// Count every time a `case` takes a branch whose binder is in `binders`.
    pub fn watch_binders(&mut self, binders: &'a HashSet<String>) {
        self.dead_binders = Some(binders);
    }

    pub fn dead_hits(&self) -> usize {
        self.dead_hits
    }

    pub fn steps(&self) -> u64 {
        self.fuel.used()
    }

    pub fn eval(&mut self, env: &FgEnv<'a>, e: &'a FgExpr) -> Result<FgValue<'a>, EvalError> {
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.eval_inner(env, e))
    }

    pub fn apply(&mut self, f: FgValue<'a>, arg: FgValue<'a>) -> Result<FgValue<'a>, EvalError> {
        match f {
            FgValue::Closure(c) => {
                let env = c.env.extend(c.param, arg);
                self.eval(&env, c.body)
            }
            other => stuck(format!("application of non-function {other}")),
        }
    }

    fn eval_bool(&mut self, env: &FgEnv<'a>, e: &'a FgExpr) -> Result<bool, EvalError> {
        match self.eval(env, e)? {
            FgValue::Bool(b) => Ok(b),
            other => stuck(format!("expected a boolean, found {other}")),
        }
    }

    fn eval_loc(&mut self, env: &FgEnv<'a>, e: &'a FgExpr) -> Result<Loc, EvalError> {
        match self.eval(env, e)? {
            FgValue::Loc(l) if l.0 < self.heap.len() => Ok(l),
            other => stuck(format!("expected a location, found {other}")),
        }
    }

    fn eval_inner(&mut self, env: &FgEnv<'a>, e: &'a FgExpr) -> Result<FgValue<'a>, EvalError> {
        match e {
            FgExpr::Var(x) => match env.lookup(x) {
                Some(v) => Ok(v.clone()),
                None => stuck(format!("unbound variable {x}")),
            },
            FgExpr::Unit => Ok(FgValue::Unit),
            FgExpr::Bool(b) => Ok(FgValue::Bool(*b)),
            FgExpr::Lam { param, latent, body, .. } => {
                self.fuel.tick()?;
                Ok(FgValue::Closure(Arc::new(FgClosure { param, latent: *latent, body, env: env.clone() })))
            }
            FgExpr::App(f, a) => {
                self.fuel.tick()?;
                let fv = self.eval(env, f)?;
                let av = self.eval(env, a)?;
                self.apply(fv, av)
            }
            FgExpr::Pair(a, b) => {
                self.fuel.tick()?;
                let va = self.eval(env, a)?;
                let vb = self.eval(env, b)?;
                Ok(FgValue::Pair(Arc::new((va, vb))))
            }
            FgExpr::Fst(p) | FgExpr::Snd(p) => {
                self.fuel.tick()?;
                match self.eval(env, p)? {
                    FgValue::Pair(pair) => {
                        Ok(if matches!(e, FgExpr::Fst(_)) { pair.0.clone() } else { pair.1.clone() })
                    }
                    other => stuck(format!("projection from non-pair {other}")),
                }
            }
            FgExpr::Inl { expr, .. } => {
                self.fuel.tick()?;
                Ok(FgValue::Inl(Arc::new(self.eval(env, expr)?)))
            }
            FgExpr::Inr { expr, .. } => {
                self.fuel.tick()?;
                Ok(FgValue::Inr(Arc::new(self.eval(env, expr)?)))
            }
            FgExpr::Case { scrut, left, right } => {
                self.fuel.tick()?;
                let (binder, body, payload) = match self.eval(env, scrut)? {
                    FgValue::Inl(v) => (&left.0, &left.1, v),
                    FgValue::Inr(v) => (&right.0, &right.1, v),
                    other => return stuck(format!("case on non-sum {other}")),
                };
                if self.dead_binders.is_some_and(|set| set.contains(binder)) {
                    self.dead_hits += 1;
                }
                let env = env.extend(binder, (*payload).clone());
                self.eval(&env, body)
            }
            FgExpr::If(c, t, f) => {
                self.fuel.tick()?;
                if self.eval_bool(env, c)? {
                    self.eval(env, t)
                } else {
                    self.eval(env, f)
                }
            }
            FgExpr::New { init, .. } => {
                self.fuel.tick()?;
                let v = self.eval(env, init)?;
                Ok(FgValue::Loc(self.heap.alloc(v)))
            }
            FgExpr::Deref(r) => {
                self.fuel.tick()?;
                let l = self.eval_loc(env, r)?;
                Ok(self.heap.get(l).cloned().expect("location checked"))
            }
            FgExpr::Assign(r, v) => {
                self.fuel.tick()?;
                let l = self.eval_loc(env, r)?;
                let value = self.eval(env, v)?;
                self.heap.set(l, value);
                Ok(FgValue::Unit)
            }
            FgExpr::BoolOp(op, a, b) => {
                self.fuel.tick()?;
                let x = self.eval_bool(env, a)?;
                let y = self.eval_bool(env, b)?;
                Ok(FgValue::Bool(match op {
                    BoolOp::And => x && y,
                    BoolOp::Or => x || y,
                }))
            }
            FgExpr::Not(a) => {
                self.fuel.tick()?;
                Ok(FgValue::Bool(!self.eval_bool(env, a)?))
            }
        }
    }
}

/// Result of a terminating run.
pub struct FgOutcome<'a> {
    pub heap: Heap<FgValue<'a>>,
    pub value: FgValue<'a>,
    pub steps: u64,
}

/// Evaluate `e` from `heap` under `env` with a budget of `fuel` steps.
pub fn fg_eval<'a>(
    heap: Heap<FgValue<'a>>,
    e: &'a FgExpr,
    env: &FgEnv<'a>,
    fuel: u64,
) -> Result<FgOutcome<'a>, EvalError> {
    let mut machine = FgMachine::with_heap(heap, fuel);
    let value = machine.eval(env, e)?;
    let steps = machine.steps();
    Ok(FgOutcome { heap: machine.heap, value, steps })
}
