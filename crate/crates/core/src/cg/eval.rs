//! Pure evaluation and forcing.
//!
//! Pure evaluation never touches the heap: monadic constructs evaluate their
//! pure sub-expressions and return a [`Thunk`]. Forcing a thunk runs it as a
//! state-monad computation against a [`Heap`].

use std::fmt;
use std::sync::Arc;

use crate::cg::syntax::CgExpr;
use crate::env::Env;
use crate::error::EvalError;
use crate::fg::BoolOp;
use crate::heap::{Fuel, Heap, Loc};
use crate::{RED_ZONE, STACK_CHUNK};

pub struct CgClosure<'a> {
    pub param: &'a str,
    pub body: &'a CgExpr,
    pub env: CgEnv<'a>,
}

/// A suspended computation together with its already evaluated operands.
pub enum Thunk<'a> {
    Ret(CgValue<'a>),
    Bind { first: CgValue<'a>, var: &'a str, body: &'a CgExpr, env: CgEnv<'a> },
    Unlabel(CgValue<'a>),
    ToLabeled(CgValue<'a>),
    New(CgValue<'a>),
    Deref(Loc),
    Assign(Loc, CgValue<'a>),
}

#[derive(Clone)]
pub enum CgValue<'a> {
    Unit,
    Bool(bool),
    Closure(Arc<CgClosure<'a>>),
    Pair(Arc<(CgValue<'a>, CgValue<'a>)>),
    Inl(Arc<CgValue<'a>>),
    Inr(Arc<CgValue<'a>>),
    Loc(Loc),
    /// A labeled value; the label itself is static and erased.
    Labeled(Arc<CgValue<'a>>),
    Thunk(Arc<Thunk<'a>>),
}

pub type CgEnv<'a> = Env<'a, CgValue<'a>>;

impl<'a> CgValue<'a> {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            CgValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn labeled(v: CgValue<'a>) -> Self {
        CgValue::Labeled(Arc::new(v))
    }

    pub fn thunk(t: Thunk<'a>) -> Self {
        CgValue::Thunk(Arc::new(t))
    }

    pub fn is_thunk(&self) -> bool {
        matches!(self, CgValue::Thunk(_))
    }
}

impl fmt::Display for CgValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CgValue::Unit => f.write_str("()"),
            CgValue::Bool(b) => write!(f, "{b}"),
            CgValue::Closure(_) => f.write_str("<fun>"),
            CgValue::Pair(p) => write!(f, "(pair {} {})", p.0, p.1),
            CgValue::Inl(v) => write!(f, "(inl {v})"),
            CgValue::Inr(v) => write!(f, "(inr {v})"),
            CgValue::Loc(l) => write!(f, "<loc {}>", l.0),
            CgValue::Labeled(v) => write!(f, "(labeled {v})"),
            CgValue::Thunk(_) => f.write_str("<computation>"),
        }
    }
}

impl fmt::Debug for CgValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn stuck<T>(msg: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Stuck(msg.into()))
}

/// Evaluator state: the heap used by forcing and a shared step budget.
pub struct CgMachine<'a> {
    pub heap: Heap<CgValue<'a>>,
    fuel: Fuel,
}

impl<'a> CgMachine<'a> {
    pub fn new(fuel: u64) -> Self {
        CgMachine::with_heap(Heap::new(), fuel)
    }

    pub fn with_heap(heap: Heap<CgValue<'a>>, fuel: u64) -> Self {
        CgMachine { heap, fuel: Fuel::new(fuel) }
    }

    pub fn steps(&self) -> u64 {
        self.fuel.used()
    }

    pub fn eval_pure(&mut self, env: &CgEnv<'a>, e: &'a CgExpr) -> Result<CgValue<'a>, EvalError> {
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.pure_inner(env, e))
    }

    pub fn apply(&mut self, f: CgValue<'a>, arg: CgValue<'a>) -> Result<CgValue<'a>, EvalError> {
        match f {
            CgValue::Closure(c) => {
                let env = c.env.extend(c.param, arg);
                self.eval_pure(&env, c.body)
            }
            other => stuck(format!("application of non-function {other}")),
        }
    }

    fn eval_bool(&mut self, env: &CgEnv<'a>, e: &'a CgExpr) -> Result<bool, EvalError> {
        match self.eval_pure(env, e)? {
            CgValue::Bool(b) => Ok(b),
            other => stuck(format!("expected a boolean, found {other}")),
        }
    }

    fn eval_loc(&mut self, env: &CgEnv<'a>, e: &'a CgExpr) -> Result<Loc, EvalError> {
        match self.eval_pure(env, e)? {
            CgValue::Loc(l) => Ok(l),
            other => stuck(format!("expected a location, found {other}")),
        }
    }

    fn pure_inner(&mut self, env: &CgEnv<'a>, e: &'a CgExpr) -> Result<CgValue<'a>, EvalError> {
        match e {
            CgExpr::Var(x) => match env.lookup(x) {
                Some(v) => Ok(v.clone()),
                None => stuck(format!("unbound variable {x}")),
            },
            CgExpr::Unit => Ok(CgValue::Unit),
            CgExpr::Bool(b) => Ok(CgValue::Bool(*b)),
            _ => {
                self.fuel.tick()?;
                self.pure_node(env, e)
            }
        }
    }

    fn pure_node(&mut self, env: &CgEnv<'a>, e: &'a CgExpr) -> Result<CgValue<'a>, EvalError> {
        Ok(match e {
            CgExpr::Var(_) | CgExpr::Unit | CgExpr::Bool(_) => unreachable!("handled by caller"),
            CgExpr::Lam { param, body, .. } => CgValue::Closure(Arc::new(CgClosure { param, body, env: env.clone() })),
            CgExpr::App(f, a) => {
                let fv = self.eval_pure(env, f)?;
                let av = self.eval_pure(env, a)?;
                return self.apply(fv, av);
            }
            CgExpr::Pair(a, b) => {
                let va = self.eval_pure(env, a)?;
                let vb = self.eval_pure(env, b)?;
                CgValue::Pair(Arc::new((va, vb)))
            }
            CgExpr::Fst(p) | CgExpr::Snd(p) => match self.eval_pure(env, p)? {
                CgValue::Pair(pair) => {
                    if matches!(e, CgExpr::Fst(_)) {
                        pair.0.clone()
                    } else {
                        pair.1.clone()
                    }
                }
                other => return stuck(format!("projection from non-pair {other}")),
            },
            CgExpr::Inl { expr, .. } => CgValue::Inl(Arc::new(self.eval_pure(env, expr)?)),
            CgExpr::Inr { expr, .. } => CgValue::Inr(Arc::new(self.eval_pure(env, expr)?)),
            CgExpr::Case { scrut, left, right } => {
                let (binder, body, payload) = match self.eval_pure(env, scrut)? {
                    CgValue::Inl(v) => (&left.0, &left.1, v),
                    CgValue::Inr(v) => (&right.0, &right.1, v),
                    other => return stuck(format!("case on non-sum {other}")),
                };
                let env = env.extend(binder, (*payload).clone());
                return self.eval_pure(&env, body);
            }
            CgExpr::If(c, t, f) => {
                return if self.eval_bool(env, c)? { self.eval_pure(env, t) } else { self.eval_pure(env, f) };
            }
            CgExpr::BoolOp(op, a, b) => {
                let x = self.eval_bool(env, a)?;
                let y = self.eval_bool(env, b)?;
                CgValue::Bool(match op {
                    BoolOp::And => x && y,
                    BoolOp::Or => x || y,
                })
            }
            CgExpr::Not(a) => CgValue::Bool(!self.eval_bool(env, a)?),
            CgExpr::Label(_, inner) => CgValue::labeled(self.eval_pure(env, inner)?),
            CgExpr::Unlabel(inner) => CgValue::thunk(Thunk::Unlabel(self.eval_pure(env, inner)?)),
            CgExpr::ToLabeled(inner) => CgValue::thunk(Thunk::ToLabeled(self.eval_pure(env, inner)?)),
            CgExpr::Ret(inner) => CgValue::thunk(Thunk::Ret(self.eval_pure(env, inner)?)),
            CgExpr::Bind { first, var, body } => {
                let first = self.eval_pure(env, first)?;
                CgValue::thunk(Thunk::Bind { first, var, body, env: env.clone() })
            }
            CgExpr::New { init, .. } => CgValue::thunk(Thunk::New(self.eval_pure(env, init)?)),
            CgExpr::Deref(r) => CgValue::thunk(Thunk::Deref(self.eval_loc(env, r)?)),
            CgExpr::Assign(r, v) => {
                let l = self.eval_loc(env, r)?;
                let v = self.eval_pure(env, v)?;
                CgValue::thunk(Thunk::Assign(l, v))
            }
        })
    }

    /// Run a computation, performing its heap effects.
    pub fn force(&mut self, m: &CgValue<'a>) -> Result<CgValue<'a>, EvalError> {
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.force_inner(m))
    }

    fn force_inner(&mut self, m: &CgValue<'a>) -> Result<CgValue<'a>, EvalError> {
        let CgValue::Thunk(t) = m else {
            return stuck(format!("forcing a non-computation {m}"));
        };
        self.fuel.tick()?;
        match &**t {
            Thunk::Ret(v) => Ok(v.clone()),
            Thunk::Bind { first, var, body, env } => {
                let v = self.force(first)?;
                let env = env.extend(var, v);
                let next = self.eval_pure(&env, body)?;
                self.force(&next)
            }
            Thunk::Unlabel(v) => match v {
                CgValue::Labeled(inner) => Ok((**inner).clone()),
                other => stuck(format!("unlabel of unlabeled value {other}")),
            },
            Thunk::ToLabeled(inner) => Ok(CgValue::labeled(self.force(inner)?)),
            Thunk::New(v) => {
                if !matches!(v, CgValue::Labeled(_)) {
                    return stuck(format!("allocation of unlabeled value {v}"));
                }
                Ok(CgValue::Loc(self.heap.alloc(v.clone())))
            }
            Thunk::Deref(l) => match self.heap.get(*l) {
                Some(v) => Ok(v.clone()),
                None => stuck(format!("dangling location {}", l.0)),
            },
            Thunk::Assign(l, v) => {
                if self.heap.set(*l, v.clone()) {
                    Ok(CgValue::Unit)
                } else {
                    stuck(format!("dangling location {}", l.0))
                }
            }
        }
    }
}

pub struct CgOutcome<'a> {
    pub heap: Heap<CgValue<'a>>,
    pub value: CgValue<'a>,
    pub steps: u64,
}

/// Pure evaluation of `e` under `env`; returns the value and steps used.
pub fn cg_eval_pure<'a>(e: &'a CgExpr, env: &CgEnv<'a>, fuel: u64) -> Result<(CgValue<'a>, u64), EvalError> {
    let mut machine = CgMachine::new(fuel);
    let value = machine.eval_pure(env, e)?;
    Ok((value, machine.steps()))
}

/// Force the computation `m` starting from `heap`.
pub fn cg_force<'a>(heap: Heap<CgValue<'a>>, m: &CgValue<'a>, fuel: u64) -> Result<CgOutcome<'a>, EvalError> {
    let mut machine = CgMachine::with_heap(heap, fuel);
    let value = machine.force(m)?;
    let steps = machine.steps();
    Ok(CgOutcome { heap: machine.heap, value, steps })
}

/// Pure-evaluate `e` and force the resulting computation, sharing one budget.
pub fn cg_run<'a>(
    heap: Heap<CgValue<'a>>,
    e: &'a CgExpr,
    env: &CgEnv<'a>,
    fuel: u64,
) -> Result<CgOutcome<'a>, EvalError> {
    let mut machine = CgMachine::with_heap(heap, fuel);
    let m = machine.eval_pure(env, e)?;
    let value = machine.force(&m)?;
    let steps = machine.steps();
    Ok(CgOutcome { heap: machine.heap, value, steps })
}
