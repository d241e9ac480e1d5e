//! Translation from CG to FG.
//!
//! A source judgment `Γ ⊢ e : τ` is mapped to a target `⟪Γ⟫ ⊢_⊤ e_F : ⟪τ⟫`.
//! Computations become thunks taking `unit`, and `Labeled ℓ τ` is coded as
//! the sum `(⟪τ⟫ + unit)^ℓ` whose right injection is never built.

use std::collections::{BTreeSet, HashSet};

use crate::cg::{CgChecker, CgCtx, CgExpr, CgType};
use crate::error::TranslateError;
use crate::fg::{FgChecker, FgCtx, FgExpr, FgType};
use crate::fresh::Fresh;
use crate::lattice::{Label, Lattice};
use crate::surface::Printer;
use crate::Mutation;

/// Name of the ignored `unit` parameter of translated thunks.
pub const THUNK_PARAM: &str = "_";

/// `⟪·⟫`.
pub fn cg2fg_type(lattice: &Lattice, t: &CgType) -> FgType {
    let (bot, top) = (lattice.bot(), lattice.top());
    let tr = |t: &CgType| cg2fg_type(lattice, t);
    match t {
        CgType::Bool => FgType::bool(bot),
        CgType::Unit => FgType::unit(bot),
        CgType::Fun(a, b) => FgType::fun(tr(a), top, tr(b), bot),
        CgType::Prod(a, b) => FgType::prod(tr(a), tr(b), bot),
        CgType::Sum(a, b) => FgType::sum(tr(a), tr(b), bot),
        CgType::Ref(l, a) => FgType::reference(coded(lattice, *l, a), bot),
        CgType::Labeled(l, a) => coded(lattice, *l, a),
        CgType::Slio(pc, taint, a) => FgType::fun(FgType::unit(bot), *pc, coded(lattice, *taint, a), bot),
    }
}

/// `(⟪τ⟫ + unit^⊥)^ℓ`.
fn coded(lattice: &Lattice, l: Label, t: &CgType) -> FgType {
    FgType::sum(cg2fg_type(lattice, t), FgType::unit(lattice.bot()), l)
}

pub fn cg2fg_ctx(lattice: &Lattice, ctx: &CgCtx) -> FgCtx {
    ctx.map(|t| cg2fg_type(lattice, t))
}

/// Output of [`cg2fg_expr`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cg2FgResult {
    pub target: FgExpr,
    pub source_type: CgType,
    /// `⟪source_type⟫`.
    pub target_type: FgType,
    /// Binders of the `inr` branches introduced for `bind`; evaluation of a
    /// correct translation never enters them.
    pub dead_binders: HashSet<String>,
}

pub struct Cg2Fg<'l> {
    lattice: &'l Lattice,
    checker: CgChecker<'l>,
    fresh: Fresh,
    dead: HashSet<String>,
    mutation: Mutation,
}

impl<'l> Cg2Fg<'l> {
    pub fn new(lattice: &'l Lattice, ctx: &CgCtx, e: &CgExpr) -> Self {
        let mut names = BTreeSet::new();
        e.names(&mut names);
        names.extend(ctx.iter().map(|(x, _)| x.to_string()));
        Cg2Fg {
            lattice,
            checker: CgChecker::new(lattice),
            fresh: Fresh::avoiding(names),
            dead: HashSet::new(),
            mutation: Mutation::None,
        }
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn run(mut self, ctx: &CgCtx, e: &CgExpr) -> Result<Cg2FgResult, TranslateError> {
        let source_type = self.checker.check_program(ctx, e)?;
        let mut ctx = ctx.clone();
        let target = self.tr(&mut ctx, e)?;
        let target_type = cg2fg_type(self.lattice, &source_type);
        Ok(Cg2FgResult { target, source_type, target_type, dead_binders: self.dead })
    }

    fn synth(&self, ctx: &mut CgCtx, e: &CgExpr) -> Result<CgType, TranslateError> {
        Ok(self.checker.synth(ctx, e)?)
    }

    fn ty(&self, t: &CgType) -> FgType {
        cg2fg_type(self.lattice, t)
    }

    fn unit_ty(&self) -> FgType {
        FgType::unit(self.lattice.bot())
    }

    /// `λ(_ : unit^⊥)[latent]. body`.
    fn thunk(&self, latent: Label, body: FgExpr) -> FgExpr {
        FgExpr::lam(THUNK_PARAM, self.unit_ty(), latent, body)
    }

    /// `inl v` at `⟪τ⟫ + unit^⊥`.
    fn inl_coded(&self, t: &CgType, v: FgExpr) -> FgExpr {
        FgExpr::inl(self.ty(t), self.unit_ty(), v)
    }

    fn force(e: FgExpr) -> FgExpr {
        FgExpr::app(e, FgExpr::Unit)
    }

    fn invariant<T>(&self, what: &str, t: &CgType) -> Result<T, TranslateError> {
        Err(TranslateError::Invariant(format!("expected {what}, found {}", Printer::new(self.lattice).cg_type(t))))
    }

    fn tr(&mut self, ctx: &mut CgCtx, e: &CgExpr) -> Result<FgExpr, TranslateError> {
        let top = self.lattice.top();
        Ok(match e {
            CgExpr::Var(x) => FgExpr::var(x),
            CgExpr::Unit => FgExpr::Unit,
            CgExpr::Bool(b) => FgExpr::Bool(*b),
            CgExpr::Lam { param, param_ty, body } => {
                let bt = ctx.with(param, param_ty.clone(), |ctx| self.tr(ctx, body))?;
                FgExpr::lam(param, self.ty(param_ty), top, bt)
            }
            CgExpr::App(f, a) => FgExpr::app(self.tr(ctx, f)?, self.tr(ctx, a)?),
            CgExpr::Pair(a, b) => FgExpr::pair(self.tr(ctx, a)?, self.tr(ctx, b)?),
            CgExpr::Fst(p) => FgExpr::fst(self.tr(ctx, p)?),
            CgExpr::Snd(p) => FgExpr::snd(self.tr(ctx, p)?),
            CgExpr::Inl { left, right, expr } => FgExpr::inl(self.ty(left), self.ty(right), self.tr(ctx, expr)?),
            CgExpr::Inr { left, right, expr } => FgExpr::inr(self.ty(left), self.ty(right), self.tr(ctx, expr)?),
            CgExpr::Case { scrut, left, right } => {
                let CgType::Sum(ta, tb) = self.synth(ctx, scrut)? else {
                    return Err(TranslateError::Invariant("case scrutinee is not a sum".into()));
                };
                let st = self.tr(ctx, scrut)?;
                let lt = ctx.with(&left.0, *ta, |ctx| self.tr(ctx, &left.1))?;
                let rt = ctx.with(&right.0, *tb, |ctx| self.tr(ctx, &right.1))?;
                let (lt, rt) = if self.mutation == Mutation::SwapCase { (rt, lt) } else { (lt, rt) };
                FgExpr::case(st, left.0.clone(), lt, right.0.clone(), rt)
            }
            CgExpr::If(c, t, f) => {
                let (ct, tt, ft) = (self.tr(ctx, c)?, self.tr(ctx, t)?, self.tr(ctx, f)?);
                let (tt, ft) = if self.mutation == Mutation::SwapCase { (ft, tt) } else { (tt, ft) };
                FgExpr::if_(ct, tt, ft)
            }
            CgExpr::BoolOp(op, a, b) => FgExpr::BoolOp(*op, Box::new(self.tr(ctx, a)?), Box::new(self.tr(ctx, b)?)),
            CgExpr::Not(a) => FgExpr::not(self.tr(ctx, a)?),
            CgExpr::Label(_, inner) => {
                let t = self.synth(ctx, inner)?;
                let it = self.tr(ctx, inner)?;
                self.inl_coded(&t, it)
            }
            CgExpr::Unlabel(inner) => {
                let it = self.tr(ctx, inner)?;
                self.thunk(top, it)
            }
            CgExpr::Ret(inner) => {
                let t = self.synth(ctx, inner)?;
                let it = self.tr(ctx, inner)?;
                self.thunk(top, self.inl_coded(&t, it))
            }
            CgExpr::ToLabeled(inner) => {
                let t = self.synth(ctx, inner)?;
                let CgType::Slio(pc, taint, payload) = &t else {
                    return self.invariant("a computation", &t);
                };
                let it = self.tr(ctx, inner)?;
                let labeled = CgType::labeled(*taint, (**payload).clone());
                self.thunk(*pc, self.inl_coded(&labeled, Self::force(it)))
            }
            CgExpr::Bind { first, var, body } => {
                let t = self.synth(ctx, e)?;
                let CgType::Slio(pc, _, result) = &t else {
                    return self.invariant("a computation", &t);
                };
                let t1 = self.synth(ctx, first)?;
                let CgType::Slio(_, _, payload) = t1 else {
                    return self.invariant("a computation", &t1);
                };
                let ft = self.tr(ctx, first)?;
                let bt = ctx.with(var, *payload, |ctx| self.tr(ctx, body))?;
                let y = self.fresh.name("y");
                self.dead.insert(y.clone());
                let dead = FgExpr::inr(self.ty(result), self.unit_ty(), FgExpr::Unit);
                self.thunk(*pc, FgExpr::case(Self::force(ft), var.clone(), Self::force(bt), y, dead))
            }
            // Reconstructed: allocation writes at the cell's label, so the
            // thunk's latent label is that label.
            CgExpr::New { init, .. } => {
                let t = self.synth(ctx, e)?;
                let CgType::Slio(_, _, reference) = &t else {
                    return self.invariant("a computation", &t);
                };
                let CgType::Ref(l, payload) = &**reference else {
                    return self.invariant("a reference", reference);
                };
                let it = self.tr(ctx, init)?;
                let alloc = FgExpr::new_ref(it, coded(self.lattice, *l, payload));
                self.thunk(*l, self.inl_coded(reference, alloc))
            }
            // Reconstructed: reading has no write effect, so latent label ⊤.
            CgExpr::Deref(r) => {
                let t = self.synth(ctx, r)?;
                let CgType::Ref(l, payload) = &t else {
                    return self.invariant("a reference", &t);
                };
                let rt = self.tr(ctx, r)?;
                let labeled = CgType::labeled(*l, (**payload).clone());
                self.thunk(top, self.inl_coded(&labeled, FgExpr::deref(rt)))
            }
            // Reconstructed: writing to `ref ℓ τ` is an effect at ℓ.
            CgExpr::Assign(r, v) => {
                let t = self.synth(ctx, r)?;
                let CgType::Ref(l, _) = &t else {
                    return self.invariant("a reference", &t);
                };
                let rt = self.tr(ctx, r)?;
                let vt = self.tr(ctx, v)?;
                self.thunk(*l, self.inl_coded(&CgType::Unit, FgExpr::assign(rt, vt)))
            }
        })
    }
}

/// Translate `e` typed as `Γ ⊢ e : τ`.
pub fn cg2fg_expr(lattice: &Lattice, ctx: &CgCtx, e: &CgExpr) -> Result<Cg2FgResult, TranslateError> {
    Cg2Fg::new(lattice, ctx, e).run(ctx, e)
}

/// Typecheck a translation's target at pc ⊤ and confirm its type is below
/// `⟪τ⟫`; returns the target's synthesized type.
pub fn check_cg2fg(lattice: &Lattice, ctx: &CgCtx, result: &Cg2FgResult) -> Result<FgType, TranslateError> {
    let checker = FgChecker::new(lattice);
    let got = checker
        .check_program(&cg2fg_ctx(lattice, ctx), lattice.top(), &result.target)
        .map_err(|e| TranslateError::Invariant(format!("target is ill-typed: {e}")))?;
    if checker.subtype(&got, &result.target_type) {
        Ok(got)
    } else {
        let p = Printer::new(lattice);
        Err(TranslateError::Invariant(format!(
            "target has type {}, expected a subtype of {}",
            p.fg_type(&got),
            p.fg_type(&result.target_type)
        )))
    }
}
